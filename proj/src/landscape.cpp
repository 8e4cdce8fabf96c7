#include "phaselab/landscape.hpp"

#include "phaselab/monte_carlo.hpp"
#include "phaselab/stat_checks.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace phaselab {

namespace {

double perp_weight(double au, double av) { return std::sqrt(std::max(0.0, 1.0 - au * au - av * av)); }

struct PoolPart {
    ProjectionPool p;
    PoolPart& operator+=(const PoolPart& o) {
        p.a.insert(p.a.end(), o.p.a.begin(), o.p.a.end());
        p.b.insert(p.b.end(), o.p.b.begin(), o.p.b.end());
        p.c.insert(p.c.end(), o.p.c.begin(), o.p.c.end());
        p.y.insert(p.y.end(), o.p.y.begin(), o.p.y.end());
        return *this;
    }
};

}  // namespace

ProjectionPool draw_projection_pool(const CirculantSpectrum& spec, const PlantSpec& plant,
                                    std::span<const double> w_perp, std::size_t n, std::uint64_t seed, Exec exec) {
    DftBasis basis(spec.size());
    const auto u = basis.cosine(plant.k0), v = basis.sine(plant.k0);
    auto out = monte_carlo(spec, std::optional<PlantSpec>(plant), n, seed, exec, PoolPart{},
                           [&](FourierSampler& s, RngStream& rng, std::vector<double>& x, PoolPart& part) {
                               part.p.y.push_back(s.sample_labeled(rng, x));
                               part.p.a.push_back(dot(u, x));
                               part.p.b.push_back(dot(v, x));
                               part.p.c.push_back(dot(w_perp, x));
                           });
    return std::move(out.p);
}

void evaluate_cells(Landscape& land, const Activation& sigma, Exec exec) {
    const auto& pool = land.pool;
    parallel_for(land.cells.size(), exec, [&](std::size_t idx) {
        auto& cell = land.cells[idx];
        if (!cell.inside) return;
        const double wc = perp_weight(cell.alpha_u, cell.alpha_v);
        MeanAccumulator acc;
        for (std::size_t i = 0; i < pool.size(); ++i)
            acc.add(1.0 - pool.y[i] * sigma(cell.alpha_u * pool.a[i] + cell.alpha_v * pool.b[i] + wc * pool.c[i]));
        cell.loss_mean = acc.mean();
        cell.loss_stderr = acc.sem();
        cell.n_mc = pool.size();
    });
}

Landscape empirical_landscape(const CirculantSpectrum& spec, const PlantSpec& plant, const Activation& sigma,
                              int grid_resolution, std::size_t n_mc, std::uint64_t seed, Exec exec) {
    if (grid_resolution < 3) throw std::invalid_argument("empirical_landscape: grid needs at least 3 points per axis");
    plant.validate(spec.size());
    Landscape land;
    land.resolution = grid_resolution;
    land.w_perp = random_orthogonal_direction(spec.size(), plant.k0, derive_seed(seed, 0));
    land.pool = draw_projection_pool(spec, plant, land.w_perp, n_mc, derive_seed(seed, 1), exec);
    land.cells.resize(static_cast<std::size_t>(grid_resolution) * grid_resolution);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int iv = 0; iv < grid_resolution; ++iv)
        for (int iu = 0; iu < grid_resolution; ++iu) {
            auto& cell = land.cells[static_cast<std::size_t>(iv) * grid_resolution + iu];
            cell.alpha_u = land.coordinate(iu);
            cell.alpha_v = land.coordinate(iv);
            cell.inside = cell.alpha_u * cell.alpha_u + cell.alpha_v * cell.alpha_v <= 1.0 + 1e-12;
            cell.loss_mean = cell.loss_stderr = nan;
        }
    evaluate_cells(land, sigma, exec);
    return land;
}

PairedDifference paired_difference(const Landscape& land, const Activation& sigma, double au1, double av1,
                                   double au2, double av2) {
    const auto& pool = land.pool;
    const double c1 = perp_weight(au1, av1), c2 = perp_weight(au2, av2);
    MeanAccumulator acc;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        double s1 = sigma(au1 * pool.a[i] + av1 * pool.b[i] + c1 * pool.c[i]);
        double s2 = sigma(au2 * pool.a[i] + av2 * pool.b[i] + c2 * pool.c[i]);
        acc.add(-pool.y[i] * (s1 - s2));
    }
    return {acc.mean(), acc.sem()};
}

std::vector<SectorMinimum> sector_minima(const Landscape& land) {
    std::vector<SectorMinimum> out;
    const int r = land.resolution;
    for (int q = 0; q < 4; ++q) {
        const double theta = q * std::numbers::pi / 2.0;
        SectorMinimum best;
        best.expected_theta = theta;
        best.loss = std::numeric_limits<double>::infinity();
        for (int iv = 0; iv < r; ++iv)
            for (int iu = 0; iu < r; ++iu) {
                const auto& c = land.at(iu, iv);
                if (!c.inside || (c.alpha_u == 0.0 && c.alpha_v == 0.0)) continue;
                double d = std::remainder(std::atan2(c.alpha_v, c.alpha_u) - theta, 2.0 * std::numbers::pi);
                if (d < -std::numbers::pi / 4 || d >= std::numbers::pi / 4) continue;
                if (c.loss_mean < best.loss) {
                    best.loss = c.loss_mean;
                    best.iu = iu;
                    best.iv = iv;
                    best.alpha_u = c.alpha_u;
                    best.alpha_v = c.alpha_v;
                }
            }
        const int eu = static_cast<int>(std::lround((std::cos(theta) + 1.0) / land.spacing()));
        const int ev = static_cast<int>(std::lround((std::sin(theta) + 1.0) / land.spacing()));
        best.cell_offset = std::max(std::abs(best.iu - eu), std::abs(best.iv - ev));
        out.push_back(best);
    }
    return out;
}

SymmetryReport four_fold_symmetry(const Landscape& land, const Activation& sigma, Exec exec) {
    const int r = land.resolution;
    struct Pair {
        int a_u, a_v, b_u, b_v;
    };
    std::vector<Pair> pairs;
    for (int iv = 0; iv < r; ++iv)
        for (int iu = 0; iu < r; ++iu) {
            if (!land.at(iu, iv).inside || (2 * iu == r - 1 && 2 * iv == r - 1)) continue;
            const int ju = r - 1 - iu, jv = r - 1 - iv;
            if (iv * r + iu < jv * r + ju) pairs.push_back({iu, iv, ju, jv});
            pairs.push_back({iu, iv, iv, r - 1 - iu});
        }
    std::vector<double> z(pairs.size());
    parallel_for(pairs.size(), exec, [&](std::size_t k) {
        const auto& p = pairs[k];
        const auto& a = land.at(p.a_u, p.a_v);
        const auto& b = land.at(p.b_u, p.b_v);
        auto d = paired_difference(land, sigma, a.alpha_u, a.alpha_v, b.alpha_u, b.alpha_v);
        const double scale = 1.0 + std::abs(a.loss_mean) + std::abs(b.loss_mean);
        z[k] = d.se > 1e-12 * scale ? std::abs(d.mean) / d.se : 0.0;
    });
    SymmetryReport rep;
    rep.pairs = pairs.size();
    std::size_t within = 0;
    for (double v : z) {
        within += v <= 3.0;
        rep.max_z = std::max(rep.max_z, v);
    }
    rep.fraction_within = pairs.empty() ? 1.0 : static_cast<double>(within) / static_cast<double>(pairs.size());
    const double tail = 0.01 / (2.0 * static_cast<double>(std::max<std::size_t>(pairs.size(), 1)));
    rep.family_critical = boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
    return rep;
}

void write_landscape_csv(std::ostream& os, const Landscape& land) {
    os << "alpha_u,alpha_v,loss_mean,loss_stderr,n_mc\n" << std::setprecision(10);
    for (const auto& c : land.cells)
        os << c.alpha_u << ',' << c.alpha_v << ',' << c.loss_mean << ',' << c.loss_stderr << ',' << c.n_mc << "\n";
}

}  // namespace phaselab
