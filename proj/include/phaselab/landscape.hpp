#pragma once

#include "phaselab/data_model.hpp"
#include "phaselab/parallel.hpp"
#include "phaselab/special_math.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace phaselab {

// Projections (u.x, v.x, w_perp.x) and labels of one shared pool of labeled samples.
struct ProjectionPool {
    std::vector<double> a, b, c;
    std::vector<int> y;

    std::size_t size() const { return y.size(); }
};

struct LandscapeCell {
    double alpha_u = 0, alpha_v = 0;
    double loss_mean = 0, loss_stderr = 0;
    std::size_t n_mc = 0;
    bool inside = false;
};

struct Landscape {
    int resolution = 0;
    std::vector<LandscapeCell> cells;  // row-major, alpha_v outer
    std::vector<double> w_perp;
    ProjectionPool pool;

    double coordinate(int i) const { return -1.0 + 2.0 * i / (resolution - 1); }
    double spacing() const { return 2.0 / (resolution - 1); }
    const LandscapeCell& at(int iu, int iv) const { return cells[static_cast<std::size_t>(iv) * resolution + iu]; }
};

ProjectionPool draw_projection_pool(const CirculantSpectrum& spec, const PlantSpec& plant,
                                    std::span<const double> w_perp, std::size_t n, std::uint64_t seed, Exec exec);

// Every cell averages the correlation loss over the same pool of n_mc samples
// (common random numbers), with w = a_u u + a_v v + sqrt(1 - a_u^2 - a_v^2) w_perp.
Landscape empirical_landscape(const CirculantSpectrum& spec, const PlantSpec& plant, const Activation& sigma,
                              int grid_resolution, std::size_t n_mc, std::uint64_t seed, Exec exec = Exec::parallel);

// Cell evaluation only, for benchmarking and for reuse with a fixed pool.
void evaluate_cells(Landscape& land, const Activation& sigma, Exec exec);

struct PairedDifference {
    double mean = 0, se = 0;
};
// Mean and SE of the per-sample loss difference between two overlap points on the shared pool.
PairedDifference paired_difference(const Landscape& land, const Activation& sigma, double au1, double av1,
                                   double au2, double av2);

struct SectorMinimum {
    double expected_theta = 0;
    int iu = 0, iv = 0;
    double alpha_u = 0, alpha_v = 0, loss = 0;
    // Chebyshev distance in cells to the grid point nearest the expected minimum.
    int cell_offset = 0;
};
// Lowest cell within each quarter sector centred on theta = 0, pi/2, pi, 3pi/2.
std::vector<SectorMinimum> sector_minima(const Landscape& land);

struct SymmetryReport {
    std::size_t pairs = 0;
    double fraction_within = 0;  // fraction of paired |z| <= 3 over both symmetries
    double max_z = 0;
    // Bonferroni critical |z| for a 1% family-wise level over all pairs.
    double family_critical = 0;
    bool family_pass() const { return max_z <= family_critical; }
};
// L(a_u, a_v) against L(-a_u, -a_v) and L(a_v, -a_u). Pairs whose per-sample
// differences vanish to rounding (exact symmetries of the pool) score z = 0.
SymmetryReport four_fold_symmetry(const Landscape& land, const Activation& sigma, Exec exec = Exec::parallel);

void write_landscape_csv(std::ostream& os, const Landscape& land);

}  // namespace phaselab
