#include "phaselab/special_math.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace phaselab {

double hermite_poly(int k, double x) {
    if (k < 0) throw std::invalid_argument("hermite_poly: negative order");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int j = 1; j < k; ++j) {
        double next = x * cur - j * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> hermite_all(int kmax, double x) {
    std::vector<double> h(static_cast<std::size_t>(kmax) + 1);
    h[0] = 1.0;
    if (kmax >= 1) h[1] = x;
    for (int j = 1; j < kmax; ++j) h[j + 1] = x * h[j] - j * h[j - 1];
    return h;
}

double bessel_j(int m, double z) {
    if (m < 0) throw std::domain_error("bessel_j: negative order");
    if (!(std::abs(z) < 50.0)) throw std::domain_error("bessel_j: |z| must be below 50");
    if (z == 0.0) return m == 0 ? 1.0 : 0.0;
    const long double half = static_cast<long double>(z) / 2;
    long double term = std::pow(half, static_cast<long double>(m)) / std::tgamma(static_cast<long double>(m) + 1);
    long double sum = term;
    const long double q = -half * half;
    for (int s = 1; s < 500; ++s) {
        term *= q / (static_cast<long double>(s) * (m + s));
        sum += term;
        if (std::abs(term) < 1e-16L * std::max(1.0L, std::abs(sum)) && s > half) break;
    }
    return static_cast<double>(sum);
}

double rayleigh_moment(double sigma, int k) {
    if (!(sigma > 0)) throw std::domain_error("rayleigh_moment: sigma must be positive");
    if (k < 1) throw std::domain_error("rayleigh_moment: order must be at least 1");
    return std::pow(sigma, k) * std::pow(2.0, k / 2.0) * std::tgamma(1.0 + k / 2.0);
}

Activation::Activation(ActivationKind kind, std::string name, Fn value, Fn derivative)
    : kind_(kind), name_(std::move(name)), value_(std::move(value)), deriv_(std::move(derivative)) {}

Activation Activation::hermite4() {
    return {ActivationKind::hermite4, "hermite4",
            [](double s) { double s2 = s * s; return s2 * s2 - 6.0 * s2 + 3.0; },
            [](double s) { return 4.0 * s * s * s - 12.0 * s; }};
}

Activation Activation::logcosh() {
    return {ActivationKind::logcosh, "logcosh",
            [](double s) { double a = std::abs(s); return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2; },
            [](double s) { return std::tanh(s); }};
}

Activation Activation::user(std::string name, Fn value, Fn derivative) {
    return {ActivationKind::user, std::move(name), std::move(value), std::move(derivative)};
}

Activation Activation::from_name(const std::string& name) {
    if (name == "hermite4" || name == "h4") return hermite4();
    if (name == "logcosh") return logcosh();
    if (name == "relu")
        return user("relu", [](double s) { return s > 0 ? s : 0.0; }, [](double s) { return s > 0 ? 1.0 : 0.0; });
    if (name == "tanh")
        return user("tanh", [](double s) { return std::tanh(s); },
                    [](double s) { double t = std::tanh(s); return 1.0 - t * t; });
    if (name == "abs")
        return user("abs", [](double s) { return std::abs(s); },
                    [](double s) { return s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0); });
    throw std::invalid_argument("unknown activation '" + name + "'");
}

bool Activation::is_even(double tol) const {
    for (int i = 0; i <= 200; ++i) {
        double s = 0.05 * i;
        double f = value_(s), df = deriv_(s);
        if (std::abs(f - value_(-s)) > tol * std::max(1.0, std::abs(f))) return false;
        if (std::abs(df + deriv_(-s)) > tol * std::max(1.0, std::abs(df))) return false;
    }
    return true;
}

const GaussHermiteRule& gauss_hermite_rule(int order) {
    static std::mutex mu;
    static std::map<int, GaussHermiteRule> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
    if (order < 1) throw std::invalid_argument("gauss_hermite_rule: order must be positive");

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(std::max(order - 1, 0));
    for (int i = 0; i + 1 < order; ++i) sub[i] = std::sqrt(static_cast<double>(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

    GaussHermiteRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = solver.eigenvalues()[i];
        double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = v0 * v0;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

namespace {

double quadrature(const Activation& sigma, int k, int order) {
    const auto& rule = gauss_hermite_rule(order);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * sigma(rule.nodes[i]) * hermite_poly(k, rule.nodes[i]);
    return acc;
}

}  // namespace

double hermite_coeff(const Activation& sigma, int k, int order, double tol) {
    if (k < 0) throw std::invalid_argument("hermite_coeff: negative order");
    double coarse = quadrature(sigma, k, order);
    double fine = quadrature(sigma, k, 2 * order);
    if (std::abs(fine - coarse) > tol)
        throw QuadratureNonConvergence("hermite_coeff: order " + std::to_string(order) + " vs " +
                                       std::to_string(2 * order) + " differ by " + std::to_string(std::abs(fine - coarse)));
    return fine;
}

HermiteCoeffs hermite_coeffs(const Activation& sigma, int max_order, int order, double tol) {
    HermiteCoeffs out;
    out.max_order = max_order;
    for (int k = 0; k <= max_order; ++k) out.c.push_back(hermite_coeff(sigma, k, order, tol));
    return out;
}

}  // namespace phaselab
