#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

struct QuadratureNonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probabilists' Hermite polynomial by three-term recurrence.
double hermite_poly(int k, double x);
// h_0(x) .. h_kmax(x).
std::vector<double> hermite_all(int kmax, double x);

// Ascending series; m >= 0 and |z| < 50.
double bessel_j(int m, double z);

// E[Y^k] for Y ~ Rayleigh(sigma).
double rayleigh_moment(double sigma, int k);

enum class ActivationKind { hermite4, logcosh, user };

class Activation {
public:
    using Fn = std::function<double(double)>;

    static Activation hermite4();
    static Activation logcosh();
    static Activation user(std::string name, Fn value, Fn derivative);
    // Named built-ins: "hermite4"/"h4", "logcosh", "relu", "tanh", "abs".
    static Activation from_name(const std::string& name);

    ActivationKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double operator()(double s) const { return value_(s); }
    double derivative(double s) const { return deriv_(s); }

    // sigma even and sigma' odd on a symmetric grid.
    bool is_even(double tol = 1e-12) const;

private:
    Activation(ActivationKind kind, std::string name, Fn value, Fn derivative);

    ActivationKind kind_;
    std::string name_;
    Fn value_, deriv_;
};

// Nodes and weights for E[f(Z)], Z ~ N(0,1), by Golub-Welsch.
struct GaussHermiteRule {
    std::vector<double> nodes, weights;
};
const GaussHermiteRule& gauss_hermite_rule(int order);

// c_k = E[sigma(Z) h_k(Z)]; throws if doubling the order moves it by more than tol.
double hermite_coeff(const Activation& sigma, int k, int order = 80, double tol = 1e-8);

struct HermiteCoeffs {
    std::vector<double> c;
    int max_order = 0;
    double operator[](int k) const { return k <= max_order ? c[static_cast<std::size_t>(k)] : 0.0; }
};
HermiteCoeffs hermite_coeffs(const Activation& sigma, int max_order, int order = 80, double tol = 1e-8);

}  // namespace phaselab
