#pragma once

#include "dirac/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dirac {

using ScalarField = std::function<double(double t, double x)>;
using SpinorFunction = std::function<Spinor(double x)>;

/// Electric potential V and magnetic potential A1 with declared sup bounds.
struct PotentialPair {
    ScalarField V;
    ScalarField A1;
    bool time_independent = true;
    double V_max = 0.0;
    double A_max = 0.0;

    static PotentialPair zero();
};

/// i dPhi/dt = (-i sigma1 d/dx + sigma3) Phi + eps (V I - A1 sigma1) Phi on a periodic interval.
///
/// The problem is grid-free; discretisations pick a TorusGrid over `domain`.
/// The run horizon is T0/eps (or T0 itself when eps == 0).
struct DiracProblem {
    std::string name;  // stable identity used for cache keys
    double a = 0.0;
    double b = 1.0;
    double epsilon = 1.0;
    double T0 = 1.0;
    PotentialPair potentials;
    SpinorFunction phi0;
    std::optional<SpinorFunction> phi0_deriv;

    double final_time() const { return epsilon > 0.0 ? T0 / epsilon : T0; }
    /// Grid on [a, b) with spacing as close to h as an even node count allows.
    TorusGrid grid_for_h(double h) const;
    TorusGrid grid(int n) const { return make_grid(a, b, n); }
    /// Phi0 sampled at the nodes.
    SpinorField initial_field(const TorusGrid& g) const;
    /// Phi0' at the nodes: analytic when available, pseudospectral otherwise.
    SpinorField initial_derivative(const TorusGrid& g) const;
    /// Throws ConfigError when the problem is malformed.
    void validate() const;
};

/// Per-node G_j = eps (V(t, x_j) I - A1(t, x_j) sigma1); Hermitian.
std::vector<Mat2> sample_potential_matrix(const PotentialPair& p, double eps, double t, const TorusGrid& grid);

/// Result of the dense sampling check of declared bounds.
struct BoundCheck {
    double V_sampled = 0.0;
    double A_sampled = 0.0;
    bool ok = true;
};

/// Samples V and A1 on 16N points x 100 times over [0, t_end]; violations are reported, not thrown.
BoundCheck check_potential_bounds(const PotentialPair& p, const TorusGrid& grid, double t_end);

/// h sum |f_j|^2.
double mass(const SpinorField& f);
/// Discrete energy with the centred difference in the kinetic term.
double energy_fd(const SpinorField& f, const PotentialPair& p, double eps);
/// Discrete energy with the pseudospectral derivative in the kinetic term.
double energy_fp(const SpinorField& f, const PotentialPair& p, double eps);

/// rho_j = |phi1|^2 + |phi2|^2.
std::vector<double> density(const SpinorField& f);
/// J1_j = Phi* sigma1 Phi = 2 Re(conj(phi1) phi2).
std::vector<double> current(const SpinorField& f);

/// max_j |(rho_next - rho_prev)/tau + delta_x((J_prev + J_next)/2)_j|.
double continuity_residual(const SpinorField& f_prev, const SpinorField& f_next, double tau);

struct Observables {
    double mass = 0.0;
    double energy = 0.0;
    std::vector<double> rho;
    std::vector<double> current;
};

namespace presets {

/// Torus (0, 2pi): V = 1/(1+sin^2 x), A1 = cos x + sin 2x,
/// phi1 = 1/(1+sin^2 x), phi2 = 1/(3+cos x). Errors reported at t = 2/eps.
DiracProblem periodic_smooth(double epsilon, double T0 = 2.0);

/// Truncated whole-space problem on (-7 - T0/eps, 7 + T0/eps):
/// V = (1-x)/(1+x^2), A1 = (1+x)^2/(1+x^2), Gaussian spinor with S0 = (1+cos 2pi x)/40.
DiracProblem whole_space_gaussian(double epsilon, double T0 = 1.0);

/// Torus (0, 2pi), Phi0 = (cos x, cos x), V = 1/(1+sin^2 x), A1 = (1+sin x)/(2+cos 4x).
DiracProblem periodic_cosine(double epsilon, double T0 = 2.0);

/// Torus (0, 2pi) with zero potentials and a band-limited (|l| <= 2) initial spinor.
DiracProblem free_bandlimited(double T_final = 2.0);

/// Looks up a preset by its CLI name; throws ConfigError for unknown names.
/// T0 defaults to the preset's own horizon.
DiracProblem by_name(const std::string& name, double epsilon, std::optional<double> T0 = std::nullopt);

std::vector<std::string> names();

}  // namespace presets

}  // namespace dirac
