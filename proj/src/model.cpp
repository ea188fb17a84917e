#include "dirac/model.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace dirac {

PotentialPair PotentialPair::zero() {
    return {[](double, double) { return 0.0; }, [](double, double) { return 0.0; }, true, 0.0, 0.0};
}

TorusGrid DiracProblem::grid_for_h(double h) const {
    if (!(h > 0.0)) throw ConfigError("mesh size must be positive");
    int n = static_cast<int>(std::ceil((b - a) / h - 1e-9));
    if (n % 2 != 0) ++n;
    return make_grid(a, b, n);
}

SpinorField DiracProblem::initial_field(const TorusGrid& g) const {
    SpinorField f(g);
    for (int j = 0; j < g.size(); ++j) f[j] = phi0(g.x(j));
    return f;
}

SpinorField DiracProblem::initial_derivative(const TorusGrid& g) const {
    if (!phi0_deriv) return spectral_derivative(initial_field(g));
    SpinorField f(g);
    for (int j = 0; j < g.size(); ++j) f[j] = (*phi0_deriv)(g.x(j));
    return f;
}

void DiracProblem::validate() const {
    if (!(b > a)) throw ConfigError("problem: empty domain");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("problem: epsilon must lie in [0, 1]");
    if (!(T0 > 0.0)) throw ConfigError("problem: T0 must be positive");
    if (!potentials.V || !potentials.A1 || !phi0) throw ConfigError("problem: missing potentials or initial data");
    if (potentials.V_max < 0.0 || potentials.A_max < 0.0) throw ConfigError("problem: negative potential bound");
}

std::vector<Mat2> sample_potential_matrix(const PotentialPair& p, double eps, double t, const TorusGrid& grid) {
    std::vector<Mat2> g(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j);
        const double v = p.V(t, x);
        const double a1 = p.A1(t, x);
        if (!std::isfinite(v) || !std::isfinite(a1))
            throw EvaluationError("potential is not finite at t=" + std::to_string(t) + ", x=" + std::to_string(x));
        g[static_cast<std::size_t>(j)] = {eps * v, -eps * a1, -eps * a1, eps * v};
    }
    return g;
}

BoundCheck check_potential_bounds(const PotentialPair& p, const TorusGrid& grid, double t_end) {
    BoundCheck out;
    const int nx = 16 * grid.size();
    const int nt = p.time_independent ? 1 : 100;
    for (int k = 0; k < nt; ++k) {
        const double t = nt == 1 ? 0.0 : t_end * k / (nt - 1);
        for (int i = 0; i < nx; ++i) {
            const double x = grid.a() + grid.length() * i / nx;
            out.V_sampled = std::max(out.V_sampled, std::abs(p.V(t, x)));
            out.A_sampled = std::max(out.A_sampled, std::abs(p.A1(t, x)));
        }
    }
    const double slack = 1e-12;
    out.ok = out.V_sampled <= p.V_max * (1 + slack) + slack && out.A_sampled <= p.A_max * (1 + slack) + slack;
    if (!out.ok)
        std::cerr << "warning: declared potential bounds (V_max=" << p.V_max << ", A_max=" << p.A_max
                  << ") are below sampled maxima (" << out.V_sampled << ", " << out.A_sampled << ")\n";
    return out;
}

double mass(const SpinorField& f) {
    const double n2 = norm(f, NormKind::l2);
    return n2 * n2;
}

namespace {

double assemble_energy(const SpinorField& f, const SpinorField& df, const PotentialPair& p, double eps) {
    if (!p.time_independent) throw ContractError("energy is only defined for time-independent potentials");
    const auto& g = f.grid;
    Complex sum{};
    double scale = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        const Spinor& u = f[j];
        const double x = g.x(j);
        const double v = p.V(0.0, x);
        const double a1 = p.A1(0.0, x);
        const Spinor s1du = pauli::sigma1 * df[j];
        sum += -kI * dot(u, s1du);
        sum += dot(u, pauli::sigma3 * u);
        sum += eps * v * u.norm2();
        sum -= eps * a1 * dot(u, pauli::sigma1 * u);
        scale += u.abs() * df[j].abs() + u.norm2() * (1.0 + eps * (std::abs(v) + std::abs(a1)));
    }
    sum *= g.h();
    scale *= g.h();
    if (std::abs(sum.imag()) > 1e-12 * scale + 1e-300)
        throw ContractError("energy assembly produced a non-negligible imaginary part");
    return sum.real();
}

}  // namespace

double energy_fd(const SpinorField& f, const PotentialPair& p, double eps) {
    return assemble_energy(f, centered_difference(f), p, eps);
}

double energy_fp(const SpinorField& f, const PotentialPair& p, double eps) {
    return assemble_energy(f, spectral_derivative(f), p, eps);
}

std::vector<double> density(const SpinorField& f) {
    std::vector<double> rho(f.values.size());
    for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = f.values[j].norm2();
    return rho;
}

std::vector<double> current(const SpinorField& f) {
    std::vector<double> J(f.values.size());
    for (std::size_t j = 0; j < J.size(); ++j) J[j] = 2.0 * (std::conj(f.values[j].up) * f.values[j].down).real();
    return J;
}

double continuity_residual(const SpinorField& f_prev, const SpinorField& f_next, double tau) {
    if (!(f_prev.grid == f_next.grid)) throw ContractError("continuity_residual: grid mismatch");
    const auto rp = density(f_prev), rn = density(f_next);
    const auto jp = current(f_prev), jn = current(f_next);
    const int n = f_prev.size();
    const double inv2h = 1.0 / (2.0 * f_prev.grid.h());
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto r = static_cast<std::size_t>(j + 1 < n ? j + 1 : 0);
        const auto l = static_cast<std::size_t>(j > 0 ? j - 1 : n - 1);
        const double dJ = 0.5 * ((jp[r] + jn[r]) - (jp[l] + jn[l])) * inv2h;
        const auto i = static_cast<std::size_t>(j);
        worst = std::max(worst, std::abs((rn[i] - rp[i]) / tau + dJ));
    }
    return worst;
}

namespace presets {

namespace {
constexpr double kPi = std::numbers::pi;
}

DiracProblem periodic_smooth(double epsilon, double T0) {
    DiracProblem p;
    p.name = "periodic-smooth";
    p.a = 0.0;
    p.b = 2.0 * kPi;
    p.epsilon = epsilon;
    p.T0 = T0;
    p.potentials.V = [](double, double x) { const double s = std::sin(x); return 1.0 / (1.0 + s * s); };
    p.potentials.A1 = [](double, double x) { return std::cos(x) + std::sin(2.0 * x); };
    p.potentials.time_independent = true;
    p.potentials.V_max = 1.0;
    p.potentials.A_max = 1.7601725930424077;  // max |cos x + sin 2x|
    p.phi0 = [](double x) {
        const double s = std::sin(x);
        return Spinor{1.0 / (1.0 + s * s), 1.0 / (3.0 + std::cos(x))};
    };
    p.phi0_deriv = [](double x) {
        const double s = std::sin(x), c = std::cos(x);
        const double d1 = 1.0 + s * s, d2 = 3.0 + c;
        return Spinor{-2.0 * s * c / (d1 * d1), s / (d2 * d2)};
    };
    return p;
}

DiracProblem whole_space_gaussian(double epsilon, double T0) {
    if (!(epsilon > 0.0)) throw ConfigError("whole-space preset needs epsilon > 0");
    DiracProblem p;
    p.name = "whole-space-gaussian";
    p.a = -7.0 - T0 / epsilon;
    p.b = 7.0 + T0 / epsilon;
    p.epsilon = epsilon;
    p.T0 = T0;
    p.potentials.V = [](double, double x) { return (1.0 - x) / (1.0 + x * x); };
    p.potentials.A1 = [](double, double x) { return (1.0 + x) * (1.0 + x) / (1.0 + x * x); };
    p.potentials.time_independent = true;
    p.potentials.V_max = (1.0 + std::numbers::sqrt2) / 2.0;  // at x = 1 - sqrt 2
    p.potentials.A_max = 2.0;                                 // at x = 1
    p.phi0 = [](double x) {
        const double s0 = (1.0 + std::cos(2.0 * kPi * x)) / 40.0;
        const double ds0 = -2.0 * kPi * std::sin(2.0 * kPi * x) / 40.0;
        const Complex amp = 0.5 * std::exp(-4.0 * x * x) * std::exp(kI * s0);
        return Spinor{amp * (1.0 + std::sqrt(1.0 + ds0 * ds0)), amp * ds0};
    };
    return p;
}

DiracProblem periodic_cosine(double epsilon, double T0) {
    DiracProblem p;
    p.name = "periodic-cosine";
    p.a = 0.0;
    p.b = 2.0 * kPi;
    p.epsilon = epsilon;
    p.T0 = T0;
    p.potentials.V = [](double, double x) { const double s = std::sin(x); return 1.0 / (1.0 + s * s); };
    p.potentials.A1 = [](double, double x) { return (1.0 + std::sin(x)) / (2.0 + std::cos(4.0 * x)); };
    p.potentials.time_independent = true;
    p.potentials.V_max = 1.0;
    p.potentials.A_max = 1.715989131176261;
    p.phi0 = [](double x) { return Spinor{std::cos(x), std::cos(x)}; };
    p.phi0_deriv = [](double x) { return Spinor{-std::sin(x), -std::sin(x)}; };
    return p;
}

DiracProblem free_bandlimited(double T_final) {
    DiracProblem p;
    p.name = "free-bandlimited";
    p.a = 0.0;
    p.b = 2.0 * kPi;
    p.epsilon = 0.0;
    p.T0 = T_final;
    p.potentials = PotentialPair::zero();
    p.phi0 = [](double x) {
        return Spinor{std::cos(x) + 0.5 * kI * std::sin(2.0 * x), 0.5 + std::sin(x)};
    };
    p.phi0_deriv = [](double x) {
        return Spinor{-std::sin(x) + kI * std::cos(2.0 * x), std::cos(x)};
    };
    return p;
}

DiracProblem by_name(const std::string& name, double epsilon, std::optional<double> T0) {
    if (name == "periodic-smooth") return periodic_smooth(epsilon, T0.value_or(2.0));
    if (name == "whole-space-gaussian") return whole_space_gaussian(epsilon, T0.value_or(1.0));
    if (name == "periodic-cosine") return periodic_cosine(epsilon, T0.value_or(2.0));
    if (name == "free-bandlimited") {
        auto p = free_bandlimited(T0.value_or(2.0));
        p.epsilon = epsilon;
        return p;
    }
    throw ConfigError("unknown problem preset '" + name + "'");
}

std::vector<std::string> names() { return {"periodic-smooth", "whole-space-gaussian", "periodic-cosine", "free-bandlimited"}; }

}  // namespace presets

}  // namespace dirac
