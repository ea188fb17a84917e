#include "dirac/fdtd.hpp"

#include "kernels.hpp"

#include <cmath>

namespace dirac {

SpinorField first_step(const DiracProblem& problem, const TorusGrid& grid, double tau) {
    const SpinorField phi0 = problem.initial_field(grid);
    const SpinorField dphi0 = problem.initial_derivative(grid);
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, 0.0, grid);
    SpinorField phi1(grid);
    for (int j = 0; j < grid.size(); ++j) {
        const Mat2 h = pauli::sigma3 + G[static_cast<std::size_t>(j)];
        phi1[j] = phi0[j] - tau * (pauli::sigma1 * dphi0[j]) - Complex(0.0, tau) * (h * phi0[j]);
    }
    return phi1;
}

// ---------------------------------------------------------------------------
// CNFD block-cyclic solver
//
// Row j of M:  D_j x_j + L x_{j-1} + U x_{j+1},  L = -c sigma1, U = c sigma1, c = tau/(4h),
// D_j = I + i tau/2 (sigma3 + G_j), with periodic wrap in rows 0 and N-1.
// M = T + u v^T where T drops the corners and uses T_0 = D_0 - Gamma,
// T_{N-1} = D_{N-1} - U Gamma^{-1} L with Gamma = -D_0; u = [Gamma; 0; ...; U],
// v^T = [I, 0, ..., Gamma^{-1} L].

namespace {

Mat2 lower_block(double c) { return -c * pauli::sigma1; }
Mat2 upper_block(double c) { return c * pauli::sigma1; }

template <typename Block>
std::vector<Block> thomas_sweep(const std::vector<Mat2>& w, const std::vector<Mat2>& x, const Mat2& lower,
                                std::span<const Block> r) {
    const std::size_t n = r.size();
    std::vector<Block> g(n);
    g[0] = w[0] * r[0];
    for (std::size_t j = 1; j < n; ++j) g[j] = w[j] * (r[j] - lower * g[j - 1]);
    for (std::size_t j = n - 1; j-- > 0;) g[j] = g[j] - x[j] * g[j + 1];
    return g;
}

double l2(std::span<const Spinor> v) {
    double acc = 0.0;
    for (const auto& s : v) acc += s.norm2();
    return std::sqrt(acc);
}

Complex inner(std::span<const Spinor> a, std::span<const Spinor> b) {
    Complex acc{};
    for (std::size_t j = 0; j < a.size(); ++j) acc += dot(a[j], b[j]);
    return acc;
}

}  // namespace

void CnfdSolver::factor(std::span<const Mat2> G, double tau, double h) {
    const std::size_t n = G.size();
    if (n < 3) throw ContractError("CNFD solver needs at least 3 nodes");
    coupling_ = tau / (4.0 * h);
    diag_blocks_.resize(n);
    const Complex half_itau(0.0, 0.5 * tau);
    for (std::size_t j = 0; j < n; ++j) diag_blocks_[j] = Mat2::identity() + half_itau * (pauli::sigma3 + G[j]);
    if (!use_direct_) return;

    const Mat2 L = lower_block(coupling_);
    const Mat2 U = upper_block(coupling_);
    const Mat2 gamma = -1.0 * diag_blocks_[0];
    const Mat2 gamma_inv = gamma.inverse();
    corner_ = gamma_inv * L;

    std::vector<Mat2> t = diag_blocks_;
    t[0] = diag_blocks_[0] - gamma;
    t[n - 1] = diag_blocks_[n - 1] - U * corner_;

    w_.assign(n, Mat2::zero());
    x_.assign(n, Mat2::zero());
    for (std::size_t j = 0; j < n; ++j) {
        const Mat2 pivot = j == 0 ? t[0] : t[j] - L * x_[j - 1];
        if (std::abs(pivot.det()) < 1e-300) throw StepFailure("CNFD block Thomas: singular pivot");
        w_[j] = pivot.inverse();
        if (j + 1 < n) x_[j] = w_[j] * U;
    }

    std::vector<Mat2> u(n, Mat2::zero());
    u[0] = gamma;
    u[n - 1] = U;
    z_ = thomas_sweep<Mat2>(w_, x_, L, u);
    const Mat2 cap = Mat2::identity() + z_[0] + corner_ * z_[n - 1];
    capacitance_inv_ = cap.inverse();
}

std::vector<Spinor> CnfdSolver::apply_system(std::span<const Spinor> x) const {
    const std::size_t n = x.size();
    std::vector<Spinor> y(n);
    const Mat2 s = upper_block(coupling_);
    for (std::size_t j = 0; j < n; ++j) {
        const Spinor& right = x[j + 1 < n ? j + 1 : 0];
        const Spinor& left = x[j > 0 ? j - 1 : n - 1];
        y[j] = diag_blocks_[j] * x[j] + s * (right - left);
    }
    return y;
}

std::vector<Spinor> CnfdSolver::apply_adjoint(std::span<const Spinor> x) const {
    // M* has D_j* on the diagonal; the antisymmetric real coupling c sigma1 (x_{j+1} - x_{j-1}) is
    // skew-symmetric, so its adjoint flips sign.
    const std::size_t n = x.size();
    std::vector<Spinor> y(n);
    const Mat2 s = upper_block(coupling_);
    for (std::size_t j = 0; j < n; ++j) {
        const Spinor& right = x[j + 1 < n ? j + 1 : 0];
        const Spinor& left = x[j > 0 ? j - 1 : n - 1];
        y[j] = diag_blocks_[j].adjoint() * x[j] - s * (right - left);
    }
    return y;
}

std::vector<Spinor> CnfdSolver::direct_solve(std::span<const Spinor> r) const {
    const std::size_t n = r.size();
    const Mat2 L = lower_block(coupling_);
    std::vector<Spinor> y = thomas_sweep<Spinor>(w_, x_, L, r);
    const Spinor vy = y[0] + corner_ * y[n - 1];
    const Spinor coef = capacitance_inv_ * vy;
    for (std::size_t j = 0; j < n; ++j) y[j] -= z_[j] * coef;
    return y;
}

std::vector<Spinor> CnfdSolver::iterative_solve(std::span<const Spinor> r, std::span<const Spinor> guess,
                                                int& iters) const {
    // CG on M* M x = M* r.
    const std::size_t n = r.size();
    std::vector<Spinor> x(guess.begin(), guess.end());
    if (x.size() != n) x.assign(n, Spinor{});
    std::vector<Spinor> resid = apply_system(x);
    for (std::size_t j = 0; j < n; ++j) resid[j] = r[j] - resid[j];
    std::vector<Spinor> z = apply_adjoint(resid);
    std::vector<Spinor> p = z;
    double zz = inner(z, z).real();
    const double rnorm = std::max(l2(r), 1e-300);
    const int max_iters = static_cast<int>(std::max<std::size_t>(200, 4 * n));
    iters = 0;
    for (; iters < max_iters; ++iters) {
        if (l2(resid) <= 0.1 * tolerance_ * rnorm) break;
        const std::vector<Spinor> mp = apply_system(p);
        const double denom = inner(mp, mp).real();
        if (denom <= 0.0) break;
        const double alpha = zz / denom;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] += alpha * p[j];
            resid[j] -= alpha * mp[j];
        }
        z = apply_adjoint(resid);
        const double zz_new = inner(z, z).real();
        const double beta = zz_new / zz;
        zz = zz_new;
        for (std::size_t j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
    }
    return x;
}

double CnfdSolver::relative_residual(std::span<const Spinor> x, std::span<const Spinor> r) const {
    const std::vector<Spinor> mx = apply_system(x);
    double num = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) num += (mx[j] - r[j]).norm2();
    const double den = l2(r);
    return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

SpinorField CnfdSolver::step(const SpinorField& curr) {
    if (static_cast<int>(diag_blocks_.size()) != curr.size()) throw ContractError("CNFD solver: not factored for this grid");
    const std::size_t n = diag_blocks_.size();
    // r_j = (2I - D_j) Phi_j - c sigma1 (Phi_{j+1} - Phi_{j-1})
    std::vector<Spinor> r(n);
    const Mat2 s = upper_block(coupling_);
    const Mat2 two = 2.0 * Mat2::identity();
    for (std::size_t j = 0; j < n; ++j) {
        const Spinor& right = curr.values[j + 1 < n ? j + 1 : 0];
        const Spinor& left = curr.values[j > 0 ? j - 1 : n - 1];
        r[j] = (two - diag_blocks_[j]) * curr.values[j] - s * (right - left);
    }

    diag_ = {};
    std::vector<Spinor> x;
    double res = 1.0;
    if (use_direct_) {
        x = direct_solve(r);
        res = relative_residual(x, r);
        diag_.iterations = 1;
        for (int refine = 0; refine < 3 && res > tolerance_; ++refine) {
            std::vector<Spinor> mx = apply_system(x);
            for (std::size_t j = 0; j < n; ++j) mx[j] = r[j] - mx[j];
            const auto dx = direct_solve(mx);
            for (std::size_t j = 0; j < n; ++j) x[j] += dx[j];
            res = relative_residual(x, r);
            ++diag_.iterations;
        }
    }
    if (!use_direct_ || res > tolerance_) {
        int iters = 0;
        x = iterative_solve(r, use_direct_ ? std::span<const Spinor>(x) : std::span<const Spinor>(curr.values), iters);
        res = relative_residual(x, r);
        diag_.iterations += iters;
    }
    diag_.linear_residual = res;
    if (!(res <= tolerance_))
        throw StepFailure("CNFD linear solve residual " + std::to_string(res) + " above tolerance");
    return SpinorField(curr.grid, std::move(x));
}

// ---------------------------------------------------------------------------

SpinorField sifd1_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau) {
    return detail::semi_implicit_pointwise(centered_difference(curr), prev, G, tau);
}

SpinorField sifd2_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau) {
    const double h = curr.grid.h();
    const int n = curr.grid.size();
    return detail::semi_implicit_modal(curr, prev, G, tau, [h, n](int l) {
        return std::sin(2.0 * std::numbers::pi * l / n) / h;  // sin(mu_l h)/h
    });
}

SpinorField lffd_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau) {
    return detail::leap_frog(curr, centered_difference(curr), prev, G, tau);
}

namespace {

const SpinorField& require_prev(const StepperState& state) {
    if (!state.phi_prev) throw ContractError("three-level scheme needs Phi^{n-1}");
    return *state.phi_prev;
}

}  // namespace

SpinorField cnfd_step(const StepperState& state, const DiracProblem& problem, double tau, SolverDiagnostics* diag) {
    const auto& grid = state.phi_curr.grid;
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n + 0.5 * tau, grid);
    CnfdSolver solver;
    solver.factor(G, tau, grid.h());
    SpinorField next = solver.step(state.phi_curr);
    if (diag) *diag = solver.diagnostics();
    return next;
}

SpinorField sifd1_step(const StepperState& state, const DiracProblem& problem, double tau) {
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n, state.phi_curr.grid);
    return sifd1_update(state.phi_curr, require_prev(state), G, tau);
}

SpinorField sifd2_step(const StepperState& state, const DiracProblem& problem, double tau) {
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n, state.phi_curr.grid);
    return sifd2_update(state.phi_curr, require_prev(state), G, tau);
}

SpinorField lffd_step(const StepperState& state, const DiracProblem& problem, double tau) {
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n, state.phi_curr.grid);
    return lffd_update(state.phi_curr, require_prev(state), G, tau);
}

}  // namespace dirac
