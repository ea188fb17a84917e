#include "dirac/fdfp.hpp"

#include "kernels.hpp"

#include <cmath>
#include <string>

namespace dirac {

void CnfpSolver::prepare(const TorusGrid& grid, double tau) {
    grid_ = grid;
    tau_ = tau;
    const int n = grid.size();
    implicit_inv_.resize(static_cast<std::size_t>(n));
    explicit_.resize(static_cast<std::size_t>(n));
    const Mat2 iI = kI * Mat2::identity();
    for (int k = 0; k < n; ++k) {
        const double mu = grid.mu(grid.index_of_slot(k));
        const Mat2 half = (0.5 * tau) * (mu * pauli::sigma1 + pauli::sigma3);
        implicit_inv_[static_cast<std::size_t>(k)] = (iI - half).inverse();
        explicit_[static_cast<std::size_t>(k)] = iI + half;
    }
}

SpinorField CnfpSolver::step(const SpinorField& curr, std::span<const Mat2> G) {
    if (!(curr.grid == grid_) || implicit_inv_.empty()) throw ContractError("CNFP solver: not prepared for this grid");
    const int n = grid_.size();
    const auto un = static_cast<std::size_t>(n);
    if (G.size() != un) throw ContractError("CNFP solver: potential sample count mismatch");

    // Per mode: (iI - tau/2 S_l) Phi~^{k+1} = (iI + tau/2 S_l) Phi~^n + tau/2 (G (Phi^{(k)} + Phi^n))~.
    // Work with unnormalised transforms throughout and divide by N once per inverse.
    std::vector<Spinor> base = curr.values;
    fft::transform(base, -1);
    for (std::size_t k = 0; k < un; ++k) base[k] = explicit_[k] * base[k];

    bool potential_free = true;
    for (const auto& g : G)
        if (g.max_abs() != 0.0) { potential_free = false; break; }

    const double scale = norm(curr, NormKind::l2);
    const double inv_n = 1.0 / n;
    SpinorField iterate = curr;
    SpinorField next(grid_);
    std::vector<Spinor> work(un);
    diag_ = {};
    for (int it = 1; it <= config_.max_iters; ++it) {
        for (std::size_t j = 0; j < un; ++j) work[j] = G[j] * (iterate.values[j] + curr.values[j]);
        fft::transform(work, -1);
        for (std::size_t k = 0; k < un; ++k) work[k] = implicit_inv_[k] * (base[k] + Complex(0.5 * tau_) * work[k]);
        fft::transform(work, +1);
        double change = 0.0;
        for (std::size_t j = 0; j < un; ++j) {
            next.values[j] = inv_n * work[j];
            change += (next.values[j] - iterate.values[j]).norm2();
        }
        change = std::sqrt(grid_.h() * change);
        std::swap(iterate.values, next.values);
        diag_.iterations = it;
        diag_.linear_residual = scale > 0.0 ? change / scale : change;
        if (potential_free || change <= config_.tol * scale) return iterate;
    }
    double vmax = 0.0;
    for (const auto& g : G) vmax = std::max(vmax, g.max_abs());
    throw StepFailure("CNFP fixed point did not converge in " + std::to_string(config_.max_iters) +
                      " iterations (contraction estimate ~" + std::to_string(std::abs(tau_) * vmax) + ")");
}

SpinorField sifp1_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau) {
    return detail::semi_implicit_pointwise(spectral_derivative(curr), prev, G, tau);
}

SpinorField sifp2_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau) {
    const TorusGrid grid = curr.grid;
    return detail::semi_implicit_modal(curr, prev, G, tau, [grid](int l) { return grid.mu(l); });
}

SpinorField lffp_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau) {
    return detail::leap_frog(curr, spectral_derivative(curr), prev, G, tau);
}

namespace {

const SpinorField& require_prev(const StepperState& state) {
    if (!state.phi_prev) throw ContractError("three-level scheme needs Phi^{n-1}");
    return *state.phi_prev;
}

}  // namespace

SpinorField cnfp_step(const StepperState& state, const DiracProblem& problem, double tau, FixedPointConfig fp,
                      SolverDiagnostics* diag) {
    const auto& grid = state.phi_curr.grid;
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n + 0.5 * tau, grid);
    CnfpSolver solver(fp);
    solver.prepare(grid, tau);
    SpinorField next = solver.step(state.phi_curr, G);
    if (diag) *diag = solver.diagnostics();
    return next;
}

SpinorField sifp1_step(const StepperState& state, const DiracProblem& problem, double tau) {
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n, state.phi_curr.grid);
    return sifp1_update(state.phi_curr, require_prev(state), G, tau);
}

SpinorField sifp2_step(const StepperState& state, const DiracProblem& problem, double tau) {
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n, state.phi_curr.grid);
    return sifp2_update(state.phi_curr, require_prev(state), G, tau);
}

SpinorField lffp_step(const StepperState& state, const DiracProblem& problem, double tau) {
    const auto G = sample_potential_matrix(problem.potentials, problem.epsilon, state.t_n, state.phi_curr.grid);
    return lffp_update(state.phi_curr, require_prev(state), G, tau);
}

}  // namespace dirac
