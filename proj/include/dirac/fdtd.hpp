#pragma once

#include "dirac/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dirac {

/// Phi^n and (for three-level schemes) Phi^{n-1} at t_n = n tau.
struct StepperState {
    SpinorField phi_curr;
    std::optional<SpinorField> phi_prev;
    double t_n = 0.0;
    long n = 0;
};

struct SolverDiagnostics {
    double linear_residual = 0.0;
    int iterations = 0;
};

/// Taylor start shared by all three-level schemes:
/// Phi^1 = Phi0 - tau sigma1 Phi0' - i tau (sigma3 + eps V^0 - eps A1^0 sigma1) Phi0.
SpinorField first_step(const DiracProblem& problem, const TorusGrid& grid, double tau);

/// Crank-Nicolson finite difference solve of the block-cyclic-tridiagonal system
///   (I + i tau/2 H) Phi^{n+1} = (I - i tau/2 H) Phi^n,  H = -i sigma1 delta_x + sigma3 + G.
///
/// The direct path is a block Thomas factorisation of the acyclic part with a
/// rank-2 Sherman-Morrison-Woodbury correction for the periodic corners, O(N).
/// When the direct path is disabled, or its residual stays above tolerance after
/// iterative refinement, conjugate gradients on the normal equations take over
/// (M* M is Hermitian positive definite because M = I + iK with K Hermitian).
class CnfdSolver {
public:
    explicit CnfdSolver(double tolerance = 1e-12, bool use_direct = true)
        : tolerance_(tolerance), use_direct_(use_direct) {}

    /// Sets the system for potentials G (sampled at t_n + tau/2) and step tau.
    void factor(std::span<const Mat2> G, double tau, double h);
    /// Advances Phi^n; throws StepFailure if the residual cannot be brought under tolerance.
    SpinorField step(const SpinorField& curr);

    const SolverDiagnostics& diagnostics() const { return diag_; }
    bool factored() const { return !diag_blocks_.empty(); }

private:
    std::vector<Spinor> apply_system(std::span<const Spinor> x) const;
    std::vector<Spinor> apply_adjoint(std::span<const Spinor> x) const;
    std::vector<Spinor> direct_solve(std::span<const Spinor> r) const;
    std::vector<Spinor> iterative_solve(std::span<const Spinor> r, std::span<const Spinor> guess, int& iters) const;
    double relative_residual(std::span<const Spinor> x, std::span<const Spinor> r) const;

    double tolerance_;
    bool use_direct_;
    double coupling_ = 0.0;  // tau / (4h)
    std::vector<Mat2> diag_blocks_;
    // Direct factorisation data.
    std::vector<Mat2> w_;  // inverted pivots
    std::vector<Mat2> x_;  // W_j U
    std::vector<Mat2> z_;  // T^{-1} u
    Mat2 corner_ = {};     // Gamma^{-1} L
    Mat2 capacitance_inv_ = {};
    SolverDiagnostics diag_;
};

// Single-step updates on explicitly supplied potential samples. The G arrays hold
// eps (V I - A1 sigma1) at the time the scheme prescribes (t_n + tau/2 for CNFD,
// t_n for the three-level schemes).

/// Pointwise 2x2 solve of the semi-implicit scheme with delta_x explicit.
SpinorField sifd1_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau);
/// Per-mode 2x2 solve with stencil symbol sin(mu_l h)/h; G Phi^n enters through one forward transform.
SpinorField sifd2_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau);
/// Explicit leap-frog: Phi^{n+1} = Phi^{n-1} - 2 i tau H Phi^n.
SpinorField lffd_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau);

// One step from a state, sampling the problem's potentials. Three-level schemes
// require state.phi_prev.

SpinorField cnfd_step(const StepperState& state, const DiracProblem& problem, double tau,
                      SolverDiagnostics* diag = nullptr);
SpinorField sifd1_step(const StepperState& state, const DiracProblem& problem, double tau);
SpinorField sifd2_step(const StepperState& state, const DiracProblem& problem, double tau);
SpinorField lffd_step(const StepperState& state, const DiracProblem& problem, double tau);

}  // namespace dirac
