#pragma once

#include "dirac/fdtd.hpp"

namespace dirac {

struct FixedPointConfig {
    double tol = 1e-14;
    int max_iters = 50;
};

/// Crank-Nicolson in time with the pseudospectral derivative. The free part
/// (-i sigma1 D + sigma3) is inverted per Fourier mode; the potential term is
/// lagged on the iterate until successive iterates differ by <= tol * ||Phi^n||.
class CnfpSolver {
public:
    explicit CnfpSolver(FixedPointConfig config = {}) : config_(config) {}

    void prepare(const TorusGrid& grid, double tau);
    /// G sampled at t_n + tau/2. Throws StepFailure on non-convergence.
    SpinorField step(const SpinorField& curr, std::span<const Mat2> G);

    const SolverDiagnostics& diagnostics() const { return diag_; }

private:
    FixedPointConfig config_;
    TorusGrid grid_;
    double tau_ = 0.0;
    std::vector<Mat2> implicit_inv_;  // (i I - tau/2 S_l)^{-1}
    std::vector<Mat2> explicit_;      // (i I + tau/2 S_l)
    SolverDiagnostics diag_;
};

SpinorField sifp1_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau);
SpinorField sifp2_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau);
SpinorField lffp_update(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G, double tau);

SpinorField cnfp_step(const StepperState& state, const DiracProblem& problem, double tau,
                      FixedPointConfig fp = {}, SolverDiagnostics* diag = nullptr);
SpinorField sifp1_step(const StepperState& state, const DiracProblem& problem, double tau);
SpinorField sifp2_step(const StepperState& state, const DiracProblem& problem, double tau);
SpinorField lffp_step(const StepperState& state, const DiracProblem& problem, double tau);

}  // namespace dirac
