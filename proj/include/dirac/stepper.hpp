#pragma once

#include "dirac/fdfp.hpp"
#include "dirac/fdtd.hpp"
#include "dirac/stability.hpp"

namespace dirac {

struct StepperOptions {
    SolverTolerances tolerances;
    bool direct_cnfd = true;
    /// Skip the SIFD1 pointwise invertibility guard (blow-up witnesses only).
    bool override_guard = false;
};

/// Owns the state of one scheme run on one grid. Potentials are sampled once
/// when time-independent; the CNFD factorisation and CNFP mode inverses are reused
/// for as long as tau and the potential samples stay fixed.
class Stepper {
public:
    Stepper(DiracProblem problem, const TorusGrid& grid, Scheme scheme, double tau, StepperOptions options = {});

    /// Advances one step; the first step of a three-level scheme uses the Taylor start.
    /// Throws StepFailure (with the step index) on solver failure or non-finite values.
    void step();
    void advance(long steps);

    /// Flips the direction of time (tau -> -tau; swaps Phi^n and Phi^{n-1} for three-level schemes).
    void reverse();

    const SpinorField& current() const { return state_.phi_curr; }
    const std::optional<SpinorField>& previous() const { return state_.phi_prev; }
    const StepperState& state() const { return state_; }
    double time() const { return state_.t_n; }
    long steps_taken() const { return steps_; }
    double tau() const { return tau_; }
    Scheme scheme() const { return scheme_; }
    const SolverDiagnostics& diagnostics() const { return diag_; }
    const DiracProblem& problem() const { return problem_; }

private:
    const std::vector<Mat2>& potentials_at(double t);

    DiracProblem problem_;
    TorusGrid grid_;
    Scheme scheme_;
    double tau_;
    StepperOptions options_;
    StepperState state_;
    long steps_ = 0;
    SolverDiagnostics diag_;

    std::vector<Mat2> G_;
    bool G_valid_ = false;
    CnfdSolver cnfd_;
    double cnfd_tau_ = 0.0;
    CnfpSolver cnfp_;
    double cnfp_tau_ = 0.0;
};

}  // namespace dirac
