#include "dirac/stepper.hpp"

#include <iostream>

namespace dirac {

Stepper::Stepper(DiracProblem problem, const TorusGrid& grid, Scheme scheme, double tau, StepperOptions options)
    : problem_(std::move(problem)),
      grid_(grid),
      scheme_(scheme),
      tau_(tau),
      options_(options),
      cnfd_(options.tolerances.linear_residual, options.direct_cnfd),
      cnfp_(FixedPointConfig{options.tolerances.fixed_point, options.tolerances.fixed_point_max_iters}) {
    problem_.validate();
    if (tau == 0.0 || !std::isfinite(tau)) throw ConfigError("time step must be non-zero and finite");
    if (grid.size() < 16) std::clog << "note: running on a degenerate grid with N=" << grid.size() << "\n";
    if (scheme == Scheme::SIFD1 && !options.override_guard &&
        !sifd1_guard_ok(tau, problem_.epsilon, problem_.potentials))
        throw StabilityViolation("SIFD1 requires tau (1 + eps (V_max + A_max)) < 1/2");
    state_.phi_curr = problem_.initial_field(grid);
}

const std::vector<Mat2>& Stepper::potentials_at(double t) {
    if (problem_.potentials.time_independent && G_valid_) return G_;
    G_ = sample_potential_matrix(problem_.potentials, problem_.epsilon, t, grid_);
    G_valid_ = true;
    return G_;
}

void Stepper::step() {
    const double t = state_.t_n;
    SpinorField next;
    try {
        if (is_multistep(scheme_) && !state_.phi_prev) {
            next = first_step(problem_, grid_, tau_);
        } else {
            switch (scheme_) {
                case Scheme::CNFD: {
                    const auto& G = potentials_at(t + 0.5 * tau_);
                    if (!cnfd_.factored() || cnfd_tau_ != tau_ || !problem_.potentials.time_independent) {
                        cnfd_.factor(G, tau_, grid_.h());
                        cnfd_tau_ = tau_;
                    }
                    next = cnfd_.step(state_.phi_curr);
                    diag_ = cnfd_.diagnostics();
                    break;
                }
                case Scheme::CNFP: {
                    const auto& G = potentials_at(t + 0.5 * tau_);
                    if (cnfp_tau_ != tau_) {
                        cnfp_.prepare(grid_, tau_);
                        cnfp_tau_ = tau_;
                    }
                    next = cnfp_.step(state_.phi_curr, G);
                    diag_ = cnfp_.diagnostics();
                    break;
                }
                case Scheme::SIFD1: next = sifd1_update(state_.phi_curr, *state_.phi_prev, potentials_at(t), tau_); break;
                case Scheme::SIFD2: next = sifd2_update(state_.phi_curr, *state_.phi_prev, potentials_at(t), tau_); break;
                case Scheme::LFFD: next = lffd_update(state_.phi_curr, *state_.phi_prev, potentials_at(t), tau_); break;
                case Scheme::SIFP1: next = sifp1_update(state_.phi_curr, *state_.phi_prev, potentials_at(t), tau_); break;
                case Scheme::SIFP2: next = sifp2_update(state_.phi_curr, *state_.phi_prev, potentials_at(t), tau_); break;
                case Scheme::LFFP: next = lffp_update(state_.phi_curr, *state_.phi_prev, potentials_at(t), tau_); break;
            }
        }
    } catch (const StepFailure& e) {
        throw StepFailure(std::string(to_string(scheme_)) + " step " + std::to_string(steps_ + 1) + ": " + e.what(),
                          steps_ + 1);
    }
    if (!next.all_finite())
        throw StepFailure(std::string(to_string(scheme_)) + " blow-up: non-finite values at step " +
                              std::to_string(steps_ + 1),
                          steps_ + 1);
    if (is_multistep(scheme_)) state_.phi_prev = std::move(state_.phi_curr);
    state_.phi_curr = std::move(next);
    ++steps_;
    ++state_.n;
    state_.t_n = t + tau_;
}

void Stepper::advance(long steps) {
    for (long k = 0; k < steps; ++k) step();
}

void Stepper::reverse() {
    tau_ = -tau_;
    if (is_multistep(scheme_) && state_.phi_prev) std::swap(state_.phi_curr, *state_.phi_prev);
    if (is_multistep(scheme_) && state_.phi_prev) state_.t_n += tau_;
}

}  // namespace dirac
