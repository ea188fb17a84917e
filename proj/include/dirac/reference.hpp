#pragma once

#include "dirac/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dirac {

/// Exact evolution of the potential-free equation: per mode
/// Phi~_l(t) = [cos(t d_l) I - i sin(t d_l)/d_l (mu_l sigma1 + sigma3)] Phi~_l(0), d_l = sqrt(1 + mu_l^2).
SpinorField free_dirac_exact(const SpinorField& phi0, double t);

/// Strang splitting (potential half step, exact free step, potential half step) with
/// the pseudospectral free flow. Exactly mass-conserving.
class TsfpStepper {
public:
    TsfpStepper(DiracProblem problem, const TorusGrid& grid);
    /// Starts from an arbitrary state at time t0.
    TsfpStepper(DiracProblem problem, SpinorField initial, double t0);

    /// One step of size tau from the current time.
    void step(double tau);
    /// Steps with size tau_e, shortening the last step to land on t exactly.
    void advance_to(double t, double tau_e);

    const SpinorField& current() const { return phi_; }
    double time() const { return t_; }

private:
    void potential_flow(double s, double t_sample);
    void free_flow(double tau);

    DiracProblem problem_;
    TorusGrid grid_;
    SpinorField phi_;
    double t_ = 0.0;
    // Cached propagators for time-independent potentials and a fixed step.
    double cached_s_ = 0.0;
    std::vector<Mat2> cached_potential_;
    double cached_tau_ = 0.0;
    std::vector<Mat2> cached_free_;
};

/// One Strang step of size tau from phi at time t_n.
SpinorField tsfp_step(const SpinorField& phi, const DiracProblem& problem, double t_n, double tau);

struct ReferenceSpec {
    bool exact = false;  // use free_dirac_exact; only valid for potential-free problems or eps == 0
    double h_e = 0.0;
    double tau_e = 0.0;
};

/// Fine-grid solutions at the requested times.
class ReferenceSolution {
public:
    ReferenceSolution() = default;
    ReferenceSolution(TorusGrid grid, std::map<double, SpinorField> snapshots)
        : grid_(grid), snapshots_(std::move(snapshots)) {}

    const TorusGrid& grid() const { return grid_; }
    const std::map<double, SpinorField>& snapshots() const { return snapshots_; }
    /// Snapshot at time t (matched to 1e-9 relative); throws ContractError if absent.
    const SpinorField& at(double t) const;
    /// Snapshot at t restricted to `coarse` by node subsampling (or trigonometric
    /// interpolation when allowed and the grids do not nest).
    SpinorField on_grid(double t, const TorusGrid& coarse, bool allow_interpolation = false) const;

private:
    TorusGrid grid_;
    std::map<double, SpinorField> snapshots_;
};

/// Runs TSFP on the grid with spacing h_e (or the exact free flow) and keeps the
/// snapshots at t_targets.
ReferenceSolution reference_solution(const DiracProblem& problem, const ReferenceSpec& spec,
                                     std::vector<double> t_targets);

/// Enforces tau_e <= tau/4 and that the test grid nests into the reference grid.
void check_reference_resolution(const ReferenceSpec& spec, const TorusGrid& test_grid, double tau,
                                const DiracProblem& problem);

/// Node subsampling when coarse.N divides fine.N on the same interval.
SpinorField restrict_to_grid(const SpinorField& fine, const TorusGrid& coarse, bool allow_interpolation = false);
/// Evaluates the trigonometric interpolant of `fine` at the nodes of `coarse`.
SpinorField trig_interpolate(const SpinorField& fine, const TorusGrid& coarse);

namespace reference_cache {

/// Hex FNV-1a 64 hash over the canonical problem/resolution description.
std::string config_hash(const DiracProblem& problem, const ReferenceSpec& spec, const std::vector<double>& times);

/// Writes <dir>/<hash>.dref (binary) and <dir>/<hash>.json (manifest) via atomic rename.
void store(const std::filesystem::path& dir, const std::string& hash, const ReferenceSolution& ref,
           const DiracProblem& problem, const ReferenceSpec& spec);
std::optional<ReferenceSolution> load(const std::filesystem::path& dir, const std::string& hash);

/// Binary encoding: "DREF1" | f64 a | f64 b | u64 N | u64 n_times | f64 times[n] |
/// per time, N nodes of (phi1.re, phi1.im, phi2.re, phi2.im) as little-endian f64.
std::string encode(const ReferenceSolution& ref);
ReferenceSolution decode(const std::string& bytes);

}  // namespace reference_cache

/// Cached wrapper: loads when the hash matches, otherwise computes and stores.
ReferenceSolution cached_reference_solution(const DiracProblem& problem, const ReferenceSpec& spec,
                                            std::vector<double> t_targets,
                                            const std::optional<std::filesystem::path>& cache_dir);

}  // namespace dirac
