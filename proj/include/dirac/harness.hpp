#pragma once

#include "dirac/reference.hpp"
#include "dirac/stepper.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dirac {

/// e_phi = ||Phi^n - Phi(t_n)||_l2, e_rho = ||rho^n - rho(t_n)||_l1, e_J = ||J^n - J(t_n)||_l1.
struct ErrorReport {
    double e_phi = 0.0;
    double e_rho = 0.0;
    double e_J = 0.0;
    double t = 0.0;
    Scheme scheme = Scheme::CNFD;
    double h = 0.0;
    double tau = 0.0;
    double epsilon = 0.0;
};

/// Throws ContractError when the grids differ.
ErrorReport measure_errors(const SpinorField& sol, const SpinorField& ref);

struct SeriesPoint {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;  // NaN for time-dependent potentials
};

struct RunOptions {
    bool override_stability = false;
    /// Record mass/energy every this many steps (0: only the endpoints).
    long record_every = 0;
    long max_steps = 10'000'000;
    /// Norm growth beyond this factor is treated as blow-up.
    double blowup_factor = 1e8;
    StepperOptions stepper;
};

struct SimulationResult {
    SpinorField final;
    double t_final = 0.0;
    long steps = 0;
    std::vector<SeriesPoint> series;
    double wall_seconds = 0.0;
    StabilityVerdict verdict;
};

SchemeConfig make_config(const DiracProblem& problem, Scheme scheme, double h, double tau);

/// Runs `config.scheme` to t = T0/eps. Throws StabilityViolation when the verdict
/// fails (unless overridden), ConfigError for a horizon that is not a whole number
/// of steps or exceeds max_steps, and StepFailure (with step index) on blow-up.
SimulationResult run_simulation(const DiracProblem& problem, const SchemeConfig& config, const RunOptions& options = {},
                                std::optional<double> t_final = std::nullopt);

/// Produces the problem for a given epsilon (the domain may depend on it).
using ProblemFamily = std::function<DiracProblem(double epsilon)>;

struct LadderLevel {
    double h = 0.0;
    double tau = 0.0;
};

/// Errors for every (epsilon, level) pair; failed cells hold NaN errors.
struct ConvergenceTable {
    std::string title;
    Scheme scheme = Scheme::CNFD;
    std::vector<double> epsilons;
    std::vector<LadderLevel> levels;
    std::vector<std::vector<ErrorReport>> cells;  // [epsilon][level]
    std::vector<int> diagonal;                    // level index per epsilon row, -1 if none
    std::vector<std::vector<std::string>> failures;

    enum class Metric { phi, rho, J };
    double error(std::size_t row, std::size_t level, Metric m = Metric::phi) const;
    /// log2(e_{k-1} / e_k); NaN for k == 0 or non-finite errors.
    double order(std::size_t row, std::size_t level, Metric m = Metric::phi) const;
};

enum class DiagonalRule {
    none,
    /// Level k with 2^k ~ sqrt(eps_anchor/eps), i.e. k = log4(eps_anchor/eps).
    sqrt_epsilon,
};

struct TableRequest {
    std::string title;
    ProblemFamily family;
    Scheme scheme = Scheme::CNFD;
    std::vector<double> epsilons;
    std::vector<LadderLevel> ladder;
    /// Reference per epsilon; when unset, TSFP at (min h / 4, min tau / 8).
    std::optional<ReferenceSpec> reference;
    DiagonalRule diagonal = DiagonalRule::sqrt_epsilon;
    std::optional<double> diagonal_anchor;  // defaults to max epsilon
    RunOptions run;
    std::optional<std::filesystem::path> cache_dir;
    /// Worker threads (0: hardware concurrency).
    unsigned workers = 0;
};

ConvergenceTable run_table(const TableRequest& request);

/// Joint (h0/2^k, tau0/2^k) ladder.
ConvergenceTable convergence_table(TableRequest request, double h0, double tau0, int levels);
/// Fixed fine h, tau ladder tau0/2^k.
ConvergenceTable epsilon_sweep_temporal(TableRequest request, double h, double tau0, int levels);
/// Fixed fine tau, h ladder h0/2^k; no diagonal.
ConvergenceTable epsilon_sweep_spatial(TableRequest request, double h0, double tau, int levels);

struct TruncatedDomain {
    double a = 0.0;
    double b = 0.0;
    int N = 0;
};

/// (base_a - T0/eps, base_b + T0/eps) with N = (b - a)/h rounded up to even.
TruncatedDomain make_truncated_domain(double base_a, double base_b, double T0, double epsilon, double h);

/// Columns: epsilon,level,h,tau,t,e_phi,e_rho,e_J,order_phi,order_rho,order_J,diagonal.
/// Six significant digits, LF line endings, empty fields for undefined orders.
std::string emit_csv(const ConvergenceTable& table);
/// Fixed-width text rendering (errors with order rows), diagonal cells starred.
std::string render_text(const ConvergenceTable& table);

/// e_phi(t) along a run, one series per epsilon.
struct ErrorSeries {
    double epsilon = 0.0;
    std::vector<std::pair<double, double>> points;  // (t, e_phi)
};

/// Columns: epsilon,t,e_phi.
std::string emit_plot_data(const std::vector<ErrorSeries>& series);

struct CompareRequest {
    ProblemFamily family;
    Scheme scheme = Scheme::CNFD;
    std::vector<double> epsilons;
    double h = 0.0;
    double tau = 0.0;
    int samples = 20;
    std::optional<ReferenceSpec> reference;
    RunOptions run;
    std::optional<std::filesystem::path> cache_dir;
};

/// Error-versus-time series up to T0/eps at `samples` evenly spaced step counts.
std::vector<ErrorSeries> compare_series(const CompareRequest& request);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace dirac
