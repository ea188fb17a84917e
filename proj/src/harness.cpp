#include "dirac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace dirac {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double l1_diff(const std::vector<double>& a, const std::vector<double>& b, double h) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - b[j]);
    return h * s;
}

bool same_grid(const TorusGrid& g1, const TorusGrid& g2) {
    return g1.size() == g2.size() && g1.a() == g2.a() && g1.b() == g2.b();
}

std::string g6(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

long whole_steps(double t_final, double tau) {
    const double ratio = t_final / tau;
    const long n = std::lround(ratio);
    if (n < 0 || std::abs(ratio - static_cast<double>(n)) > 1e-6 * std::max(1.0, ratio))
        throw ConfigError("horizon t=" + g6(t_final) + " is not a whole number of steps of tau=" + g6(tau));
    return n;
}

double energy_of(const SpinorField& f, const DiracProblem& p, Scheme s) {
    if (!p.potentials.time_independent) return kNaN;
    return is_spectral(s) ? energy_fp(f, p.potentials, p.epsilon) : energy_fd(f, p.potentials, p.epsilon);
}

ErrorReport nan_report() {
    ErrorReport r;
    r.e_phi = r.e_rho = r.e_J = kNaN;
    return r;
}

ReferenceSpec default_reference(const DiracProblem& problem, const std::vector<LadderLevel>& ladder) {
    double h_min = ladder.front().h, tau_min = ladder.front().tau;
    for (const auto& l : ladder) {
        h_min = std::min(h_min, l.h);
        tau_min = std::min(tau_min, l.tau);
    }
    if (problem.epsilon == 0.0) return ReferenceSpec{true, h_min, 0.0};
    return ReferenceSpec{false, h_min / 4.0, tau_min / 8.0};
}

}  // namespace

ErrorReport measure_errors(const SpinorField& sol, const SpinorField& ref) {
    if (!same_grid(sol.grid, ref.grid) || sol.size() != ref.size())
        throw ContractError("measure_errors: solution and reference live on different grids");
    const double h = sol.grid.h();
    ErrorReport r;
    r.e_phi = norm(sol - ref, NormKind::l2);
    r.e_rho = l1_diff(density(sol), density(ref), h);
    r.e_J = l1_diff(current(sol), current(ref), h);
    return r;
}

SchemeConfig make_config(const DiracProblem& problem, Scheme scheme, double h, double tau) {
    SchemeConfig c;
    c.scheme = scheme;
    c.h = h;
    c.tau = tau;
    c.epsilon = problem.epsilon;
    c.T0 = problem.T0;
    return c;
}

SimulationResult run_simulation(const DiracProblem& problem, const SchemeConfig& config, const RunOptions& options,
                                std::optional<double> t_final) {
    if (config.epsilon != problem.epsilon) throw ContractError("config epsilon differs from the problem epsilon");
    if (!(config.tau > 0.0)) throw ConfigError("time step must be positive");
    const auto start = std::chrono::steady_clock::now();
    const TorusGrid grid = problem.grid_for_h(config.h);

    SchemeConfig effective = config;
    effective.h = grid.h();
    SimulationResult result;
    result.verdict = validate(effective, problem.potentials);
    if (!result.verdict.ok && !options.override_stability)
        throw StabilityViolation(std::string(to_string(config.scheme)) + ": tau=" + g6(config.tau) +
                                 " exceeds tau_max=" + g6(result.verdict.tau_max.value()) + " at h=" + g6(grid.h()));

    const double horizon = t_final.value_or(problem.final_time());
    const long steps = whole_steps(horizon, config.tau);
    if (steps > options.max_steps) {
        std::cerr << "warning: " << steps << " steps requested, cap is " << options.max_steps << "\n";
        throw ConfigError("run exceeds the step cap of " + std::to_string(options.max_steps));
    }

    const BoundCheck bc = check_potential_bounds(problem.potentials, grid, horizon);
    (void)bc;

    StepperOptions sopts = options.stepper;
    sopts.tolerances = config.tolerances;
    if (options.override_stability) sopts.override_guard = true;
    Stepper stepper(problem, grid, config.scheme, config.tau, sopts);

    const double n0 = std::max(norm(stepper.current()), 1e-300);
    auto record = [&] {
        result.series.push_back({stepper.time(), mass(stepper.current()), energy_of(stepper.current(), problem, config.scheme)});
    };
    record();
    for (long k = 1; k <= steps; ++k) {
        stepper.step();
        if (norm(stepper.current()) > options.blowup_factor * n0)
            throw StepFailure(std::string(to_string(config.scheme)) + " blow-up: norm grew beyond " +
                                  g6(options.blowup_factor) + "x initial at step " + std::to_string(k),
                              k);
        if (options.record_every > 0 && k % options.record_every == 0 && k != steps) record();
    }
    if (steps > 0) record();

    result.final = stepper.current();
    result.t_final = stepper.time();
    result.steps = steps;
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

double ConvergenceTable::error(std::size_t row, std::size_t level, Metric m) const {
    const ErrorReport& r = cells.at(row).at(level);
    switch (m) {
        case Metric::phi: return r.e_phi;
        case Metric::rho: return r.e_rho;
        case Metric::J: return r.e_J;
    }
    return kNaN;
}

double ConvergenceTable::order(std::size_t row, std::size_t level, Metric m) const {
    if (level == 0) return kNaN;
    const double coarse = error(row, level - 1, m), fine = error(row, level, m);
    if (!std::isfinite(coarse) || !std::isfinite(fine) || coarse <= 0.0 || fine <= 0.0) return kNaN;
    return std::log2(coarse / fine);
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

ConvergenceTable run_table(const TableRequest& request) {
    if (!request.family) throw ConfigError("table request has no problem family");
    ConvergenceTable table;
    table.title = request.title;
    table.scheme = request.scheme;
    table.epsilons = request.epsilons;
    table.levels = request.ladder;
    const std::size_t rows = request.epsilons.size(), cols = request.ladder.size();
    table.cells.assign(rows, std::vector<ErrorReport>(cols, nan_report()));
    table.failures.assign(rows, std::vector<std::string>(cols));
    table.diagonal.assign(rows, -1);
    if (rows == 0 || cols == 0) return table;

    if (request.diagonal == DiagonalRule::sqrt_epsilon) {
        const double anchor =
            request.diagonal_anchor.value_or(*std::max_element(request.epsilons.begin(), request.epsilons.end()));
        for (std::size_t i = 0; i < rows; ++i) {
            const double eps = request.epsilons[i];
            if (!(eps > 0.0)) continue;
            const long k = std::lround(std::log(anchor / eps) / std::log(4.0));
            if (k >= 0 && k < static_cast<long>(cols)) table.diagonal[i] = static_cast<int>(k);
        }
    }

    std::vector<DiracProblem> problems;
    for (double eps : request.epsilons) problems.push_back(request.family(eps));

    std::vector<std::optional<ReferenceSolution>> refs(rows);
    std::vector<std::string> ref_failure(rows);
    parallel_for(rows, request.workers, [&](std::size_t i) {
        try {
            const DiracProblem& p = problems[i];
            const ReferenceSpec spec = request.reference.value_or(default_reference(p, request.ladder));
            refs[i] = cached_reference_solution(p, spec, {p.final_time()}, request.cache_dir);
        } catch (const std::exception& e) {
            ref_failure[i] = std::string("reference: ") + e.what();
        }
    });

    parallel_for(rows * cols, request.workers, [&](std::size_t idx) {
        const std::size_t i = idx / cols, k = idx % cols;
        const LadderLevel& lvl = request.ladder[k];
        ErrorReport& cell = table.cells[i][k];
        cell.scheme = request.scheme;
        cell.h = lvl.h;
        cell.tau = lvl.tau;
        cell.epsilon = request.epsilons[i];
        if (!refs[i]) {
            table.failures[i][k] = ref_failure[i];
            return;
        }
        try {
            const DiracProblem& p = problems[i];
            const ReferenceSpec spec = request.reference.value_or(default_reference(p, request.ladder));
            const TorusGrid grid = p.grid_for_h(lvl.h);
            check_reference_resolution(spec, grid, lvl.tau, p);
            const SimulationResult sim = run_simulation(p, make_config(p, request.scheme, lvl.h, lvl.tau), request.run);
            ErrorReport r = measure_errors(sim.final, refs[i]->on_grid(p.final_time(), grid));
            r.t = sim.t_final;
            r.scheme = request.scheme;
            r.h = grid.h();
            r.tau = lvl.tau;
            r.epsilon = p.epsilon;
            cell = r;
        } catch (const std::exception& e) {
            table.failures[i][k] = e.what();
        }
    });
    return table;
}

ConvergenceTable convergence_table(TableRequest request, double h0, double tau0, int levels) {
    request.ladder.clear();
    for (int k = 0; k < levels; ++k) request.ladder.push_back({h0 / std::ldexp(1.0, k), tau0 / std::ldexp(1.0, k)});
    return run_table(request);
}

ConvergenceTable epsilon_sweep_temporal(TableRequest request, double h, double tau0, int levels) {
    request.ladder.clear();
    for (int k = 0; k < levels; ++k) request.ladder.push_back({h, tau0 / std::ldexp(1.0, k)});
    return run_table(request);
}

ConvergenceTable epsilon_sweep_spatial(TableRequest request, double h0, double tau, int levels) {
    request.ladder.clear();
    for (int k = 0; k < levels; ++k) request.ladder.push_back({h0 / std::ldexp(1.0, k), tau});
    request.diagonal = DiagonalRule::none;
    return run_table(request);
}

TruncatedDomain make_truncated_domain(double base_a, double base_b, double T0, double epsilon, double h) {
    if (!(epsilon > 0.0)) throw ConfigError("domain truncation needs epsilon > 0");
    if (!(h > 0.0)) throw ConfigError("mesh size must be positive");
    TruncatedDomain d;
    d.a = base_a - T0 / epsilon;
    d.b = base_b + T0 / epsilon;
    d.N = static_cast<int>(std::ceil((d.b - d.a) / h - 1e-9));
    if (d.N % 2 != 0) ++d.N;
    return d;
}

std::string emit_csv(const ConvergenceTable& table) {
    using M = ConvergenceTable::Metric;
    std::string out = "epsilon,level,h,tau,t,e_phi,e_rho,e_J,order_phi,order_rho,order_J,diagonal\n";
    auto opt = [](double v) { return std::isfinite(v) ? g6(v) : std::string(); };
    for (std::size_t i = 0; i < table.cells.size(); ++i)
        for (std::size_t k = 0; k < table.cells[i].size(); ++k) {
            const ErrorReport& r = table.cells[i][k];
            const LadderLevel& lvl = table.levels[k];
            out += g6(table.epsilons[i]) + ',' + std::to_string(k) + ',' + g6(lvl.h) + ',' + g6(lvl.tau) + ',' +
                   g6(r.t) + ',' + g6(r.e_phi) + ',' + g6(r.e_rho) + ',' + g6(r.e_J) + ',' +
                   opt(table.order(i, k, M::phi)) + ',' + opt(table.order(i, k, M::rho)) + ',' +
                   opt(table.order(i, k, M::J)) + ',' + (table.diagonal[i] == static_cast<int>(k) ? "1" : "0") + '\n';
        }
    return out;
}

std::string render_text(const ConvergenceTable& table) {
    std::ostringstream os;
    char buf[64];
    os << table.title << (table.title.empty() ? "" : "\n");
    os << "scheme " << to_string(table.scheme) << "\n";
    os << "             ";
    for (const auto& lvl : table.levels) {
        std::snprintf(buf, sizeof buf, " h=%-10.4g", lvl.h);
        os << buf;
    }
    os << "\n             ";
    for (const auto& lvl : table.levels) {
        std::snprintf(buf, sizeof buf, " tau=%-8.4g", lvl.tau);
        os << buf;
    }
    os << "\n";
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        std::snprintf(buf, sizeof buf, "eps=%-8.4g ", table.epsilons[i]);
        os << buf;
        for (std::size_t k = 0; k < table.cells[i].size(); ++k) {
            std::snprintf(buf, sizeof buf, " %11.2e%c", table.error(i, k),
                          table.diagonal[i] == static_cast<int>(k) ? '*' : ' ');
            os << buf;
        }
        os << "\n  order      ";
        for (std::size_t k = 0; k < table.cells[i].size(); ++k) {
            const double o = table.order(i, k);
            if (std::isfinite(o))
                std::snprintf(buf, sizeof buf, " %11.2f ", o);
            else
                std::snprintf(buf, sizeof buf, " %11s ", "-");
            os << buf;
        }
        os << "\n";
        for (std::size_t k = 0; k < table.failures[i].size(); ++k)
            if (!table.failures[i][k].empty()) os << "  level " << k << " failed: " << table.failures[i][k] << "\n";
    }
    return os.str();
}

std::string emit_plot_data(const std::vector<ErrorSeries>& series) {
    std::string out = "epsilon,t,e_phi\n";
    for (const auto& s : series)
        for (const auto& [t, e] : s.points) out += g6(s.epsilon) + ',' + g6(t) + ',' + g6(e) + '\n';
    return out;
}

std::vector<ErrorSeries> compare_series(const CompareRequest& request) {
    if (!request.family) throw ConfigError("compare request has no problem family");
    if (request.samples < 1) throw ConfigError("compare needs at least one sample");
    std::vector<ErrorSeries> out(request.epsilons.size());
    std::vector<std::exception_ptr> failure(request.epsilons.size());
    parallel_for(request.epsilons.size(), 0, [&](std::size_t i) {
        const DiracProblem p = request.family(request.epsilons[i]);
        out[i].epsilon = p.epsilon;
        try {
            const long steps = whole_steps(p.final_time(), request.tau);
            std::vector<long> marks;
            for (int s = 1; s <= request.samples; ++s) {
                const long m = steps * s / request.samples;
                if (m > 0 && (marks.empty() || marks.back() != m)) marks.push_back(m);
            }
            std::vector<double> times;
            for (long m : marks) times.push_back(static_cast<double>(m) * request.tau);
            const ReferenceSpec spec =
                request.reference.value_or(default_reference(p, {LadderLevel{request.h, request.tau}}));
            const ReferenceSolution ref = cached_reference_solution(p, spec, times, request.cache_dir);
            const TorusGrid grid = p.grid_for_h(request.h);
            check_reference_resolution(spec, grid, request.tau, p);

            SchemeConfig cfg = make_config(p, request.scheme, grid.h(), request.tau);
            const StabilityVerdict v = validate(cfg, p.potentials);
            if (!v.ok && !request.run.override_stability)
                throw StabilityViolation(std::string(to_string(cfg.scheme)) + ": tau exceeds tau_max");
            StepperOptions sopts = request.run.stepper;
            if (request.run.override_stability) sopts.override_guard = true;
            Stepper stepper(p, grid, request.scheme, request.tau, sopts);
            long done = 0;
            for (std::size_t s = 0; s < marks.size(); ++s) {
                stepper.advance(marks[s] - done);
                done = marks[s];
                const ErrorReport r = measure_errors(stepper.current(), ref.on_grid(times[s], grid));
                out[i].points.emplace_back(times[s], r.e_phi);
            }
        } catch (...) {
            failure[i] = std::current_exception();
        }
    });
    for (const auto& f : failure)
        if (f) std::rethrow_exception(f);
    return out;
}

}  // namespace dirac
