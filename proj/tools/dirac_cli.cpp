#include "dirac/config.hpp"
#include "dirac/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dirac;

namespace {

enum Exit { kOk = 0, kConfig = 2, kStability = 3, kSolver = 4 };

struct Common {
    std::string config_path;
    std::string output;
    std::string cache_dir;
    bool override_stability = false;
    unsigned workers = 0;
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << text;
}

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

RunConfig load(const Common& c) {
    RunConfig cfg = load_config(c.config_path);
    if (!c.cache_dir.empty()) cfg.cache_dir = c.cache_dir;
    return cfg;
}

TableRequest table_request(const RunConfig& cfg, const Common& c) {
    TableRequest req;
    req.title = cfg.problem_label;
    req.family = cfg.family;
    req.scheme = cfg.scheme;
    req.epsilons = cfg.epsilons;
    req.reference = cfg.reference;
    req.cache_dir = cfg.cache_dir;
    req.run.override_stability = c.override_stability;
    req.workers = c.workers;
    return req;
}

void require_positive(double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(std::string("config key '") + key + "' is required and must be positive");
}

// The exact reference is grid-free; evaluate it on the finest mesh the table uses.
void pin_exact_reference(TableRequest& req, double finest_h) {
    if (req.reference && req.reference->exact) req.reference->h_e = finest_h;
}

int report_table(const ConvergenceTable& t, const Common& c) {
    write_output(c.output, emit_csv(t));
    std::cerr << render_text(t);
    std::size_t failed = 0, total = 0;
    for (const auto& row : t.failures)
        for (const auto& f : row) {
            ++total;
            if (!f.empty()) {
                ++failed;
                std::cerr << "cell failed: " << f << "\n";
            }
        }
    return total > 0 && failed == total ? kSolver : kOk;
}

int cmd_run(const Common& c, long record_every) {
    const RunConfig cfg = load(c);
    require_positive(cfg.h, "h");
    require_positive(cfg.tau, "tau");
    const DiracProblem p = cfg.problem();
    RunOptions opt;
    opt.override_stability = c.override_stability;
    opt.record_every = record_every;
    const auto res = run_simulation(p, make_config(p, cfg.scheme, cfg.h, cfg.tau), opt);

    std::ostringstream csv;
    csv << "t,mass,energy\n";
    for (const auto& s : res.series) csv << g6(s.t) << ',' << g6(s.mass) << ',' << (std::isnan(s.energy) ? "" : g6(s.energy)) << '\n';
    write_output(c.output, csv.str());

    const auto& first = res.series.front();
    const auto& last = res.series.back();
    std::cerr << "scheme " << to_string(cfg.scheme) << "  epsilon " << g6(p.epsilon) << "  h " << g6(res.final.grid.h())
              << "  tau " << g6(cfg.tau) << "\n";
    std::cerr << "steps " << res.steps << "  t " << g6(res.t_final) << "  wall " << g6(res.wall_seconds) << " s\n";
    std::cerr << "relative mass drift " << g6(std::abs(last.mass - first.mass) / first.mass) << "\n";
    if (!std::isnan(first.energy))
        std::cerr << "relative energy drift " << g6(std::abs(last.energy - first.energy) / std::abs(first.energy)) << "\n";
    if (cfg.reference) {
        ReferenceSpec spec = *cfg.reference;
        if (spec.exact) spec.h_e = res.final.grid.h();
        const std::vector<double> times{res.t_final};
        const auto ref = cfg.cache_dir ? cached_reference_solution(p, spec, times, *cfg.cache_dir)
                                       : reference_solution(p, spec, times);
        const auto e = measure_errors(res.final, ref.on_grid(res.t_final, res.final.grid));
        std::cerr << "e_phi " << g6(e.e_phi) << "  e_rho " << g6(e.e_rho) << "  e_J " << g6(e.e_J) << "\n";
    }
    return kOk;
}

int cmd_converge(const Common& c) {
    const RunConfig cfg = load(c);
    require_positive(cfg.h0, "h0");
    require_positive(cfg.tau0, "tau0");
    auto req = table_request(cfg, c);
    pin_exact_reference(req, cfg.h0 / std::ldexp(1.0, cfg.levels - 1));
    return report_table(convergence_table(req, cfg.h0, cfg.tau0, cfg.levels), c);
}

int cmd_sweep_spatial(const Common& c) {
    const RunConfig cfg = load(c);
    require_positive(cfg.h0, "h0");
    require_positive(cfg.tau, "tau");
    auto req = table_request(cfg, c);
    pin_exact_reference(req, cfg.h0 / std::ldexp(1.0, cfg.levels - 1));
    return report_table(epsilon_sweep_spatial(req, cfg.h0, cfg.tau, cfg.levels), c);
}

int cmd_sweep_temporal(const Common& c) {
    const RunConfig cfg = load(c);
    require_positive(cfg.h, "h");
    require_positive(cfg.tau0, "tau0");
    auto req = table_request(cfg, c);
    pin_exact_reference(req, cfg.h);
    return report_table(epsilon_sweep_temporal(req, cfg.h, cfg.tau0, cfg.levels), c);
}

int cmd_stability(const Common& c) {
    const RunConfig cfg = load(c);
    require_positive(cfg.h, "h");
    require_positive(cfg.tau, "tau");
    const DiracProblem p = cfg.problem();
    const double h = p.grid_for_h(cfg.h).h();
    std::ostringstream out;
    out << "scheme,h,tau,tau_max,margin,verdict\n";
    bool configured_ok = true;
    for (Scheme s : kAllSchemes) {
        const auto v = validate(make_config(p, s, h, cfg.tau), p.potentials);
        out << to_string(s) << ',' << g6(h) << ',' << g6(cfg.tau) << ','
            << (v.tau_max.is_unbounded() ? "inf" : g6(v.tau_max.value())) << ',' << g6(v.margin) << ','
            << (v.ok ? "ok" : "violation") << '\n';
        if (s == cfg.scheme) configured_ok = v.ok;
    }
    write_output(c.output, out.str());
    return configured_ok ? kOk : kStability;
}

int cmd_compare(const Common& c) {
    const RunConfig cfg = load(c);
    require_positive(cfg.h, "h");
    require_positive(cfg.tau, "tau");
    CompareRequest req;
    req.family = cfg.family;
    req.scheme = cfg.scheme;
    req.epsilons = cfg.epsilons;
    req.h = cfg.h;
    req.tau = cfg.tau;
    req.samples = cfg.samples;
    req.reference = cfg.reference;
    if (req.reference && req.reference->exact) req.reference->h_e = cfg.h;
    req.cache_dir = cfg.cache_dir;
    req.run.override_stability = c.override_stability;
    write_output(c.output, emit_plot_data(compare_series(req)));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite difference and pseudospectral solvers for the 1D Dirac equation"};
    app.require_subcommand(1);
    Common common;
    long record_every = 0;

    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", common.config_path, "JSON config file")->required();
        sub->add_option("-o,--output", common.output, "output file (default stdout)");
        sub->add_option("--cache-dir", common.cache_dir, "reference cache directory");
        sub->add_flag("--override-stability", common.override_stability, "run even when the step bound is violated");
        sub->add_option("-j,--workers", common.workers, "worker threads for table cells (0: all cores)");
        return sub;
    };
    auto* run = add("run", "single simulation; emits t,mass,energy");
    run->add_option("--record-every", record_every, "record mass and energy every N steps");
    auto* converge = add("converge", "joint (h, tau) refinement table");
    auto* spatial = add("sweep-spatial", "h ladder at fixed tau for every epsilon");
    auto* temporal = add("sweep-temporal", "tau ladder at fixed h for every epsilon");
    auto* stability = add("stability", "step-bound verdicts for all schemes");
    auto* compare = add("compare", "error-versus-time series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (run->parsed()) return cmd_run(common, record_every);
        if (converge->parsed()) return cmd_converge(common);
        if (spatial->parsed()) return cmd_sweep_spatial(common);
        if (temporal->parsed()) return cmd_sweep_temporal(common);
        if (stability->parsed()) return cmd_stability(common);
        if (compare->parsed()) return cmd_compare(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const EvaluationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const StabilityViolation& e) {
        std::cerr << "stability violation: " << e.what() << "\n";
        return kStability;
    } catch (const StepFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kOk;
}
