#include "oracles.hpp"

#include "dirac/harness.hpp"

#include <doctest.h>

#include <atomic>
#include <sstream>

using namespace dirac;
using oracle::pi;

namespace {

// Free problem whose horizon is 2 for every epsilon.
ProblemFamily free_family() {
    return [](double eps) {
        auto p = presets::free_bandlimited();
        p.epsilon = eps;
        p.T0 = eps > 0.0 ? 2.0 * eps : 2.0;
        return p;
    };
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("measure_errors") {
    const auto p = presets::periodic_smooth(1.0);
    const auto g = p.grid(32);
    const auto f = p.initial_field(g);
    const auto r0 = measure_errors(f, f);
    CHECK(r0.e_phi == 0.0);
    CHECK(r0.e_rho == 0.0);
    CHECK(r0.e_J == 0.0);

    const double delta = 1e-3;
    SpinorField shifted = f;
    for (auto& v : shifted.values) v.up += delta;
    const auto r = measure_errors(shifted, f);
    CHECK(r.e_phi == doctest::Approx(delta * std::sqrt(2.0 * pi)).epsilon(1e-12));
    // |phi1 + d|^2 - |phi1|^2 = 2 d Re phi1 + d^2 ; J changes by 2 d Re phi2.
    double rho = 0.0, J = 0.0;
    for (const auto& v : f.values) {
        rho += std::abs(2.0 * delta * v.up.real() + delta * delta);
        J += std::abs(2.0 * delta * v.down.real());
    }
    CHECK(r.e_rho == doctest::Approx(g.h() * rho).epsilon(1e-10));
    CHECK(r.e_J == doctest::Approx(g.h() * J).epsilon(1e-10));

    CHECK_THROWS_AS(measure_errors(f, p.initial_field(p.grid(64))), ContractError);
}

TEST_CASE("run_simulation") {
    const auto p = presets::periodic_smooth(1.0);
    const auto cfg = make_config(p, Scheme::CNFD, pi / 16, 0.01);

    const auto none = run_simulation(p, cfg, {}, 0.0);
    CHECK(none.steps == 0);
    CHECK(norm(none.final - p.initial_field(p.grid_for_h(pi / 16))) == 0.0);

    RunOptions rec;
    rec.record_every = 20;
    const auto run = run_simulation(p, cfg, rec);
    CHECK(run.steps == 200);
    CHECK(run.t_final == doctest::Approx(2.0));
    CHECK(run.series.size() == 11);
    const double m0 = run.series.front().mass;
    for (const auto& s : run.series) {
        CHECK(std::abs(s.mass - m0) <= 1e-10 * m0);
        CHECK(std::isfinite(s.energy));
    }
    CHECK(run.wall_seconds >= 0.0);

    const auto free = presets::free_bandlimited();
    const double h = pi / 16;
    const double bound = tau_max(Scheme::LFFD, h, 0.0, 0.0).value();
    const double tau = 2.0 / std::floor(2.0 / (1.5 * bound));
    CHECK_THROWS_AS(run_simulation(free, make_config(free, Scheme::LFFD, h, tau)), StabilityViolation);

    RunOptions over;
    over.override_stability = true;
    auto noisy = free;
    noisy.T0 = 2000 * tau;
    noisy.phi0 = [base = free.phi0](double x) { return base(x) + Spinor{1e-6 * std::cos(15.0 * x), 0.0}; };
    noisy.phi0_deriv.reset();
    try {
        run_simulation(noisy, make_config(noisy, Scheme::LFFD, h, tau), over);
        FAIL("expected blow-up");
    } catch (const StepFailure& e) {
        CHECK(e.step() > 1);
        CHECK(std::string(e.what()).find("blow-up") != std::string::npos);
    }

    CHECK_THROWS_AS(run_simulation(p, make_config(p, Scheme::CNFD, pi / 16, 0.3)), ConfigError);
    RunOptions capped;
    capped.max_steps = 10;
    CHECK_THROWS_AS(run_simulation(p, cfg, capped), ConfigError);
    auto mismatched = cfg;
    mismatched.epsilon = 0.5;
    CHECK_THROWS_AS(run_simulation(p, mismatched), ContractError);
}

TEST_CASE("CNFD diagonal cell density error") {
    const auto p = presets::periodic_smooth(1.0);
    const auto ref = reference_solution(p, ReferenceSpec{false, pi / 256, 5e-3}, {2.0});
    const auto run = run_simulation(p, make_config(p, Scheme::CNFD, pi / 64, 0.05));
    const auto r = measure_errors(run.final, ref.on_grid(2.0, run.final.grid));
    CHECK(r.e_rho >= 3.67e-2 / 2);
    CHECK(r.e_rho <= 3.67e-2 * 2);
}

TEST_CASE("convergence table on the free problem") {
    TableRequest req;
    req.title = "free";
    req.family = free_family();
    req.scheme = Scheme::CNFD;
    req.epsilons = {1.0, 0.25, 1.0 / 16};
    const auto t = convergence_table(req, pi / 8, 0.1, 3);
    REQUIRE(t.cells.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(t.failures[i][k].empty());
            CHECK(t.cells[i][k].e_phi == doctest::Approx(t.cells[0][k].e_phi).epsilon(1e-9));
        }
        CHECK(t.order(i, 2) == doctest::Approx(2.0).epsilon(0.1));
        CHECK(std::isnan(t.order(i, 0)));
    }
    CHECK(t.diagonal == std::vector<int>{0, 1, 2});

    const std::string csv = emit_csv(t);
    CHECK(count_lines(csv) == 1 + 9);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.rfind("epsilon,level,h,tau,t,e_phi,e_rho,e_J,order_phi,order_rho,order_J,diagonal\n", 0) == 0);
    CHECK(emit_csv(convergence_table(req, pi / 8, 0.1, 3)) == csv);
    CHECK(render_text(t).find('*') != std::string::npos);
}

TEST_CASE("failed cells are NaN and the table is still emitted") {
    TableRequest req;
    req.family = free_family();
    req.scheme = Scheme::LFFD;
    req.epsilons = {1.0};
    // tau = 0.3 does not divide the horizon and exceeds the CFL bound at this h.
    req.ladder = {{pi / 8, 0.3}, {pi / 16, 0.02}};
    const auto t = run_table(req);
    CHECK(std::isnan(t.error(0, 0)));
    CHECK_FALSE(t.failures[0][0].empty());
    CHECK(std::isfinite(t.error(0, 1)));
    CHECK(std::isnan(t.order(0, 1)));
    const std::string csv = emit_csv(t);
    CHECK(count_lines(csv) == 3);
    CHECK(csv.find("nan") != std::string::npos);
}

TEST_CASE("emission layout") {
    ConvergenceTable empty;
    CHECK(emit_csv(empty) == "epsilon,level,h,tau,t,e_phi,e_rho,e_J,order_phi,order_rho,order_J,diagonal\n");

    ConvergenceTable t;
    for (int i = 0; i < 5; ++i) t.epsilons.push_back(std::pow(0.25, i));
    for (int k = 0; k < 5; ++k) t.levels.push_back({pi / 64 / (1 << k), 0.05 / (1 << k)});
    t.cells.assign(5, std::vector<ErrorReport>(5));
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k) t.cells[i][k].e_phi = t.cells[i][k].e_rho = t.cells[i][k].e_J = 0.1 / (1 << (2 * k));
    t.diagonal.assign(5, -1);
    t.failures.assign(5, std::vector<std::string>(5));
    const std::string csv = emit_csv(t);
    CHECK(count_lines(csv) == 26);
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::getline(in, row);
    CHECK(row == "1,1,0.0245437,0.025,0,0.025,0.025,0.025,2,2,2,0");

    std::vector<ErrorSeries> s{{1.0, {{0.5, 1e-3}, {1.0, 2e-3}}}, {0.25, {{4.0, 3e-3}}}};
    CHECK(emit_plot_data(s) == "epsilon,t,e_phi\n1,0.5,0.001\n1,1,0.002\n0.25,4,0.003\n");
}

TEST_CASE("make_truncated_domain") {
    const auto d1 = make_truncated_domain(-7.0, 7.0, 1.0, 1.0, 1.0 / 16);
    CHECK(d1.a == -8.0);
    CHECK(d1.b == 8.0);
    CHECK(d1.N == 256);
    const auto d4 = make_truncated_domain(-7.0, 7.0, 1.0, 0.25, 1.0 / 16);
    CHECK(d4.a == -11.0);
    CHECK(d4.b == 11.0);
    CHECK(d4.N == 352);
    const auto odd = make_truncated_domain(-7.0, 7.0, 1.0, 1.0, 16.0 / 5);
    CHECK(odd.N % 2 == 0);
    CHECK(odd.N * (16.0 / 5) >= 16.0);
    CHECK_THROWS_AS(make_truncated_domain(-7.0, 7.0, 1.0, 0.0, 0.1), ConfigError);

    const auto ws = presets::whole_space_gaussian(0.25);
    CHECK(ws.grid_for_h(1.0 / 16).size() == d4.N);
}

TEST_CASE("compare series") {
    CompareRequest req;
    req.family = free_family();
    req.scheme = Scheme::CNFD;
    req.epsilons = {1.0, 0.5};
    req.h = pi / 16;
    req.tau = 0.02;
    req.samples = 4;
    const auto s = compare_series(req);
    REQUIRE(s.size() == 2);
    REQUIRE(s[0].points.size() == 4);
    CHECK(s[0].points.back().first == doctest::Approx(2.0));
    for (std::size_t k = 1; k < 4; ++k) CHECK(s[0].points[k].second >= s[0].points[k - 1].second * 0.5);
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}
