#include "oracles.hpp"

#include "dirac/reference.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dirac;
using oracle::pi;

namespace {

DiracProblem constant_V_problem(double eps, double v) {
    DiracProblem p = presets::free_bandlimited();
    p.name = "constant-V";
    p.epsilon = eps;
    p.potentials.V = [v](double, double) { return v; };
    p.potentials.V_max = std::abs(v);
    return p;
}

std::filesystem::path scratch_dir(const std::string& tag) {
    auto d = std::filesystem::temp_directory_path() / ("dirac_ref_test_" + tag);
    std::filesystem::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("free exact propagator matches the matrix exponential") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = oracle::random_grid(rng, 32);
        const auto f = oracle::random_field(g, rng);
        std::uniform_real_distribution<double> tt(-3.0, 3.0);
        const double t = tt(rng);
        CHECK(norm(free_dirac_exact(f, t) - oracle::free_exact(f, t)) <= 1e-12 * norm(f));
    }
    const auto g = make_grid(0.0, 2.0 * pi, 16);
    std::mt19937 r2(1);
    const auto f = oracle::random_field(g, r2);
    CHECK(norm(free_dirac_exact(f, 0.0) - f) <= 1e-14 * norm(f));
    CHECK(norm(free_dirac_exact(free_dirac_exact(f, 0.7), -0.7) - f) <= 1e-13 * norm(f));
}

TEST_CASE("TSFP is exact for the free problem and the constant-V identity") {
    const auto p = presets::free_bandlimited();
    const auto g = p.grid(16);
    TsfpStepper st(p, g);
    st.advance_to(1.3, 0.1);
    CHECK(st.time() == doctest::Approx(1.3));
    CHECK(norm(st.current() - free_dirac_exact(p.initial_field(g), 1.3)) <= 1e-13);

    // Constant V commutes with the free operator: Phi(t) = exp(-i eps V t) free(t).
    const auto q = constant_V_problem(0.5, 0.8);
    TsfpStepper sq(q, g);
    sq.advance_to(2.0, 0.25);
    const SpinorField want = std::polar(1.0, -0.5 * 0.8 * 2.0) * free_dirac_exact(q.initial_field(g), 2.0);
    CHECK(norm(sq.current() - want) <= 1e-13);
}

TEST_CASE("TSFP conserves mass and converges at second order") {
    const auto p = presets::periodic_smooth(1.0);
    const auto g = p.grid(64);
    TsfpStepper st(p, g);
    const double m0 = mass(st.current());
    st.advance_to(2.0, 0.01);
    CHECK(std::abs(mass(st.current()) - m0) <= 1e-13 * m0);

    TsfpStepper fine(p, g);
    fine.advance_to(1.0, 1e-4);
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
        TsfpStepper s(p, g);
        s.advance_to(1.0, 0.05 / (1 << k));
        const double e = norm(s.current() - fine.current());
        if (k > 0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.1));
        prev = e;
    }

    const SpinorField one = tsfp_step(p.initial_field(g), p, 0.0, 0.01);
    TsfpStepper st1(p, g);
    st1.step(0.01);
    CHECK(norm(one - st1.current()) == 0.0);
}

TEST_CASE("reference_solution contracts") {
    const auto p = presets::periodic_smooth(1.0);
    CHECK_THROWS_AS(reference_solution(p, ReferenceSpec{true, 0.1, 0.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(reference_solution(p, ReferenceSpec{false, 0.0, 0.01}, {1.0}), ConfigError);

    const auto ref = reference_solution(p, ReferenceSpec{false, pi / 32, 0.01}, {0.5, 0.25});
    CHECK(ref.snapshots().size() == 2);
    CHECK_NOTHROW(ref.at(0.25));
    CHECK_THROWS_AS(ref.at(0.3), ContractError);

    const auto free = presets::free_bandlimited();
    const auto ex = reference_solution(free, ReferenceSpec{true, pi / 16, 0.0}, {2.0});
    CHECK(norm(ex.at(2.0) - free_dirac_exact(free.initial_field(free.grid(32)), 2.0)) == 0.0);
}

TEST_CASE("resolution checks and restriction") {
    const auto p = presets::periodic_smooth(1.0);
    const ReferenceSpec spec{false, pi / 128, 0.005};
    CHECK_NOTHROW(check_reference_resolution(spec, p.grid(64), 0.02, p));
    CHECK_THROWS_AS(check_reference_resolution(spec, p.grid(64), 0.01, p), ConfigError);
    CHECK_THROWS_AS(check_reference_resolution(spec, p.grid(48), 0.05, p), ConfigError);
    CHECK_NOTHROW(check_reference_resolution(ReferenceSpec{true, pi / 16, 0.0}, p.grid(48), 1e-9, p));

    const auto fine = p.initial_field(p.grid(256));
    const auto coarse = restrict_to_grid(fine, p.grid(64));
    CHECK(norm(coarse - p.initial_field(p.grid(64))) == 0.0);
    CHECK_THROWS_AS(restrict_to_grid(fine, p.grid(96)), ConfigError);

    // Band-limited data interpolates exactly onto a non-nesting grid.
    const auto free = presets::free_bandlimited();
    const auto interp = restrict_to_grid(free.initial_field(free.grid(32)), free.grid(24), true);
    CHECK(norm(interp - free.initial_field(free.grid(24))) <= 1e-13);
}

TEST_CASE("reference cache round trip") {
    const auto p = presets::periodic_smooth(1.0);
    const ReferenceSpec spec{false, pi / 16, 0.05};
    const std::vector<double> times{0.5, 1.0};
    const auto ref = reference_solution(p, spec, times);

    const std::string bytes = reference_cache::encode(ref);
    CHECK(bytes.substr(0, 5) == "DREF1");
    CHECK(bytes.size() == 5 + 8 * 4 + 8 * 2 + 2 * 32 * 4 * 8);
    const auto back = reference_cache::decode(bytes);
    CHECK(back.grid() == ref.grid());
    for (double t : times) CHECK(norm(back.at(t) - ref.at(t)) == 0.0);
    CHECK_THROWS_AS(reference_cache::decode("DREF0" + bytes.substr(5)), ConfigError);
    CHECK_THROWS_AS(reference_cache::decode(bytes.substr(0, bytes.size() - 3)), ConfigError);

    const std::string h1 = reference_cache::config_hash(p, spec, times);
    CHECK(h1 == reference_cache::config_hash(p, spec, times));
    CHECK(h1 != reference_cache::config_hash(p, ReferenceSpec{false, pi / 16, 0.025}, times));
    CHECK(h1 != reference_cache::config_hash(presets::periodic_smooth(0.5), spec, times));
    CHECK(h1 != reference_cache::config_hash(p, spec, {0.5}));

    const auto dir = scratch_dir("roundtrip");
    reference_cache::store(dir, h1, ref, p, spec);
    CHECK(std::filesystem::exists(dir / (h1 + ".dref")));
    std::ifstream man(dir / (h1 + ".json"));
    std::string manifest((std::istreambuf_iterator<char>(man)), {});
    CHECK(manifest.find(h1) != std::string::npos);
    CHECK(manifest.find("potential-first") != std::string::npos);
    const auto loaded = reference_cache::load(dir, h1);
    REQUIRE(loaded);
    CHECK(norm(loaded->at(1.0) - ref.at(1.0)) == 0.0);
    CHECK_FALSE(reference_cache::load(dir, "0000000000000000"));

    // The cached wrapper reuses the stored entry and recovers from a corrupt one.
    const auto cached = cached_reference_solution(p, spec, times, dir);
    CHECK(norm(cached.at(0.5) - ref.at(0.5)) == 0.0);
    {
        std::ofstream corrupt(dir / (h1 + ".dref"), std::ios::binary | std::ios::trunc);
        corrupt << "garbage";
    }
    const auto rebuilt = cached_reference_solution(p, spec, times, dir);
    CHECK(norm(rebuilt.at(0.5) - ref.at(0.5)) == 0.0);
    CHECK(reference_cache::load(dir, h1).has_value());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
    std::filesystem::remove_all(dir);
}
