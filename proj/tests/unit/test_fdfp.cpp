#include "oracles.hpp"

#include "dirac/stepper.hpp"

#include <doctest.h>

using namespace dirac;
using oracle::pi;

namespace {

std::vector<Mat2> random_hermitian(int n, std::mt19937& rng, double scale = 0.5) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<Mat2> G(static_cast<std::size_t>(n));
    for (auto& m : G) {
        const double a = u(rng), d = u(rng), b = u(rng), c = u(rng);
        m = Mat2{a, Complex(b, c), Complex(b, -c), d};
    }
    return G;
}

SpinorField apply_H(const SpinorField& f, const std::vector<Mat2>& G) {
    const auto df = oracle::spectral_derivative(f);
    SpinorField out(f.grid);
    for (int j = 0; j < f.size(); ++j)
        out[j] = Complex(0.0, -1.0) * oracle::mul(oracle::s1, df[j]) +
                 oracle::mul(oracle::add(oracle::s3, G[static_cast<std::size_t>(j)]), f[j]);
    return out;
}

double max_abs(const SpinorField& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, v.abs());
    return m;
}

TorusGrid small_grid(std::mt19937& rng) { return oracle::random_grid(rng, 24); }

}  // namespace

TEST_CASE("CNFP solves its defining equation") {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = small_grid(rng);
        const auto G = random_hermitian(g.size(), rng, 0.3);
        const double tau = 0.05;
        const auto phi = oracle::random_field(g, rng);
        CnfpSolver s;
        s.prepare(g, tau);
        const auto next = s.step(phi, G);
        const SpinorField mid = 0.5 * (next + phi);
        const SpinorField lhs = Complex(0.0, 1.0 / tau) * (next - phi);
        const SpinorField rhs = apply_H(mid, G);
        CHECK(norm(lhs - rhs) <= 1e-10 * (norm(lhs) + norm(rhs)));
        CHECK(norm(next) == doctest::Approx(norm(phi)).epsilon(1e-13));
        CHECK(s.diagnostics().iterations > 1);
    }
}

TEST_CASE("CNFP zero field and free Cayley update") {
    const auto g = make_grid(0.0, 2.0 * pi, 16);
    const std::vector<Mat2> G(16, Mat2::zero());
    CnfpSolver s;
    s.prepare(g, 0.1);
    CHECK(max_abs(s.step(SpinorField(g), G)) == 0.0);
    CHECK(s.diagnostics().iterations == 1);

    const int l = -3;
    const double tau = 0.1;
    const Spinor v{Complex(0.2, -0.4), Complex(1.0, 0.5)};
    const auto next = s.step(oracle::mode(g, l, v), G);
    CHECK(s.diagnostics().iterations == 1);
    const Mat2 D = oracle::add(oracle::scale(g.mu(l), oracle::s1), oracle::s3);
    const Mat2 cayley = oracle::mat_mul(oracle::inv(oracle::add(oracle::I2, oracle::scale(Complex(0.0, tau / 2), D))),
                                        oracle::add(oracle::I2, oracle::scale(Complex(0.0, -tau / 2), D)));
    const Spinor got = oracle::amplitude(next, l);
    CHECK(oracle::spinor_dist(got, oracle::mul(cayley, v)) < 1e-13);
    CHECK(got.abs() == doctest::Approx(v.abs()).epsilon(1e-14));
}

TEST_CASE("CNFP non-convergence is a step failure") {
    const auto g = make_grid(0.0, 2.0 * pi, 16);
    std::vector<Mat2> G(16, Mat2{50.0, 0.0, 0.0, -50.0});
    CnfpSolver s(FixedPointConfig{1e-14, 5});
    s.prepare(g, 1.0);
    SpinorField f(g);
    for (auto& v : f.values) v = Spinor{1.0, 0.5};
    CHECK_THROWS_AS(s.step(f, G), StepFailure);
}

TEST_CASE("SIFP1, SIFP2, LFFP satisfy their defining equations") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = small_grid(rng);
        const auto G = random_hermitian(g.size(), rng);
        const double tau = 0.2 * g.h();
        const auto cur = oracle::random_field(g, rng), prev = oracle::random_field(g, rng);
        const double scale = norm(cur) / g.h() + norm(prev) / tau;
        const std::vector<Mat2> none(static_cast<std::size_t>(g.size()), Mat2::zero());
        {
            const auto next = sifp1_update(cur, prev, G, tau);
            const SpinorField lhs = Complex(0.0, 0.5 / tau) * (next - prev);
            const auto d = oracle::spectral_derivative(cur);
            SpinorField rhs(g);
            for (int j = 0; j < g.size(); ++j)
                rhs[j] = Complex(0.0, -1.0) * oracle::mul(oracle::s1, d[j]) +
                         oracle::mul(oracle::add(oracle::s3, G[static_cast<std::size_t>(j)]), 0.5 * (next[j] + prev[j]));
            CHECK(norm(lhs - rhs) <= 1e-11 * scale);
        }
        {
            const auto next = sifp2_update(cur, prev, G, tau);
            const SpinorField lhs = Complex(0.0, 0.5 / tau) * (next - prev);
            SpinorField rhs = apply_H(0.5 * (next + prev), none);
            for (int j = 0; j < g.size(); ++j) rhs[j] += oracle::mul(G[static_cast<std::size_t>(j)], cur[j]);
            CHECK(norm(lhs - rhs) <= 1e-11 * scale);
        }
        {
            const auto next = lffp_update(cur, prev, G, tau);
            const SpinorField lhs = Complex(0.0, 0.5 / tau) * (next - prev);
            CHECK(norm(lhs - apply_H(cur, G)) <= 1e-11 * scale);
        }
    }
}

TEST_CASE("three-level FP schemes: zero history and free per-mode recurrences") {
    const auto g = make_grid(0.0, 2.0 * pi, 16);
    const std::vector<Mat2> G(16, Mat2::zero());
    const SpinorField z(g);
    CHECK(max_abs(sifp1_update(z, z, G, 0.1)) == 0.0);
    CHECK(max_abs(sifp2_update(z, z, G, 0.1)) == 0.0);
    CHECK(max_abs(lffp_update(z, z, G, 0.1)) == 0.0);

    std::mt19937 rng(14);
    const Complex i(0.0, 1.0);
    const Mat2 iI = oracle::scale(i, oracle::I2);
    for (int l : {-8, -5, 0, 4, 7}) {
        const double tau = 0.05, mu = g.mu(l);
        const Spinor a = oracle::random_spinor(rng), b = oracle::random_spinor(rng);
        const auto cur = oracle::mode(g, l, a), prev = oracle::mode(g, l, b);
        // i (x - b)/2tau = mu s1 a + s3 (x + b)/2
        const Spinor w1 = oracle::mul(oracle::inv(oracle::add(iI, oracle::scale(-tau, oracle::s3))),
                                      oracle::mul(oracle::scale(2.0 * tau * mu, oracle::s1), a) +
                                          oracle::mul(oracle::add(iI, oracle::scale(tau, oracle::s3)), b));
        CHECK(oracle::spinor_dist(oracle::amplitude(sifp1_update(cur, prev, G, tau), l), w1) < 1e-12);
        const Mat2 D = oracle::add(oracle::scale(mu, oracle::s1), oracle::s3);
        const Spinor w2 = oracle::mul(oracle::inv(oracle::add(iI, oracle::scale(-tau, D))),
                                      oracle::mul(oracle::add(iI, oracle::scale(tau, D)), b));
        CHECK(oracle::spinor_dist(oracle::amplitude(sifp2_update(cur, prev, G, tau), l), w2) < 1e-12);
        const Spinor w3 = b - oracle::mul(oracle::scale(Complex(0.0, 2.0 * tau), D), a);
        CHECK(oracle::spinor_dist(oracle::amplitude(lffp_update(cur, prev, G, tau), l), w3) < 1e-12);
    }
}

TEST_CASE("CNFP conserves mass and energy") {
    const auto p = presets::periodic_smooth(1.0);
    const auto g = p.grid(32);
    Stepper st(p, g, Scheme::CNFP, 0.01);
    const double m0 = mass(st.current()), e0 = energy_fp(st.current(), p.potentials, 1.0);
    st.advance(1000);
    CHECK(std::abs(mass(st.current()) - m0) <= 1e-12 * m0);
    CHECK(std::abs(energy_fp(st.current(), p.potentials, 1.0) - e0) <= 1e-10 * std::abs(e0));
}

TEST_CASE("SIFP1 and SIFP2 stability regimes") {
    const auto free = presets::free_bandlimited();
    const auto g = free.grid(64);
    const double h = g.h();
    {
        Stepper st(free, g, Scheme::SIFP1, 0.9 * h / pi);
        const double n0 = norm(st.current());
        st.advance(10000);
        CHECK(norm(st.current()) <= 2.0 * n0);
    }
    {
        // Seed the highest mode so the instability is not hidden behind round-off.
        auto noisy = free;
        noisy.phi0 = [base = free.phi0](double x) { return base(x) + Spinor{1e-8 * std::cos(32.0 * x), 0.0}; };
        noisy.phi0_deriv.reset();
        Stepper st(noisy, g, Scheme::SIFP1, 1.2 * h / pi);
        const double n0 = norm(st.current());
        double grown = 0.0;
        for (int k = 0; k < 2000 && grown < 1e3 * n0; ++k) {
            st.step();
            grown = norm(st.current());
        }
        CHECK(grown >= 1e3 * n0);
    }
    {
        const auto p = presets::periodic_smooth(1.0);
        const double tau = 0.9 / (p.potentials.V_max + p.potentials.A_max);
        Stepper st(p, p.grid(32), Scheme::SIFP2, tau);
        const double n0 = norm(st.current());
        st.advance(10000);
        CHECK(norm(st.current()) <= 2.0 * n0);
    }
}

TEST_CASE("property: CNFP time symmetry") {
    std::mt19937 rng(15);
    std::uniform_real_distribution<double> eps_dist(0.1, 1.0), tau_dist(0.005, 0.05);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = presets::periodic_smooth(eps_dist(rng));
        const auto g = p.grid(32);
        Stepper st(p, g, Scheme::CNFP, tau_dist(rng));
        st.advance(50);
        st.reverse();
        st.advance(50);
        const auto phi0 = p.initial_field(g);
        CHECK(norm(st.current() - phi0) <= 1e-11 * norm(phi0));
    }
}

TEST_CASE("FP schemes converge at second order in time on band-limited free data") {
    const auto p = presets::free_bandlimited(1.0);
    const auto g = p.grid(16);
    for (Scheme s : {Scheme::CNFP, Scheme::SIFP1, Scheme::SIFP2, Scheme::LFFP}) {
        double prev = 0.0;
        for (int k = 0; k < 3; ++k) {
            const long n = 100L << k;
            Stepper st(p, g, s, 1.0 / n);
            st.advance(n);
            const double e = norm(st.current() - oracle::free_exact(p.initial_field(g), 1.0));
            if (k > 0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.1));
            prev = e;
        }
    }
}
