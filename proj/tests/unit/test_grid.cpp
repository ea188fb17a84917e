#include "oracles.hpp"

#include <doctest.h>

using namespace dirac;
using oracle::pi;

TEST_CASE("make_grid spacing and frequencies") {
    const auto g = make_grid(0.0, 2.0 * pi, 4);
    CHECK(g.h() == doctest::Approx(pi / 2));
    for (int l = -2; l <= 1; ++l) CHECK(g.mu(l) == doctest::Approx(l));
    CHECK(g.min_index() == -2);
    CHECK(g.max_index() == 1);

    CHECK(make_grid(0.0, 2.0 * pi, 128).h() == doctest::Approx(pi / 64));

    const auto w = make_grid(-9.0, 9.0, 36);
    CHECK(w.h() == doctest::Approx(0.5));
    CHECK(w.mu(3) == doctest::Approx(pi * 3 / 9));
    CHECK(w.x(0) == -9.0);
    CHECK(w.x(35) == doctest::Approx(8.5));
}

TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 5), ConfigError);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 8), ConfigError);
    CHECK_THROWS_AS(make_grid(1.0, 0.0, 8), ConfigError);
}

TEST_CASE("periodic access wraps") {
    const auto g = make_grid(0.0, 1.0, 4);
    SpinorField f(g);
    for (int j = 0; j < 4; ++j) f[j] = Spinor{Complex(j), 0.0};
    CHECK(f.at(-1).up == Complex(3.0));
    CHECK(f.at(4).up == Complex(0.0));
    CHECK(f.at(5).up == Complex(1.0));
}

TEST_CASE("dft of constant and single mode") {
    const auto g = make_grid(0.0, 2.0 * pi, 8);
    SpinorField c(g);
    for (auto& v : c.values) v = Spinor{2.0, Complex(0.0, -1.0)};
    const auto cc = dft(c);
    CHECK(std::abs(cc.at(0).up - 2.0) < 1e-14);
    CHECK(std::abs(cc.at(0).down - Complex(0.0, -1.0)) < 1e-14);
    for (int l = -4; l < 4; ++l)
        if (l != 0) CHECK(oracle::spinor_dist(cc.at(l), Spinor{}) < 1e-14);

    const auto m = dft(oracle::mode(g, 1, Spinor{1.0, 0.0}));
    CHECK(oracle::spinor_dist(m.at(1), Spinor{1.0, 0.0}) < 1e-14);
    for (int l = -4; l < 4; ++l)
        if (l != 1) CHECK(oracle::spinor_dist(m.at(l), Spinor{}) < 1e-14);
}

TEST_CASE("dft and idft match direct summation") {
    std::mt19937 rng(7);
    const auto g = make_grid(-1.0, 2.5, 8);
    const auto f = oracle::random_field(g, rng);
    const auto got = dft(f);
    const auto want = oracle::dft(f);
    for (int l = -4; l < 4; ++l) CHECK(oracle::spinor_dist(got.at(l), want[static_cast<std::size_t>(l + 4)]) < 1e-13);

    SpectralCoeffs c(g);
    std::vector<Spinor> raw(8);
    for (int l = -4; l < 4; ++l) c.at(l) = raw[static_cast<std::size_t>(l + 4)] = oracle::random_spinor(rng);
    CHECK(oracle::l2_diff(idft(c), oracle::idft(g, raw)) < 1e-13);

    SpectralCoeffs zero(g);
    CHECK(oracle::l2(idft(zero)) == 0.0);
    SpectralCoeffs one(g);
    one.at(0) = Spinor{1.0, 2.0};
    for (const auto& v : idft(one).values) CHECK(oracle::spinor_dist(v, Spinor{1.0, 2.0}) < 1e-14);
}

TEST_CASE("spectral derivative") {
    const auto g = make_grid(0.0, 2.0 * pi, 16);
    SpinorField c(g);
    for (auto& v : c.values) v = Spinor{1.0, 3.0};
    CHECK(oracle::l2(spectral_derivative(c)) < 1e-13);

    const auto e = oracle::mode(g, 1, Spinor{1.0, 0.0});
    const auto d = spectral_derivative(e);
    for (int j = 0; j < g.size(); ++j) CHECK(std::abs(d[j].up - kI * e[j].up) < 1e-13);

    std::mt19937 rng(11);
    const auto g8 = make_grid(0.3, 4.1, 8);
    const auto f = oracle::random_field(g8, rng);
    CHECK(oracle::l2_diff(spectral_derivative(f), oracle::spectral_derivative(f)) < 1e-12 * oracle::l2(f) / g8.h());
}

TEST_CASE("centered difference") {
    const auto g = make_grid(0.0, 2.0 * pi, 16);
    SpinorField c(g);
    for (auto& v : c.values) v = Spinor{1.0, -1.0};
    CHECK(oracle::l2(centered_difference(c)) == 0.0);

    const auto f = oracle::mode(g, 1, Spinor{1.0, 0.0});
    const auto d = centered_difference(f);
    const Complex factor(0.0, std::sin(g.mu(1) * g.h()) / g.h());
    for (int j = 0; j < g.size(); ++j) CHECK(std::abs(d[j].up - factor * f[j].up) < 1e-13);

    const auto g4 = make_grid(0.0, 1.0, 4);
    SpinorField v(g4);
    for (int j = 0; j < 4; ++j) v[j] = Spinor{Complex(j * j + 1.0), 0.0};
    CHECK(std::abs(centered_difference(v)[0].up - (v[1].up - v[3].up) / (2.0 * g4.h())) < 1e-14);
}

TEST_CASE("norms") {
    const auto g = make_grid(0.0, 2.0 * pi, 8);
    SpinorField z(g);
    CHECK(norm(z, NormKind::l1) == 0.0);
    CHECK(norm(z, NormKind::l2) == 0.0);
    CHECK(norm(z, NormKind::linf) == 0.0);

    SpinorField one(g);
    for (auto& v : one.values) v = Spinor{1.0, 0.0};
    CHECK(norm(one) == doctest::Approx(std::sqrt(2.0 * pi)));

    std::mt19937 rng(3);
    const auto f = oracle::random_field(g, rng);
    double s1 = 0.0, s2 = 0.0, mx = 0.0;
    for (const auto& v : f.values) {
        const double a = std::sqrt(std::norm(v.up) + std::norm(v.down));
        s1 += a;
        s2 += a * a;
        mx = std::max(mx, a);
    }
    CHECK(norm(f, NormKind::l1) == doctest::Approx(g.h() * s1).epsilon(1e-14));
    CHECK(norm(f, NormKind::l2) == doctest::Approx(std::sqrt(g.h() * s2)).epsilon(1e-14));
    CHECK(norm(f, NormKind::linf) == doctest::Approx(mx).epsilon(1e-14));
}

TEST_CASE("property: round trip, Parseval, single-mode derivative, summation by parts") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = oracle::random_grid(rng);
        const auto f = oracle::random_field(g, rng);
        const double nf = norm(f);

        CHECK(norm(idft(dft(f)) - f) <= 1e-13 * nf);

        const auto c = dft(f);
        double sc = 0.0;
        for (const auto& v : c.coeffs) sc += std::norm(v.up) + std::norm(v.down);
        CHECK(nf * nf == doctest::Approx(g.length() * sc).epsilon(1e-12));

        std::uniform_int_distribution<int> pick(g.min_index() + 1, g.max_index());
        const int l = pick(rng);
        const auto m = oracle::mode(g, l, oracle::random_spinor(rng));
        const auto dm = spectral_derivative(m);
        SpinorField want = Complex(0.0, g.mu(l)) * m;
        CHECK(norm(dm - want) <= 1e-12 * std::max(1.0, std::abs(g.mu(l))) * norm(m));

        const auto gg = oracle::random_field(g, rng);
        const auto df = centered_difference(f), dg = centered_difference(gg);
        Complex lhs = 0.0, rhs = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            lhs += dot(gg[j], df[j]);
            rhs -= dot(dg[j], f[j]);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}
