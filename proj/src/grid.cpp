#include "dirac/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace dirac {

TorusGrid::TorusGrid(double a, double b, int n) : a_(a), b_(b), n_(n) {}

std::vector<double> TorusGrid::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) xs[static_cast<std::size_t>(j)] = x(j);
    return xs;
}

double TorusGrid::mu(int l) const { return 2.0 * std::numbers::pi * l / (b_ - a_); }

TorusGrid make_grid(double a, double b, int n) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("grid: need finite a < b");
    if (n < 4 || n % 2 != 0)
        throw ConfigError("grid: N must be even and >= 4, got " + std::to_string(n));
    return TorusGrid(a, b, n);
}

SpinorField::SpinorField(const TorusGrid& g, std::vector<Spinor> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.size())
        throw ContractError("SpinorField: value count does not match grid size");
}

const Spinor& SpinorField::at(int j) const {
    const int n = size();
    return values[static_cast<std::size_t>(((j % n) + n) % n)];
}

bool SpinorField::all_finite() const {
    for (const auto& s : values)
        if (!std::isfinite(s.up.real()) || !std::isfinite(s.up.imag()) ||
            !std::isfinite(s.down.real()) || !std::isfinite(s.down.imag()))
            return false;
    return true;
}

SpinorField& SpinorField::operator+=(const SpinorField& o) {
    if (o.size() != size()) throw ContractError("SpinorField: size mismatch");
    for (std::size_t j = 0; j < values.size(); ++j) values[j] += o.values[j];
    return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& o) {
    if (o.size() != size()) throw ContractError("SpinorField: size mismatch");
    for (std::size_t j = 0; j < values.size(); ++j) values[j] -= o.values[j];
    return *this;
}

SpinorField& SpinorField::operator*=(Complex s) {
    for (auto& v : values) v *= s;
    return *this;
}

namespace fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
struct PlanCache {
    std::mutex mutex;
    std::map<std::pair<int, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex);
        auto it = plans.find({n, sign});
        if (it != plans.end()) return it->second;
        // Plan on scratch storage; FFTW_UNALIGNED lets any caller buffer reuse it.
        std::vector<Spinor> scratch(static_cast<std::size_t>(n));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const int dims[] = {n};
        fftw_plan p = fftw_plan_many_dft(1, dims, 2, buf, nullptr, 2, 1, buf, nullptr, 2, 1,
                                         sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans.emplace(std::pair{n, sign}, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void transform(std::span<Spinor> data, int sign) {
    static_assert(sizeof(Spinor) == 2 * sizeof(fftw_complex));
    const int n = static_cast<int>(data.size());
    fftw_plan p = cache().get(n, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

}  // namespace fft

SpectralCoeffs dft(const SpinorField& f) {
    SpectralCoeffs c(f.grid);
    c.coeffs = f.values;
    fft::transform(c.coeffs, -1);
    const double inv_n = 1.0 / f.grid.size();
    for (auto& v : c.coeffs) v *= inv_n;
    return c;
}

SpinorField idft(const SpectralCoeffs& c) {
    SpinorField f(c.grid);
    f.values = c.coeffs;
    fft::transform(f.values, +1);
    return f;
}

SpinorField spectral_derivative(const SpinorField& f) {
    SpectralCoeffs c = dft(f);
    const auto& g = f.grid;
    for (int k = 0; k < g.size(); ++k)
        c.coeffs[static_cast<std::size_t>(k)] *= kI * g.mu(g.index_of_slot(k));
    return idft(c);
}

SpinorField centered_difference(const SpinorField& f) {
    SpinorField out(f.grid);
    const int n = f.size();
    const double inv2h = 1.0 / (2.0 * f.grid.h());
    for (int j = 0; j < n; ++j) {
        const Spinor& right = f[j + 1 < n ? j + 1 : 0];
        const Spinor& left = f[j > 0 ? j - 1 : n - 1];
        out[j] = inv2h * (right - left);
    }
    return out;
}

double norm(const SpinorField& f, NormKind kind) {
    const double h = f.grid.h();
    double acc = 0.0;
    switch (kind) {
        case NormKind::l1:
            for (const auto& v : f.values) acc += v.abs();
            return h * acc;
        case NormKind::l2:
            for (const auto& v : f.values) acc += v.norm2();
            return std::sqrt(h * acc);
        case NormKind::linf:
            for (const auto& v : f.values) acc = std::max(acc, v.abs());
            return acc;
    }
    return acc;
}

}  // namespace dirac
