#pragma once

#include "dirac/types.hpp"

#include <span>
#include <vector>

namespace dirac {

/// Uniform periodic grid on [a, b) with N nodes; x_N is identified with x_0.
///
/// Fourier modes are indexed by the signed set l = -N/2, ..., N/2 - 1 with
/// frequencies mu_l = 2*pi*l/(b - a). The l = -N/2 mode is kept as-is.
class TorusGrid {
public:
    TorusGrid() = default;
    TorusGrid(double a, double b, int n);

    double a() const { return a_; }
    double b() const { return b_; }
    int size() const { return n_; }
    double length() const { return b_ - a_; }
    double h() const { return (b_ - a_) / n_; }
    double x(int j) const { return a_ + j * h(); }
    std::vector<double> nodes() const;

    int min_index() const { return -n_ / 2; }
    int max_index() const { return n_ / 2 - 1; }
    double mu(int l) const;
    /// Signed frequency index of FFT slot k in [0, N).
    int index_of_slot(int k) const { return k < n_ / 2 ? k : k - n_; }
    /// FFT slot of signed index l.
    int slot_of_index(int l) const { return ((l % n_) + n_) % n_; }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
    double a_ = 0.0;
    double b_ = 1.0;
    int n_ = 4;
};

/// Builds a grid; throws ConfigError for b <= a, odd N, or N < 4.
TorusGrid make_grid(double a, double b, int n);

/// Discrete wave function: one spinor per node j = 0..N-1.
struct SpinorField {
    TorusGrid grid;
    std::vector<Spinor> values;

    SpinorField() = default;
    explicit SpinorField(const TorusGrid& g) : grid(g), values(static_cast<std::size_t>(g.size())) {}
    SpinorField(const TorusGrid& g, std::vector<Spinor> v);

    int size() const { return static_cast<int>(values.size()); }
    Spinor& operator[](int j) { return values[static_cast<std::size_t>(j)]; }
    const Spinor& operator[](int j) const { return values[static_cast<std::size_t>(j)]; }
    /// Periodic access: at(-1) == at(N-1), at(N) == at(0).
    const Spinor& at(int j) const;

    bool all_finite() const;

    SpinorField& operator+=(const SpinorField& o);
    SpinorField& operator-=(const SpinorField& o);
    SpinorField& operator*=(Complex s);
    friend SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
    friend SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
    friend SpinorField operator*(Complex s, SpinorField a) { return a *= s; }
};

/// Fourier coefficients stored in FFT slot order; use at(l) for signed indices.
struct SpectralCoeffs {
    TorusGrid grid;
    std::vector<Spinor> coeffs;

    SpectralCoeffs() = default;
    explicit SpectralCoeffs(const TorusGrid& g) : grid(g), coeffs(static_cast<std::size_t>(g.size())) {}

    Spinor& at(int l) { return coeffs[static_cast<std::size_t>(grid.slot_of_index(l))]; }
    const Spinor& at(int l) const { return coeffs[static_cast<std::size_t>(grid.slot_of_index(l))]; }
};

/// Forward transform with the 1/N factor: c_l = (1/N) sum_j f_j exp(-2 i pi j l / N).
SpectralCoeffs dft(const SpinorField& f);
/// Inverse transform without normalisation: f_j = sum_l c_l exp(i mu_l (x_j - a)).
SpinorField idft(const SpectralCoeffs& c);

/// Pseudospectral derivative: Fourier coefficients multiplied by i*mu_l.
SpinorField spectral_derivative(const SpinorField& f);
/// Periodic centred difference (f_{j+1} - f_{j-1}) / (2h).
SpinorField centered_difference(const SpinorField& f);

enum class NormKind { l1, l2, linf };

/// l1 = h sum |f_j|, l2 = sqrt(h sum |f_j|^2), linf = max |f_j| (|.| Euclidean on C^2).
double norm(const SpinorField& f, NormKind kind = NormKind::l2);

namespace fft {
/// In-place unnormalised transforms of both spinor components over n nodes.
/// sign = -1 is forward, +1 is backward. Thread-safe.
void transform(std::span<Spinor> data, int sign);
}  // namespace fft

}  // namespace dirac
