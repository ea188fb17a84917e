#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dirac {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Two-component spinor value at one grid node.
struct Spinor {
    Complex up{};
    Complex down{};

    Complex& operator[](std::size_t k) { return k == 0 ? up : down; }
    const Complex& operator[](std::size_t k) const { return k == 0 ? up : down; }

    Spinor& operator+=(const Spinor& o) { up += o.up; down += o.down; return *this; }
    Spinor& operator-=(const Spinor& o) { up -= o.up; down -= o.down; return *this; }
    Spinor& operator*=(Complex s) { up *= s; down *= s; return *this; }

    friend Spinor operator+(Spinor a, const Spinor& b) { return a += b; }
    friend Spinor operator-(Spinor a, const Spinor& b) { return a -= b; }
    friend Spinor operator*(Complex s, Spinor a) { return a *= s; }
    friend Spinor operator*(double s, Spinor a) { return a *= Complex(s); }
    friend bool operator==(const Spinor&, const Spinor&) = default;

    /// Squared Euclidean norm |u|^2 + |d|^2.
    double norm2() const { return std::norm(up) + std::norm(down); }
    double abs() const { return std::sqrt(norm2()); }
};

/// Hermitian inner product a* b.
inline Complex dot(const Spinor& a, const Spinor& b) {
    return std::conj(a.up) * b.up + std::conj(a.down) * b.down;
}

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    Complex m00{}, m01{}, m10{}, m11{};

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    Spinor operator*(const Spinor& v) const {
        return {m00 * v.up + m01 * v.down, m10 * v.up + m11 * v.down};
    }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    Mat2& operator+=(const Mat2& o) { m00 += o.m00; m01 += o.m01; m10 += o.m10; m11 += o.m11; return *this; }
    Mat2& operator-=(const Mat2& o) { m00 -= o.m00; m01 -= o.m01; m10 -= o.m10; m11 -= o.m11; return *this; }
    Mat2& operator*=(Complex s) { m00 *= s; m01 *= s; m10 *= s; m11 *= s; return *this; }
    friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
    friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
    friend Mat2 operator*(Complex s, Mat2 a) { return a *= s; }
    friend Mat2 operator*(double s, Mat2 a) { return a *= Complex(s); }

    Complex det() const { return m00 * m11 - m01 * m10; }
    Mat2 adjoint() const { return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)}; }
    /// Inverse; caller checks det() first when singularity is possible.
    Mat2 inverse() const {
        const Complex d = det();
        return {m11 / d, -m01 / d, -m10 / d, m00 / d};
    }
    double max_abs() const {
        return std::max(std::max(std::abs(m00), std::abs(m01)), std::max(std::abs(m10), std::abs(m11)));
    }
};

namespace pauli {
inline constexpr Mat2 sigma1{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 sigma3{1.0, 0.0, 0.0, -1.0};
}  // namespace pauli

// Error hierarchy. The CLI maps these onto exit codes 2/3/4.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StabilityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A time step could not be completed (singular solve, non-convergence, blow-up).
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, long step = -1) : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

}  // namespace dirac
