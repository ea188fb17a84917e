#pragma once

// Shared update kernels for the finite-difference and pseudospectral variants.
// Each family differs only in how d/dx is discretised.

#include "dirac/grid.hpp"

#include <functional>
#include <span>

namespace dirac::detail {

/// [(i - eps tau V) I - tau sigma3 + eps tau A1 sigma1] Phi^{n+1}
///   = -2 i tau sigma1 D Phi^n + [(i + eps tau V) I + tau (sigma3 - eps A1 sigma1)] Phi^{n-1}
SpinorField semi_implicit_pointwise(const SpinorField& deriv_curr, const SpinorField& prev,
                                    std::span<const Mat2> G, double tau);

/// Per mode: (i I - tau s_l sigma1 - tau sigma3) Phi~^{n+1}
///   = (i I + tau s_l sigma1 + tau sigma3) Phi~^{n-1} + 2 tau (G Phi^n)~
SpinorField semi_implicit_modal(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G,
                                double tau, const std::function<double(int)>& symbol);

/// Phi^{n+1} = Phi^{n-1} - 2 tau sigma1 D Phi^n - 2 i tau (sigma3 + G) Phi^n
SpinorField leap_frog(const SpinorField& curr, const SpinorField& deriv_curr, const SpinorField& prev,
                      std::span<const Mat2> G, double tau);

void require_same_grid(const SpinorField& a, const SpinorField& b, std::span<const Mat2> G);

}  // namespace dirac::detail
