#include "kernels.hpp"

#include <string>

namespace dirac::detail {

void require_same_grid(const SpinorField& a, const SpinorField& b, std::span<const Mat2> G) {
    if (!(a.grid == b.grid) || static_cast<int>(G.size()) != a.size())
        throw ContractError("scheme update: fields and potential samples must share one grid");
}

SpinorField semi_implicit_pointwise(const SpinorField& deriv_curr, const SpinorField& prev,
                                    std::span<const Mat2> G, double tau) {
    require_same_grid(deriv_curr, prev, G);
    SpinorField next(prev.grid);
    const Mat2 iI = kI * Mat2::identity();
    for (int j = 0; j < prev.size(); ++j) {
        const Mat2 hj = pauli::sigma3 + G[static_cast<std::size_t>(j)];
        const Mat2 lhs = iI - tau * hj;
        const Mat2 rhs = iI + tau * hj;
        const Complex det = lhs.det();
        if (std::abs(det) < 1e-14)
            throw StepFailure("semi-implicit pointwise matrix is singular at node " + std::to_string(j));
        const Spinor h = Complex(-2.0 * tau) * kI * (pauli::sigma1 * deriv_curr[j]) + rhs * prev[j];
        next[j] = lhs.inverse() * h;
    }
    return next;
}

SpinorField semi_implicit_modal(const SpinorField& curr, const SpinorField& prev, std::span<const Mat2> G,
                                double tau, const std::function<double(int)>& symbol) {
    require_same_grid(curr, prev, G);
    const auto& grid = curr.grid;
    const int n = grid.size();
    std::vector<Spinor> gphi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) gphi[static_cast<std::size_t>(j)] = G[static_cast<std::size_t>(j)] * curr[j];
    fft::transform(gphi, -1);
    std::vector<Spinor> prev_hat = prev.values;
    fft::transform(prev_hat, -1);
    // Both transforms carry the same missing 1/N, so combine unnormalised and rescale on the way back.
    const Mat2 iI = kI * Mat2::identity();
    SpinorField next(grid);
    for (int k = 0; k < n; ++k) {
        const double s = symbol(grid.index_of_slot(k));
        const Mat2 free_part = tau * (s * pauli::sigma1 + pauli::sigma3);
        const Mat2 lhs = iI - free_part;
        const Mat2 rhs = iI + free_part;
        const auto kk = static_cast<std::size_t>(k);
        const Spinor l = rhs * prev_hat[kk] + Complex(2.0 * tau) * gphi[kk];
        const Complex det = lhs.det();
        if (std::abs(det) < 1e-14)
            throw StepFailure("semi-implicit modal matrix is singular at mode " + std::to_string(grid.index_of_slot(k)));
        next.values[kk] = lhs.inverse() * l;
    }
    fft::transform(next.values, +1);
    next *= Complex(1.0 / n);
    return next;
}

SpinorField leap_frog(const SpinorField& curr, const SpinorField& deriv_curr, const SpinorField& prev,
                      std::span<const Mat2> G, double tau) {
    require_same_grid(curr, prev, G);
    SpinorField next(curr.grid);
    for (int j = 0; j < curr.size(); ++j) {
        const Spinor hphi = (pauli::sigma3 + G[static_cast<std::size_t>(j)]) * curr[j];
        next[j] = prev[j] - (2.0 * tau) * (pauli::sigma1 * deriv_curr[j]) - Complex(0.0, 2.0 * tau) * hphi;
    }
    return next;
}

}  // namespace dirac::detail
