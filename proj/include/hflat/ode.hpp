#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hflat {

/// Number of uniform steps used to cover [s0, s_end] with steps no longer than `step`.
inline std::size_t step_count(double s0, double s_end, double step) {
    const double span = std::abs(s_end - s0);
    if (span == 0.0) return 0;
    const auto n = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
    return n == 0 ? 1 : n;
}

/// Classical fixed-step RK4 for y' = rhs(s, y) from s0 to s_end (either direction).
/// The step is shrunk so the last node lands exactly on s_end; node k sits at s0 + k*h.
/// The state update uses Neumaier-compensated summation so that roundoff stays
/// below the O(h^4) truncation error even for small steps.
///
/// rhs(s, y, dy) fills dy; observe(k, s, y) is called for every node including the start;
/// post(y) runs after each step and may modify the state.
template <class Rhs, class Observe, class Post>
void integrate_rk4(std::vector<double> y, double s0, double s_end, double step, Rhs&& rhs, Observe&& observe,
                   Post&& post) {
    const std::size_t steps = step_count(s0, s_end, step);
    const std::size_t dim = y.size();
    const double h = steps == 0 ? 0.0 : (s_end - s0) / static_cast<double>(steps);

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), carry(dim, 0.0);
    observe(std::size_t{0}, s0, y);
    for (std::size_t n = 0; n < steps; ++n) {
        const double s = s0 + static_cast<double>(n) * h;
        rhs(s, y, k1);
        for (std::size_t r = 0; r < dim; ++r) tmp[r] = y[r] + 0.5 * h * k1[r];
        rhs(s + 0.5 * h, tmp, k2);
        for (std::size_t r = 0; r < dim; ++r) tmp[r] = y[r] + 0.5 * h * k2[r];
        rhs(s + 0.5 * h, tmp, k3);
        for (std::size_t r = 0; r < dim; ++r) tmp[r] = y[r] + h * k3[r];
        rhs(s + h, tmp, k4);
        for (std::size_t r = 0; r < dim; ++r) {
            const double inc = h / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
            const double sum = y[r] + inc;
            if (std::abs(y[r]) >= std::abs(inc))
                carry[r] += (y[r] - sum) + inc;
            else
                carry[r] += (inc - sum) + y[r];
            y[r] = sum;
        }
        // Fold the compensation back once it is representable.
        for (std::size_t r = 0; r < dim; ++r) {
            const double folded = y[r] + carry[r];
            carry[r] -= folded - y[r];
            y[r] = folded;
        }
        post(y);
        observe(n + 1, s0 + static_cast<double>(n + 1) * h, y);
    }
}

}  // namespace hflat
