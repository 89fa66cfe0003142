#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hflat/jet.hpp"
#include "hflat/sampler.hpp"
#include "hflat/scalar_function.hpp"

namespace hflat {

/// Twisting function f(x) = beta(x_1) + sum_{j>=2} alpha_j(x_1) x_j of the twisted
/// product metric f^2 dx_1^2 + dx_2^2 + ... + dx_n^2, together with the three
/// ratios r_a = f / f_a (functions of x_1 only).
struct TwistProfile {
    ScalarFunction beta;
    std::vector<ScalarFunction> alpha;  // alpha_2..alpha_n
    std::array<ScalarFunction, 3> ratios;

    std::size_t dimension() const { return alpha.size() + 1; }

    double twist(std::span<const double> x) const;
    /// (f, df/dx_1, ..., df/dx_n)
    std::vector<double> twist_gradient(std::span<const double> x) const;
    /// Second derivatives of f; only the x_1 row/column is nonzero.
    std::vector<double> twist_hessian(std::span<const double> x) const;

    /// |sum_a r_a(x_1)^{-2} - 1|, the normalization implied by f^2 = f_1^2 + f_2^2 + f_3^2.
    double normalization_defect(double x1) const;
    /// |f - |lambda|| with lambda_a = r_a / f: the other reading of the twist.
    double lambda_norm_defect(std::span<const double> x) const;

    /// Throws DomainError naming the first grid point where f < f_min. `per_axis`
    /// points are checked along x_1 and every corner of the remaining box is
    /// included (f is affine in x_2..x_n).
    void validate(const Box& box, double f_min, std::size_t per_axis = 65) const;
    /// Throws DomainError when the ratio normalization fails by more than tol.
    void validate_strict(const Box& box, double tol = 1e-10, std::size_t per_axis = 65) const;
};

/// Data of the twisted Legendre immersion obtained from a profile by t = int_0^{x_1} alpha_2.
struct ReparametrizedProfile {
    JetFn b;                       // b(t) = beta / alpha_2
    std::vector<JetFn> a;          // a_j(t) = alpha_j / alpha_2, j = 3..n
    std::array<JetFn, 3> curve;    // Legendre coefficients r_a / alpha_2
    JetFn x_of_t;                  // inverse of the change of variables
    ScalarFunction t_of_x;         // int_0^{x_1} alpha_2

    /// b(t) + u_2 + sum_j a_j(t) u_j; `tu` = (t, u_2, ..., u_n).
    double twist(std::span<const double> tu) const;
    /// Parameter box in (t, u) covering x_1 in [x_lo, x_hi].
    double t_at(double x1) const { return t_of_x(x1); }
};

/// Throws DomainError when alpha_2 <= 0 somewhere on [x_lo, x_hi].
ReparametrizedProfile reparametrize_profile(const TwistProfile& profile, double x_lo, double x_hi,
                                            std::size_t per_axis = 257);

}  // namespace hflat
