#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hflat/legendre.hpp"
#include "hflat/sampler.hpp"
#include "hflat/scalar_function.hpp"
#include "hflat/twist_profile.hpp"

namespace hflat {

// ---------------------------------------------------------------------------
// Lagrangian cylinder L = D(x_1) + sum_j c_j x_j, where D solves
//   D'' = (f'/f) D' + f (i l_1 + j l_2 + k l_3) D',   f = |l|.

struct CylinderSpec {
    std::size_t n = 2;
    std::array<ScalarFunction, 3> lambda;
    /// c_2..c_n; defaults to E_2..E_n.
    std::vector<HVector> rulings;
    /// Defaults: D(0) = 0, D'(0) = f(0) E_1.
    std::optional<HVector> D0;
    std::optional<HVector> D1;
    double lambda_min = 1e-6;
    double grid_step = 1e-3;
};

ImmersionSampler build_cylinder(const CylinderSpec& spec, const Box& domain);

// ---------------------------------------------------------------------------
// Twisted Legendre immersion
//   L(t, u) = u_2 z(t) + sum_{j>=3} u_j P_j(t) + int_0^t b z',
// with metric ftilde^2 dt^2 + du^2 and ftilde = b(t) + u_2 + sum a_j(t) u_j.

struct TwistedLegendreSpec {
    LegendreCoefficients coeffs;
    JetFn b;
    CurveState init;
    double f_min = 1e-3;
    double grid_step = 1e-3;
};

/// Throws DomainError naming the point when ftilde < f_min on the domain.
ImmersionSampler build_twisted_legendre(const TwistedLegendreSpec& spec, const Box& domain);

/// n = 2 case L(x, y) = D(x) + y P(x) with P a Legendre curve in S^7 and D' = b P'.
ImmersionSampler build_surface_legendre(const JetFn& b, const LegendreCoefficients& coeffs, const CurveState& init,
                                        const Box& domain, double f_min = 1e-3, double grid_step = 1e-3);

/// Twisted Legendre immersion realizing a twist profile; domain is in (t, u).
ImmersionSampler build_from_profile(const TwistProfile& profile, const Box& x_domain, double f_min = 1e-3,
                                    double grid_step = 1e-3);

// ---------------------------------------------------------------------------
// Cone L(x, y) = s(x) A(y) with s quaternion-valued, acting on the left.

struct QuaternionJet {
    Quaternion v, d1, d2;
};

using QuaternionJetFn = std::function<QuaternionJet(double)>;

struct QuaternionFunction {
    std::array<ScalarFunction, 4> parts;  // w, x, y, z
    QuaternionJet jet(double x) const;
    QuaternionJetFn as_jet_fn() const;
    static QuaternionFunction real(ScalarFunction f);
};

/// s(x) = x^{1 + ik} = x e^{ik ln x}, defined for x > 0.
QuaternionJetFn log_spiral_scale(double k);

struct CurveJet {
    HVector v, d1, d2;
};

using CurveFn = std::function<CurveJet(double)>;

/// The cached special Legendre curve z(t) as a curve.
CurveFn legendre_curve_fn(std::shared_ptr<const LegendreCurve> curve);
/// A(y) = e^{iy} E_1 in H^2: a unit circle that is not Legendre (<A', iA> = 1).
CurveFn complex_circle_fn();

/// Throws DomainError when s vanishes or {L_x, L_y} has rank < 2 at a grid point.
ImmersionSampler build_cone(const QuaternionJetFn& scale, const CurveFn& curve, std::size_t ambient,
                            const Box& domain, std::size_t per_axis = 17);

}  // namespace hflat
