#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hflat/jet.hpp"
#include "hflat/quaternion.hpp"
#include "hflat/scalar_function.hpp"

namespace hflat {

/// Coefficients of the special Legendre equation in S^{4n-1} of H^n:
///   z'' = alpha i z' + beta j z' + gamma k z' - z - sum_l a_l P_l,
/// with P_3..P_n parallel normal fields. `a` holds a_3..a_n.
class LegendreCoefficients {
public:
    LegendreCoefficients(std::size_t n, JetFn alpha, JetFn beta, JetFn gamma, std::vector<JetFn> a = {});
    static LegendreCoefficients from_functions(std::size_t n, const ScalarFunction& alpha, const ScalarFunction& beta,
                                               const ScalarFunction& gamma,
                                               const std::vector<ScalarFunction>& a = {});
    /// All coefficients identically zero: great circles.
    static LegendreCoefficients zero(std::size_t n);

    std::size_t dimension() const { return n_; }
    const JetFn& alpha() const { return alpha_; }
    const JetFn& beta() const { return beta_; }
    const JetFn& gamma() const { return gamma_; }
    /// a_l for l = 3..n is at index l - 3.
    const std::vector<JetFn>& a() const { return a_; }
    /// alpha, beta, gamma by structure axis.
    const JetFn& structure_coefficient(StructureAxis axis) const;

private:
    std::size_t n_;
    JetFn alpha_, beta_, gamma_;
    std::vector<JetFn> a_;
};

/// Position, velocity, parallel normal fields and the running integral of b z'.
struct CurveState {
    double s = 0.0;
    HVector z;
    HVector zp;
    std::vector<HVector> P;  // P_3..P_n
    HVector accum;

    std::size_t dimension() const { return z.size(); }
};

struct CurveDerivative {
    HVector dz;
    HVector dzp;
    std::vector<HVector> dP;
    HVector daccum;
};

using Trajectory = std::vector<CurveState>;

/// z = E_1, z' = E_2, P_l = E_l, accum = 0. Throws std::invalid_argument for n < 2.
CurveState standard_initial_frame(std::size_t n);

/// z'' from the special Legendre equation.
HVector legendre_acceleration(const CurveState& state, const LegendreCoefficients& coeffs);

/// Right-hand side of the first-order system. P_l' = a_l z' keeps the P_l parallel
/// and normal; accum' = b z' when b is given.
CurveDerivative special_legendre_rhs(const CurveState& state, const LegendreCoefficients& coeffs,
                                     const JetFn* b = nullptr);

struct IntegrateOptions {
    /// Re-orthonormalize the quaternionic frame after every step. Off by default so
    /// that drift stays observable.
    bool reorthonormalize = false;
};

/// Fixed-step RK4 from init.s to s_end (either direction); returns every node.
/// Throws DomainError naming s when the state stops being finite.
Trajectory integrate_curve(const CurveState& init, const LegendreCoefficients& coeffs, const JetFn* b, double s_end,
                           double step, IntegrateOptions options = {});

/// Gram-Schmidt on {z, z', P_l} respecting the quaternionic structure.
void reorthonormalize(CurveState& state);

/// The 4n vectors {z, iz, jz, kz, z', iz', jz', kz', P_l, iP_l, jP_l, kP_l}.
std::vector<HVector> quaternionic_frame(const CurveState& state);

/// Max-norm deviation of the Gram matrix of `vectors` from the identity.
double gram_deviation(const std::vector<HVector>& vectors);

struct DefectReport {
    double z_norm = 0.0;        // | |z|^2 - 1 |
    double zp_norm = 0.0;       // | |z'|^2 - 1 |
    double legendre[3] = {};    // |<z', phi z>| for phi = I, J, K
    double z_zp = 0.0;          // |<z, z'>|
    double frame_gram = 0.0;    // Gram deviation of the full frame

    double max() const;
};

DefectReport constraint_defect(const CurveState& state);

/// Decomposition of an acceleration against the frame at one sample.
struct SpecialnessSample {
    std::vector<double> b, c, d;  // components along iP_l, jP_l, kP_l
    double alpha = 0.0, beta = 0.0, gamma = 0.0;  // components along iz', jz', kz'
    std::vector<double> a;        // a_l = -<z'', P_l>

    double magnitude() const;     // max |b_l|, |c_l|, |d_l|
};

/// Throws DomainError when the frame Gram deviation exceeds 1e-3.
SpecialnessSample specialness_at(const CurveState& state, const HVector& zpp);

enum class AccelerationSource {
    Equation,            // z'' from the special Legendre equation at each node
    CentralDifference,   // z'' by differencing stored z' (interior nodes only)
};

struct SpecialnessReport {
    std::vector<double> per_sample;  // magnitude at each evaluated node
    std::vector<SpecialnessSample> samples;
    double max_defect = 0.0;
};

SpecialnessReport specialness_defect(const Trajectory& trajectory, const LegendreCoefficients& coeffs,
                                     AccelerationSource source = AccelerationSource::Equation);

/// CSV: header row, then s, z (4n), z' (4n), each P_l (4n), accum (4n); 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Uniform-grid trajectory with cubic Hermite interpolation in between nodes.
class LegendreCurve {
public:
    /// Integrates from init.s towards both ends so that [t_lo, t_hi] is covered.
    LegendreCurve(const CurveState& init, LegendreCoefficients coeffs, std::optional<JetFn> b, double t_lo,
                  double t_hi, double grid_step);

    struct Point {
        HVector z, zp, zpp;
        std::vector<HVector> P;
        HVector accum;
    };

    /// Throws DomainError outside the cached range.
    Point at(double t) const;

    const LegendreCoefficients& coefficients() const { return coeffs_; }
    const Trajectory& nodes() const { return nodes_; }
    double t_min() const { return nodes_.front().s; }
    double t_max() const { return nodes_.back().s; }

private:
    LegendreCoefficients coeffs_;
    std::optional<JetFn> b_;
    Trajectory nodes_;
    std::vector<HVector> node_zpp_;
    double h_ = 0.0;
};

}  // namespace hflat
