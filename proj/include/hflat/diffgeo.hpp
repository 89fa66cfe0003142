#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hflat/sampler.hpp"
#include "hflat/twist_profile.hpp"

namespace hflat {

/// Metric coefficients as a function of the coordinates.
using MetricField = std::function<Eigen::MatrixXd(std::span<const double>)>;
/// Christoffel symbols Gamma^k_ij stored at k*n*n + i*n + j.
using ChristoffelField = std::function<std::vector<double>(std::span<const double>)>;

/// Riemannian data at one point. Curvature convention:
///   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
///   R(d_i, d_j) d_k = R^l_ijk d_l.
struct MetricData {
    std::size_t n = 0;
    Eigen::MatrixXd g;
    Eigen::MatrixXd ginv;
    std::vector<double> christoffel;  // Gamma^k_ij at k*n*n + i*n + j
    std::vector<double> riemann;      // R^l_ijk at ((l*n + i)*n + j)*n + k; empty unless computed
    double h = 0.0;                   // finite-difference step used for derivatives
    double flatness_defect = 0.0;

    double gamma(std::size_t k, std::size_t i, std::size_t j) const { return christoffel[(k * n + i) * n + j]; }
    double R(std::size_t l, std::size_t i, std::size_t j, std::size_t k) const {
        return riemann[((l * n + i) * n + j) * n + k];
    }
    /// <R(d_i, d_j) d_j, d_i> / (g_ii g_jj - g_ij^2)
    double sectional(std::size_t i, std::size_t j) const;
};

enum class ChristoffelRoute {
    Projection,        // Gamma^k_ij = g^kl <d_i d_j L, d_l L>
    MetricDifference,  // Levi-Civita formula with central differences of g
};

/// Inverse of a metric matrix; throws DomainError when it is not positive definite
/// or its condition number exceeds 1e8.
Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g);

/// g_ij = <d_i L, d_j L>.
Eigen::MatrixXd induced_metric(const ImmersionSampler& sampler, std::span<const double> x);
Eigen::MatrixXd induced_metric(const SampleJet& jet);

std::vector<double> christoffel_projection(const SampleJet& jet, const Eigen::MatrixXd& ginv);
std::vector<double> christoffel_from_metric(const MetricField& metric, std::span<const double> x, double h);

/// R^l_ijk by central differences (step h) of a Christoffel field.
std::vector<double> riemann_from_christoffel(const ChristoffelField& gamma, std::span<const double> x, double h);

/// max |R_ijkl| / sqrt(g_ii g_jj g_kk g_ll) with R_ijkl = g_lm R^m_ijk.
double normalized_curvature_max(const std::vector<double>& riemann, const Eigen::MatrixXd& g);

/// Full metric data with curvature and flatness defect for an immersion.
MetricData curvature(const ImmersionSampler& sampler, std::span<const double> x, double h = 1e-4,
                     ChristoffelRoute route = ChristoffelRoute::Projection);
/// Same from an intrinsic metric (Christoffels by metric differencing).
MetricData curvature(const MetricField& metric, std::span<const double> x, double h = 1e-4);

/// Round unit sphere chart (theta, phi) -> diag(1, sin^2 theta). Test fixture for
/// the curvature machinery; not an immersion.
MetricField round_sphere_metric();

/// max over phi in {I,J,K}, i <= j of |<phi d_i L, d_j L>| / (|d_i L| |d_j L|).
double lagrangian_defect(const ImmersionSampler& sampler, std::span<const double> x);
double lagrangian_defect(const SampleJet& jet);

struct SFFData {
    std::size_t n = 0;
    std::vector<HVector> h;      // h(d_i, d_j) at i*n + j
    std::vector<HVector> frame;  // e_1 = d_1/|d_1|, e_j = d_j/|d_j|
    std::array<double, 3> lambda{};
    std::vector<std::array<double, 3>> mu_per_direction;  // j = 2..n
    std::array<double, 3> mu{};  // mean over directions
    double mu_spread = 0.0;
    double residual = 0.0;       // max |h(e_a,e_b) - ansatz(e_a,e_b)|
    double normality = 0.0;      // max |<h_ij, d_k L>| / (|h_ij| |d_k L|)

    double mu_norm() const;
    /// max over directions of sqrt(mu_1^2 + mu_2^2 + mu_3^2)
    double mu_max_norm() const;
};

SFFData second_fundamental_form(const ImmersionSampler& sampler, std::span<const double> x);
SFFData second_fundamental_form(const SampleJet& jet);

struct CodazziSample {
    double lambda_relation = 0.0;  // max_{i>=2, a} |e_i(lambda_a) - omega_1^i(e_1) lambda_a|
    double connection = 0.0;       // max_{i>=2} |nabla_{e_i} e_1|
};

/// Throws std::invalid_argument when delta exceeds a tenth of any domain extent.
CodazziSample codazzi_at(const ImmersionSampler& sampler, std::span<const double> x, double delta);

/// omega_1^i(e_1) = <nabla_{e_1} e_1, e_i> for i = 2..n.
std::vector<double> connection_forms(const MetricData& m);
/// |nabla_{e_i} e_1| for i = 2..n.
std::vector<double> e1_covariant_derivatives(const MetricData& m);

/// Closed-form Levi-Civita connection of f^2 dx_1^2 + sum dx_j^2 for a twist profile.
std::vector<double> twisted_christoffel(const TwistProfile& profile, std::span<const double> x);
MetricField twisted_metric(const TwistProfile& profile);

/// Max deviation between metric-differenced Christoffels and the closed forms at the
/// given points. Throws DomainError where f < f_min.
double christoffel_formula_check(const TwistProfile& profile, const std::vector<std::vector<double>>& points,
                                 double h = 1e-4, double f_min = 1e-3);

}  // namespace hflat
