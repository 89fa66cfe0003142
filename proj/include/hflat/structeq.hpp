#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hflat/diffgeo.hpp"
#include "hflat/parallel.hpp"
#include "hflat/scalar_function.hpp"
#include "hflat/twist_profile.hpp"
#include "hflat/verify.hpp"

namespace hflat {

/// Sum of products of single-coordinate functions:
///   F(x) = sum_t c_t prod_{(k, g) in factors_t} g(x_k).
class CoordinateField {
public:
    struct Factor {
        std::size_t coordinate = 0;
        ScalarFunction function;
        friend bool operator==(const Factor&, const Factor&) = default;
    };
    struct Term {
        double coefficient = 1.0;
        std::vector<Factor> factors;
        friend bool operator==(const Term&, const Term&) = default;
    };

    CoordinateField() = default;
    explicit CoordinateField(std::vector<Term> terms) : terms_(std::move(terms)) {}
    /// g(x_k)
    static CoordinateField of(std::size_t coordinate, ScalarFunction g);
    static CoordinateField constant(double c);

    double operator()(std::span<const double> x) const;
    /// (dF/dx_0, ..., dF/dx_{n-1})
    std::vector<double> gradient(std::span<const double> x) const;
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    CoordinateField& operator+=(const CoordinateField& other);
    friend CoordinateField operator*(const CoordinateField& a, const CoordinateField& b);
    friend CoordinateField operator*(double s, CoordinateField a);
    friend bool operator==(const CoordinateField&, const CoordinateField&) = default;

private:
    std::vector<Term> terms_;
};

// JSON: a number, a ScalarFunction object with "var", or {"terms": [{"coef": c,
// "factors": [{"var": k, "f": <ScalarFunction>}, ...]}, ...]}.
void to_json(nlohmann::json& j, const CoordinateField& f);
void from_json(const nlohmann::json& j, CoordinateField& f);

/// Three symmetric (1,2)-tensors sigma_i(d_a, d_b) = S_i[a][b]^c d_c.
class SigmaSpec {
public:
    explicit SigmaSpec(std::size_t n);
    /// sigma_i(d_1, d_1) = r_i(x_1) d_1, every other component zero.
    static SigmaSpec canonical(const TwistProfile& profile);

    std::size_t dimension() const { return n_; }
    const CoordinateField& component(std::size_t i, std::size_t a, std::size_t b, std::size_t c) const {
        return s_[index(i, a, b, c)];
    }
    /// Sets S_i[a][b]^c and S_i[b][a]^c together so symmetry in (a, b) holds by construction.
    void set(std::size_t i, std::size_t a, std::size_t b, std::size_t c, CoordinateField f);
    /// Sets only S_i[a][b]^c; used to inject asymmetric perturbations.
    void set_raw(std::size_t i, std::size_t a, std::size_t b, std::size_t c, CoordinateField f);
    bool is_symmetric() const;

    /// Values S_i[a][b]^c at x, index ((i*n + a)*n + b)*n + c.
    std::vector<double> values(std::span<const double> x) const;
    /// Partial derivatives d_m S_i[a][b]^c at x, index m*size + ((i*n + a)*n + b)*n + c.
    std::vector<double> gradients(std::span<const double> x) const;

private:
    std::size_t index(std::size_t i, std::size_t a, std::size_t b, std::size_t c) const {
        return ((i * n_ + a) * n_ + b) * n_ + c;
    }
    std::size_t n_;
    std::vector<CoordinateField> s_;
};

// JSON: {"n": n, "components": [{"sigma": i, "a": a, "b": b, "c": c, "f": <field>}, ...]}
// with 1-based indices as in the mathematics; (a, b) entries are symmetrized.
SigmaSpec sigma_from_json(const nlohmann::json& j);

/// Coordinate patch: metric plus optionally closed-form Christoffels.
struct Patch {
    std::size_t n = 0;
    MetricField metric;
    std::optional<ChristoffelField> christoffel;
    Box domain;
    std::string name;

    std::vector<double> gamma(std::span<const double> x, double h) const;
};

Patch twisted_patch(const TwistProfile& profile, const Box& domain);
Patch euclidean_patch(const Box& domain);
/// (theta, phi) chart of the unit sphere.
Patch sphere_patch(const Box& domain);

/// Max over i and basis triples of |<sigma_i(X,Y),Z> - <sigma_i(pX,pY),pZ>| over permutations p.
double check_symmetry_a(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x);

/// Total-symmetry violation of (nabla_X sigma_i)(Y,Z) - sigma_j(X, sigma_k(Y,Z)) + sigma_k(X, sigma_j(Y,Z))
/// over cyclic (i, j, k) and basis triples, as raw component differences.
double check_condition_b(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x, double h = 1e-4);

struct GaussResult {
    double defect = 0.0;           // max |R^m_abc - rhs^m_abc|
    double flipped_defect = 0.0;   // max |R^m_abc + rhs^m_abc|
    double curvature_scale = 0.0;  // max |R^m_abc|
    /// Both sides are significant and agree only up to an overall sign.
    bool sign_mismatch() const { return curvature_scale > 1e-6 && flipped_defect < 0.1 * defect; }
};

/// R(d_a, d_b) d_c against sum_i sigma_i(sigma_i(d_b, d_c), d_a) - sigma_i(sigma_i(d_a, d_c), d_b).
GaussResult check_gauss_c(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x, double h = 1e-4);

struct StructeqOptions {
    std::size_t points = 50;
    std::size_t skip = 20;
    double fd_step = 1e-4;
    bool strict = false;   // gate on sum r_a^-2 = 1
    std::map<std::string, double> tolerances;
    Execution execution = Execution::Parallel;
};

/// Conditions (a), (b), (c) on a Halton sample of the patch. With a profile, the
/// Christoffel closed forms and both twist normalizations are reported as well.
VerificationReport verify_structure(const SigmaSpec& sigma, const Patch& patch, const StructeqOptions& options,
                                    const TwistProfile* profile = nullptr,
                                    const nlohmann::json& spec = nlohmann::json::object());

}  // namespace hflat
