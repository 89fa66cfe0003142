#include "hflat/structeq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hflat/errors.hpp"

namespace hflat {

// ---------------------------------------------------------------------------
// CoordinateField

CoordinateField CoordinateField::of(std::size_t coordinate, ScalarFunction g) {
    return CoordinateField({Term{1.0, {Factor{coordinate, std::move(g)}}}});
}

CoordinateField CoordinateField::constant(double c) {
    if (c == 0.0) return {};
    return CoordinateField({Term{c, {}}});
}

double CoordinateField::operator()(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        double v = t.coefficient;
        for (const auto& f : t.factors) v *= f.function(x[f.coordinate]);
        acc += v;
    }
    return acc;
}

std::vector<double> CoordinateField::gradient(std::span<const double> x) const {
    std::vector<double> g(x.size(), 0.0);
    for (const auto& t : terms_)
        for (std::size_t d = 0; d < t.factors.size(); ++d) {
            double v = t.coefficient * t.factors[d].function.derivative(x[t.factors[d].coordinate], 1);
            for (std::size_t e = 0; e < t.factors.size(); ++e)
                if (e != d) v *= t.factors[e].function(x[t.factors[e].coordinate]);
            g[t.factors[d].coordinate] += v;
        }
    return g;
}

CoordinateField& CoordinateField::operator+=(const CoordinateField& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

CoordinateField operator*(const CoordinateField& a, const CoordinateField& b) {
    std::vector<CoordinateField::Term> out;
    for (const auto& s : a.terms_)
        for (const auto& t : b.terms_) {
            CoordinateField::Term p{s.coefficient * t.coefficient, s.factors};
            p.factors.insert(p.factors.end(), t.factors.begin(), t.factors.end());
            out.push_back(std::move(p));
        }
    return CoordinateField(std::move(out));
}

CoordinateField operator*(double s, CoordinateField a) {
    for (auto& t : a.terms_) t.coefficient *= s;
    return a;
}

void to_json(nlohmann::json& j, const CoordinateField& f) {
    j = nlohmann::json::object();
    j["terms"] = nlohmann::json::array();
    for (const auto& t : f.terms()) {
        nlohmann::json term{{"coef", t.coefficient}, {"factors", nlohmann::json::array()}};
        for (const auto& fac : t.factors) term["factors"].push_back({{"var", fac.coordinate + 1}, {"f", fac.function}});
        j["terms"].push_back(std::move(term));
    }
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* what) {
    for (const auto& [key, _] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
}

std::size_t one_based(const nlohmann::json& j, std::size_t upper, const char* what) {
    const auto v = j.get<long long>();
    if (v < 1 || static_cast<std::size_t>(v) > upper)
        throw std::invalid_argument(std::string(what) + " index " + std::to_string(v) + " out of range 1.." +
                                    std::to_string(upper));
    return static_cast<std::size_t>(v - 1);
}

}  // namespace

void from_json(const nlohmann::json& j, CoordinateField& f) {
    if (j.is_number()) {
        f = CoordinateField::constant(j.get<double>());
        return;
    }
    if (!j.is_object()) throw std::invalid_argument("coordinate field: expected number or object");
    if (j.contains("terms")) {
        reject_unknown(j, {"terms"}, "coordinate field");
        std::vector<CoordinateField::Term> terms;
        for (const auto& t : j.at("terms")) {
            reject_unknown(t, {"coef", "factors"}, "coordinate field term");
            CoordinateField::Term term{t.value("coef", 1.0), {}};
            for (const auto& fac : t.value("factors", nlohmann::json::array())) {
                reject_unknown(fac, {"var", "f"}, "coordinate field factor");
                term.factors.push_back({one_based(fac.at("var"), 64, "coordinate"), fac.at("f").get<ScalarFunction>()});
            }
            terms.push_back(std::move(term));
        }
        f = CoordinateField(std::move(terms));
        return;
    }
    // Single-variable shorthand: a ScalarFunction object plus "var".
    nlohmann::json g = j;
    const std::size_t var = one_based(j.value("var", nlohmann::json(1)), 64, "coordinate");
    g.erase("var");
    f = CoordinateField::of(var, g.get<ScalarFunction>());
}

// ---------------------------------------------------------------------------
// SigmaSpec

SigmaSpec::SigmaSpec(std::size_t n) : n_(n), s_(3 * n * n * n) {
    if (n < 1) throw std::invalid_argument("SigmaSpec: dimension must be positive");
}

SigmaSpec SigmaSpec::canonical(const TwistProfile& profile) {
    SigmaSpec s(profile.dimension());
    for (std::size_t i = 0; i < 3; ++i) s.set(i, 0, 0, 0, CoordinateField::of(0, profile.ratios[i]));
    return s;
}

void SigmaSpec::set(std::size_t i, std::size_t a, std::size_t b, std::size_t c, CoordinateField f) {
    if (i >= 3 || a >= n_ || b >= n_ || c >= n_) throw std::out_of_range("SigmaSpec::set: index out of range");
    s_[index(i, b, a, c)] = f;
    s_[index(i, a, b, c)] = std::move(f);
}

void SigmaSpec::set_raw(std::size_t i, std::size_t a, std::size_t b, std::size_t c, CoordinateField f) {
    if (i >= 3 || a >= n_ || b >= n_ || c >= n_) throw std::out_of_range("SigmaSpec::set_raw: index out of range");
    s_[index(i, a, b, c)] = std::move(f);
}

bool SigmaSpec::is_symmetric() const {
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = a + 1; b < n_; ++b)
                for (std::size_t c = 0; c < n_; ++c)
                    if (!(s_[index(i, a, b, c)] == s_[index(i, b, a, c)])) return false;
    return true;
}

std::vector<double> SigmaSpec::values(std::span<const double> x) const {
    std::vector<double> v(s_.size(), 0.0);
    for (std::size_t r = 0; r < s_.size(); ++r)
        if (!s_[r].is_zero()) v[r] = s_[r](x);
    return v;
}

std::vector<double> SigmaSpec::gradients(std::span<const double> x) const {
    const std::size_t size = s_.size();
    std::vector<double> d(n_ * size, 0.0);
    for (std::size_t r = 0; r < size; ++r) {
        if (s_[r].is_zero()) continue;
        const auto g = s_[r].gradient(x);
        for (std::size_t m = 0; m < n_; ++m) d[m * size + r] = g[m];
    }
    return d;
}

SigmaSpec sigma_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"n", "components"}, "sigma");
    const auto n = j.at("n").get<std::size_t>();
    SigmaSpec s(n);
    for (const auto& c : j.value("components", nlohmann::json::array())) {
        reject_unknown(c, {"sigma", "a", "b", "c", "f"}, "sigma component");
        s.set(one_based(c.at("sigma"), 3, "sigma"), one_based(c.at("a"), n, "a"), one_based(c.at("b"), n, "b"),
              one_based(c.at("c"), n, "c"), c.at("f").get<CoordinateField>());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Patches

std::vector<double> Patch::gamma(std::span<const double> x, double h) const {
    return christoffel ? (*christoffel)(x) : christoffel_from_metric(metric, x, h);
}

Patch twisted_patch(const TwistProfile& profile, const Box& domain) {
    Patch p;
    p.n = profile.dimension();
    p.metric = twisted_metric(profile);
    p.christoffel = [profile](std::span<const double> x) { return twisted_christoffel(profile, x); };
    p.domain = domain;
    p.name = "twisted";
    return p;
}

Patch euclidean_patch(const Box& domain) {
    Patch p;
    p.n = domain.dimension();
    const auto n = static_cast<Eigen::Index>(p.n);
    p.metric = [n](std::span<const double>) { return Eigen::MatrixXd::Identity(n, n).eval(); };
    p.christoffel = [m = p.n](std::span<const double>) { return std::vector<double>(m * m * m, 0.0); };
    p.domain = domain;
    p.name = "euclidean";
    return p;
}

Patch sphere_patch(const Box& domain) {
    if (domain.dimension() != 2) throw std::invalid_argument("sphere_patch: domain must be two-dimensional");
    Patch p;
    p.n = 2;
    p.metric = round_sphere_metric();
    p.domain = domain;
    p.name = "sphere";
    return p;
}

// ---------------------------------------------------------------------------
// Conditions

namespace {

struct Indexer {
    std::size_t n;
    std::size_t operator()(std::size_t i, std::size_t a, std::size_t b, std::size_t c) const {
        return ((i * n + a) * n + b) * n + c;
    }
};

constexpr std::array<std::array<std::size_t, 3>, 6> kPerms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

void require_dimension(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x) {
    if (sigma.dimension() != patch.n || x.size() != patch.n)
        throw std::invalid_argument("structure check: sigma, patch and point dimensions differ");
}

}  // namespace

double check_symmetry_a(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x) {
    require_dimension(sigma, patch, x);
    const std::size_t n = patch.n;
    const Indexer at{n};
    const Eigen::MatrixXd g = patch.metric(x);
    checked_inverse(g);
    const auto S = sigma.values(x);
    std::vector<double> C(3 * n * n * n, 0.0);  // <sigma_i(d_a, d_b), d_c>
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    double acc = 0.0;
                    for (std::size_t m = 0; m < n; ++m)
                        acc += S[at(i, a, b, m)] * g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c));
                    C[at(i, a, b, c)] = acc;
                }
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    const std::array<std::size_t, 3> t{a, b, c};
                    for (const auto& p : kPerms)
                        worst = std::max(worst, std::abs(C[at(i, t[p[0]], t[p[1]], t[p[2]])] - C[at(i, a, b, c)]));
                }
    return worst;
}

double check_condition_b(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x, double h) {
    require_dimension(sigma, patch, x);
    const std::size_t n = patch.n;
    const Indexer at{n};
    const std::size_t size = 3 * n * n * n;
    const auto S = sigma.values(x);
    const auto dS = sigma.gradients(x);
    const auto G = patch.gamma(x, h);
    auto gam = [&](std::size_t k, std::size_t i, std::size_t j) { return G[(k * n + i) * n + j]; };

    // T_i^m(a, b, c) stored at at(i, a, b, c) * n + m.
    std::vector<double> T(size * n, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    for (std::size_t m = 0; m < n; ++m) {
                        double v = dS[a * size + at(i, b, c, m)];
                        for (std::size_t p = 0; p < n; ++p) {
                            v += gam(m, a, p) * S[at(i, b, c, p)];
                            v -= gam(p, a, b) * S[at(i, p, c, m)];
                            v -= gam(p, a, c) * S[at(i, b, p, m)];
                            v -= S[at(k, b, c, p)] * S[at(j, a, p, m)];
                            v += S[at(j, b, c, p)] * S[at(k, a, p, m)];
                        }
                        T[at(i, a, b, c) * n + m] = v;
                    }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    const std::array<std::size_t, 3> t{a, b, c};
                    for (const auto& p : kPerms)
                        for (std::size_t m = 0; m < n; ++m)
                            worst = std::max(worst, std::abs(T[at(i, t[p[0]], t[p[1]], t[p[2]]) * n + m] -
                                                             T[at(i, a, b, c) * n + m]));
                }
    return worst;
}

GaussResult check_gauss_c(const SigmaSpec& sigma, const Patch& patch, std::span<const double> x, double h) {
    require_dimension(sigma, patch, x);
    const std::size_t n = patch.n;
    const Indexer at{n};
    checked_inverse(patch.metric(x));
    const auto R = riemann_from_christoffel([&patch, h](std::span<const double> y) { return patch.gamma(y, h); }, x, h);
    const auto S = sigma.values(x);
    GaussResult out;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) {
                    double rhs = 0.0;
                    for (std::size_t i = 0; i < 3; ++i)
                        for (std::size_t p = 0; p < n; ++p)
                            rhs += S[at(i, b, c, p)] * S[at(i, p, a, m)] - S[at(i, a, c, p)] * S[at(i, p, b, m)];
                    const double lhs = R[((m * n + a) * n + b) * n + c];
                    out.defect = std::max(out.defect, std::abs(lhs - rhs));
                    out.flipped_defect = std::max(out.flipped_defect, std::abs(lhs + rhs));
                    out.curvature_scale = std::max(out.curvature_scale, std::abs(lhs));
                }
    return out;
}

VerificationReport verify_structure(const SigmaSpec& sigma, const Patch& patch, const StructeqOptions& options,
                                    const TwistProfile* profile, const nlohmann::json& spec) {
    if (sigma.dimension() != patch.n) throw std::invalid_argument("structeq: sigma and patch dimensions differ");
    std::vector<std::string> names{"condition_a", "condition_b", "condition_c"};
    std::vector<std::string> informational;
    if (profile) {
        if (profile->dimension() != patch.n) throw std::invalid_argument("structeq: profile dimension differs");
        profile->validate(patch.domain, 1e-3);
        names.insert(names.end(), {"christoffel_formula", "ratio_normalization", "lambda_norm_reading"});
        informational.push_back("lambda_norm_reading");
        if (!options.strict) informational.push_back("ratio_normalization");
    }

    VerificationReport report;
    const std::map<std::string, double> defaults{
        {"condition_a", 1e-10},        {"condition_b", 1e-6},         {"condition_c", 1e-5},
        {"christoffel_formula", 1e-6}, {"ratio_normalization", 1e-10}, {"lambda_norm_reading", 1e-10}};
    for (const auto& name : names) report.tolerances[name] = defaults.at(name);
    for (const auto& [k, v] : options.tolerances) {
        if (!report.tolerances.count(k)) throw std::invalid_argument("tolerance given for unknown check '" + k + "'");
        report.tolerances[k] = v;
    }

    const double margin = 2.0 * options.fd_step;
    const Box box = patch.domain.shrunk(margin);
    const auto pts = halton_points(box, options.points, options.skip);
    report.spec = {{"hash", spec_hash(spec)},
                   {"kind", "structeq"},
                   {"patch", patch.name},
                   {"config", spec}};
    report.grid = {{"sequence", "halton"}, {"points", options.points}, {"skip", options.skip},
                   {"fd_step", options.fd_step}, {"margin", margin}, {"box_lo", box.lo}, {"box_hi", box.hi}};
    report.metadata["curvature_convention"] = "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z";
    report.metadata["strict"] = options.strict;
    report.metadata["sigma_symmetric"] = sigma.is_symmetric();
    report.metadata["christoffel_source"] = patch.christoffel ? "closed_form" : "metric_difference";
    if (profile) {
        report.metadata["twist_readings"] =
            "ratio_normalization is |sum r_a^-2 - 1| (from f^2 = f_1^2 + f_2^2 + f_3^2); lambda_norm_reading is "
            "|f - |lambda|| with lambda_a = r_a / f";
    }

    struct Sample {
        std::map<std::string, double> defects;
        bool sign_mismatch = false;
    };
    auto samples = map_points<Sample>(
        pts,
        [&](const std::vector<double>& x) {
            Sample s;
            s.defects["condition_a"] = check_symmetry_a(sigma, patch, x);
            s.defects["condition_b"] = check_condition_b(sigma, patch, x, options.fd_step);
            const GaussResult g = check_gauss_c(sigma, patch, x, options.fd_step);
            s.defects["condition_c"] = g.defect;
            s.sign_mismatch = g.sign_mismatch();
            if (profile) {
                s.defects["christoffel_formula"] = christoffel_formula_check(*profile, {x}, options.fd_step);
                s.defects["ratio_normalization"] = profile->normalization_defect(x[0]);
                s.defects["lambda_norm_reading"] = profile->lambda_norm_defect(x);
            }
            return s;
        },
        options.execution);

    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        mismatches += samples[k].sign_mismatch ? 1 : 0;
        report.points.push_back({pts[k], std::move(samples[k].defects)});
    }
    report.metadata["gauss_sign_mismatch_points"] = mismatches;
    report.metadata["gauss_sign_mismatch"] = mismatches > 0 && mismatches == pts.size();
    aggregate(report, names, {}, informational);
    return report;
}

}  // namespace hflat
