#include "hflat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "hflat/diffgeo.hpp"

namespace hflat {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

double radical_inverse(std::size_t index, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

const std::map<std::string, double>& tolerance_table() {
    static const std::map<std::string, double> table = {
        {"metric_form", 1e-6},     {"lagrangian", 1e-8},         {"flatness", 1e-4},
        {"normality", 1e-8},       {"h_umbilical", 1e-6},        {"mu_vanishes", 1e-6},
        {"mu_nonzero", 0.1},       {"lambda_expected", 1e-6},    {"ratio_constancy", 1e-8},
        {"codazzi_lambda", 1e-3},  {"codazzi_connection", 1e-3}, {"mixed_partials", 1e-8},
        {"frame", 1e-10},          {"first_derivatives", 1e-6},
    };
    return table;
}

double frame_defect(const SampleJet& jet) {
    const std::size_t n = jet.dimension();
    std::vector<HVector> e;
    e.push_back((1.0 / jet.first[0].norm()) * jet.first[0]);
    for (std::size_t j = 1; j < n; ++j) e.push_back(jet.first[j]);
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b)
            worst = std::max(worst, std::abs(real_inner(e[a], e[b]) - (a == b ? 1.0 : 0.0)));
    return worst;
}

// Spread of f~ lambda_a across points sharing x_1 but with different u.
double ratio_spread(const ImmersionSampler& sampler, const std::vector<double>& x, const Box& box) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> variants{x};
    for (double frac : {0.25, 0.5, 0.75}) {
        std::vector<double> y = x;
        for (std::size_t k = 1; k < n; ++k) y[k] = box.lo[k] + frac * box.extent(k);
        variants.push_back(std::move(y));
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& y : variants) {
            const double v = sampler.twist(y) * second_fundamental_form(sampler, y).lambda[c];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

}  // namespace

std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count, std::size_t skip) {
    const std::size_t n = box.dimension();
    if (n > std::size(kPrimes)) throw std::invalid_argument("halton_points: dimension too large");
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> x(n);
        for (std::size_t d = 0; d < n; ++d) x[d] = box.lo[d] + box.extent(d) * radical_inverse(k + 1 + skip, kPrimes[d]);
        out.push_back(std::move(x));
    }
    return out;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string spec_hash(const nlohmann::json& spec) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(spec.dump())));
    return buf;
}

bool VerificationReport::all_pass() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return p.informational || p.pass; });
}

const PropertyResult* VerificationReport::find(std::string_view name) const {
    for (const auto& p : properties)
        if (p.name == name) return &p;
    return nullptr;
}

nlohmann::json VerificationReport::to_json(bool include_points) const {
    nlohmann::json j;
    j["spec"] = spec;
    j["grid"] = grid;
    j["tolerances"] = tolerances;
    j["metadata"] = metadata;
    j["properties"] = nlohmann::json::array();
    for (const auto& p : properties) {
        nlohmann::json e{{"name", p.name}, {"max_defect", p.max_defect}, {"tolerance", p.tolerance}, {"pass", p.pass}};
        if (p.lower_bound) e["comparison"] = "min_above";
        if (p.informational) e["informational"] = true;
        j["properties"].push_back(std::move(e));
    }
    j["all_pass"] = all_pass();
    if (include_points) {
        j["points"] = nlohmann::json::array();
        for (const auto& r : points) j["points"].push_back({{"x", r.x}, {"defects", r.defects}});
    }
    return j;
}

void aggregate(VerificationReport& report, const std::vector<std::string>& names,
               const std::vector<std::string>& lower_bounds, const std::vector<std::string>& informational) {
    for (const auto& name : names) {
        PropertyResult r;
        r.name = name;
        r.lower_bound = contains(lower_bounds, name);
        r.informational = contains(informational, name);
        r.tolerance = report.tolerances.at(name);
        double agg = r.lower_bound ? std::numeric_limits<double>::infinity() : 0.0;
        bool finite = true;
        for (const auto& p : report.points) {
            const auto it = p.defects.find(name);
            if (it == p.defects.end()) continue;
            if (!std::isfinite(it->second)) finite = false;
            agg = r.lower_bound ? std::min(agg, it->second) : std::max(agg, it->second);
        }
        r.max_defect = agg;
        r.pass = finite && (r.lower_bound ? agg > r.tolerance : agg < r.tolerance);
        report.properties.push_back(r);
    }
}

const std::vector<std::string>& known_properties() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : tolerance_table()) v.push_back(k);
        return v;
    }();
    return names;
}

std::vector<std::string> default_properties(const std::string& kind) {
    if (kind == "twisted_legendre")
        return {"metric_form",     "lagrangian",      "flatness",       "normality",      "h_umbilical",
                "mu_vanishes",     "lambda_expected", "ratio_constancy", "codazzi_lambda", "codazzi_connection",
                "mixed_partials",  "frame",           "first_derivatives"};
    if (kind == "cylinder")
        return {"metric_form", "lagrangian",     "flatness",           "normality",      "h_umbilical", "mu_vanishes",
                "lambda_expected", "codazzi_lambda", "codazzi_connection", "mixed_partials", "frame"};
    if (kind == "cone") return {"lagrangian", "flatness", "normality", "mu_nonzero"};
    return {"lagrangian", "flatness", "normality"};
}

double default_tolerance(const std::string& property) {
    const auto it = tolerance_table().find(property);
    if (it == tolerance_table().end()) throw std::invalid_argument("unknown property '" + property + "'");
    return it->second;
}

std::map<std::string, double> point_defects(const ImmersionSampler& sampler, const std::vector<double>& x,
                                            const std::vector<std::string>& props, const VerifyOptions& options) {
    std::map<std::string, double> d;
    const SampleJet jet = sampler.evaluate(x);
    const auto want = [&](std::string_view p) { return contains(props, p); };

    if (want("metric_form")) {
        if (!sampler.expected_metric_diagonal)
            throw std::invalid_argument("property metric_form needs a builder with a closed-form metric");
        const auto diag = sampler.expected_metric_diagonal(x);
        const Eigen::MatrixXd g = induced_metric(jet);
        double worst = 0.0;
        for (std::size_t i = 0; i < diag.size(); ++i)
            for (std::size_t j = 0; j < diag.size(); ++j) {
                const double expected = i == j ? diag[i] : 0.0;
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                worst = std::max(worst, std::abs(g(ii, jj) - expected) / std::sqrt(diag[i] * diag[j]));
            }
        d["metric_form"] = worst;
    }
    if (want("lagrangian")) d["lagrangian"] = lagrangian_defect(jet);
    if (want("flatness")) d["flatness"] = curvature(sampler, x, options.fd_step).flatness_defect;
    if (want("normality") || want("h_umbilical") || want("mu_vanishes") || want("mu_nonzero") ||
        want("lambda_expected")) {
        const SFFData s = second_fundamental_form(jet);
        if (want("normality")) d["normality"] = s.normality;
        if (want("h_umbilical")) d["h_umbilical"] = s.residual;
        if (want("mu_vanishes")) d["mu_vanishes"] = s.mu_max_norm();
        if (want("mu_nonzero")) d["mu_nonzero"] = s.mu_max_norm();
        if (want("lambda_expected")) {
            if (!sampler.expected_lambda)
                throw std::invalid_argument("property lambda_expected needs a builder with closed-form lambda");
            const auto e = sampler.expected_lambda(x);
            double worst = 0.0;
            for (std::size_t c = 0; c < 3; ++c) worst = std::max(worst, std::abs(s.lambda[c] - e[c]));
            d["lambda_expected"] = worst;
        }
    }
    if (want("ratio_constancy")) {
        if (!sampler.twist) throw std::invalid_argument("property ratio_constancy needs a twisted builder");
        d["ratio_constancy"] = ratio_spread(sampler, x, sampler.domain().shrunk(options.codazzi_step));
    }
    if (want("codazzi_lambda") || want("codazzi_connection")) {
        const CodazziSample c = codazzi_at(sampler, x, options.codazzi_step);
        if (want("codazzi_lambda")) d["codazzi_lambda"] = c.lambda_relation;
        if (want("codazzi_connection")) d["codazzi_connection"] = c.connection;
    }
    if (want("mixed_partials")) d["mixed_partials"] = mixed_partial_defect(sampler, x);
    if (want("frame")) d["frame"] = frame_defect(jet);
    if (want("first_derivatives")) d["first_derivatives"] = first_derivative_consistency(sampler, x, options.fd_step);
    return d;
}

VerificationReport verify_immersion(const ImmersionSampler& sampler, const VerifyOptions& options,
                                    const nlohmann::json& spec) {
    const std::vector<std::string> props =
        options.properties.empty() ? default_properties(sampler.kind()) : options.properties;
    VerificationReport report;
    for (const auto& p : props) report.tolerances[p] = default_tolerance(p);
    for (const auto& [k, v] : options.tolerances) {
        if (!contains(props, k)) throw std::invalid_argument("tolerance given for unselected property '" + k + "'");
        report.tolerances[k] = v;
    }

    const double margin = options.codazzi_step + 2.0 * options.fd_step;
    const Box sample_box = sampler.domain().shrunk(margin);
    const auto pts = halton_points(sample_box, options.points, options.skip);

    report.spec = {{"hash", spec_hash(spec)}, {"kind", sampler.kind()}, {"config", spec}};
    report.grid = {{"sequence", "halton"},        {"points", options.points},
                   {"skip", options.skip},        {"fd_step", options.fd_step},
                   {"codazzi_step", options.codazzi_step}, {"margin", margin},
                   {"box_lo", sample_box.lo},     {"box_hi", sample_box.hi}};
    report.metadata["connection_form"] =
        "omega_1^i(e_1) = <nabla_{e_1} e_1, e_i>; the case split's omega_i^i(e_1) is read as omega_1^i(e_1)";
    report.metadata["curvature_convention"] = "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z";
    report.metadata["derivatives"] = sampler.analytic() ? "analytic" : "finite_difference";

    auto defects = map_points<std::map<std::string, double>>(
        pts, [&](const std::vector<double>& x) { return point_defects(sampler, x, props, options); },
        options.execution);
    for (std::size_t k = 0; k < pts.size(); ++k) report.points.push_back({pts[k], std::move(defects[k])});
    aggregate(report, props, {"mu_nonzero"});
    return report;
}

}  // namespace hflat
