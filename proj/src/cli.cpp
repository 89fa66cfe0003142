#include "hflat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "hflat/builders.hpp"
#include "hflat/errors.hpp"
#include "hflat/legendre.hpp"
#include "hflat/structeq.hpp"
#include "hflat/verify.hpp"

namespace hflat {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& i : issues) out += "\n  " + i;
    return out;
}

using nlohmann::json;

// Collects every schema problem before failing.
class Reader {
public:
    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            issue(path, "expected an object");
            return false;
        }
        for (const auto& [key, _] : j.items())
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
                issue(path + "/" + key, "unknown key");
        return true;
    }

    template <class T>
    T get(const json& j, const std::string& path, const char* key, T fallback, bool required = false) {
        if (!j.is_object() || !j.contains(key)) {
            if (required) issue(path + "/" + key, "missing required key");
            return fallback;
        }
        try {
            return j.at(key).get<T>();
        } catch (const std::exception& e) {
            issue(path + "/" + key, e.what());
            return fallback;
        }
    }

    ScalarFunction function(const json& j, const std::string& path, const char* key, double fallback,
                            bool required = false) {
        return get<ScalarFunction>(j, path, key, ScalarFunction::constant(fallback), required);
    }

    std::vector<ScalarFunction> functions(const json& j, const std::string& path, const char* key) {
        std::vector<ScalarFunction> out;
        if (!j.is_object() || !j.contains(key)) return out;
        const json& arr = j.at(key);
        if (!arr.is_array()) {
            issue(path + "/" + key, "expected an array");
            return out;
        }
        for (std::size_t k = 0; k < arr.size(); ++k) {
            try {
                out.push_back(arr[k].get<ScalarFunction>());
            } catch (const std::exception& e) {
                issue(path + "/" + key + "/" + std::to_string(k), e.what());
                out.push_back(ScalarFunction::constant(0.0));
            }
        }
        return out;
    }

    std::optional<HVector> hvector(const json& j, const std::string& path, const char* key, std::size_t n) {
        if (!j.is_object() || !j.contains(key)) return std::nullopt;
        const auto flat = get<std::vector<double>>(j, path, key, {});
        if (flat.size() != 4 * n) {
            issue(path + "/" + key, "expected " + std::to_string(4 * n) + " reals");
            return std::nullopt;
        }
        return HVector::from_flat(flat);
    }

    std::optional<Box> box(const json& j, const std::string& path, std::size_t n) {
        if (!j.is_object() || !j.contains("domain")) {
            issue(path + "/domain", "missing required key");
            return std::nullopt;
        }
        const json& d = j.at("domain");
        const std::string p = path + "/domain";
        if (!object(d, p, {"lo", "hi"})) return std::nullopt;
        const auto lo = get<std::vector<double>>(d, p, "lo", {}, true);
        const auto hi = get<std::vector<double>>(d, p, "hi", {}, true);
        if (lo.size() != n || hi.size() != n) {
            issue(p, "bounds must have " + std::to_string(n) + " entries");
            return std::nullopt;
        }
        for (std::size_t k = 0; k < n; ++k)
            if (!(lo[k] < hi[k])) {
                issue(p, "empty box on axis " + std::to_string(k + 1));
                return std::nullopt;
            }
        return Box(lo, hi);
    }

    void issue(const std::string& path, const std::string& what) { issues_.push_back(path + ": " + what); }
    void finish() const {
        if (!issues_.empty()) throw ConfigError(issues_);
    }

private:
    std::vector<std::string> issues_;
};

LegendreCoefficients read_coefficients(Reader& r, const json& parent, const std::string& path, std::size_t n) {
    const std::string p = path + "/coefficients";
    const json c = parent.is_object() && parent.contains("coefficients") ? parent.at("coefficients") : json::object();
    r.object(c, p, {"alpha", "beta", "gamma", "a"});
    const auto alpha = r.function(c, p, "alpha", 0.0);
    const auto beta = r.function(c, p, "beta", 0.0);
    const auto gamma = r.function(c, p, "gamma", 0.0);
    auto a = r.functions(c, p, "a");
    if (n >= 2 && a.size() != n - 2) {
        if (!a.empty() || n > 2) r.issue(p + "/a", "expected " + std::to_string(n - 2) + " functions (a_3..a_n)");
        a.assign(n - 2, ScalarFunction::constant(0.0));
    }
    return LegendreCoefficients::from_functions(std::max<std::size_t>(n, 2), alpha, beta, gamma, a);
}

CurveState read_init(Reader& r, const json& parent, const std::string& path, std::size_t n) {
    CurveState init = standard_initial_frame(std::max<std::size_t>(n, 2));
    if (!parent.is_object() || !parent.contains("init")) return init;
    const json& j = parent.at("init");
    const std::string p = path + "/init";
    if (j.is_string()) {
        if (j.get<std::string>() != "standard") r.issue(p, "expected \"standard\" or an object");
        return init;
    }
    if (!r.object(j, p, {"s", "z", "zp", "P", "accum"})) return init;
    init.s = r.get<double>(j, p, "s", 0.0);
    if (auto v = r.hvector(j, p, "z", n)) init.z = *v;
    if (auto v = r.hvector(j, p, "zp", n)) init.zp = *v;
    if (auto v = r.hvector(j, p, "accum", n)) init.accum = *v;
    if (j.contains("P")) {
        const auto P = r.get<std::vector<std::vector<double>>>(j, p, "P", {});
        if (P.size() != n - 2) r.issue(p + "/P", "expected " + std::to_string(n - 2) + " vectors");
        else
            for (std::size_t l = 0; l < P.size(); ++l) {
                if (P[l].size() != 4 * n) r.issue(p + "/P/" + std::to_string(l), "wrong length");
                else init.P[l] = HVector::from_flat(P[l]);
            }
    }
    return init;
}

std::size_t read_dimension(Reader& r, const json& j, const std::string& path, std::size_t fallback = 2) {
    const auto n = r.get<long long>(j, path, "n", static_cast<long long>(fallback));
    if (n < 2) {
        r.issue(path + "/n", "dimension must be at least 2");
        return 2;
    }
    return static_cast<std::size_t>(n);
}

std::vector<std::size_t> read_grid(Reader& r, const json& j, const std::string& path, std::size_t n) {
    std::vector<std::size_t> grid(n, 5);
    if (!j.is_object() || !j.contains("grid")) return grid;
    const json& g = j.at("grid");
    if (g.is_number_unsigned()) {
        grid.assign(n, g.get<std::size_t>());
    } else {
        grid = r.get<std::vector<std::size_t>>(j, path, "grid", grid);
        if (grid.size() != n) r.issue(path + "/grid", "expected " + std::to_string(n) + " counts");
    }
    for (auto& c : grid)
        if (c < 1) {
            r.issue(path + "/grid", "counts must be positive");
            c = 1;
        }
    grid.resize(n, 1);
    return grid;
}

TwistProfile read_profile(Reader& r, const json& j, const std::string& path) {
    TwistProfile p;
    if (!r.object(j, path, {"beta", "alpha", "ratios"})) return p;
    p.beta = r.function(j, path, "beta", 0.0, true);
    p.alpha = r.functions(j, path, "alpha");
    if (p.alpha.empty()) r.issue(path + "/alpha", "need alpha_2..alpha_n (at least one)");
    const auto ratios = r.functions(j, path, "ratios");
    if (ratios.size() != 3) r.issue(path + "/ratios", "expected three ratio functions");
    else std::copy(ratios.begin(), ratios.end(), p.ratios.begin());
    return p;
}

std::filesystem::path output_dir(const json& config, const CliOptions& options) {
    std::filesystem::path dir = ".";
    if (config.contains("output") && config.at("output").contains("dir"))
        dir = config.at("output").at("dir").get<std::string>();
    if (options.out_dir) dir = *options.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

bool per_point(const json& config, const CliOptions& options) {
    return options.points || (config.contains("output") && config.at("output").value("points", false));
}

void check_top_level(Reader& r, const json& config, const char* required) {
    r.object(config, "", {"description", "curve", "immersion", "verify", "structeq", "output"});
    if (config.is_object() && !config.contains(required)) r.issue(std::string("/") + required, "missing required section");
    if (config.is_object() && config.contains("output")) {
        const json& o = config.at("output");
        if (r.object(o, "/output", {"dir", "points"})) {
            r.get<std::string>(o, "/output", "dir", ".");
            r.get<bool>(o, "/output", "points", false);
        }
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

void print_properties(std::ostream& log, const VerificationReport& report) {
    for (const auto& p : report.properties) {
        log << std::left << std::setw(22) << p.name << ' ' << std::setw(13) << std::setprecision(6) << p.max_defect
            << (p.lower_bound ? " > " : " < ") << std::setw(10) << p.tolerance << ' '
            << (p.informational ? "INFO" : (p.pass ? "PASS" : "FAIL")) << '\n';
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

TwistProfile profile_from_json(const nlohmann::json& j) {
    Reader r;
    TwistProfile p = read_profile(r, j, "/profile");
    r.finish();
    return p;
}

namespace {

ImmersionSetup build_immersion(Reader& r, const nlohmann::json& j) {
    const std::string path = "/immersion";
    if (!j.is_object()) {
        r.issue(path, "expected an object");
        r.finish();
    }
    const auto type = r.get<std::string>(j, path, "type", "", true);

    if (type == "twisted_legendre" || type == "surface_legendre") {
        r.object(j, path, {"type", "n", "coefficients", "b", "init", "f_min", "grid_step", "domain", "grid"});
        const std::size_t n = type == "surface_legendre" ? 2 : read_dimension(r, j, path);
        if (type == "surface_legendre" && j.contains("n") && j.at("n") != 2) r.issue(path + "/n", "surface alias is n = 2");
        const auto coeffs = read_coefficients(r, j, path, n);
        const auto b = r.function(j, path, "b", 0.0, true);
        const auto init = read_init(r, j, path, n);
        const auto f_min = r.get<double>(j, path, "f_min", 1e-3);
        const auto step = r.get<double>(j, path, "grid_step", 1e-3);
        const auto box = r.box(j, path, n);
        const auto grid = read_grid(r, j, path, n);
        r.finish();
        ImmersionSampler s = type == "surface_legendre"
                                 ? build_surface_legendre(b.as_jet_fn(), coeffs, init, *box, f_min, step)
                                 : build_twisted_legendre({coeffs, b.as_jet_fn(), init, f_min, step}, *box);
        return {std::move(s), grid, std::nullopt, std::nullopt};
    }
    if (type == "profile") {
        r.object(j, path, {"type", "profile", "f_min", "grid_step", "domain", "grid"});
        TwistProfile profile;
        if (j.contains("profile")) profile = read_profile(r, j.at("profile"), path + "/profile");
        else r.issue(path + "/profile", "missing required key");
        const std::size_t n = std::max<std::size_t>(profile.dimension(), 2);
        const auto f_min = r.get<double>(j, path, "f_min", 1e-3);
        const auto step = r.get<double>(j, path, "grid_step", 1e-3);
        const auto box = r.box(j, path, n);
        const auto grid = read_grid(r, j, path, n);
        r.finish();
        return {build_from_profile(profile, *box, f_min, step), grid, profile, *box};
    }
    if (type == "cylinder") {
        r.object(j, path, {"type", "n", "lambda", "rulings", "D0", "D1", "lambda_min", "grid_step", "domain", "grid"});
        CylinderSpec spec;
        spec.n = read_dimension(r, j, path);
        const auto lambda = r.functions(j, path, "lambda");
        if (lambda.size() != 3) r.issue(path + "/lambda", "expected three functions of x_1");
        else std::copy(lambda.begin(), lambda.end(), spec.lambda.begin());
        if (j.contains("rulings")) {
            const auto rulings = r.get<std::vector<std::vector<double>>>(j, path, "rulings", {});
            if (rulings.size() != spec.n - 1) r.issue(path + "/rulings", "expected n - 1 vectors");
            for (std::size_t k = 0; k < rulings.size(); ++k) {
                if (rulings[k].size() != 4 * spec.n) r.issue(path + "/rulings/" + std::to_string(k), "wrong length");
                else spec.rulings.push_back(HVector::from_flat(rulings[k]));
            }
        }
        spec.D0 = r.hvector(j, path, "D0", spec.n);
        spec.D1 = r.hvector(j, path, "D1", spec.n);
        spec.lambda_min = r.get<double>(j, path, "lambda_min", 1e-6);
        spec.grid_step = r.get<double>(j, path, "grid_step", 1e-3);
        const auto box = r.box(j, path, spec.n);
        const auto grid = read_grid(r, j, path, spec.n);
        r.finish();
        return {build_cylinder(spec, *box), grid, std::nullopt, std::nullopt};
    }
    if (type == "cone") {
        r.object(j, path, {"type", "scale", "curve", "grid_step", "domain", "grid"});
        QuaternionJetFn scale;
        const std::string sp = path + "/scale";
        if (!j.contains("scale")) {
            r.issue(sp, "missing required key");
        } else if (j.at("scale").is_object() && j.at("scale").contains("log_spiral")) {
            r.object(j.at("scale"), sp, {"log_spiral"});
            scale = log_spiral_scale(r.get<double>(j.at("scale"), sp, "log_spiral", 0.0));
        } else if (r.object(j.at("scale"), sp, {"w", "x", "y", "z"})) {
            QuaternionFunction q;
            const char* parts[] = {"w", "x", "y", "z"};
            for (std::size_t k = 0; k < 4; ++k) q.parts[k] = r.function(j.at("scale"), sp, parts[k], 0.0);
            scale = q.as_jet_fn();
        }
        const auto curve_name = r.get<std::string>(j, path, "curve", "legendre_circle");
        const auto step = r.get<double>(j, path, "grid_step", 1e-3);
        const auto box = r.box(j, path, 2);
        const auto grid = read_grid(r, j, path, 2);
        CurveFn curve;
        if (curve_name == "complex_circle") curve = complex_circle_fn();
        else if (curve_name != "legendre_circle") r.issue(path + "/curve", "expected legendre_circle or complex_circle");
        r.finish();
        if (!curve) {
            auto lc = std::make_shared<const LegendreCurve>(standard_initial_frame(2), LegendreCoefficients::zero(2),
                                                            std::nullopt, box->lo[1], box->hi[1], step);
            curve = legendre_curve_fn(std::move(lc));
        }
        return {build_cone(scale, curve, 2, *box), grid, std::nullopt, std::nullopt};
    }
    if (!type.empty()) r.issue(path + "/type", "unknown immersion type '" + type + "'");
    r.finish();
    throw ConfigError({path + "/type: missing"});
}

}  // namespace

ImmersionSetup build_immersion(const nlohmann::json& j) {
    Reader r;
    return build_immersion(r, j);
}

void write_immersion_csv(std::ostream& os, const ImmersionSampler& sampler, const std::vector<std::size_t>& grid) {
    const std::size_t n = sampler.dimension();
    const std::size_t m = sampler.ambient();
    if (grid.size() != n) throw std::invalid_argument("write_immersion_csv: grid has wrong dimension");
    static constexpr char kParts[] = {'r', 'i', 'j', 'k'};
    for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << 'x' << i + 1;
    for (std::size_t q = 0; q < m; ++q)
        for (char part : kParts) os << ",L" << q + 1 << '_' << part;
    for (std::size_t d = 0; d < n; ++d)
        for (std::size_t q = 0; q < m; ++q)
            for (char part : kParts) os << ",d" << d + 1 << "_L" << q + 1 << '_' << part;
    os << '\n';
    os << std::setprecision(17);
    const Box& box = sampler.domain();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
        for (std::size_t k = 0; k < n; ++k)
            x[k] = grid[k] == 1 ? 0.5 * (box.lo[k] + box.hi[k])
                                : box.lo[k] + box.extent(k) * static_cast<double>(idx[k]) /
                                                  static_cast<double>(grid[k] - 1);
        const SampleJet jet = sampler.evaluate(x);
        for (std::size_t k = 0; k < n; ++k) os << (k ? "," : "") << x[k];
        for (double v : jet.value.flat()) os << ',' << v;
        for (const auto& d : jet.first)
            for (double v : d.flat()) os << ',' << v;
        os << '\n';
        std::size_t k = n;
        while (k > 0 && ++idx[k - 1] == grid[k - 1]) idx[--k] = 0;
        if (k == 0) break;
    }
}

int cmd_curve(const nlohmann::json& config, const CliOptions& options, std::ostream& log) {
    Reader r;
    check_top_level(r, config, "curve");
    const json c = config.is_object() && config.contains("curve") ? config.at("curve") : json::object();
    const std::string path = "/curve";
    r.object(c, path, {"n", "coefficients", "b", "s_end", "step", "init", "tolerance", "reorthonormalize"});
    const std::size_t n = read_dimension(r, c, path);
    const auto coeffs = read_coefficients(r, c, path, n);
    std::optional<JetFn> b;
    if (c.contains("b")) b = r.function(c, path, "b", 0.0).as_jet_fn();
    const auto init = read_init(r, c, path, n);
    const auto s_end = r.get<double>(c, path, "s_end", 0.0, true);
    const auto step = r.get<double>(c, path, "step", 1e-3);
    const auto tolerance = r.get<double>(c, path, "tolerance", 1e-8);
    IntegrateOptions io;
    io.reorthonormalize = r.get<bool>(c, path, "reorthonormalize", false);
    if (!(step > 0.0)) r.issue(path + "/step", "must be positive");
    r.finish();

    const Trajectory traj = integrate_curve(init, coeffs, b ? &*b : nullptr, s_end, step, io);
    DefectReport worst;
    double constraint = 0.0;
    for (const auto& s : traj) {
        const DefectReport d = constraint_defect(s);
        constraint = std::max(constraint, d.max());
        worst.z_norm = std::max(worst.z_norm, d.z_norm);
        worst.zp_norm = std::max(worst.zp_norm, d.zp_norm);
        for (int k = 0; k < 3; ++k) worst.legendre[k] = std::max(worst.legendre[k], d.legendre[k]);
        worst.z_zp = std::max(worst.z_zp, d.z_zp);
        worst.frame_gram = std::max(worst.frame_gram, d.frame_gram);
    }
    const double special = specialness_defect(traj, coeffs).max_defect;
    const bool pass = constraint < tolerance && special < tolerance;

    const auto dir = output_dir(config, options);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(dir / "trajectory.csv", csv.str());
    json summary{{"spec", {{"hash", spec_hash(config)}, {"config", config}}},
                 {"steps", traj.size() - 1},
                 {"tolerance", tolerance},
                 {"max_constraint_defect", constraint},
                 {"constraint_defects",
                  {{"z_norm", worst.z_norm},
                   {"zp_norm", worst.zp_norm},
                   {"legendre", {worst.legendre[0], worst.legendre[1], worst.legendre[2]}},
                   {"z_zp", worst.z_zp},
                   {"frame_gram", worst.frame_gram}}},
                 {"specialness_defect", special},
                 {"pass", pass}};
    write_file(dir / "curve_summary.json", summary.dump(2) + "\n");
    log << std::setprecision(6) << "constraint defect " << constraint << ", specialness defect " << special
        << (pass ? "  PASS\n" : "  FAIL\n");
    return pass ? kPass : kFail;
}

int cmd_build(const nlohmann::json& config, const CliOptions& options, std::ostream& log) {
    Reader r;
    check_top_level(r, config, "immersion");
    const ImmersionSetup setup = build_immersion(r, config.value("immersion", json::object()));
    const auto dir = output_dir(config, options);
    std::ostringstream csv;
    write_immersion_csv(csv, setup.sampler, setup.grid);
    write_file(dir / "immersion.csv", csv.str());
    log << "wrote " << (dir / "immersion.csv").string() << '\n';
    return kPass;
}

int cmd_verify(const nlohmann::json& config, const CliOptions& options, std::ostream& log) {
    Reader r;
    check_top_level(r, config, "immersion");
    VerifyOptions vo;
    vo.execution = options.execution;
    bool strict = options.strict_paper;
    if (config.is_object() && config.contains("verify")) {
        const json& v = config.at("verify");
        const std::string p = "/verify";
        if (r.object(v, p, {"properties", "tolerances", "points", "fd_step", "codazzi_step", "strict_paper"})) {
            vo.properties = r.get<std::vector<std::string>>(v, p, "properties", {});
            for (const auto& name : vo.properties)
                if (std::find(known_properties().begin(), known_properties().end(), name) == known_properties().end())
                    r.issue(p + "/properties", "unknown property '" + name + "'");
            vo.tolerances = r.get<std::map<std::string, double>>(v, p, "tolerances", {});
            vo.points = r.get<std::size_t>(v, p, "points", vo.points);
            vo.fd_step = r.get<double>(v, p, "fd_step", vo.fd_step);
            vo.codazzi_step = r.get<double>(v, p, "codazzi_step", vo.codazzi_step);
            strict = strict || r.get<bool>(v, p, "strict_paper", false);
        }
    }
    const ImmersionSetup setup = build_immersion(r, config.value("immersion", json::object()));
    if (strict && setup.profile) setup.profile->validate_strict(*setup.profile_domain);

    VerificationReport report = verify_immersion(setup.sampler, vo, config);
    report.metadata["strict"] = strict;
    log << "verify " << setup.sampler.kind() << " at " << vo.points << " points\n";
    print_properties(log, report);

    const auto dir = output_dir(config, options);
    write_file(dir / "verify_report.json", report.to_json(per_point(config, options)).dump(2) + "\n");
    return report.all_pass() ? kPass : kFail;
}

int cmd_structeq(const nlohmann::json& config, const CliOptions& options, std::ostream& log) {
    Reader r;
    check_top_level(r, config, "structeq");
    const json s = config.is_object() && config.contains("structeq") ? config.at("structeq") : json::object();
    const std::string p = "/structeq";
    r.object(s, p, {"patch", "profile", "domain", "sigma", "points", "fd_step", "tolerances", "strict_paper"});
    std::optional<TwistProfile> profile;
    if (s.contains("profile")) profile = read_profile(r, s.at("profile"), p + "/profile");
    const auto patch_name = r.get<std::string>(s, p, "patch", profile ? "twisted" : "euclidean");
    StructeqOptions so;
    so.execution = options.execution;
    so.points = r.get<std::size_t>(s, p, "points", so.points);
    so.fd_step = r.get<double>(s, p, "fd_step", so.fd_step);
    so.tolerances = r.get<std::map<std::string, double>>(s, p, "tolerances", {});
    so.strict = options.strict_paper || r.get<bool>(s, p, "strict_paper", false);

    std::size_t n = profile ? profile->dimension() : 2;
    if (patch_name == "sphere") n = 2;
    else if (patch_name == "euclidean" && s.contains("domain") && s.at("domain").contains("lo") &&
             s.at("domain").at("lo").is_array())
        n = s.at("domain").at("lo").size();
    else if (patch_name == "twisted" && !profile) r.issue(p + "/profile", "twisted patch needs a profile");
    else if (patch_name != "twisted" && patch_name != "euclidean") r.issue(p + "/patch", "unknown patch '" + patch_name + "'");
    const auto box = r.box(s, p, n);

    std::optional<SigmaSpec> sigma;
    const json sj = s.value("sigma", json("canonical"));
    if (sj.is_string()) {
        const auto name = sj.get<std::string>();
        if (name == "zero") sigma = SigmaSpec(n);
        else if (name == "canonical" && profile) sigma = SigmaSpec::canonical(*profile);
        else r.issue(p + "/sigma", "expected \"zero\", \"canonical\" (with a profile) or an object");
    } else {
        try {
            sigma = sigma_from_json(sj);
            if (sigma->dimension() != n) r.issue(p + "/sigma/n", "does not match the patch dimension");
        } catch (const std::exception& e) {
            r.issue(p + "/sigma", e.what());
        }
    }
    r.finish();

    Patch patch = patch_name == "sphere"   ? sphere_patch(*box)
                  : patch_name == "twisted" ? twisted_patch(*profile, *box)
                                            : euclidean_patch(*box);
    const TwistProfile* prof = patch_name == "twisted" && profile ? &*profile : nullptr;
    VerificationReport report = verify_structure(*sigma, patch, so, prof, config);
    log << "structeq on " << patch.name << " patch at " << so.points << " points\n";
    print_properties(log, report);
    if (report.metadata.value("gauss_sign_mismatch", false))
        log << "note: curvature and sigma expression agree only up to sign\n";

    const auto dir = output_dir(config, options);
    write_file(dir / "structeq_report.json", report.to_json(per_point(config, options)).dump(2) + "\n");
    return report.all_pass() ? kPass : kFail;
}

int run_command(const std::string& command, const std::filesystem::path& config_path, const CliOptions& options,
                std::ostream& log, std::ostream& err) {
    try {
        std::ifstream in(config_path);
        if (!in) {
            err << "error: cannot open config " << config_path.string() << '\n';
            return kConfigError;
        }
        const json config = json::parse(in);
        if (command == "curve") return cmd_curve(config, options, log);
        if (command == "build") return cmd_build(config, options, log);
        if (command == "verify") return cmd_verify(config, options, log);
        if (command == "structeq") return cmd_structeq(config, options, log);
        err << "error: unknown command '" << command << "'\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kConfigError;
}

}  // namespace hflat
