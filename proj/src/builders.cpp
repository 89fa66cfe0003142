#include "hflat/builders.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hflat/errors.hpp"
#include "hflat/ode.hpp"

namespace hflat {

namespace {

std::string format_point(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
    os << ')';
    return os.str();
}

struct HermiteWeights {
    double h00, h10, h01, h11;
    HermiteWeights(double u, double h) {
        const double u2 = u * u, u3 = u2 * u;
        h00 = 2 * u3 - 3 * u2 + 1;
        h10 = (u3 - 2 * u2 + u) * h;
        h01 = -2 * u3 + 3 * u2;
        h11 = (u3 - u2) * h;
    }
    HVector operator()(const HVector& y0, const HVector& d0, const HVector& y1, const HVector& d1) const {
        HVector out = h00 * y0;
        out.axpy(h10, d0).axpy(h01, y1).axpy(h11, d1);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Cylinder profile curve D with D'' given by the twisted rotation law.

class CylinderCurve {
public:
    CylinderCurve(const CylinderSpec& spec, double x_lo, double x_hi) : lambda_(spec.lambda), min_(spec.lambda_min) {
        const std::size_t n = spec.n;
        const double f0 = speed(0.0).v;
        const HVector D0 = spec.D0 ? *spec.D0 : HVector(n);
        const HVector D1 = spec.D1 ? *spec.D1 : f0 * HVector::basis(n, 0);
        if (D0.size() != n || D1.size() != n)
            throw std::invalid_argument("build_cylinder: D(0) and D'(0) must lie in H^n");

        const double h = spec.grid_step;
        const double lo = std::min(0.0, -std::ceil(-x_lo / h + 1.0) * h);
        const double hi = std::max(0.0, std::ceil(x_hi / h + 1.0) * h);

        std::vector<double> y(D0.flat().begin(), D0.flat().end());
        y.insert(y.end(), D1.flat().begin(), D1.flat().end());
        const std::size_t w = 4 * n;
        auto rhs = [&](double s, std::span<const double> state, std::span<double> dy) {
            const HVector Dp = HVector::from_flat(state.subspan(w, w));
            const HVector Dpp = acceleration(s, Dp);
            std::copy(Dp.flat().begin(), Dp.flat().end(), dy.begin());
            std::copy(Dpp.flat().begin(), Dpp.flat().end(), dy.begin() + static_cast<std::ptrdiff_t>(w));
        };
        auto none = [](std::vector<double>&) {};
        std::vector<Node> back, fwd;
        auto collect = [&](std::vector<Node>& into) {
            return [this, target = &into, w](std::size_t, double s, const std::vector<double>& state) {
                std::span<const double> st(state);
                Node node{s, HVector::from_flat(st.subspan(0, w)), HVector::from_flat(st.subspan(w, w)), {}};
                node.Dpp = acceleration(s, node.Dp);
                target->push_back(std::move(node));
            };
        };
        if (lo < 0.0) integrate_rk4(y, 0.0, lo, h, rhs, collect(back), none);
        integrate_rk4(y, 0.0, hi, h, rhs, collect(fwd), none);
        nodes_.assign(back.rbegin(), back.rend());
        if (!nodes_.empty()) nodes_.pop_back();
        nodes_.insert(nodes_.end(), fwd.begin(), fwd.end());
        h_ = h;
    }

    // f = |lambda| with derivative.
    Jet speed(double s) const {
        double f2 = 0.0, ff1 = 0.0;
        for (const auto& l : lambda_) {
            const Jet j = l.jet(s);
            f2 += j.v * j.v;
            ff1 += j.v * j.d1;
        }
        const double f = std::sqrt(f2);
        if (!(f >= min_)) {
            std::ostringstream msg;
            msg << "build_cylinder: |lambda| = " << f << " below lambda_min = " << min_ << " at x_1 = " << s
                << " (totally geodesic degeneration)";
            throw DomainError(msg.str());
        }
        return {f, ff1 / f, 0.0};
    }

    HVector acceleration(double s, const HVector& Dp) const {
        const Jet f = speed(s);
        const Quaternion q{0.0, lambda_[0](s), lambda_[1](s), lambda_[2](s)};
        HVector out = (f.d1 / f.v) * Dp;
        out.axpy(f.v, left_mul(q, Dp));
        return out;
    }

    struct Eval {
        HVector D, Dp, Dpp;
    };

    Eval at(double x) const {
        const double lo = nodes_.front().s, hi = nodes_.back().s;
        if (!(x >= lo && x <= hi)) throw DomainError("build_cylinder: x_1 outside the integrated range");
        auto k = static_cast<std::size_t>(std::floor((x - lo) / h_));
        k = std::min(k, nodes_.size() - 2);
        const Node& a = nodes_[k];
        const Node& c = nodes_[k + 1];
        const HermiteWeights H((x - a.s) / (c.s - a.s), c.s - a.s);
        Eval e;
        e.D = H(a.D, a.Dp, c.D, c.Dp);
        e.Dp = H(a.Dp, a.Dpp, c.Dp, c.Dpp);
        e.Dpp = acceleration(x, e.Dp);
        return e;
    }

private:
    struct Node {
        double s;
        HVector D, Dp, Dpp;
    };
    std::array<ScalarFunction, 3> lambda_;
    double min_;
    std::vector<Node> nodes_;
    double h_ = 0.0;
};

}  // namespace

ImmersionSampler build_cylinder(const CylinderSpec& spec, const Box& domain) {
    const std::size_t n = spec.n;
    if (n < 1) throw std::invalid_argument("build_cylinder: dimension must be positive");
    if (domain.dimension() != n)
        throw std::invalid_argument("build_cylinder: domain must have " + std::to_string(n) + " axes");
    std::vector<HVector> rulings = spec.rulings;
    if (rulings.empty())
        for (std::size_t j = 1; j < n; ++j) rulings.push_back(HVector::basis(n, j));
    if (rulings.size() != n - 1) throw std::invalid_argument("build_cylinder: expected n - 1 rulings");
    for (std::size_t a = 0; a < rulings.size(); ++a) {
        if (rulings[a].size() != n) throw std::invalid_argument("build_cylinder: ruling outside H^n");
        for (std::size_t b = a; b < rulings.size(); ++b) {
            const double target = a == b ? 1.0 : 0.0;
            if (std::abs(real_inner(rulings[a], rulings[b]) - target) > 1e-12)
                throw std::invalid_argument("build_cylinder: rulings must be orthonormal");
        }
    }

    auto curve = std::make_shared<const CylinderCurve>(spec, domain.lo[0], domain.hi[0]);

    auto eval = [curve, rulings, n](std::span<const double> x) {
        const auto d = curve->at(x[0]);
        SampleJet jet;
        jet.value = d.D;
        for (std::size_t j = 1; j < n; ++j) jet.value.axpy(x[j], rulings[j - 1]);
        jet.first.push_back(d.Dp);
        for (std::size_t j = 1; j < n; ++j) jet.first.push_back(rulings[j - 1]);
        jet.second.assign(n * n, HVector(n));
        jet.second[0] = d.Dpp;
        return jet;
    };
    ImmersionSampler sampler("cylinder", domain, n, eval);
    auto lambda = spec.lambda;
    sampler.twist = [curve](std::span<const double> x) { return curve->speed(x[0]).v; };
    sampler.expected_metric_diagonal = [curve, n](std::span<const double> x) {
        std::vector<double> g(n, 1.0);
        const double f = curve->speed(x[0]).v;
        g[0] = f * f;
        return g;
    };
    sampler.expected_lambda = [lambda](std::span<const double> x) {
        return std::array<double, 3>{lambda[0](x[0]), lambda[1](x[0]), lambda[2](x[0])};
    };
    return sampler;
}

// ---------------------------------------------------------------------------

ImmersionSampler build_twisted_legendre(const TwistedLegendreSpec& spec, const Box& domain) {
    const std::size_t n = spec.coeffs.dimension();
    if (domain.dimension() != n)
        throw std::invalid_argument("build_twisted_legendre: domain must have " + std::to_string(n) +
                                    " axes (t, u_2, ..., u_n)");
    if (spec.init.dimension() != n || spec.init.P.size() != n - 2)
        throw std::invalid_argument("build_twisted_legendre: initial state does not match the coefficients");
    const double init_defect = constraint_defect(spec.init).max();
    if (init_defect > 1e-12) {
        std::ostringstream msg;
        msg << "build_twisted_legendre: initial frame violates the Legendre constraints by " << init_defect;
        throw std::invalid_argument(msg.str());
    }

    auto curve = std::make_shared<const LegendreCurve>(spec.init, spec.coeffs, spec.b, domain.lo[0], domain.hi[0],
                                                       spec.grid_step);
    const JetFn b = spec.b;
    const std::vector<JetFn> a = spec.coeffs.a();

    // ftilde as a jet in t at fixed u.
    auto twist = [b, a](std::span<const double> x) {
        Jet f = b(x[0]);
        f.v += x[1];
        for (std::size_t j = 0; j < a.size(); ++j) {
            const Jet aj = a[j](x[0]);
            f = f + x[j + 2] * aj;
        }
        return f;
    };

    // ftilde is affine in u, so its minimum over the u-box is attained at a corner.
    const std::size_t corners = std::size_t{1} << (n - 1);
    std::vector<double> t_samples;
    for (const auto& node : curve->nodes())
        if (node.s >= domain.lo[0] && node.s <= domain.hi[0]) t_samples.push_back(node.s);
    t_samples.push_back(domain.lo[0]);
    t_samples.push_back(domain.hi[0]);
    std::vector<double> x(n);
    for (double t : t_samples) {
        x[0] = t;
        for (std::size_t c = 0; c < corners; ++c) {
            for (std::size_t k = 1; k < n; ++k) x[k] = (c >> (k - 1)) & 1U ? domain.hi[k] : domain.lo[k];
            const double f = twist(x).v;
            if (!(f >= spec.f_min)) {
                std::ostringstream msg;
                msg << "build_twisted_legendre: ftilde = " << f << " below f_min = " << spec.f_min
                    << " at (t, u) = " << format_point(x);
                throw DomainError(msg.str());
            }
        }
    }

    auto value = [curve](std::span<const double> x) {
        const auto p = curve->at(x[0]);
        HVector L = p.accum;
        L.axpy(x[1], p.z);
        for (std::size_t j = 0; j < p.P.size(); ++j) L.axpy(x[j + 2], p.P[j]);
        return L;
    };
    auto eval = [curve, twist, a, n](std::span<const double> x) {
        const auto p = curve->at(x[0]);
        const Jet f = twist(x);
        SampleJet jet;
        jet.value = p.accum;
        jet.value.axpy(x[1], p.z);
        for (std::size_t j = 0; j < p.P.size(); ++j) jet.value.axpy(x[j + 2], p.P[j]);

        jet.first.push_back(f.v * p.zp);
        jet.first.push_back(p.z);
        for (const auto& P : p.P) jet.first.push_back(P);

        jet.second.assign(n * n, HVector(n));
        HVector Ltt = f.d1 * p.zp;
        Ltt.axpy(f.v, p.zpp);
        jet.second[0] = std::move(Ltt);
        jet.second[1] = jet.second[n] = p.zp;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double aj = a[j](x[0]).v;
            jet.second[j + 2] = jet.second[(j + 2) * n] = aj * p.zp;
        }
        return jet;
    };

    ImmersionSampler sampler("twisted_legendre", domain, n, eval, value);
    sampler.twist = [twist](std::span<const double> x) { return twist(x).v; };
    sampler.expected_metric_diagonal = [twist, n](std::span<const double> x) {
        std::vector<double> g(n, 1.0);
        const double f = twist(x).v;
        g[0] = f * f;
        return g;
    };
    const LegendreCoefficients coeffs = spec.coeffs;
    sampler.expected_lambda = [twist, coeffs](std::span<const double> x) {
        const double f = twist(x).v;
        return std::array<double, 3>{coeffs.alpha()(x[0]).v / f, coeffs.beta()(x[0]).v / f,
                                     coeffs.gamma()(x[0]).v / f};
    };
    return sampler;
}

ImmersionSampler build_surface_legendre(const JetFn& b, const LegendreCoefficients& coeffs, const CurveState& init,
                                        const Box& domain, double f_min, double grid_step) {
    if (coeffs.dimension() != 2)
        throw std::invalid_argument("build_surface_legendre: the curve must lie in S^7 of H^2");
    return build_twisted_legendre({coeffs, b, init, f_min, grid_step}, domain);
}

ImmersionSampler build_from_profile(const TwistProfile& profile, const Box& x_domain, double f_min,
                                    double grid_step) {
    const std::size_t n = profile.dimension();
    if (n < 2) throw std::invalid_argument("build_from_profile: dimension must be at least 2");
    if (x_domain.dimension() != n) throw std::invalid_argument("build_from_profile: domain dimension mismatch");
    const ReparametrizedProfile rp = reparametrize_profile(profile, x_domain.lo[0], x_domain.hi[0]);
    Box tu = x_domain;
    tu.lo[0] = rp.t_at(x_domain.lo[0]);
    tu.hi[0] = rp.t_at(x_domain.hi[0]);
    LegendreCoefficients coeffs(n, rp.curve[0], rp.curve[1], rp.curve[2], rp.a);
    return build_twisted_legendre({coeffs, rp.b, standard_initial_frame(n), f_min, grid_step}, tu);
}

// ---------------------------------------------------------------------------

QuaternionJet QuaternionFunction::jet(double x) const {
    const Jet w = parts[0].jet(x), i = parts[1].jet(x), j = parts[2].jet(x), k = parts[3].jet(x);
    return {{w.v, i.v, j.v, k.v}, {w.d1, i.d1, j.d1, k.d1}, {w.d2, i.d2, j.d2, k.d2}};
}

QuaternionJetFn QuaternionFunction::as_jet_fn() const {
    return [self = *this](double x) { return self.jet(x); };
}

QuaternionJetFn log_spiral_scale(double k) {
    return [k](double x) {
        if (!(x > 0.0)) throw DomainError("log_spiral_scale: x must be positive");
        const double th = k * std::log(x);
        const Quaternion phase{std::cos(th), std::sin(th), 0.0, 0.0};
        const Quaternion d1 = Quaternion{1.0, k, 0.0, 0.0} * phase;
        const Quaternion d2 = (1.0 / x) * (Quaternion{0.0, k, 0.0, 0.0} * d1);
        return QuaternionJet{x * phase, d1, d2};
    };
}

QuaternionFunction QuaternionFunction::real(ScalarFunction f) {
    const auto zero = ScalarFunction::constant(0.0);
    return {{std::move(f), zero, zero, zero}};
}

CurveFn legendre_curve_fn(std::shared_ptr<const LegendreCurve> curve) {
    return [curve](double t) {
        auto p = curve->at(t);
        return CurveJet{std::move(p.z), std::move(p.zp), std::move(p.zpp)};
    };
}

CurveFn complex_circle_fn() {
    return [](double y) {
        const double c = std::cos(y), s = std::sin(y);
        CurveJet j{HVector(2), HVector(2), HVector(2)};
        j.v.set(0, {c, s, 0.0, 0.0});
        j.d1.set(0, {-s, c, 0.0, 0.0});
        j.d2.set(0, {-c, -s, 0.0, 0.0});
        return j;
    };
}

ImmersionSampler build_cone(const QuaternionJetFn& scale, const CurveFn& curve, std::size_t ambient,
                            const Box& domain, std::size_t per_axis) {
    if (domain.dimension() != 2) throw std::invalid_argument("build_cone: domain must be two-dimensional (x, y)");
    auto eval = [scale, curve](std::span<const double> x) {
        const QuaternionJet s = scale(x[0]);
        const CurveJet A = curve(x[1]);
        SampleJet jet;
        jet.value = left_mul(s.v, A.v);
        jet.first = {left_mul(s.d1, A.v), left_mul(s.v, A.d1)};
        const HVector Lxy = left_mul(s.d1, A.d1);
        jet.second = {left_mul(s.d2, A.v), Lxy, Lxy, left_mul(s.v, A.d2)};
        return jet;
    };
    ImmersionSampler sampler("cone", domain, ambient, eval);

    per_axis = std::max<std::size_t>(per_axis, 2);
    std::vector<double> x(2);
    for (std::size_t a = 0; a < per_axis; ++a)
        for (std::size_t b = 0; b < per_axis; ++b) {
            x[0] = domain.lo[0] + domain.extent(0) * static_cast<double>(a) / static_cast<double>(per_axis - 1);
            x[1] = domain.lo[1] + domain.extent(1) * static_cast<double>(b) / static_cast<double>(per_axis - 1);
            const SampleJet jet = eval(x);
            if (jet.value.size() != ambient) throw std::invalid_argument("build_cone: curve is not in H^ambient");
            if (scale(x[0]).v.norm() < 1e-12)
                throw DomainError("build_cone: scale vanishes at x = " + format_point(x));
            const double g11 = jet.first[0].norm_sq(), g22 = jet.first[1].norm_sq();
            const double g12 = real_inner(jet.first[0], jet.first[1]);
            const double det = g11 * g22 - g12 * g12;
            if (!(g11 > 1e-24 && g22 > 1e-24 && det > 1e-10 * g11 * g22))
                throw DomainError("build_cone: {L_x, L_y} has rank < 2 at " + format_point(x) +
                                  " (not an immersion)");
        }
    return sampler;
}

}  // namespace hflat
