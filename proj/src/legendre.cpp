#include "hflat/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hflat/errors.hpp"
#include "hflat/ode.hpp"

namespace hflat {

LegendreCoefficients::LegendreCoefficients(std::size_t n, JetFn alpha, JetFn beta, JetFn gamma, std::vector<JetFn> a)
    : n_(n), alpha_(std::move(alpha)), beta_(std::move(beta)), gamma_(std::move(gamma)), a_(std::move(a)) {
    if (n_ < 2) throw std::invalid_argument("LegendreCoefficients: dimension must be at least 2");
    if (a_.size() != n_ - 2)
        throw std::invalid_argument("LegendreCoefficients: expected " + std::to_string(n_ - 2) +
                                    " normal coefficients a_l, got " + std::to_string(a_.size()));
}

LegendreCoefficients LegendreCoefficients::from_functions(std::size_t n, const ScalarFunction& alpha,
                                                          const ScalarFunction& beta, const ScalarFunction& gamma,
                                                          const std::vector<ScalarFunction>& a) {
    std::vector<JetFn> fns;
    fns.reserve(a.size());
    for (const auto& f : a) fns.push_back(f.as_jet_fn());
    return {n, alpha.as_jet_fn(), beta.as_jet_fn(), gamma.as_jet_fn(), std::move(fns)};
}

LegendreCoefficients LegendreCoefficients::zero(std::size_t n) {
    const auto zero = ScalarFunction::constant(0.0);
    return from_functions(n, zero, zero, zero, std::vector<ScalarFunction>(n >= 2 ? n - 2 : 0, zero));
}

const JetFn& LegendreCoefficients::structure_coefficient(StructureAxis axis) const {
    switch (axis) {
        case StructureAxis::I: return alpha_;
        case StructureAxis::J: return beta_;
        case StructureAxis::K: return gamma_;
    }
    return alpha_;
}

CurveState standard_initial_frame(std::size_t n) {
    if (n < 2) throw std::invalid_argument("standard_initial_frame: dimension must be at least 2, got " +
                                           std::to_string(n));
    CurveState st;
    st.z = HVector::basis(n, 0);
    st.zp = HVector::basis(n, 1);
    for (std::size_t l = 2; l < n; ++l) st.P.push_back(HVector::basis(n, l));
    st.accum = HVector(n);
    return st;
}

HVector legendre_acceleration(const CurveState& state, const LegendreCoefficients& coeffs) {
    const double s = state.s;
    const Quaternion q{0.0, coeffs.alpha()(s).v, coeffs.beta()(s).v, coeffs.gamma()(s).v};
    HVector zpp = left_mul(q, state.zp);
    zpp -= state.z;
    for (std::size_t l = 0; l < state.P.size(); ++l) zpp.axpy(-coeffs.a()[l](s).v, state.P[l]);
    return zpp;
}

CurveDerivative special_legendre_rhs(const CurveState& state, const LegendreCoefficients& coeffs, const JetFn* b) {
    if (state.dimension() != coeffs.dimension() || state.P.size() != coeffs.a().size())
        throw std::invalid_argument("special_legendre_rhs: state and coefficient dimensions differ");
    CurveDerivative d;
    d.dz = state.zp;
    d.dzp = legendre_acceleration(state, coeffs);
    d.dP.reserve(state.P.size());
    for (std::size_t l = 0; l < state.P.size(); ++l) d.dP.push_back(coeffs.a()[l](state.s).v * state.zp);
    d.daccum = b ? (*b)(state.s).v * state.zp : HVector(state.dimension());
    return d;
}

namespace {

// Flat layout: z, z', P_3..P_n, accum; 4n reals each.
std::vector<double> pack(const CurveState& st) {
    std::vector<double> y;
    y.reserve((st.P.size() + 3) * st.z.real_size());
    auto append = [&](const HVector& v) { y.insert(y.end(), v.flat().begin(), v.flat().end()); };
    append(st.z);
    append(st.zp);
    for (const auto& p : st.P) append(p);
    append(st.accum);
    return y;
}

CurveState unpack(std::span<const double> y, std::size_t n, double s) {
    const std::size_t w = 4 * n;
    const std::size_t blocks = y.size() / w;
    CurveState st;
    st.s = s;
    st.z = HVector::from_flat(y.subspan(0, w));
    st.zp = HVector::from_flat(y.subspan(w, w));
    for (std::size_t b = 2; b + 1 < blocks; ++b) st.P.push_back(HVector::from_flat(y.subspan(b * w, w)));
    st.accum = HVector::from_flat(y.subspan((blocks - 1) * w, w));
    return st;
}

void write_derivative(const CurveDerivative& d, std::span<double> out) {
    std::size_t off = 0;
    auto put = [&](const HVector& v) {
        std::copy(v.flat().begin(), v.flat().end(), out.begin() + static_cast<std::ptrdiff_t>(off));
        off += v.real_size();
    };
    put(d.dz);
    put(d.dzp);
    for (const auto& p : d.dP) put(p);
    put(d.daccum);
}

// Removes the components of v along {u, iu, ju, ku} for each (unit) u.
void remove_quaternionic_span(HVector& v, const HVector& u) {
    v.axpy(-real_inner(v, u), u);
    for (auto axis : kAxes) {
        const HVector pu = apply_structure(axis, u);
        v.axpy(-real_inner(v, pu), pu);
    }
}

}  // namespace

void reorthonormalize(CurveState& state) {
    state.z *= 1.0 / state.z.norm();
    remove_quaternionic_span(state.zp, state.z);
    state.zp *= 1.0 / state.zp.norm();
    for (std::size_t l = 0; l < state.P.size(); ++l) {
        remove_quaternionic_span(state.P[l], state.z);
        remove_quaternionic_span(state.P[l], state.zp);
        for (std::size_t m = 0; m < l; ++m) remove_quaternionic_span(state.P[l], state.P[m]);
        state.P[l] *= 1.0 / state.P[l].norm();
    }
}

Trajectory integrate_curve(const CurveState& init, const LegendreCoefficients& coeffs, const JetFn* b, double s_end,
                           double step, IntegrateOptions options) {
    if (!(step > 0.0)) throw std::invalid_argument("integrate_curve: step must be positive");
    const std::size_t n = init.dimension();
    if (n != coeffs.dimension() || init.P.size() != n - 2)
        throw std::invalid_argument("integrate_curve: initial state does not match coefficient dimension");

    Trajectory out;
    out.reserve(step_count(init.s, s_end, step) + 1);
    auto rhs = [&](double s, std::span<const double> y, std::span<double> dy) {
        const CurveState st = unpack(y, n, s);
        write_derivative(special_legendre_rhs(st, coeffs, b), dy);
    };
    auto observe = [&](std::size_t, double s, const std::vector<double>& y) {
        for (double c : y)
            if (!std::isfinite(c)) {
                std::ostringstream msg;
                msg << "integrate_curve: non-finite state at s = " << std::setprecision(17) << s;
                throw DomainError(msg.str());
            }
        out.push_back(unpack(y, n, s));
    };
    auto post = [&](std::vector<double>& y) {
        if (!options.reorthonormalize) return;
        CurveState st = unpack(y, n, 0.0);
        reorthonormalize(st);
        y = pack(st);
    };
    integrate_rk4(pack(init), init.s, s_end, step, rhs, observe, post);
    return out;
}

std::vector<HVector> quaternionic_frame(const CurveState& state) {
    std::vector<HVector> frame;
    auto add = [&](const HVector& v) {
        frame.push_back(v);
        for (auto axis : kAxes) frame.push_back(apply_structure(axis, v));
    };
    add(state.z);
    add(state.zp);
    for (const auto& p : state.P) add(p);
    return frame;
}

double gram_deviation(const std::vector<HVector>& vectors) {
    double dev = 0.0;
    for (std::size_t a = 0; a < vectors.size(); ++a)
        for (std::size_t b = a; b < vectors.size(); ++b) {
            const double target = a == b ? 1.0 : 0.0;
            dev = std::max(dev, std::abs(real_inner(vectors[a], vectors[b]) - target));
        }
    return dev;
}

double DefectReport::max() const {
    return std::max({z_norm, zp_norm, legendre[0], legendre[1], legendre[2], z_zp, frame_gram});
}

DefectReport constraint_defect(const CurveState& state) {
    DefectReport r;
    r.z_norm = std::abs(state.z.norm_sq() - 1.0);
    r.zp_norm = std::abs(state.zp.norm_sq() - 1.0);
    for (std::size_t a = 0; a < 3; ++a)
        r.legendre[a] = std::abs(real_inner(state.zp, apply_structure(kAxes[a], state.z)));
    r.z_zp = std::abs(real_inner(state.z, state.zp));
    r.frame_gram = gram_deviation(quaternionic_frame(state));
    return r;
}

double SpecialnessSample::magnitude() const {
    double m = 0.0;
    for (std::size_t l = 0; l < b.size(); ++l) m = std::max({m, std::abs(b[l]), std::abs(c[l]), std::abs(d[l])});
    return m;
}

SpecialnessSample specialness_at(const CurveState& state, const HVector& zpp) {
    const double dev = gram_deviation(quaternionic_frame(state));
    if (dev > 1e-3) {
        std::ostringstream msg;
        msg << "specialness_at: degenerate frame at s = " << state.s << " (Gram deviation " << dev << ")";
        throw DomainError(msg.str());
    }
    SpecialnessSample out;
    out.alpha = real_inner(zpp, apply_structure(StructureAxis::I, state.zp));
    out.beta = real_inner(zpp, apply_structure(StructureAxis::J, state.zp));
    out.gamma = real_inner(zpp, apply_structure(StructureAxis::K, state.zp));
    for (const auto& p : state.P) {
        out.a.push_back(-real_inner(zpp, p));
        out.b.push_back(real_inner(zpp, apply_structure(StructureAxis::I, p)));
        out.c.push_back(real_inner(zpp, apply_structure(StructureAxis::J, p)));
        out.d.push_back(real_inner(zpp, apply_structure(StructureAxis::K, p)));
    }
    return out;
}

SpecialnessReport specialness_defect(const Trajectory& trajectory, const LegendreCoefficients& coeffs,
                                     AccelerationSource source) {
    SpecialnessReport report;
    const std::size_t count = trajectory.size();
    for (std::size_t k = 0; k < count; ++k) {
        HVector zpp;
        if (source == AccelerationSource::Equation) {
            zpp = legendre_acceleration(trajectory[k], coeffs);
        } else {
            if (k == 0 || k + 1 == count) continue;
            const double h = trajectory[k + 1].s - trajectory[k - 1].s;
            zpp = (trajectory[k + 1].zp - trajectory[k - 1].zp) * (1.0 / h);
        }
        auto sample = specialness_at(trajectory[k], zpp);
        const double m = sample.magnitude();
        report.per_sample.push_back(m);
        report.max_defect = std::max(report.max_defect, m);
        report.samples.push_back(std::move(sample));
    }
    return report;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    if (trajectory.empty()) return;
    const std::size_t w = trajectory.front().z.real_size();
    const std::size_t nP = trajectory.front().P.size();
    auto header_block = [&](const std::string& name) {
        static constexpr char kParts[] = {'r', 'i', 'j', 'k'};
        for (std::size_t r = 0; r < w; ++r) os << ',' << name << r / 4 + 1 << '_' << kParts[r % 4];
    };
    os << 's';
    header_block("z");
    header_block("zp");
    for (std::size_t l = 0; l < nP; ++l) header_block("P" + std::to_string(l + 3));
    header_block("accum");
    os << '\n';
    const auto old = os.precision(17);
    for (const auto& st : trajectory) {
        os << st.s;
        auto row = [&](const HVector& v) {
            for (double c : v.flat()) os << ',' << c;
        };
        row(st.z);
        row(st.zp);
        for (const auto& p : st.P) row(p);
        row(st.accum);
        os << '\n';
    }
    os.precision(old);
}

// ---------------------------------------------------------------------------

LegendreCurve::LegendreCurve(const CurveState& init, LegendreCoefficients coeffs, std::optional<JetFn> b,
                             double t_lo, double t_hi, double grid_step)
    : coeffs_(std::move(coeffs)), b_(std::move(b)) {
    if (!(t_lo < t_hi)) throw std::invalid_argument("LegendreCurve: empty parameter range");
    if (!(grid_step > 0.0)) throw std::invalid_argument("LegendreCurve: grid step must be positive");
    // Snap the cached range outward to whole steps from the initial node so every
    // node sits at init.s + k * grid_step, one extra node on each side.
    const double s0 = init.s;
    const double lo = std::min(s0, s0 - std::ceil((s0 - t_lo) / grid_step + 1.0) * grid_step);
    const double hi = std::max(s0, s0 + std::ceil((t_hi - s0) / grid_step + 1.0) * grid_step);
    const JetFn* bp = b_ ? &*b_ : nullptr;

    if (lo < s0) {
        Trajectory back = integrate_curve(init, coeffs_, bp, lo, grid_step);
        nodes_.assign(back.rbegin(), back.rend());
        nodes_.pop_back();  // init is added by the forward run
    }
    if (hi > s0) {
        Trajectory fwd = integrate_curve(init, coeffs_, bp, hi, grid_step);
        nodes_.insert(nodes_.end(), fwd.begin(), fwd.end());
    } else {
        nodes_.push_back(init);
    }
    h_ = grid_step;
    node_zpp_.reserve(nodes_.size());
    for (const auto& st : nodes_) node_zpp_.push_back(legendre_acceleration(st, coeffs_));
}

namespace {

// Cubic Hermite basis on [0, 1] scaled by the interval length h.
struct Hermite {
    double h00, h10, h01, h11;
    Hermite(double u, double h) {
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

}  // namespace

LegendreCurve::Point LegendreCurve::at(double t) const {
    const double lo = nodes_.front().s;
    const double hi = nodes_.back().s;
    if (!(t >= lo && t <= hi)) {
        std::ostringstream msg;
        msg << "LegendreCurve: t = " << t << " outside cached range [" << lo << ", " << hi << "]";
        throw DomainError(msg.str());
    }
    auto k = static_cast<std::size_t>(std::floor((t - lo) / h_));
    k = std::min(k, nodes_.size() - 2);
    const CurveState& a = nodes_[k];
    const CurveState& c = nodes_[k + 1];
    const double h = c.s - a.s;
    const Hermite H((t - a.s) / h, h);

    CurveState st;
    st.s = t;
    st.z = H(a.z, a.zp, c.z, c.zp);
    st.zp = H(a.zp, node_zpp_[k], c.zp, node_zpp_[k + 1]);
    for (std::size_t l = 0; l < a.P.size(); ++l) {
        const double aa = coeffs_.a()[l](a.s).v;
        const double ac = coeffs_.a()[l](c.s).v;
        st.P.push_back(H(a.P[l], aa * a.zp, c.P[l], ac * c.zp));
    }
    if (b_) {
        st.accum = H(a.accum, (*b_)(a.s).v * a.zp, c.accum, (*b_)(c.s).v * c.zp);
    } else {
        st.accum = H(a.accum, HVector(a.z.size()), c.accum, HVector(a.z.size()));
    }

    Point p;
    p.zpp = legendre_acceleration(st, coeffs_);
    p.z = std::move(st.z);
    p.zp = std::move(st.zp);
    p.P = std::move(st.P);
    p.accum = std::move(st.accum);
    return p;
}

}  // namespace hflat
