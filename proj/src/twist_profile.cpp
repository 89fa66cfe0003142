#include "hflat/twist_profile.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hflat/errors.hpp"

namespace hflat {

namespace {

void require_dimension(const TwistProfile& p, std::span<const double> x) {
    if (x.size() != p.dimension())
        throw std::invalid_argument("TwistProfile: point has " + std::to_string(x.size()) + " coordinates, expected " +
                                    std::to_string(p.dimension()));
}

std::string format_point(std::span<const double> x) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
    os << ')';
    return os.str();
}

// Visits x_1 on a uniform grid times every corner of the remaining axes.
template <class Visit>
void for_grid_and_corners(const Box& box, std::size_t per_axis, Visit&& visit) {
    const std::size_t n = box.dimension();
    const std::size_t corners = std::size_t{1} << (n - 1);
    std::vector<double> x(n);
    for (std::size_t s = 0; s < per_axis; ++s) {
        x[0] = box.lo[0] + box.extent(0) * static_cast<double>(s) / static_cast<double>(per_axis - 1);
        for (std::size_t c = 0; c < corners; ++c) {
            for (std::size_t k = 1; k < n; ++k) x[k] = (c >> (k - 1)) & 1U ? box.hi[k] : box.lo[k];
            visit(std::span<const double>(x));
        }
    }
}

}  // namespace

double TwistProfile::twist(std::span<const double> x) const {
    require_dimension(*this, x);
    double f = beta(x[0]);
    for (std::size_t j = 0; j < alpha.size(); ++j) f += alpha[j](x[0]) * x[j + 1];
    return f;
}

std::vector<double> TwistProfile::twist_gradient(std::span<const double> x) const {
    require_dimension(*this, x);
    std::vector<double> g(dimension() + 1);
    g[0] = twist(x);
    g[1] = beta.derivative(x[0], 1);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        g[1] += alpha[j].derivative(x[0], 1) * x[j + 1];
        g[j + 2] = alpha[j](x[0]);
    }
    return g;
}

std::vector<double> TwistProfile::twist_hessian(std::span<const double> x) const {
    require_dimension(*this, x);
    const std::size_t n = dimension();
    std::vector<double> h(n * n, 0.0);
    h[0] = beta.derivative(x[0], 2);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        h[0] += alpha[j].derivative(x[0], 2) * x[j + 1];
        h[j + 1] = h[(j + 1) * n] = alpha[j].derivative(x[0], 1);
    }
    return h;
}

double TwistProfile::normalization_defect(double x1) const {
    double acc = 0.0;
    for (const auto& r : ratios) {
        const double v = r(x1);
        acc += 1.0 / (v * v);
    }
    return std::abs(acc - 1.0);
}

double TwistProfile::lambda_norm_defect(std::span<const double> x) const {
    const double f = twist(x);
    double r2 = 0.0;
    for (const auto& r : ratios) r2 += r(x[0]) * r(x[0]);
    return std::abs(f - std::sqrt(r2) / std::abs(f));
}

void TwistProfile::validate(const Box& box, double f_min, std::size_t per_axis) const {
    if (box.dimension() != dimension())
        throw std::invalid_argument("TwistProfile::validate: box dimension does not match the profile");
    for_grid_and_corners(box, std::max<std::size_t>(per_axis, 2), [&](std::span<const double> x) {
        const double f = twist(x);
        if (!(f >= f_min)) {
            std::ostringstream msg;
            msg << "twisting function f = " << f << " below f_min = " << f_min << " at x = " << format_point(x);
            throw DomainError(msg.str());
        }
    });
}

void TwistProfile::validate_strict(const Box& box, double tol, std::size_t per_axis) const {
    per_axis = std::max<std::size_t>(per_axis, 2);
    for (std::size_t s = 0; s < per_axis; ++s) {
        const double x1 = box.lo[0] + box.extent(0) * static_cast<double>(s) / static_cast<double>(per_axis - 1);
        const double d = normalization_defect(x1);
        if (!(d <= tol)) {
            std::ostringstream msg;
            msg << "ratio normalization sum r_a^-2 = 1 violated by " << d << " at x_1 = " << x1;
            throw DomainError(msg.str());
        }
    }
}

double ReparametrizedProfile::twist(std::span<const double> tu) const {
    if (tu.size() != a.size() + 2) throw std::invalid_argument("ReparametrizedProfile::twist: wrong dimension");
    double f = b(tu[0]).v + tu[1];
    for (std::size_t j = 0; j < a.size(); ++j) f += a[j](tu[0]).v * tu[j + 2];
    return f;
}

ReparametrizedProfile reparametrize_profile(const TwistProfile& profile, double x_lo, double x_hi,
                                            std::size_t per_axis) {
    if (profile.alpha.empty())
        throw std::invalid_argument("reparametrize_profile: profile needs alpha_2 (dimension >= 2)");
    if (!(x_lo < x_hi)) throw std::invalid_argument("reparametrize_profile: empty x_1 range");
    const ScalarFunction alpha2 = profile.alpha[0];
    per_axis = std::max<std::size_t>(per_axis, 2);
    for (std::size_t s = 0; s < per_axis; ++s) {
        const double x = x_lo + (x_hi - x_lo) * static_cast<double>(s) / static_cast<double>(per_axis - 1);
        if (!(alpha2(x) > 0.0)) {
            std::ostringstream msg;
            msg << "reparametrize_profile: alpha_2 = " << alpha2(x) << " is not positive at x_1 = " << x;
            throw DomainError(msg.str());
        }
    }

    ReparametrizedProfile out;
    out.t_of_x = alpha2.antiderivative();
    const ScalarFunction t_of_x = out.t_of_x;
    const bool affine = alpha2.is_constant();

    out.x_of_t = [alpha2, t_of_x, affine](double t) {
        const double a0 = alpha2(0.0);
        double x = t / a0;
        if (!affine) {
            for (int it = 0; it < 100; ++it) {
                const double step = (t_of_x(x) - t) / alpha2(x);
                x -= step;
                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
            }
        }
        const Jet a = alpha2.jet(x);
        return Jet{x, 1.0 / a.v, -a.d1 / (a.v * a.v * a.v)};
    };

    auto ratio_over_alpha2 = [alpha2, x_of_t = out.x_of_t](ScalarFunction numerator) -> JetFn {
        return [alpha2, x_of_t, numerator](double t) {
            const Jet x = x_of_t(t);
            return compose(numerator.jet(x.v) / alpha2.jet(x.v), x);
        };
    };
    out.b = ratio_over_alpha2(profile.beta);
    for (std::size_t j = 1; j < profile.alpha.size(); ++j) out.a.push_back(ratio_over_alpha2(profile.alpha[j]));
    for (std::size_t c = 0; c < 3; ++c) out.curve[c] = ratio_over_alpha2(profile.ratios[c]);
    return out;
}

}  // namespace hflat
