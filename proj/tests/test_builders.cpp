#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "hflat/builders.hpp"
#include "hflat/diffgeo.hpp"
#include "hflat/errors.hpp"
#include "support.hpp"

using namespace hflat;
using testing_support::Gen;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CylinderSpec circle_cylinder(std::size_t n) {
    CylinderSpec spec;
    spec.n = n;
    spec.lambda = {ScalarFunction::constant(1.0), ScalarFunction::constant(0.0), ScalarFunction::constant(0.0)};
    return spec;
}

// Finite-difference twin of an analytic sampler.
ImmersionSampler fd_twin(const ImmersionSampler& s, double h = 1e-4) {
    return ImmersionSampler::finite_difference(s.kind(), s.domain(), s.ambient(),
                                               [&s](std::span<const double> x) { return s.value(x); }, h);
}

double jet_gap(const SampleJet& a, const SampleJet& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.first.size(); ++i) worst = std::max(worst, (a.first[i] - b.first[i]).norm());
    for (std::size_t i = 0; i < a.second.size(); ++i) worst = std::max(worst, (a.second[i] - b.second[i]).norm());
    return worst;
}

}  // namespace

TEST_CASE("cylinder over a circle: closed form") {
    const Box box({-1.0, -1.0, -1.0}, {kTwoPi, 1.0, 1.0});
    const ImmersionSampler s = build_cylinder(circle_cylinder(3), box);
    CHECK(s.kind() == "cylinder");
    // D(x) = (sin x + i (1 - cos x)) E_1, frozen at x = 1.
    const std::vector<double> x{1.0, 0.3, -0.4};
    const SampleJet jet = s.evaluate(x);
    CHECK(jet.value[0].w == doctest::Approx(0.8414709848078965).epsilon(1e-10));
    CHECK(jet.value[0].x == doctest::Approx(0.45969769413186023).epsilon(1e-10));
    CHECK(jet.value[1] == Quaternion::real(0.3));
    CHECK(jet.value[2] == Quaternion::real(-0.4));
    Gen g(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<double> y{g.uniform(-0.9, 6.2), g.uniform(), g.uniform()};
        const SampleJet j = s.evaluate(y);
        // D'(x) = e^{ix} E_1
        CHECK(std::abs(j.first[0][0].w - std::cos(y[0])) < 1e-10);
        CHECK(std::abs(j.first[0][0].x - std::sin(y[0])) < 1e-10);
        CHECK(j.first[1] == HVector::basis(3, 1));
        CHECK(j.first[2] == HVector::basis(3, 2));
        CHECK(j.d2(0, 1).norm() == 0.0);
        CHECK(j.d2(2, 0).norm() == 0.0);
        CHECK(std::abs(j.first[0].norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("cylinder with varying lambda keeps |D'| = |lambda|") {
    CylinderSpec spec;
    spec.n = 2;
    spec.lambda = {ScalarFunction({1.0}, {{0.3, 1.0, 0.0}}), ScalarFunction::constant(0.5),
                   ScalarFunction({0.0, 0.2})};
    const Box box({0.0, -1.0}, {3.0, 1.0});
    const ImmersionSampler s = build_cylinder(spec, box);
    for (double x1 : {0.0, 0.7, 1.9, 3.0}) {
        const std::vector<double> x{x1, 0.2};
        const double f = std::hypot(1.0 + 0.3 * std::sin(x1), 0.5, 0.2 * x1);
        CHECK(s.evaluate(x).first[0].norm() == doctest::Approx(f).epsilon(1e-9));
        CHECK(s.twist(x) == doctest::Approx(f).epsilon(1e-12));
    }
    const std::vector<double> x{1.3, 0.1};
    CHECK(jet_gap(s.evaluate(x), fd_twin(s, 1e-3).evaluate(x)) < 1e-5);
}

TEST_CASE("cylinder preconditions") {
    CylinderSpec spec = circle_cylinder(2);
    spec.lambda = {ScalarFunction::constant(0.0), ScalarFunction::constant(0.0), ScalarFunction::constant(0.0)};
    CHECK_THROWS_AS(build_cylinder(spec, Box({0.0, 0.0}, {1.0, 1.0})), DomainError);
    CylinderSpec bad = circle_cylinder(2);
    bad.rulings = {2.0 * HVector::basis(2, 1)};
    CHECK_THROWS_AS(build_cylinder(bad, Box({0.0, 0.0}, {1.0, 1.0})), std::invalid_argument);
    CHECK_THROWS_AS(build_cylinder(circle_cylinder(3), Box({0.0, 0.0}, {1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("twisted Legendre over a great circle: closed form") {
    // z = cos t E_1 + sin t E_2, b = 2 constant: L = u z + 2 (z(t) - z(0)).
    const auto b = ScalarFunction::constant(2.0).as_jet_fn();
    const Box box({0.0, -0.5}, {3.0, 0.5});
    const ImmersionSampler s = build_twisted_legendre({LegendreCoefficients::zero(2), b, standard_initial_frame(2)}, box);
    Gen g(13);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = g.uniform(0.0, 3.0), u = g.uniform(-0.5, 0.5);
        const SampleJet jet = s.evaluate(std::vector<double>{t, u});
        CHECK(std::abs(jet.value[0].w - ((u + 2.0) * std::cos(t) - 2.0)) < 1e-10);
        CHECK(std::abs(jet.value[1].w - (u + 2.0) * std::sin(t)) < 1e-10);
        CHECK(std::abs(jet.first[0][0].w + (u + 2.0) * std::sin(t)) < 1e-10);
        CHECK(std::abs(jet.d2(0, 0)[1].w + (u + 2.0) * std::sin(t)) < 1e-9);
    }
}

TEST_CASE("twisted Legendre analytic jets agree with finite differences") {
    const double r3 = std::sqrt(3.0);
    const auto c = ScalarFunction::constant(r3);
    const auto coeffs = LegendreCoefficients::from_functions(3, c, c, c, {ScalarFunction::sinusoid(0.2, 1.0)});
    const auto b = ScalarFunction({1.0}, {{0.1, 1.0, std::numbers::pi / 2}}).as_jet_fn();
    const Box box({0.0, -0.2, -0.2}, {kTwoPi, 0.2, 0.2});
    const ImmersionSampler s = build_twisted_legendre({coeffs, b, standard_initial_frame(3)}, box);
    // O(h^2) truncation: about 4e-7 at h = 2e-4.
    const ImmersionSampler fd = fd_twin(s, 2e-4);
    Gen g(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> x{g.uniform(0.1, 6.1), g.uniform(-0.19, 0.19), g.uniform(-0.19, 0.19)};
        CHECK(jet_gap(s.evaluate(x), fd.evaluate(x)) < 1e-5);
        CHECK(first_derivative_consistency(s, x, 1e-4) < 1e-6);
        const Eigen::MatrixXd gm = induced_metric(s, x);
        const double f = s.twist(x);
        CHECK(gm(0, 0) == doctest::Approx(f * f).epsilon(1e-10));
        CHECK(std::abs(gm(0, 1)) < 1e-10);
        CHECK(gm(2, 2) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("twisted Legendre preconditions name the point") {
    const auto b = ScalarFunction::constant(0.1).as_jet_fn();
    const Box box({0.0, -0.5}, {1.0, 0.5});
    try {
        build_twisted_legendre({LegendreCoefficients::zero(2), b, standard_initial_frame(2)}, box);
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("(t, u) = (") != std::string::npos);
    }
    CurveState skew = standard_initial_frame(2);
    skew.zp = HVector::basis(2, 0);  // not orthogonal to z
    CHECK_THROWS_AS(build_twisted_legendre({LegendreCoefficients::zero(2), b, skew}, Box({0.0, 0.0}, {1.0, 0.1})),
                    std::invalid_argument);
}

TEST_CASE("surface alias evaluates identically to the n = 2 twisted builder") {
    const auto coeffs = LegendreCoefficients::from_functions(2, ScalarFunction::constant(1.0),
                                                             ScalarFunction::constant(0.5), ScalarFunction{});
    const auto b = ScalarFunction({2.0, 0.1}).as_jet_fn();
    const Box box({0.0, -0.5}, {3.0, 0.5});
    const auto a = build_surface_legendre(b, coeffs, standard_initial_frame(2), box);
    const auto t = build_twisted_legendre({coeffs, b, standard_initial_frame(2)}, box);
    const std::vector<double> x{1.234, 0.321};
    CHECK(a.evaluate(x).value == t.evaluate(x).value);
    CHECK(a.evaluate(x).second == t.evaluate(x).second);
    const auto coeffs3 = LegendreCoefficients::zero(3);
    CHECK_THROWS_AS(build_surface_legendre(b, coeffs3, standard_initial_frame(3), Box({0, 0, 0}, {1, 1, 1})),
                    std::invalid_argument);
}

TEST_CASE("reparametrization round trip") {
    // beta = x_1, alpha_2 = 2: t = 2 x_1 and b = t / 4.
    TwistProfile p{ScalarFunction({0.0, 1.0}), {ScalarFunction::constant(2.0), ScalarFunction::constant(0.6)},
                   {ScalarFunction::constant(1.0), ScalarFunction::constant(1.0), ScalarFunction::constant(1.0)}};
    const auto r = reparametrize_profile(p, 0.5, 2.0);
    for (double x1 = 0.5; x1 <= 2.0; x1 += 0.25) {
        const double t = r.t_at(x1);
        CHECK(t == doctest::Approx(2.0 * x1).epsilon(1e-15));
        CHECK(r.x_of_t(t).v == doctest::Approx(x1).epsilon(1e-15));
        CHECK(r.b(t).v == doctest::Approx(t / 4.0).epsilon(1e-14));
        for (double u2 : {-0.3, 0.0, 0.3})
            for (double u3 : {-0.2, 0.2}) {
                const std::vector<double> x{x1, u2, u3}, tu{t, u2, u3};
                CHECK(std::abs(r.twist(tu) - p.twist(x) / 2.0) < 1e-12);
            }
    }
    TwistProfile curved = p;
    curved.alpha[0] = ScalarFunction({1.0, 0.5});
    const auto rc = reparametrize_profile(curved, 0.0, 2.0);
    for (double x1 : {0.0, 0.4, 1.7}) CHECK(rc.x_of_t(rc.t_at(x1)).v == doctest::Approx(x1).epsilon(1e-13));
    const Jet xt = rc.x_of_t(rc.t_at(1.0));
    CHECK(xt.d1 == doctest::Approx(1.0 / 1.5).epsilon(1e-13));
    TwistProfile bad = p;
    bad.alpha[0] = ScalarFunction({-1.0, 1.0});
    CHECK_THROWS_AS(reparametrize_profile(bad, 0.0, 2.0), DomainError);
}

TEST_CASE("profile builder realizes f / alpha_2") {
    const double r3 = std::sqrt(3.0);
    TwistProfile p{ScalarFunction({1.0, 0.0, 1.0}), {ScalarFunction::constant(1.0), ScalarFunction({0.0, 1.0})},
                   {ScalarFunction::constant(r3), ScalarFunction::constant(r3), ScalarFunction::constant(r3)}};
    const Box xbox({0.0, -0.2, -0.2}, {1.0, 0.2, 0.2});
    const ImmersionSampler s = build_from_profile(p, xbox);
    const std::vector<double> x{0.6, 0.1, -0.15};
    CHECK(s.twist(x) == doctest::Approx(p.twist(x)).epsilon(1e-13));
    CHECK(induced_metric(s, x)(0, 0) == doctest::Approx(p.twist(x) * p.twist(x)).epsilon(1e-10));
}

TEST_CASE("cones") {
    auto circle = std::make_shared<const LegendreCurve>(standard_initial_frame(2), LegendreCoefficients::zero(2),
                                                        std::nullopt, 0.0, kTwoPi, 1e-3);
    const Box box({0.5, 0.0}, {2.0, kTwoPi});
    const auto real_scale = QuaternionFunction::real(ScalarFunction({0.0, 1.0})).as_jet_fn();
    const ImmersionSampler cone = build_cone(real_scale, legendre_curve_fn(circle), 2, box);
    const std::vector<double> x{1.3, 2.1};
    const Eigen::MatrixXd g = induced_metric(cone, x);
    CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g(1, 1) == doctest::Approx(1.69).epsilon(1e-9));
    CHECK(std::abs(g(0, 1)) < 1e-10);
    CHECK(lagrangian_defect(cone, x) < 1e-10);

    const ImmersionSampler spiral = build_cone(log_spiral_scale(1.0), legendre_curve_fn(circle), 2, box);
    const Eigen::MatrixXd gs = induced_metric(spiral, x);
    CHECK(gs(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(gs(1, 1) == doctest::Approx(1.69).epsilon(1e-9));
    const ImmersionSampler fd = fd_twin(spiral, 1e-3);
    CHECK(jet_gap(spiral.evaluate(x), fd.evaluate(x)) < 1e-5);

    const ImmersionSampler control = build_cone(real_scale, complex_circle_fn(), 2, box);
    CHECK(lagrangian_defect(control, x) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_cone(real_scale, legendre_curve_fn(circle), 2, Box({-0.5, 0.0}, {0.5, 1.0})), DomainError);
    CHECK_THROWS_AS(build_cone(real_scale, legendre_curve_fn(circle), 3, box), std::invalid_argument);
}
