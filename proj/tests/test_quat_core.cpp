#include <doctest.h>

#include <cmath>
#include <limits>

#include "hflat/jet.hpp"
#include "hflat/quaternion.hpp"
#include "hflat/scalar_function.hpp"
#include "support.hpp"

using namespace hflat;
using testing_support::Gen;

TEST_CASE("Hamilton table on the units") {
    const Quaternion one = Quaternion::real(1.0), i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
    CHECK(i * i == -one);
    CHECK(j * j == -one);
    CHECK(k * k == -one);
    CHECK(i * j == k);
    CHECK(j * i == -k);
    CHECK(j * k == i);
    CHECK(k * j == -i);
    CHECK(k * i == j);
    CHECK(i * k == -j);
    CHECK(i * j * k == -one);
}

TEST_CASE("product agrees with the matrix oracle and is associative") {
    Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Quaternion p = g.quaternion(), q = g.quaternion(), r = g.quaternion();
        HVector v(1);
        v.set(0, q);
        CHECK(testing_support::max_abs_diff(left_mul(p, v), testing_support::matrix_left_mul(p, v)) < 1e-15);
        const Quaternion a = (p * q) * r, b = p * (q * r);
        CHECK(std::abs(a.w - b.w) + std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z) < 1e-14);
        CHECK((p * q).norm() == doctest::Approx(p.norm() * q.norm()).epsilon(1e-14));
        const Quaternion c = (p * q).conj(), d = q.conj() * p.conj();
        CHECK(std::abs(c.w - d.w) + std::abs(c.x - d.x) + std::abs(c.y - d.y) + std::abs(c.z - d.z) < 1e-14);
    }
}

TEST_CASE("structures on H^n: composition table and isometry") {
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
        for (std::size_t e = 0; e < 4 * n; ++e) {
            std::vector<double> flat(4 * n, 0.0);
            flat[e] = 1.0;
            const HVector v = HVector::from_flat(flat);
            const HVector Iv = apply_structure(StructureAxis::I, v);
            const HVector Jv = apply_structure(StructureAxis::J, v);
            const HVector Kv = apply_structure(StructureAxis::K, v);
            CHECK(apply_structure(StructureAxis::I, Iv) == -v);
            CHECK(apply_structure(StructureAxis::J, Jv) == -v);
            CHECK(apply_structure(StructureAxis::K, Kv) == -v);
            CHECK(apply_structure(StructureAxis::I, Jv) == Kv);
            CHECK(apply_structure(StructureAxis::J, Iv) == -Kv);
            CHECK(apply_structure(StructureAxis::J, Kv) == Iv);
            CHECK(apply_structure(StructureAxis::K, Jv) == -Iv);
            CHECK(apply_structure(StructureAxis::K, Iv) == Jv);
            CHECK(apply_structure(StructureAxis::I, Kv) == -Jv);
        }
    }
    Gen g(5);
    for (int trial = 0; trial < 50; ++trial) {
        const HVector v = g.hvector(3), w = g.hvector(3);
        for (auto axis : kAxes) {
            const HVector pv = apply_structure(axis, v);
            CHECK(std::abs(real_inner(pv, v)) < 1e-15);
            CHECK(pv.norm() == doctest::Approx(v.norm()).epsilon(1e-15));
            // phi is skew-adjoint
            CHECK(real_inner(pv, w) == doctest::Approx(-real_inner(v, apply_structure(axis, w))).epsilon(1e-13));
        }
    }
}

TEST_CASE("HVector arithmetic and errors") {
    const HVector a{{1, 2, 3, 4}, {0, 0, 0, 1}};
    const HVector b = HVector::basis(2, 1);
    CHECK(a.size() == 2);
    CHECK(a.real_size() == 8);
    CHECK((a + b)[1] == Quaternion{1, 0, 0, 1});
    CHECK((a - a).norm() == 0.0);
    CHECK((2.0 * a)[0] == Quaternion{2, 4, 6, 8});
    HVector c = a;
    c.axpy(-1.0, a);
    CHECK(c.norm_sq() == 0.0);
    CHECK(a.norm_sq() == doctest::Approx(31.0));
    CHECK(real_inner(a, b) == 0.0);
    CHECK_THROWS_AS(real_inner(a, HVector(3)), std::invalid_argument);
}

TEST_CASE("jets follow the chain and quotient rules") {
    const double x = 0.7;
    const Jet X = Jet::variable(x);
    const Jet sq = X * X;
    CHECK(sq.v == doctest::Approx(x * x));
    CHECK(sq.d1 == doctest::Approx(2 * x));
    CHECK(sq.d2 == doctest::Approx(2.0));
    const Jet inv = reciprocal(X);
    CHECK(inv.d1 == doctest::Approx(-1 / (x * x)));
    CHECK(inv.d2 == doctest::Approx(2 / (x * x * x)));
    // sin(x^2) composed by hand
    const Jet outer{std::sin(x * x), std::cos(x * x), -std::sin(x * x)};
    const Jet c = compose(outer, sq);
    CHECK(c.d1 == doctest::Approx(2 * x * std::cos(x * x)));
    CHECK(c.d2 == doctest::Approx(2 * std::cos(x * x) - 4 * x * x * std::sin(x * x)));
}

TEST_CASE("scalar functions: derivatives, antiderivative, JSON") {
    const ScalarFunction f({1.0, -2.0, 0.5}, {{0.3, 2.0, 0.4}});
    const double s = 0.9;
    CHECK(f(s) == doctest::Approx(1 - 2 * s + 0.5 * s * s + 0.3 * std::sin(2 * s + 0.4)));
    CHECK(f.derivative(s, 1) == doctest::Approx(-2 + s + 0.6 * std::cos(2 * s + 0.4)));
    CHECK(f.derivative(s, 2) == doctest::Approx(1 - 1.2 * std::sin(2 * s + 0.4)));
    CHECK(f.derivative(s, 3) == doctest::Approx(-2.4 * std::cos(2 * s + 0.4)));
    CHECK_THROWS_AS(f.derivative(s, -1), std::invalid_argument);

    const ScalarFunction F = f.antiderivative();
    CHECK(F(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    Gen g(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = g.uniform(-3, 3);
        CHECK(F.derivative(t, 1) == doctest::Approx(f(t)).epsilon(1e-13));
        const double h = 1e-4;
        CHECK((f(t + h) - f(t - h)) / (2 * h) == doctest::Approx(f.derivative(t, 1)).epsilon(1e-7));
    }

    CHECK(ScalarFunction::constant(2.0).is_constant());
    CHECK_FALSE(f.is_constant());
    CHECK(ScalarFunction({0.0}, {{0.0, 1.0, 0.0}}).is_constant());

    const nlohmann::json j = f;
    CHECK(j.get<ScalarFunction>() == f);
    CHECK(nlohmann::json(2.5).get<ScalarFunction>()(10.0) == 2.5);
    CHECK_THROWS(nlohmann::json::parse(R"({"poly":[1],"cos":[]})").get<ScalarFunction>());
    CHECK_THROWS(nlohmann::json::parse(R"({"sin":[{"amp":1,"freq":1,"shift":0}]})").get<ScalarFunction>());
    CHECK_THROWS(nlohmann::json::parse(R"("x")").get<ScalarFunction>());
}
