#pragma once

#include <functional>

namespace hflat {

/// Value together with its first and second derivative in a single variable.
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    static constexpr Jet constant(double c) { return {c, 0.0, 0.0}; }
    static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }
};

constexpr Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
constexpr Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
constexpr Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.d1, s * a.d2}; }
constexpr Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
constexpr Jet reciprocal(const Jet& a) {
    const double r = 1.0 / a.v;
    return {r, -a.d1 * r * r, (2.0 * a.d1 * a.d1 * r - a.d2) * r * r};
}
constexpr Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

/// (outer o inner) where outer's derivatives are taken at inner.v.
constexpr Jet compose(const Jet& outer, const Jet& inner) {
    return {outer.v, outer.d1 * inner.d1, outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2};
}

/// A smooth real function of one variable, evaluated together with two derivatives.
using JetFn = std::function<Jet(double)>;

}  // namespace hflat
