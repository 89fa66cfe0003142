#pragma once

#include <vector>

#include <json.hpp>

#include "hflat/jet.hpp"

namespace hflat {

/// amplitude * sin(frequency * s + phase)
struct SinusoidTerm {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;

    friend bool operator==(const SinusoidTerm&, const SinusoidTerm&) = default;
};

/// Polynomial plus a finite sum of sinusoids. Every derivative and the
/// antiderivative are available in closed form.
class ScalarFunction {
public:
    ScalarFunction() = default;
    ScalarFunction(std::vector<double> poly, std::vector<SinusoidTerm> sines = {});

    static ScalarFunction constant(double c) { return ScalarFunction({c}); }
    static ScalarFunction sinusoid(double amplitude, double frequency, double phase = 0.0) {
        return ScalarFunction({}, {{amplitude, frequency, phase}});
    }

    double operator()(double s) const { return derivative(s, 0); }
    /// order-th derivative at s (order 0 is the value).
    double derivative(double s, int order) const;
    Jet jet(double s) const { return {derivative(s, 0), derivative(s, 1), derivative(s, 2)}; }
    JetFn as_jet_fn() const;

    /// F with F' = *this and F(0) = 0.
    ScalarFunction antiderivative() const;

    bool is_constant() const;

    const std::vector<double>& poly() const { return poly_; }
    const std::vector<SinusoidTerm>& sines() const { return sines_; }

    friend bool operator==(const ScalarFunction&, const ScalarFunction&) = default;

private:
    std::vector<double> poly_;
    std::vector<SinusoidTerm> sines_;
};

ScalarFunction operator+(const ScalarFunction& a, const ScalarFunction& b);
ScalarFunction operator*(double s, const ScalarFunction& f);

// JSON: a bare number is a constant; otherwise {"poly": [c0, c1, ...],
// "sin": [{"amp": A, "freq": w, "phase": p}, ...]}.
void to_json(nlohmann::json& j, const ScalarFunction& f);
void from_json(const nlohmann::json& j, ScalarFunction& f);

}  // namespace hflat
