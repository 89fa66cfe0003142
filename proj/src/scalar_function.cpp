#include "hflat/scalar_function.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace hflat {

ScalarFunction::ScalarFunction(std::vector<double> poly, std::vector<SinusoidTerm> sines)
    : poly_(std::move(poly)), sines_(std::move(sines)) {}

double ScalarFunction::derivative(double s, int order) const {
    if (order < 0) throw std::invalid_argument("ScalarFunction::derivative: negative order");
    // Horner on the differentiated coefficients.
    double acc = 0.0;
    const int degree = static_cast<int>(poly_.size()) - 1;
    for (int p = degree; p >= order; --p) {
        double c = poly_[static_cast<std::size_t>(p)];
        for (int m = 0; m < order; ++m) c *= static_cast<double>(p - m);
        acc = acc * s + c;
    }
    for (const auto& t : sines_) {
        const double scale = std::pow(t.frequency, order);
        acc += t.amplitude * scale * std::sin(t.frequency * s + t.phase + order * std::numbers::pi / 2.0);
    }
    return acc;
}

JetFn ScalarFunction::as_jet_fn() const {
    return [f = *this](double s) { return f.jet(s); };
}

ScalarFunction ScalarFunction::antiderivative() const {
    std::vector<double> poly(poly_.size() + 1, 0.0);
    for (std::size_t p = 0; p < poly_.size(); ++p) poly[p + 1] = poly_[p] / static_cast<double>(p + 1);
    std::vector<SinusoidTerm> sines;
    for (const auto& t : sines_) {
        if (t.frequency == 0.0) {
            if (poly.size() < 2) poly.resize(2, 0.0);
            poly[1] += t.amplitude * std::sin(t.phase);
        } else {
            // -cos(x) = sin(x - pi/2)
            SinusoidTerm anti{t.amplitude / t.frequency, t.frequency, t.phase - std::numbers::pi / 2.0};
            poly[0] -= anti.amplitude * std::sin(anti.phase);
            sines.push_back(anti);
        }
    }
    return ScalarFunction(std::move(poly), std::move(sines));
}

bool ScalarFunction::is_constant() const {
    for (std::size_t p = 1; p < poly_.size(); ++p)
        if (poly_[p] != 0.0) return false;
    for (const auto& t : sines_)
        if (t.amplitude != 0.0 && t.frequency != 0.0) return false;
    return true;
}

ScalarFunction operator+(const ScalarFunction& a, const ScalarFunction& b) {
    std::vector<double> poly(std::max(a.poly().size(), b.poly().size()), 0.0);
    for (std::size_t p = 0; p < a.poly().size(); ++p) poly[p] += a.poly()[p];
    for (std::size_t p = 0; p < b.poly().size(); ++p) poly[p] += b.poly()[p];
    auto sines = a.sines();
    sines.insert(sines.end(), b.sines().begin(), b.sines().end());
    return ScalarFunction(std::move(poly), std::move(sines));
}

ScalarFunction operator*(double s, const ScalarFunction& f) {
    auto poly = f.poly();
    for (auto& c : poly) c *= s;
    auto sines = f.sines();
    for (auto& t : sines) t.amplitude *= s;
    return ScalarFunction(std::move(poly), std::move(sines));
}

void to_json(nlohmann::json& j, const ScalarFunction& f) {
    j = nlohmann::json::object();
    j["poly"] = f.poly();
    auto sines = nlohmann::json::array();
    for (const auto& t : f.sines())
        sines.push_back({{"amp", t.amplitude}, {"freq", t.frequency}, {"phase", t.phase}});
    j["sin"] = std::move(sines);
}

void from_json(const nlohmann::json& j, ScalarFunction& f) {
    if (j.is_number()) {
        f = ScalarFunction::constant(j.get<double>());
        return;
    }
    if (!j.is_object()) throw std::invalid_argument("scalar function must be a number or an object");
    std::vector<double> poly;
    std::vector<SinusoidTerm> sines;
    for (const auto& [key, value] : j.items()) {
        if (key == "poly") {
            poly = value.get<std::vector<double>>();
        } else if (key == "sin") {
            for (const auto& t : value) {
                SinusoidTerm term;
                for (const auto& [tk, tv] : t.items()) {
                    if (tk == "amp") term.amplitude = tv.get<double>();
                    else if (tk == "freq") term.frequency = tv.get<double>();
                    else if (tk == "phase") term.phase = tv.get<double>();
                    else throw std::invalid_argument("unknown sinusoid key '" + tk + "'");
                }
                sines.push_back(term);
            }
        } else {
            throw std::invalid_argument("unknown scalar function key '" + key + "'");
        }
    }
    f = ScalarFunction(std::move(poly), std::move(sines));
}

}  // namespace hflat
