#include "hflat/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hflat/errors.hpp"

namespace hflat {

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: lower and upper bounds differ in length");
    if (lo.empty()) throw std::invalid_argument("Box: zero-dimensional box");
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (!(lo[k] < hi[k])) {
            std::ostringstream msg;
            msg << "Box: empty interval on axis " << k << " [" << lo[k] << ", " << hi[k] << "]";
            throw std::invalid_argument(msg.str());
        }
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != lo.size()) return false;
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
}

Box Box::shrunk(double margin) const {
    Box b = *this;
    for (std::size_t k = 0; k < lo.size(); ++k) {
        const double m = std::min(margin, 0.25 * extent(k));
        b.lo[k] += m;
        b.hi[k] -= m;
    }
    return b;
}

ImmersionSampler::ImmersionSampler(std::string kind, Box domain, std::size_t ambient, Evaluator eval, ValueFn value)
    : kind_(std::move(kind)), domain_(std::move(domain)), ambient_(ambient), eval_(std::move(eval)),
      value_(std::move(value)) {}

ImmersionSampler ImmersionSampler::finite_difference(std::string kind, Box domain, std::size_t ambient,
                                                     ValueFn value, double h) {
    const std::size_t n = domain.dimension();
    auto first_at = [value, h](std::span<const double> x, std::size_t i) {
        std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[i] += h;
        xm[i] -= h;
        return (value(xp) - value(xm)) * (0.5 / h);
    };
    auto eval = [value, first_at, n, h](std::span<const double> x) {
        SampleJet jet;
        jet.value = value(x);
        for (std::size_t i = 0; i < n; ++i) jet.first.push_back(first_at(x, i));
        jet.second.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
                xp[i] += h;
                xm[i] -= h;
                jet.second[i * n + j] = (first_at(xp, j) - first_at(xm, j)) * (0.5 / h);
            }
        return jet;
    };
    ImmersionSampler s(std::move(kind), std::move(domain), ambient, eval, value);
    s.analytic_ = false;
    return s;
}

static void check_point(const Box& box, std::span<const double> x) {
    if (x.size() != box.dimension())
        throw std::invalid_argument("ImmersionSampler: point has " + std::to_string(x.size()) +
                                    " coordinates, expected " + std::to_string(box.dimension()));
}

SampleJet ImmersionSampler::evaluate(std::span<const double> x) const {
    check_point(domain_, x);
    SampleJet jet = eval_(x);
    for (const auto& v : jet.first)
        for (double c : v.flat())
            if (!std::isfinite(c)) throw DomainError("ImmersionSampler: non-finite derivative");
    return jet;
}

HVector ImmersionSampler::value(std::span<const double> x) const {
    check_point(domain_, x);
    return value_ ? value_(x) : eval_(x).value;
}

double mixed_partial_defect(const ImmersionSampler& sampler, std::span<const double> x) {
    const SampleJet jet = sampler.evaluate(x);
    const std::size_t n = jet.dimension();
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dev = std::max(dev, (jet.d2(i, j) - jet.d2(j, i)).norm());
    return dev;
}

double first_derivative_consistency(const ImmersionSampler& sampler, std::span<const double> x, double h) {
    const SampleJet jet = sampler.evaluate(x);
    double dev = 0.0;
    for (std::size_t i = 0; i < jet.dimension(); ++i) {
        std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[i] += h;
        xm[i] -= h;
        const HVector fd = (sampler.value(xp) - sampler.value(xm)) * (0.5 / h);
        const double scale = std::max(1.0, jet.first[i].norm());
        dev = std::max(dev, (fd - jet.first[i]).norm() / scale);
    }
    return dev;
}

}  // namespace hflat
