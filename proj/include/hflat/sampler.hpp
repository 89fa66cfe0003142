#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hflat/quaternion.hpp"

namespace hflat {

/// Axis-aligned parameter box [lo_0, hi_0] x ... x [lo_{n-1}, hi_{n-1}].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    /// Throws std::invalid_argument when the box is empty or the bounds differ in length.
    Box(std::vector<double> lo_, std::vector<double> hi_);

    std::size_t dimension() const { return lo.size(); }
    double extent(std::size_t k) const { return hi[k] - lo[k]; }
    bool contains(std::span<const double> x) const;
    /// Box shrunk by `margin` on every side (clamped to the centre).
    Box shrunk(double margin) const;
};

/// Value plus first and second parameter derivatives of an immersion at a point.
struct SampleJet {
    HVector value;
    std::vector<HVector> first;   // first[i] = d_i L
    std::vector<HVector> second;  // second[i * n + j] = d_i d_j L

    std::size_t dimension() const { return first.size(); }
    const HVector& d2(std::size_t i, std::size_t j) const { return second[i * first.size() + j]; }
};

/// Uniform evaluation interface for every constructed immersion L : box -> H^m.
/// Immutable after construction; safe to evaluate concurrently.
class ImmersionSampler {
public:
    using Evaluator = std::function<SampleJet(std::span<const double>)>;
    using ValueFn = std::function<HVector(std::span<const double>)>;

    ImmersionSampler(std::string kind, Box domain, std::size_t ambient, Evaluator eval, ValueFn value = {});

    /// Derivatives by central differences of `value` with step h. Second derivatives
    /// are the difference in x_i of the differenced d_j L, so d_i d_j and d_j d_i are
    /// computed independently.
    static ImmersionSampler finite_difference(std::string kind, Box domain, std::size_t ambient, ValueFn value,
                                              double h = 1e-4);

    const std::string& kind() const { return kind_; }
    const Box& domain() const { return domain_; }
    std::size_t dimension() const { return domain_.dimension(); }
    std::size_t ambient() const { return ambient_; }
    bool analytic() const { return analytic_; }

    SampleJet evaluate(std::span<const double> x) const;
    HVector value(std::span<const double> x) const;

    // Closed-form quantities a builder knows about its own output; used by verification.
    std::function<std::vector<double>(std::span<const double>)> expected_metric_diagonal;
    std::function<std::array<double, 3>(std::span<const double>)> expected_lambda;
    /// Twisting function of the first coordinate (metric g_11 = f^2).
    std::function<double(std::span<const double>)> twist;

private:
    std::string kind_;
    Box domain_;
    std::size_t ambient_;
    Evaluator eval_;
    ValueFn value_;
    bool analytic_ = true;
};

/// Max over i < j of |d_i d_j L - d_j d_i L|.
double mixed_partial_defect(const ImmersionSampler& sampler, std::span<const double> x);

/// Max over i of |central difference of L in x_i - d_i L| (relative to |d_i L|).
double first_derivative_consistency(const ImmersionSampler& sampler, std::span<const double> x, double h);

}  // namespace hflat
