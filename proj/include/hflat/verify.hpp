#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hflat/parallel.hpp"
#include "hflat/sampler.hpp"

namespace hflat {

/// Halton sequence (bases 2, 3, 5, ...) mapped into the box, skipping the first
/// `skip` elements.
std::vector<std::vector<double>> halton_points(const Box& box, std::size_t count, std::size_t skip = 20);

std::uint64_t fnv1a(std::string_view text);
/// FNV-1a of the compact JSON dump, as 16 hex digits.
std::string spec_hash(const nlohmann::json& spec);

struct PropertyResult {
    std::string name;
    double max_defect = 0.0;  // for lower-bound properties: the minimum measured value
    double tolerance = 0.0;
    bool pass = false;
    bool lower_bound = false;    // pass iff measured > tolerance
    bool informational = false;  // reported, never gating
};

struct PointRecord {
    std::vector<double> x;
    std::map<std::string, double> defects;
};

struct VerificationReport {
    nlohmann::json spec;
    nlohmann::json grid;
    std::map<std::string, double> tolerances;
    std::vector<PropertyResult> properties;
    std::vector<PointRecord> points;
    nlohmann::json metadata = nlohmann::json::object();

    /// True when every gating property passes.
    bool all_pass() const;
    const PropertyResult* find(std::string_view name) const;
    /// Keys are sorted; no timestamp.
    nlohmann::json to_json(bool include_points) const;
};

/// Folds per-point records into one PropertyResult per name: max for ordinary
/// properties, min for lower bounds.
void aggregate(VerificationReport& report, const std::vector<std::string>& names,
               const std::vector<std::string>& lower_bounds = {}, const std::vector<std::string>& informational = {});

struct VerifyOptions {
    std::vector<std::string> properties;      // empty: defaults for the sampler kind
    std::map<std::string, double> tolerances; // overrides
    std::size_t points = 100;
    std::size_t skip = 20;
    double fd_step = 1e-4;
    double codazzi_step = 1e-2;
    Execution execution = Execution::Parallel;
};

const std::vector<std::string>& known_properties();
std::vector<std::string> default_properties(const std::string& kind);
double default_tolerance(const std::string& property);

/// Defects of the selected properties at one point.
std::map<std::string, double> point_defects(const ImmersionSampler& sampler, const std::vector<double>& x,
                                            const std::vector<std::string>& properties, const VerifyOptions& options);

/// Runs the property checks on a Halton sample of the domain shrunk by the stencil
/// margin. `spec` is the configuration that produced the sampler (hashed into the
/// report). Throws std::invalid_argument for unknown properties.
VerificationReport verify_immersion(const ImmersionSampler& sampler, const VerifyOptions& options,
                                    const nlohmann::json& spec = nlohmann::json::object());

}  // namespace hflat
