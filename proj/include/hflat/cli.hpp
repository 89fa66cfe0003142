#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hflat/parallel.hpp"
#include "hflat/sampler.hpp"
#include "hflat/twist_profile.hpp"

namespace hflat {

/// Every schema violation found in a configuration, one path per entry.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

struct CliOptions {
    std::optional<std::filesystem::path> out_dir;  // overrides output.dir
    bool points = false;                           // per-point detail in reports
    bool strict_paper = false;
    Execution execution = Execution::Parallel;
};

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2 };

/// A parsed "immersion" section.
struct ImmersionSetup {
    ImmersionSampler sampler;
    std::vector<std::size_t> grid;
    std::optional<TwistProfile> profile;
    std::optional<Box> profile_domain;  // x-box of the profile; the sampler works in (t, u)
};

ImmersionSetup build_immersion(const nlohmann::json& immersion);
TwistProfile profile_from_json(const nlohmann::json& j);

/// Parameter columns x1..xn, value columns L<q>_<r|i|j|k>, then d<i>_L<q>_<part>
/// for each first derivative; grid is row-major with the last axis fastest.
void write_immersion_csv(std::ostream& os, const ImmersionSampler& sampler, const std::vector<std::size_t>& grid);

// Each command returns an ExitCode; configuration and domain errors propagate as
// exceptions and are mapped to kConfigError by run_command.
int cmd_curve(const nlohmann::json& config, const CliOptions& options, std::ostream& log);
int cmd_build(const nlohmann::json& config, const CliOptions& options, std::ostream& log);
int cmd_verify(const nlohmann::json& config, const CliOptions& options, std::ostream& log);
int cmd_structeq(const nlohmann::json& config, const CliOptions& options, std::ostream& log);

/// Reads the config file, dispatches, and maps every error to an exit code.
int run_command(const std::string& command, const std::filesystem::path& config_path, const CliOptions& options,
                std::ostream& log, std::ostream& err);

}  // namespace hflat
