#pragma once

// Experiment configuration (JSON). Every field has a default; unknown keys and bad values are
// rejected with a ConfigError naming the offending field path, e.g. "sources[1].rate".

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conesupport/io.hpp"
#include "conesupport/nearfield.hpp"
#include "conesupport/wavefield.hpp"

namespace conesupport {

class ConfigError : public InputError {
public:
    ConfigError(const std::string& path, const std::string& message)
        : InputError(path + ": " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Boundary points: either a Fibonacci sphere {center, radius, count} or an explicit list.
struct BoundarySpec {
    bool use_sphere = true;
    Vec3 center{0.0, 0.0, 0.0};
    double radius = 3.0;
    int count = 26;
    std::vector<Vec3> points;

    std::vector<Vec3> resolve() const;
};

struct NearfieldConfig {
    BoundarySpec boundary;
    TimeGrid trace_times{400, -4.0, 12.0};
    SupportGrid mask_grid{TimeGrid{64, -4.0, 4.0}, {-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}, {9, 9, 9}};
    /// Negative selects 0.6 * mask time step.
    double tol = -1.0;
};

struct DiagnosticsConfig {
    int ell_max = 4;
    /// Unset selects 1e-3 for clean data and 5e-2 when noise is injected.
    std::optional<double> rel_tol;
};

struct ExperimentConfig {
    double c0 = 1.0;
    TimeGrid times;
    int n_lat = 20;
    int n_lon = 22;
    std::vector<Source> sources;
    NoiseSpec noise;
    std::size_t n_lead = 20;
    double factor = 1.2;
    double max_gap = 0.08;
    std::size_t min_component = 3;
    int denominator = 34;
    int max_multiple = 51;
    bool strict_width = false;
    std::optional<NearfieldConfig> nearfield;
    std::optional<DiagnosticsConfig> diagnostics;
    std::string output_dir = "out";

    double tolerance_for_diagnostics() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json serialize_config(const ExperimentConfig& cfg);

/// Cross-field checks (mesh sizes, grid, source parameters); throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

}  // namespace conesupport
