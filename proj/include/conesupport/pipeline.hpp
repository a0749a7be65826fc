#pragma once

// Configuration-driven stages used by the command-line tool. Each cmd_* writes its artifacts
// into the output directory and returns a JSON summary.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "conesupport/config.hpp"
#include "conesupport/csa.hpp"
#include "conesupport/nearfield.hpp"
#include "conesupport/noise.hpp"

namespace conesupport {

/// A checked invariant failed (e.g. the two near-field masks disagree).
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationOutput {
    FarFieldMatrix clean;
    NoisyMatrix noisy;
    bool noise_skipped = false;  // zero far field: nothing to scale the noise against
};

SimulationOutput simulate(const ExperimentConfig& cfg);

/// Near-field trace of the configured Gaussian sources on the boundary points.
NearFieldTrace simulate_trace(const ExperimentConfig& cfg);

CsaParams csa_params(const ExperimentConfig& cfg);

struct TimedCsa {
    CsaResult result;
    double seconds = 0.0;
};

TimedCsa timed_csa(const FarFieldMatrix& g, const CsaParams& params);

nlohmann::json csa_report(const TimedCsa& run, const CsaParams& params);

/// Copy of g keeping only the samples of one component.
FarFieldMatrix component_matrix(const FarFieldMatrix& g, const SupportComponent& comp);

struct NearfieldOutcome {
    TimeSupportSets sets;
    SupportMask4D minus;
    std::optional<SupportMask4D> plus;
    std::size_t disagreements = 0;
    std::vector<std::size_t> silent_points;
    double tol = 0.0;
};

NearfieldOutcome nearfield_masks(const NearFieldTrace& trace, const ExperimentConfig& cfg, bool oracle);

/// "R,tau,z1,z2,z3"; throws InputError when malformed.
ConicalSet parse_cone_spec(const std::string& spec);

nlohmann::json cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out);
nlohmann::json cmd_separate(const std::filesystem::path& matrix, const ExperimentConfig& cfg,
                            const std::filesystem::path& out);
nlohmann::json cmd_csa(const std::filesystem::path& matrix, const ExperimentConfig& cfg,
                       const std::filesystem::path& out);
/// An empty trace path simulates the trace from the configuration. Throws InvariantViolation
/// (after writing the artifacts) when the oracle mask disagrees.
nlohmann::json cmd_nearfield(const std::filesystem::path& trace, const ExperimentConfig& cfg,
                             const std::filesystem::path& out, bool oracle);
nlohmann::json cmd_diagnose(const std::filesystem::path& matrix, const ConicalSet& cone, const ExperimentConfig& cfg,
                            const std::filesystem::path& out);
nlohmann::json cmd_run_all(const ExperimentConfig& cfg, const std::filesystem::path& out, bool oracle = false);

}  // namespace conesupport
