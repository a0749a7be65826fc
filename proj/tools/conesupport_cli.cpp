// conesupport: simulate far fields, separate components, estimate support cones,
// build near-field support masks and check range conditions.
//
// Exit codes: 0 success, 1 input error, 2 invariant violation.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "conesupport/config.hpp"
#include "conesupport/pipeline.hpp"

namespace cs = conesupport;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool oracle = false;
    bool strict_width = false;
    std::string matrix;
    std::string trace;
    std::string cone;
};

cs::ExperimentConfig load(const Options& o) {
    cs::ExperimentConfig cfg = o.config.empty() ? cs::ExperimentConfig{} : cs::load_config(o.config);
    if (o.seed) cfg.noise.seed = *o.seed;
    if (o.strict_width) cfg.strict_width = true;
    if (!o.out.empty()) cfg.output_dir = o.out;
    return cfg;
}

void print(const nlohmann::json& j) {
    if (j.contains("warnings"))
        for (const auto& w : j["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conical support bounds for radiating acoustic sources"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "experiment configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "noise seed (overrides the configuration)");
        sub->add_option("--out", o.out, "output directory (overrides the configuration)");
        sub->add_flag("--strict-width", o.strict_width, "compare half widths in the shift search");
        sub->add_flag("--oracle", o.oracle, "cross-check the backward-cone mask by forward cones");
    };

    auto* simulate = app.add_subcommand("simulate", "write clean and noisy far-field matrices");
    common(simulate);
    auto* separate = app.add_subcommand("separate", "split a far-field matrix into support components");
    common(separate);
    separate->add_option("--matrix", o.matrix, "far-field matrix CSV")->required();
    auto* csa = app.add_subcommand("csa", "estimate support cones for a far-field matrix");
    common(csa);
    csa->add_option("--matrix", o.matrix, "far-field matrix CSV")->required();
    auto* nearfield = app.add_subcommand("nearfield", "support masks from near-field traces");
    common(nearfield);
    nearfield->add_option("--trace", o.trace, "near-field trace CSV (simulated from the configuration if omitted)");
    auto* diagnose = app.add_subcommand("diagnose", "check range conditions for a candidate cone");
    common(diagnose);
    diagnose->add_option("--matrix", o.matrix, "far-field matrix CSV")->required();
    diagnose->add_option("--cone", o.cone, "candidate cone as R,tau,z1,z2,z3")->required();
    auto* run_all = app.add_subcommand("run-all", "simulate, estimate cones and diagnose");
    common(run_all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto cfg = load(o);
        const std::filesystem::path out = cfg.output_dir;
        if (simulate->parsed()) print(cs::cmd_simulate(cfg, out));
        else if (separate->parsed()) print(cs::cmd_separate(o.matrix, cfg, out));
        else if (csa->parsed()) print(cs::cmd_csa(o.matrix, cfg, out));
        else if (nearfield->parsed()) print(cs::cmd_nearfield(o.trace, cfg, out, o.oracle));
        else if (diagnose->parsed()) print(cs::cmd_diagnose(o.matrix, cs::parse_cone_spec(o.cone), cfg, out));
        else if (run_all->parsed()) print(cs::cmd_run_all(cfg, out, o.oracle));
    } catch (const cs::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
