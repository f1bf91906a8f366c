#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "solistab/diagnostics.hpp"
#include "solistab/grid.hpp"

namespace solistab {

struct GridSpec {
    std::size_t n = 2048;
    double L = 200.0;
};

struct EvolveSpec {
    double dt = 1e-3;
    double t_end = 1.0;
    std::size_t sample_every = 1;
};

enum class PerturbationKind { Gaussian, ProfileBump, File };

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::Gaussian;
    double amplitude = 0.0;
    double width = 4.0;
    double offset = 0.0;
    std::string path; // snapshot file for kind == File
};

struct CollocationSpec {
    double R = 40.0;
    std::size_t m = 800;
};

// Declarative experiment description; JSON round-trip, flags override fields.
struct ExperimentConfig {
    std::string kind = "soliton-check"; // soliton-check, spectrum, semigroup,
                                        // smoothing, resolvent-sweep, evolve,
                                        // stability, sweep, inequality-suite
    int p = 2;
    double c0 = 1.0;
    double a = 0.5;
    GridSpec grid;
    EvolveSpec evolve;
    PerturbationSpec perturbation;
    CollocationSpec collocation;
    double sigma = 0.5;             // tail-region speed
    std::uint64_t seed = 20260825;
    std::string out_dir = "out";
    std::vector<double> amplitudes; // sweep members
    int suite_fields = 100;         // per family in the inequality suites
    int jobs = 1;                   // sweep worker pool size
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// Tuned defaults for each subcommand when no config file is given.
ExperimentConfig default_config(const std::string& kind);

// Pure validation: every violated invariant, one message each.
std::vector<std::string> validate(const ExperimentConfig& cfg);

struct RunRecord {
    ExperimentConfig config;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::string> artifacts;
    std::vector<std::pair<std::string, double>> summary; // ordered scalars
    std::vector<SuiteResult> checks;
    bool checks_passed = true;
};

// Executes the scenario, writes the CSV/JSON artifacts under cfg.out_dir,
// and returns the record.  Invalid configs raise ConfigError; numeric
// failures propagate ComputeError with the failing stage in the message.
RunRecord run(const ExperimentConfig& cfg);

// Fast self-check battery (soliton exactness, kernel algebra, transport,
// fit round-trip, cutoff bounds, reduced inequality suites); each item is
// scaled so worst_ratio <= 1 means pass.
std::vector<SuiteResult> quick_checks(std::uint64_t seed);

} // namespace solistab
