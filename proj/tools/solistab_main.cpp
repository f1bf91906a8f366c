#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "solistab/errors.hpp"
#include "solistab/experiment.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool seed_set = false;
};

void attach_common(CLI::App* sc, CliOptions& opt) {
    sc->add_option("--config", opt.config_path, "experiment config (JSON)")
        ->check(CLI::ExistingFile);
    sc->add_option("--out", opt.out_dir, "output directory");
    sc->add_option("--seed", opt.seed, "random seed")->each([&](const std::string&) {
        opt.seed_set = true;
    });
    sc->add_option("--jobs", opt.jobs, "sweep worker count");
}

int run_kind(const std::string& kind, const CliOptions& opt) {
    solistab::ExperimentConfig cfg = opt.config_path.empty()
                                         ? solistab::default_config(kind)
                                         : solistab::load_config(opt.config_path);
    cfg.kind = kind; // the subcommand wins over the file
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.seed_set) cfg.seed = opt.seed;
    if (opt.jobs > 0) cfg.jobs = opt.jobs;

    const auto viol = solistab::validate(cfg);
    if (!viol.empty()) {
        for (const auto& v : viol) std::fprintf(stderr, "config error: %s\n", v.c_str());
        return 2;
    }
    const solistab::RunRecord rec = solistab::run(cfg);
    for (const auto& [k, v] : rec.summary) std::printf("%-28s %.17g\n", k.c_str(), v);
    for (const auto& c : rec.checks)
        std::printf("[%s] %s (worst ratio %.3g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.worst_ratio);
    std::printf("artifacts under %s\n", cfg.out_dir.c_str());
    return 0;
}

int run_check(const CliOptions& opt) {
    const std::uint64_t seed = opt.seed_set ? opt.seed : 20260825ull;
    const auto checks = solistab::quick_checks(seed);
    bool all = true;
    for (const auto& c : checks) {
        std::printf("[%s] %s (worst ratio %.3g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.worst_ratio);
        all = all && c.passed;
    }
    return all ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    int threads = 1;
    if (const char* env = std::getenv("SOLISTAB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) threads = t;
    }
    Eigen::setNbThreads(threads);

    CLI::App app{"solitary-wave stability laboratory for generalized KdV"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* kind;
        const char* desc;
    };
    const Sub subs[] = {
        {"soliton", "soliton-check", "profile exactness and kernel algebra"},
        {"spectrum", "spectrum", "weighted-operator eigenvalues"},
        {"semigroup", "semigroup", "projected semigroup decay rate"},
        {"smoothing", "smoothing", "short-time smoothing exponents"},
        {"resolvent", "resolvent-sweep", "resolvent norm along a horizontal line"},
        {"evolve", "evolve", "time integration with conserved-quantity ledger"},
        {"stability", "stability", "perturbed-soliton tracking run"},
        {"sweep", "sweep", "amplitude sweep with scaling-law fits"},
        {"inequalities", "inequality-suite", "randomized inequality suites"},
    };

    CliOptions opts[10];
    std::string selected;
    int idx = 0;
    for (const Sub& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.desc);
        attach_common(sc, opts[idx]);
        const std::string kind = s.kind;
        const int my = idx;
        sc->callback([&selected, kind, my, &opts] {
            (void)opts[my];
            selected = kind;
        });
        ++idx;
    }
    CLI::App* check_sc = app.add_subcommand("check", "fast self-check battery (exit 4 on failure)");
    attach_common(check_sc, opts[9]);
    check_sc->callback([&selected] { selected = "check"; });

    CLI11_PARSE(app, argc, argv);

    const CliOptions* opt = &opts[9];
    for (int i = 0; i < 9; ++i)
        if (selected == subs[i].kind) opt = &opts[i];

    try {
        if (selected == "check") return run_check(*opt);
        return run_kind(selected, *opt);
    } catch (const solistab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const solistab::ComputeError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
