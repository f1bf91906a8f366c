#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "solistab/errors.hpp"
#include "solistab/experiment.hpp"
#include "solistab/grid.hpp"
#include "solistab/io.hpp"
#include "solistab/rng.hpp"

namespace fs = std::filesystem;
using namespace solistab;

namespace {

std::string fresh_dir(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / "solistab-tests" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
    for (const auto& m : msgs)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("config json round trip preserves every field") {
    ExperimentConfig c;
    c.kind = "sweep";
    c.p = 3;
    c.c0 = 1.3;
    c.a = 0.45;
    c.grid = {4096, 600.0};
    c.evolve = {5e-3, 40.0, 160};
    c.perturbation.kind = PerturbationKind::ProfileBump;
    c.perturbation.amplitude = 2e-2;
    c.perturbation.width = 3.5;
    c.perturbation.offset = -4.0;
    c.perturbation.path = "snap.bin";
    c.collocation = {50.0, 1000};
    c.sigma = 0.6;
    c.seed = 99;
    c.out_dir = "elsewhere";
    c.amplitudes = {1e-2, 5e-3};
    c.suite_fields = 17;
    c.jobs = 3;

    ExperimentConfig r = config_from_json(config_to_json(c));
    CHECK(r.kind == c.kind);
    CHECK(r.p == c.p);
    CHECK(r.c0 == c.c0);
    CHECK(r.a == c.a);
    CHECK(r.grid.n == c.grid.n);
    CHECK(r.grid.L == c.grid.L);
    CHECK(r.evolve.dt == c.evolve.dt);
    CHECK(r.evolve.t_end == c.evolve.t_end);
    CHECK(r.evolve.sample_every == c.evolve.sample_every);
    CHECK(r.perturbation.kind == c.perturbation.kind);
    CHECK(r.perturbation.amplitude == c.perturbation.amplitude);
    CHECK(r.perturbation.width == c.perturbation.width);
    CHECK(r.perturbation.offset == c.perturbation.offset);
    CHECK(r.perturbation.path == c.perturbation.path);
    CHECK(r.collocation.R == c.collocation.R);
    CHECK(r.collocation.m == c.collocation.m);
    CHECK(r.sigma == c.sigma);
    CHECK(r.seed == c.seed);
    CHECK(r.out_dir == c.out_dir);
    CHECK(r.amplitudes == c.amplitudes);
    CHECK(r.suite_fields == c.suite_fields);
    CHECK(r.jobs == c.jobs);
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(config_from_json("{ not json"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"perturbation":{"type":"box"}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"p":"two"})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg.json"), ConfigError);
}

TEST_CASE("every tuned default validates cleanly") {
    for (const char* kind : {"soliton-check", "spectrum", "semigroup", "smoothing",
                             "resolvent-sweep", "evolve", "stability", "sweep",
                             "inequality-suite"}) {
        const auto msgs = validate(default_config(kind));
        CHECK_MESSAGE(msgs.empty(), kind);
    }
}

TEST_CASE("validation reports each violated invariant") {
    ExperimentConfig c = default_config("evolve");
    c.kind = "warp";
    CHECK(mentions(validate(c), "unknown experiment kind"));

    ExperimentConfig bad = default_config("evolve");
    bad.p = 5;
    bad.a = 1.0;  // = sqrt(c0)
    bad.grid.n = 1000;
    bad.evolve.dt = 0.0;
    bad.evolve.sample_every = 0;
    bad.jobs = 0;
    bad.suite_fields = 0;
    const auto msgs = validate(bad);
    CHECK(mentions(msgs, "p must be 2 or 3"));
    CHECK(mentions(msgs, "0 < a < sqrt(c0)"));
    CHECK(mentions(msgs, "power of two"));
    CHECK(mentions(msgs, "dt must be positive"));
    CHECK(mentions(msgs, "sample_every"));
    CHECK(mentions(msgs, "jobs"));
    CHECK(mentions(msgs, "suite_fields"));

    ExperimentConfig disp = default_config("evolve");
    disp.evolve.dt = 1.0;
    CHECK(mentions(validate(disp), "dispersion guard"));
    // the guard only applies to time-stepping scenarios
    disp.kind = "spectrum";
    CHECK(validate(disp).empty());

    ExperimentConfig sig = default_config("evolve");
    sig.sigma = 2.0;  // >= c0
    CHECK(mentions(validate(sig), "tail speed sigma"));

    ExperimentConfig sw = default_config("sweep");
    sw.amplitudes.clear();
    CHECK(mentions(validate(sw), "nonempty amplitude list"));
    sw.amplitudes = {-1.0};
    CHECK(mentions(validate(sw), "amplitudes must be positive"));

    ExperimentConfig sp = default_config("spectrum");
    sp.collocation.m = 200;
    sp.collocation.R = 20.0;
    const auto spm = validate(sp);
    CHECK(mentions(spm, "at least 400"));
    CHECK(mentions(spm, "30/sqrt(c0)"));

    ExperimentConfig fp = default_config("evolve");
    fp.perturbation.kind = PerturbationKind::File;
    fp.perturbation.path = "/no/such.snap";
    CHECK(mentions(validate(fp), "does not exist"));
}

TEST_CASE("snapshot io round-trips exactly") {
    const std::string dir = fresh_dir("snapshots");
    Grid g{256, 50.0};
    Field f(g);
    Rng rng(4321);
    for (auto& v : f.v) v = rng.normal();

    const std::string path = dir + "/state.snap";
    write_snapshot(path, f, 1.375);
    double t = 0.0;
    Field r = read_snapshot(path, &t);
    CHECK(t == 1.375);
    CHECK(r.grid == g);
    bool same = true;
    for (std::size_t j = 0; j < g.n; ++j) same = same && r[j] == f[j];
    CHECK(same);

    CHECK_THROWS_AS(read_snapshot(dir + "/missing.snap", nullptr), ConfigError);
}

TEST_CASE("csv writer emits full-precision columns") {
    const std::string dir = fresh_dir("csv");
    const std::string path = dir + "/table.csv";
    const double a = 1.0 / 3.0, b = 0.1 + 0.2;
    write_csv(path, {"t", "value"}, {{0.125, a}, {2.0, b}});

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "t,value");
    REQUIRE(std::getline(in, line));
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(0, comma)) == 0.125);
    CHECK(std::stod(line.substr(comma + 1)) == a);  // 17 digits survive the trip
    REQUIRE(std::getline(in, line));
    CHECK(std::stod(line.substr(line.find(',') + 1)) == b);
}

TEST_CASE("evolve scenario writes its artifacts and summary") {
    ExperimentConfig c = default_config("evolve");
    c.grid = {1024, 200.0};
    c.evolve = {2e-3, 0.5, 125};
    c.perturbation.amplitude = 1e-3;
    c.out_dir = fresh_dir("evolve-run");

    RunRecord rec = run(c);
    CHECK(rec.wall_seconds > 0.0);
    CHECK(!rec.summary.empty());
    CHECK(fs::exists(fs::path(c.out_dir) / "invariants.csv"));
    CHECK(fs::exists(fs::path(c.out_dir) / "summary.json"));
    for (const auto& a : rec.artifacts) CHECK(fs::exists(a));

    c.evolve.dt = 0.0;
    CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("stability runs are bit-for-bit reproducible") {
    ExperimentConfig c = default_config("stability");
    c.grid = {2048, 600.0};
    c.evolve = {5e-3, 2.0, 100};
    c.perturbation.amplitude = 1e-3;

    c.out_dir = fresh_dir("stab-a");
    RunRecord r1 = run(c);
    const std::string track1 = slurp(c.out_dir + "/track.csv");
    c.out_dir = fresh_dir("stab-b");
    RunRecord r2 = run(c);
    const std::string track2 = slurp(c.out_dir + "/track.csv");
    CHECK(track1 == track2);

    REQUIRE(r1.summary.size() == r2.summary.size());
    for (std::size_t i = 0; i < r1.summary.size(); ++i) {
        CHECK(r1.summary[i].first == r2.summary[i].first);
        CHECK(r1.summary[i].second == r2.summary[i].second);
    }
}

TEST_CASE("file perturbations load from snapshots and check the grid") {
    const std::string dir = fresh_dir("filepert");
    Grid g{1024, 200.0};
    Field v0(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        v0[j] = 1e-3 * std::exp(-x * x / 16.0);
    }
    const std::string snap = dir + "/v0.snap";
    write_snapshot(snap, v0, 0.0);

    ExperimentConfig c = default_config("evolve");
    c.grid = {1024, 200.0};
    c.evolve = {2e-3, 0.1, 50};
    c.perturbation.kind = PerturbationKind::File;
    c.perturbation.path = snap;
    c.out_dir = dir + "/out";
    RunRecord rec = run(c);
    CHECK(rec.checks_passed);

    Grid g2{512, 200.0};
    write_snapshot(dir + "/bad.snap", Field(g2), 0.0);
    c.perturbation.path = dir + "/bad.snap";
    CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("quick self-checks pass on the default seed") {
    const auto checks = quick_checks(20260825ULL);
    CHECK(checks.size() == 7);
    for (const auto& c : checks) {
        CHECK_MESSAGE(c.passed, c.name);
        CHECK(c.worst_ratio <= 1.0);
    }
}
