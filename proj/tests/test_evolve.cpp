#include "doctest.h"

#include <cmath>

#include "solistab/evolve.hpp"
#include "solistab/soliton.hpp"

using namespace solistab;

namespace {

Field soliton_field(int p, double c, const Grid& g, double center = 0.0) {
    return profile(SolitonFamily(p, c), g, center);
}

double transport_error(int p, double dt, double T) {
    Grid g{1024, 200.0};
    SolitonFamily fam(p, 1.0);
    Field u = profile(fam, g, 0.0);
    EvolveConfig cfg;
    cfg.p = p;
    cfg.dt = dt;
    cfg.t_end = T;
    cfg.sample_every = 1 << 30; // endpoints only
    Trajectory traj = evolve(u, cfg);
    Field ref = profile(fam, g, T); // speed c = 1
    double s = 0.0;
    const Field& fin = traj.states.back();
    for (std::size_t j = 0; j < g.n; ++j) s += (fin[j] - ref[j]) * (fin[j] - ref[j]);
    return std::sqrt(s * g.dx());
}

} // namespace

TEST_CASE("conserved quantities of the profile match closed forms") {
    Grid g{2048, 200.0};
    auto [m2, e2] = invariants(soliton_field(2, 1.0, g), 2);
    CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(e2 == doctest::Approx(-0.2).epsilon(1e-12));
    auto [m3, e3] = invariants(soliton_field(3, 1.0, g), 3);
    CHECK(m3 == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(e3 == doctest::Approx(-2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("soliton transport at unit speed") {
    const double err = transport_error(2, 2e-3, 1.0);
    CHECK(err < 1e-9); // measured 2.3e-11
}

TEST_CASE("step error scales like dt^4") {
    const double e_coarse = transport_error(2, 4e-3, 1.0);
    const double e_fine = transport_error(2, 2e-3, 1.0);
    const double ratio = e_coarse / e_fine;
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("invariant drift over a soliton run stays at roundoff") {
    for (int p : {2, 3}) {
        Grid g{1024, 200.0};
        EvolveConfig cfg;
        cfg.p = p;
        cfg.dt = 2e-3;
        cfg.t_end = 1.0;
        cfg.sample_every = 100;
        Trajectory traj = evolve(soliton_field(p, 1.0, g), cfg);
        const auto [m0, e0] = traj.invariants_series.front();
        // per-step roundoff plus the O(dt^2) invariant wobble of the
        // splitting both sit near 1e-10 at this resolution
        for (const auto& [m, e] : traj.invariants_series) {
            CHECK(std::abs(m - m0) < 2e-9 * std::abs(m0));
            CHECK(std::abs(e - e0) < 2e-9 * std::abs(e0));
        }
    }
}

TEST_CASE("evolution commutes with translation") {
    Grid g{1024, 200.0};
    Field u0(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        u0[j] = 0.4 * std::exp(-x * x / 4.0);
    }
    EvolveConfig cfg;
    cfg.p = 2;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.sample_every = 1 << 30;
    const double s = 0.3; // not grid-aligned
    Field a = evolve(translate(u0, s), cfg).states.back();
    Field b = translate(evolve(u0, cfg).states.back(), s);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    CHECK(worst < 1e-10);
}

TEST_CASE("sampling cadence includes both endpoints") {
    Grid g{256, 100.0};
    EvolveConfig cfg;
    cfg.p = 2;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.sample_every = 300;
    Trajectory traj = evolve(Field(g), cfg);
    REQUIRE(traj.times.size() == 5); // 0, 0.3, 0.6, 0.9, 1.0
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(traj.states.size() == traj.times.size());
    CHECK(traj.invariants_series.size() == traj.times.size());
}

TEST_CASE("amplitude guard aborts a blown-up run") {
    Grid g{256, 100.0};
    Field u(g);
    for (auto& x : u.v) x = 2e6;
    EvolveConfig cfg;
    cfg.p = 3;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(evolve(u, cfg), ComputeError);
}

TEST_CASE("config validation rejects unstable or ill-formed settings") {
    Grid fine{2048, 20.0}; // k_max ~ 322, dt k_max^3 huge
    EvolveConfig cfg;
    cfg.p = 2;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(cfg.validate(fine), ConfigError);

    Grid ok{256, 100.0};
    EvolveConfig bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(ok), ConfigError);
    bad = cfg;
    bad.t_end = -1.0;
    CHECK_THROWS_AS(bad.validate(ok), ConfigError);
    bad = cfg;
    bad.sample_every = 0;
    CHECK_THROWS_AS(bad.validate(ok), ConfigError);
    bad = cfg;
    bad.p = 5;
    CHECK_THROWS_AS(bad.validate(ok), ConfigError);
    CHECK_NOTHROW(cfg.validate(ok));
}

TEST_CASE("single step equals the first trajectory step") {
    Grid g{512, 100.0};
    Field u0 = soliton_field(2, 1.0, g);
    EvolveConfig cfg;
    cfg.p = 2;
    cfg.dt = 1e-3;
    cfg.t_end = 1e-3;
    Field one = step(u0, cfg);
    Trajectory traj = evolve(u0, cfg);
    REQUIRE(traj.states.size() >= 2);
    const Field& fin = traj.states.back();
    for (std::size_t j = 0; j < g.n; ++j) CHECK(one[j] == fin[j]);
}
