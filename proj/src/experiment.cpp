#include "solistab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <numbers>
#include <thread>

#include "json.hpp"
#include "solistab/errors.hpp"
#include "solistab/evolve.hpp"
#include "solistab/io.hpp"
#include "solistab/linop.hpp"
#include "solistab/modulation.hpp"
#include "solistab/rng.hpp"
#include "solistab/soliton.hpp"

namespace solistab {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "solistab 1.0.0";

const std::vector<std::string>& known_kinds() {
    static const std::vector<std::string> kinds = {
        "soliton-check", "spectrum",  "semigroup", "smoothing", "resolvent-sweep",
        "evolve",        "stability", "sweep",     "inequality-suite"};
    return kinds;
}

std::string pert_kind_name(PerturbationKind k) {
    switch (k) {
        case PerturbationKind::Gaussian: return "gaussian";
        case PerturbationKind::ProfileBump: return "profile-bump";
        case PerturbationKind::File: return "file";
    }
    return "gaussian";
}

PerturbationKind pert_kind_from(const std::string& s) {
    if (s == "gaussian") return PerturbationKind::Gaussian;
    if (s == "profile-bump") return PerturbationKind::ProfileBump;
    if (s == "file") return PerturbationKind::File;
    throw ConfigError("unknown perturbation type: " + s);
}

double fold(double x, double L) { return x - L * std::floor(x / L + 0.5); }

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

Field make_perturbation(const Grid& g, const ExperimentConfig& cfg) {
    Field v0{g, std::vector<double>(g.n, 0.0)};
    switch (cfg.perturbation.kind) {
        case PerturbationKind::Gaussian: {
            const double w = cfg.perturbation.width;
            for (std::size_t j = 0; j < g.n; ++j) {
                const double e = (g.node(j) - cfg.perturbation.offset) / w;
                v0.v[j] = cfg.perturbation.amplitude * std::exp(-e * e);
            }
            break;
        }
        case PerturbationKind::ProfileBump: {
            const SolitonFamily fam(cfg.p, cfg.c0);
            for (std::size_t j = 0; j < g.n; ++j)
                v0.v[j] = cfg.perturbation.amplitude *
                          fam.profile_at(g.node(j) - cfg.perturbation.offset);
            break;
        }
        case PerturbationKind::File: {
            double t0 = 0.0;
            Field f = read_snapshot(cfg.perturbation.path, &t0);
            if (f.grid.n != g.n || f.grid.L != g.L)
                throw ConfigError("perturbation snapshot grid does not match the config grid");
            v0 = f;
            break;
        }
    }
    return v0;
}

void push(std::vector<std::pair<std::string, double>>& s, const std::string& k, double v) {
    s.emplace_back(k, v);
}

// worst_ratio convention: <= 1 passes; for a band [lo, hi] the ratio is the
// scaled distance from the band center.
SuiteResult band_check(const std::string& name, double value, double lo, double hi,
                       std::uint64_t seed) {
    SuiteResult r;
    r.name = name;
    r.seed = seed;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    r.worst_ratio = std::abs(value - mid) / half;
    r.passed = std::isfinite(value) && value >= lo && value <= hi;
    return r;
}

SuiteResult bound_check(const std::string& name, double value, double bound,
                        std::uint64_t seed) {
    SuiteResult r;
    r.name = name;
    r.seed = seed;
    r.worst_ratio = bound > 0.0 ? value / bound : (value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.passed = std::isfinite(value) && r.worst_ratio <= 1.0;
    return r;
}

void write_summary_json(const ExperimentConfig& cfg, const RunRecord& rec) {
    ordered_json j;
    j["version"] = rec.version;
    j["kind"] = cfg.kind;
    j["config"] = ordered_json::parse(config_to_json(cfg));
    j["wall_seconds"] = rec.wall_seconds;
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : rec.summary) s[k] = v;
    j["summary"] = s;
    j["artifacts"] = rec.artifacts;
    write_text_file(join_path(cfg.out_dir, "summary.json"), j.dump(2) + "\n");
}

void write_checks_json(const std::string& out_dir, const std::vector<SuiteResult>& checks) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
        ordered_json item;
        item["name"] = c.name;
        item["passed"] = c.passed;
        item["worst_ratio"] = c.worst_ratio;
        item["seed"] = c.seed;
        arr.push_back(item);
    }
    write_text_file(join_path(out_dir, "checks.json"), arr.dump(2) + "\n");
}

double interp_at(const std::vector<double>& ts, const std::vector<double>& xs, double t) {
    if (ts.empty()) throw ComputeError("empty sample series");
    if (t <= ts.front()) return xs.front();
    if (t >= ts.back()) return xs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return xs[i - 1] + w * (xs[i] - xs[i - 1]);
}

std::pair<double, double> ls_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-300) throw ComputeError("degenerate regression abscissae");
    const double slope = (n * sxy - sx * sy) / den;
    return {slope, (sy - slope * sx) / n};
}

// ---------------------------------------------------------------- kinds ---

void run_soliton_check(const ExperimentConfig& cfg, RunRecord& rec) {
    const Grid g{cfg.grid.n, cfg.grid.L};
    const SolitonFamily fam(cfg.p, cfg.c0);
    const double res = ode_residual(fam, g);

    const KernelBasis kb = kernel_basis(fam, g);
    const double h = g.dx();
    double biorth = 0.0;
    const Field* xis[2] = {&kb.xi1, &kb.xi2};
    const Field* zetas[2] = {&kb.zeta1, &kb.zeta2};
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj) {
            double acc = 0.0;
            for (std::size_t q = 0; q < g.n; ++q) acc += xis[i]->v[q] * zetas[jj]->v[q];
            biorth = std::max(biorth, std::abs(h * acc - (i == jj ? 1.0 : 0.0)));
        }
    const KernelCheck kc = check_generalized_kernel(
        fam, kb, [&](const Field& v) { return apply_linearized(fam, v, kb.center); });

    push(rec.summary, "ode_residual", res);
    push(rec.summary, "biorthogonality_error", biorth);
    push(rec.summary, "kernel_res_xi1", kc.res_xi1);
    push(rec.summary, "kernel_res_xi2", kc.res_xi2);
    push(rec.summary, "kernel_res_zeta1", kc.res_zeta1);
    push(rec.summary, "kernel_res_zeta2", kc.res_zeta2);
    rec.checks.push_back(bound_check("soliton-ode-residual", res, 1e-9, cfg.seed));
    rec.checks.push_back(bound_check("kernel-biorthogonality", biorth, 1e-8, cfg.seed));
    rec.checks.push_back(bound_check(
        "kernel-relations",
        std::max(std::max(kc.res_xi1, kc.res_xi2), std::max(kc.res_zeta1, kc.res_zeta2)), 1e-6,
        cfg.seed));
}

void run_spectrum(const ExperimentConfig& cfg, RunRecord& rec) {
    const SolitonFamily fam(cfg.p, cfg.c0);
    const WeightedOperator op =
        make_weighted_operator(fam, cfg.a, cfg.collocation.R, cfg.collocation.m);
    const SpectrumReport rep = eigen_spectrum(op);

    std::vector<std::complex<double>> eigs = rep.eigenvalues;
    std::sort(eigs.begin(), eigs.end(), [](auto u, auto v) {
        return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
    });
    std::vector<std::vector<double>> rows;
    rows.reserve(eigs.size());
    for (const auto& z : eigs) rows.push_back({z.real(), z.imag()});
    const std::string csv = join_path(cfg.out_dir, "spectrum.csv");
    write_csv(csv, {"re", "im"}, rows);
    rec.artifacts.push_back(csv);

    double cluster_max = 0.0;
    for (const auto& z : rep.zero_cluster) cluster_max = std::max(cluster_max, std::abs(z));
    push(rec.summary, "zero_cluster_size", static_cast<double>(rep.zero_cluster.size()));
    push(rec.summary, "zero_cluster_max_abs", cluster_max);
    push(rec.summary, "gap", rep.gap);
    push(rec.summary, "essential_floor", rep.essential_floor);
    SuiteResult cl;
    cl.name = "spectrum-zero-cluster";
    cl.seed = cfg.seed;
    cl.passed = rep.zero_cluster.size() == 2;
    cl.worst_ratio = cluster_max / 1e-6;
    rec.checks.push_back(cl);
    rec.checks.push_back(band_check("spectrum-gap-above-floor", rep.gap,
                                    rep.essential_floor - 1e-3, 1e9, cfg.seed));
}

void run_semigroup(const ExperimentConfig& cfg, RunRecord& rec) {
    const SolitonFamily fam(cfg.p, cfg.c0);
    const WeightedOperator op =
        make_weighted_operator(fam, cfg.a, cfg.collocation.R, cfg.collocation.m);
    const Grid g{cfg.grid.n, cfg.grid.L};
    Field f{g, std::vector<double>(g.n, 0.0)};
    for (std::size_t j = 0; j < g.n; ++j) {
        const double y = g.node(j);
        f.v[j] = std::exp(-y * y);
    }
    FitReport fit;
    const double bhat = decay_rate(op, f, cfg.evolve.t_end, true, &fit);
    const SpectrumReport rep = eigen_spectrum(op);
    push(rec.summary, "decay_rate", bhat);
    push(rec.summary, "gap", rep.gap);
    push(rec.summary, "ratio", bhat / rep.gap);
    push(rec.summary, "fit_residual", fit.residual);
    rec.checks.push_back(band_check("semigroup-decay-vs-gap", bhat / rep.gap, 0.9, 1.1, cfg.seed));
}

void run_smoothing(const ExperimentConfig& cfg, RunRecord& rec) {
    const SolitonFamily fam(cfg.p, cfg.c0);
    const WeightedOperator op = make_weighted_operator(fam, cfg.a, kSmoothingR, kSmoothingM);
    const Grid g{cfg.grid.n, cfg.grid.L};
    const double w = 2.0 * op.delta();
    Field f{g, std::vector<double>(g.n, 0.0)};
    for (std::size_t j = 0; j < g.n; ++j) {
        const double e = g.node(j) / w;
        f.v[j] = std::exp(-e * e);
    }
    const double a0 = smoothing_exponent(op, f, 0, SourceMode::L1a);
    const double a1 = smoothing_exponent(op, f, 1, SourceMode::L1a);
    const double aop = smoothing_exponent(op, f, 1, SourceMode::L2a);
    push(rec.summary, "alpha_j0_l1a", a0);
    push(rec.summary, "alpha_j1_l1a", a1);
    push(rec.summary, "alpha_j1_l2a", aop);
    rec.checks.push_back(band_check("smoothing-j0-l1a", a0, 0.20, 0.30, cfg.seed));
    rec.checks.push_back(band_check("smoothing-j1-l1a", a1, 0.68, 0.82, cfg.seed));
    rec.checks.push_back(band_check("smoothing-j1-l2a", aop, 0.45, 0.55, cfg.seed));
}

void run_resolvent(const ExperimentConfig& cfg, RunRecord& rec) {
    const SolitonFamily fam(cfg.p, cfg.c0);
    const WeightedOperator op =
        make_weighted_operator(fam, cfg.a, cfg.collocation.R, cfg.collocation.m);
    const double floor = cfg.a * (cfg.c0 - cfg.a * cfg.a);
    const double im = 0.25 * floor;
    std::vector<std::vector<double>> rows;
    double max_norm = 0.0, at_re = 0.0;
    for (int re = -20; re <= 20; re += 2) {
        const double nrm = resolvent_norm(op, {static_cast<double>(re), im}, true);
        rows.push_back({static_cast<double>(re), im, nrm});
        if (nrm > max_norm) {
            max_norm = nrm;
            at_re = re;
        }
    }
    const std::string csv = join_path(cfg.out_dir, "spectrum.csv");
    write_csv(csv, {"re_lambda", "im_lambda", "resolvent_norm"}, rows);
    rec.artifacts.push_back(csv);
    push(rec.summary, "max_resolvent_norm", max_norm);
    push(rec.summary, "argmax_re", at_re);
    push(rec.summary, "im_lambda", im);
    push(rec.summary, "essential_floor", floor);
    rec.checks.push_back(bound_check("resolvent-bounded", max_norm, 1e6, cfg.seed));
}

void run_evolve(const ExperimentConfig& cfg, RunRecord& rec) {
    const Grid g{cfg.grid.n, cfg.grid.L};
    const SolitonFamily fam(cfg.p, cfg.c0);
    Field u0 = profile(fam, g);
    const Field v0 = make_perturbation(g, cfg);
    for (std::size_t j = 0; j < g.n; ++j) u0.v[j] += v0.v[j];

    EvolveConfig ecfg;
    ecfg.p = cfg.p;
    ecfg.dt = cfg.evolve.dt;
    ecfg.t_end = cfg.evolve.t_end;
    ecfg.sample_every = cfg.evolve.sample_every;
    const Trajectory traj = evolve(u0, ecfg);

    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        rows.push_back({traj.times[i], traj.invariants_series[i].first,
                        traj.invariants_series[i].second});
    const std::string csv = join_path(cfg.out_dir, "invariants.csv");
    write_csv(csv, {"t", "momentum", "energy"}, rows);
    rec.artifacts.push_back(csv);

    const double P0 = traj.invariants_series.front().first;
    const double E0 = traj.invariants_series.front().second;
    double dP = 0.0, dE = 0.0;
    for (const auto& [P, E] : traj.invariants_series) {
        dP = std::max(dP, std::abs(P - P0) / std::max(std::abs(P0), 1e-300));
        dE = std::max(dE, std::abs(E - E0) / std::max(std::abs(E0), 1e-300));
    }
    push(rec.summary, "momentum_drift", dP);
    push(rec.summary, "energy_drift", dE);
    if (cfg.perturbation.amplitude == 0.0 && cfg.perturbation.kind != PerturbationKind::File) {
        const Field& uf = traj.states.back();
        const double xT = fold(cfg.c0 * cfg.evolve.t_end, g.L);
        double acc = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            const double r = uf.v[j] - fam.profile_at(g.node(j) - xT);
            acc += r * r;
        }
        push(rec.summary, "final_soliton_error", std::sqrt(g.dx() * acc));
    }
    rec.checks.push_back(bound_check("invariant-drift", std::max(dP, dE), 1e-8, cfg.seed));
}

struct StabilityScalars {
    double nv0 = 0.0, c_plus = 0.0, dc_abs = 0.0, sup_orbital = 0.0, q_ratio = 0.0;
    double v2a_max = 0.0, v2a_final = 0.0, v2h1a_max = 0.0, v2h1a_final = 0.0;
    double tail_initial = 0.0, tail_final = 0.0, tv_refined = 0.0, sup_gx = 0.0;
    double orth_max = 0.0, fit_residual_max = 0.0;
    MQuantities m;
};

StabilityScalars run_stability(const ExperimentConfig& cfg, RunRecord& rec) {
    const Grid g{cfg.grid.n, cfg.grid.L};
    const Field v0 = make_perturbation(g, cfg);

    EvolveConfig ecfg;
    ecfg.p = cfg.p;
    ecfg.dt = cfg.evolve.dt;
    ecfg.t_end = cfg.evolve.t_end;
    ecfg.sample_every = cfg.evolve.sample_every;
    TrackOptions opt;
    opt.a = cfg.a;
    const ModulationTrack tr = run_track(cfg.p, cfg.c0, v0, ecfg, opt);

    std::vector<std::vector<double>> rows;
    rows.reserve(tr.samples.size());
    for (const TrackSample& s : tr.samples)
        rows.push_back({s.t, s.c, s.x, s.gamma, s.refined_c, s.xdot_minus_c, s.cdot,
                        s.gamma_rate_minus_x, s.fit_residual, static_cast<double>(s.fit_iters),
                        s.orth1, s.orth2, s.v1_l2, s.v1_w, s.v1_w1, s.v2_l2a, s.v2_h1a, s.v_l2,
                        s.orbital_err, s.l2_res1, s.l2_res2});
    const std::string track_csv = join_path(cfg.out_dir, "track.csv");
    write_csv(track_csv,
              {"t",           "c",           "x",          "gamma",       "refined_c",
               "xdot_minus_c", "cdot",       "gamma_rate_minus_x", "fit_residual", "fit_iters",
               "orth1",       "orth2",       "v1_l2",      "v1_w",        "v1_w1",
               "v2_l2a",      "v2_h1a",      "v_l2",       "orbital_err", "l2_res1",
               "l2_res2"},
              rows);
    rec.artifacts.push_back(track_csv);

    StabilityScalars sc;
    sc.nv0 = norm_l2(v0);
    sc.c_plus = tr.c_plus;
    sc.dc_abs = std::abs(tr.c_plus - cfg.c0);
    std::vector<double> ts, xs, rspeeds;
    for (const TrackSample& s : tr.samples) {
        ts.push_back(s.t);
        xs.push_back(s.x);
        rspeeds.push_back(s.refined_c);
        sc.sup_orbital = std::max(sc.sup_orbital, s.orbital_err);
        sc.v2a_max = std::max(sc.v2a_max, s.v2_l2a);
        sc.v2h1a_max = std::max(sc.v2h1a_max, s.v2_h1a);
        sc.sup_gx = std::max(sc.sup_gx, std::abs(s.gamma - s.x));
        sc.orth_max = std::max(sc.orth_max, std::max(std::abs(s.orth1), std::abs(s.orth2)));
        sc.fit_residual_max = std::max(sc.fit_residual_max, s.fit_residual);
    }
    sc.v2a_final = tr.samples.back().v2_l2a;
    sc.v2h1a_final = tr.samples.back().v2_h1a;
    sc.q_ratio = sc.nv0 > 0.0 ? sc.sup_orbital / std::sqrt(sc.nv0) : 0.0;
    for (std::size_t i = 1; i < rspeeds.size(); ++i)
        sc.tv_refined += std::abs(rspeeds[i] - rspeeds[i - 1]);
    sc.m = m_quantities(tr);

    // tail norms and conserved quantities at the snapshot times
    const SolitonFamily famp(cfg.p, tr.c_plus);
    std::vector<std::vector<double>> irows;
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        const double t = tr.snapshot_times[i];
        const double xt = interp_at(ts, xs, t);
        const double tl = tail_norm(tr.snapshots[i], famp, xt, cfg.sigma, t);
        const auto [P, E] = invariants(tr.snapshots[i], cfg.p);
        irows.push_back({t, P, E, tl});
        if (i == 0) sc.tail_initial = tl;
        sc.tail_final = tl;
    }
    const std::string inv_csv = join_path(cfg.out_dir, "invariants.csv");
    write_csv(inv_csv, {"t", "momentum", "energy", "tail"}, irows);
    rec.artifacts.push_back(inv_csv);

    push(rec.summary, "v0_l2", sc.nv0);
    push(rec.summary, "c_plus", sc.c_plus);
    push(rec.summary, "c_drift_abs", sc.dc_abs);
    push(rec.summary, "sup_orbital_error", sc.sup_orbital);
    push(rec.summary, "orbital_over_sqrt_v0", sc.q_ratio);
    push(rec.summary, "v2_l2a_max", sc.v2a_max);
    push(rec.summary, "v2_l2a_final", sc.v2a_final);
    push(rec.summary, "v2_h1a_max", sc.v2h1a_max);
    push(rec.summary, "v2_h1a_final", sc.v2h1a_final);
    push(rec.summary, "tail_initial", sc.tail_initial);
    push(rec.summary, "tail_final", sc.tail_final);
    push(rec.summary, "tv_refined_speed", sc.tv_refined);
    push(rec.summary, "sup_gamma_minus_x", sc.sup_gx);
    push(rec.summary, "orthogonality_max", sc.orth_max);
    push(rec.summary, "fit_residual_max", sc.fit_residual_max);
    push(rec.summary, "M1", sc.m.m1);
    push(rec.summary, "M2", sc.m.m2);
    push(rec.summary, "Mv", sc.m.mv);
    push(rec.summary, "Mc", sc.m.mc);
    push(rec.summary, "Mx", sc.m.mx);
    push(rec.summary, "Mgamma", sc.m.mgamma);
    push(rec.summary, "Mtotal", sc.m.mtotal);

    rec.checks.push_back(bound_check("fit-orthogonality", sc.orth_max, 1e-8, cfg.seed));
    if (sc.v2a_max > 0.0)
        rec.checks.push_back(
            bound_check("weighted-remainder-decay", sc.v2a_final, 0.2 * sc.v2a_max, cfg.seed));
    if (sc.tail_initial > 0.0)
        rec.checks.push_back(
            bound_check("tail-decay", sc.tail_final, 0.2 * sc.tail_initial, cfg.seed));
    return sc;
}

void run_sweep(const ExperimentConfig& cfg, RunRecord& rec) {
    const std::size_t nrun = cfg.amplitudes.size();
    std::vector<ExperimentConfig> subs(nrun);
    for (std::size_t i = 0; i < nrun; ++i) {
        subs[i] = cfg;
        subs[i].kind = "stability";
        subs[i].perturbation.amplitude = cfg.amplitudes[i];
        subs[i].amplitudes.clear();
        subs[i].out_dir = join_path(cfg.out_dir, "run_" + std::to_string(i));
    }
    std::vector<RunRecord> recs(nrun);
    std::vector<StabilityScalars> scalars(nrun);
    std::vector<std::exception_ptr> errs(nrun);

    auto work = [&](std::size_t i) {
        try {
            std::filesystem::create_directories(subs[i].out_dir);
            recs[i].version = kVersion;
            scalars[i] = run_stability(subs[i], recs[i]);
            write_summary_json(subs[i], recs[i]);
            write_checks_json(subs[i].out_dir, recs[i].checks);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(nrun)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < nrun; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < nrun; i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < nrun; ++i) {
        const auto& s = scalars[i];
        const std::string tag = "run" + std::to_string(i) + "_";
        push(rec.summary, tag + "amplitude", cfg.amplitudes[i]);
        push(rec.summary, tag + "v0_l2", s.nv0);
        push(rec.summary, tag + "c_drift_abs", s.dc_abs);
        push(rec.summary, tag + "orbital_over_sqrt_v0", s.q_ratio);
        push(rec.summary, tag + "tv_refined_speed", s.tv_refined);
        push(rec.summary, tag + "sup_gamma_minus_x", s.sup_gx);
        for (const auto& a : recs[i].artifacts) rec.artifacts.push_back(a);
        for (const auto& c : recs[i].checks) {
            SuiteResult cc = c;
            cc.name = tag + c.name;
            rec.checks.push_back(cc);
        }
        if (s.nv0 > 0.0 && s.dc_abs > 0.0) {
            lx.push_back(std::log(s.nv0));
            ly.push_back(std::log(s.dc_abs));
        }
    }

    if (lx.size() >= 2) {
        const auto [slope, icpt] = ls_fit(lx, ly);
        (void)icpt;
        push(rec.summary, "speed_drift_slope", slope);
        rec.checks.push_back(band_check("sweep-speed-drift-slope", slope, 0.8, 1.2, cfg.seed));
    }
    double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
    for (const auto& s : scalars)
        if (s.nv0 > 0.0) {
            qmin = std::min(qmin, s.q_ratio);
            qmax = std::max(qmax, s.q_ratio);
        }
    if (qmax > 0.0 && std::isfinite(qmin) && qmin > 0.0) {
        push(rec.summary, "orbital_ratio_spread", qmax / qmin);
        rec.checks.push_back(bound_check("sweep-orbital-spread", qmax / qmin, 2.0, cfg.seed));
    }
    for (std::size_t i = 0; i + 1 < nrun; ++i) {
        const std::string tag = "ratio" + std::to_string(i) + std::to_string(i + 1) + "_";
        if (scalars[i + 1].tv_refined > 0.0) {
            const double r = scalars[i].tv_refined / scalars[i + 1].tv_refined;
            push(rec.summary, tag + "tv_refined", r);
            rec.checks.push_back(band_check("sweep-tv-" + std::to_string(i), r, 3.0, 5.0, cfg.seed));
        }
        if (cfg.p == 3 && scalars[i + 1].sup_gx > 0.0) {
            const double r = scalars[i].sup_gx / scalars[i + 1].sup_gx;
            push(rec.summary, tag + "gamma_minus_x", r);
            rec.checks.push_back(
                band_check("sweep-gamma-" + std::to_string(i), r, 6.0, 10.0, cfg.seed));
        }
    }
}

void run_inequalities(const ExperimentConfig& cfg, RunRecord& rec) {
    const SuiteResult gn = gn_suite(cfg.seed, cfg.suite_fields);
    const SuiteResult sob = sobolev_suite(cfg.seed, cfg.suite_fields);
    rec.checks.push_back(gn);
    rec.checks.push_back(sob);
    push(rec.summary, "gn_worst_ratio", gn.worst_ratio);
    push(rec.summary, "sobolev_worst_ratio", sob.worst_ratio);
    push(rec.summary, "fields_per_family", static_cast<double>(cfg.suite_fields));
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.kind = j.value("kind", cfg.kind);
        cfg.p = j.value("p", cfg.p);
        cfg.c0 = j.value("c0", cfg.c0);
        cfg.a = j.value("a", cfg.a);
        if (j.contains("grid")) {
            cfg.grid.n = j["grid"].value("n", cfg.grid.n);
            cfg.grid.L = j["grid"].value("L", cfg.grid.L);
        }
        if (j.contains("evolve")) {
            cfg.evolve.dt = j["evolve"].value("dt", cfg.evolve.dt);
            cfg.evolve.t_end = j["evolve"].value("t_end", cfg.evolve.t_end);
            cfg.evolve.sample_every = j["evolve"].value("sample_every", cfg.evolve.sample_every);
        }
        if (j.contains("perturbation")) {
            const auto& p = j["perturbation"];
            cfg.perturbation.kind = pert_kind_from(p.value("type", std::string("gaussian")));
            cfg.perturbation.amplitude = p.value("amplitude", cfg.perturbation.amplitude);
            cfg.perturbation.width = p.value("width", cfg.perturbation.width);
            cfg.perturbation.offset = p.value("offset", cfg.perturbation.offset);
            cfg.perturbation.path = p.value("path", cfg.perturbation.path);
        }
        if (j.contains("collocation")) {
            cfg.collocation.R = j["collocation"].value("R", cfg.collocation.R);
            cfg.collocation.m = j["collocation"].value("m", cfg.collocation.m);
        }
        cfg.sigma = j.value("sigma", cfg.sigma);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.out_dir = j.value("out", cfg.out_dir);
        if (j.contains("amplitudes")) cfg.amplitudes = j["amplitudes"].get<std::vector<double>>();
        cfg.suite_fields = j.value("suite_fields", cfg.suite_fields);
        cfg.jobs = j.value("jobs", cfg.jobs);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["kind"] = cfg.kind;
    j["p"] = cfg.p;
    j["c0"] = cfg.c0;
    j["a"] = cfg.a;
    j["grid"] = {{"n", cfg.grid.n}, {"L", cfg.grid.L}};
    j["evolve"] = {{"dt", cfg.evolve.dt},
                   {"t_end", cfg.evolve.t_end},
                   {"sample_every", cfg.evolve.sample_every}};
    j["perturbation"] = {{"type", pert_kind_name(cfg.perturbation.kind)},
                         {"amplitude", cfg.perturbation.amplitude},
                         {"width", cfg.perturbation.width},
                         {"offset", cfg.perturbation.offset},
                         {"path", cfg.perturbation.path}};
    j["collocation"] = {{"R", cfg.collocation.R}, {"m", cfg.collocation.m}};
    j["sigma"] = cfg.sigma;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    j["amplitudes"] = cfg.amplitudes;
    j["suite_fields"] = cfg.suite_fields;
    j["jobs"] = cfg.jobs;
    return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
    return config_from_json(read_text_file(path));
}

ExperimentConfig default_config(const std::string& kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    if (kind == "semigroup") {
        cfg.evolve.t_end = 27.0;
    } else if (kind == "smoothing") {
        cfg.grid = {8192, 40.0};
    } else if (kind == "evolve") {
        cfg.evolve = {1e-3, 10.0, 100};
    } else if (kind == "stability" || kind == "sweep") {
        cfg.a = 0.4;
        cfg.grid = {8192, 1200.0};
        cfg.evolve = {2.5e-3, 80.0, 80};
        cfg.perturbation.amplitude = 1e-2;
        cfg.perturbation.width = 4.0;
        if (kind == "sweep") cfg.amplitudes = {1e-2, 5e-3, 2.5e-3};
    }
    return cfg;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    const auto& kinds = known_kinds();
    const bool kind_ok = std::find(kinds.begin(), kinds.end(), cfg.kind) != kinds.end();
    if (!kind_ok) out.push_back("unknown experiment kind: " + cfg.kind);
    if (cfg.p != 2 && cfg.p != 3) out.push_back("nonlinearity power p must be 2 or 3");
    if (!(cfg.c0 > 0.0)) out.push_back("base speed c0 must be positive");
    if (!(cfg.a > 0.0) || !(cfg.a < std::sqrt(std::max(cfg.c0, 0.0))))
        out.push_back("weight rate must satisfy 0 < a < sqrt(c0)");
    if (cfg.grid.n < 16 || (cfg.grid.n & (cfg.grid.n - 1)) != 0)
        out.push_back("grid size n must be a power of two (>= 16)");
    if (!(cfg.grid.L > 0.0)) out.push_back("domain length L must be positive");
    if (!(cfg.evolve.dt > 0.0)) out.push_back("time step dt must be positive");
    if (!(cfg.evolve.t_end > 0.0)) out.push_back("horizon t_end must be positive");
    if (cfg.evolve.sample_every < 1) out.push_back("sample_every must be at least 1");
    const bool evolving = cfg.kind == "evolve" || cfg.kind == "stability" || cfg.kind == "sweep";
    if (evolving && cfg.grid.L > 0.0) {
        const double kmax = std::numbers::pi * static_cast<double>(cfg.grid.n) / cfg.grid.L;
        if (cfg.evolve.dt * kmax * kmax * kmax > 50.0)
            out.push_back("time step too large for the dispersion guard dt*kmax^3 <= 50");
    }
    if (cfg.perturbation.amplitude < 0.0) out.push_back("perturbation amplitude must be >= 0");
    if (!(cfg.perturbation.width > 0.0)) out.push_back("perturbation width must be positive");
    if (cfg.perturbation.kind == PerturbationKind::File &&
        !std::filesystem::exists(cfg.perturbation.path))
        out.push_back("perturbation file does not exist: " + cfg.perturbation.path);
    if (!(cfg.sigma > 0.0) || !(cfg.sigma < cfg.c0))
        out.push_back("tail speed sigma must lie in (0, c0)");
    if (cfg.kind == "sweep") {
        if (cfg.amplitudes.empty()) out.push_back("sweep requires a nonempty amplitude list");
        for (double amp : cfg.amplitudes)
            if (!(amp > 0.0)) out.push_back("sweep amplitudes must be positive");
    }
    if (cfg.kind == "spectrum" || cfg.kind == "semigroup" || cfg.kind == "resolvent-sweep") {
        if (cfg.collocation.m < 400) out.push_back("collocation size m must be at least 400");
        if (!(cfg.collocation.R > 0.0) ||
            cfg.collocation.R < 30.0 / std::sqrt(std::max(cfg.c0, 1e-12)))
            out.push_back("collocation radius R must be at least 30/sqrt(c0)");
    }
    if (cfg.suite_fields < 1) out.push_back("suite_fields must be at least 1");
    if (cfg.jobs < 1) out.push_back("jobs must be at least 1");
    return out;
}

RunRecord run(const ExperimentConfig& cfg) {
    const std::vector<std::string> viol = validate(cfg);
    if (!viol.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : viol) msg += "\n  - " + v;
        throw ConfigError(msg);
    }
    std::filesystem::create_directories(cfg.out_dir);

    RunRecord rec;
    rec.config = cfg;
    rec.version = kVersion;
    const auto t0 = std::chrono::steady_clock::now();

    if (cfg.kind == "soliton-check") run_soliton_check(cfg, rec);
    else if (cfg.kind == "spectrum") run_spectrum(cfg, rec);
    else if (cfg.kind == "semigroup") run_semigroup(cfg, rec);
    else if (cfg.kind == "smoothing") run_smoothing(cfg, rec);
    else if (cfg.kind == "resolvent-sweep") run_resolvent(cfg, rec);
    else if (cfg.kind == "evolve") run_evolve(cfg, rec);
    else if (cfg.kind == "stability") run_stability(cfg, rec);
    else if (cfg.kind == "sweep") run_sweep(cfg, rec);
    else if (cfg.kind == "inequality-suite") run_inequalities(cfg, rec);

    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.checks_passed = true;
    for (const auto& c : rec.checks) rec.checks_passed = rec.checks_passed && c.passed;

    write_summary_json(cfg, rec);
    rec.artifacts.push_back(join_path(cfg.out_dir, "summary.json"));
    if (!rec.checks.empty()) {
        write_checks_json(cfg.out_dir, rec.checks);
        rec.artifacts.push_back(join_path(cfg.out_dir, "checks.json"));
    }
    return rec;
}

std::vector<SuiteResult> quick_checks(std::uint64_t seed) {
    std::vector<SuiteResult> out;
    const Grid g{2048, 200.0};

    double worst_ode = 0.0;
    for (int p : {2, 3})
        for (double c : {0.5, 1.0, 2.0})
            worst_ode = std::max(worst_ode, ode_residual(SolitonFamily(p, c), g));
    out.push_back(bound_check("soliton-ode-residual", worst_ode, 1e-9, seed));

    double worst_kernel = 0.0;
    for (int p : {2, 3}) {
        const SolitonFamily fam(p, 1.0);
        const KernelBasis kb = kernel_basis(fam, g);
        const KernelCheck kc = check_generalized_kernel(
            fam, kb, [&](const Field& v) { return apply_linearized(fam, v, kb.center); });
        worst_kernel = std::max({worst_kernel, kc.res_xi1, kc.res_xi2, kc.res_zeta1, kc.res_zeta2});
    }
    out.push_back(bound_check("kernel-relations", worst_kernel, 1e-6, seed));

    const ChiReport chi_rep = chi_properties(0.05);
    SuiteResult chi_item;
    chi_item.name = "cutoff-bounds";
    chi_item.seed = seed;
    chi_item.passed = chi_rep.ok;
    chi_item.worst_ratio =
        std::max({chi_rep.worst_upper, chi_rep.worst_second, chi_rep.worst_third});
    out.push_back(chi_item);

    {
        const Grid gt{1024, 200.0};
        const SolitonFamily fam(2, 1.0);
        EvolveConfig ecfg;
        ecfg.p = 2;
        ecfg.dt = 2e-3;
        ecfg.t_end = 1.0;
        ecfg.sample_every = 500;
        const Trajectory traj = evolve(profile(fam, gt), ecfg);
        const Field& uf = traj.states.back();
        double acc = 0.0;
        for (std::size_t j = 0; j < gt.n; ++j) {
            const double r = uf.v[j] - fam.profile_at(gt.node(j) - 1.0);
            acc += r * r;
        }
        out.push_back(bound_check("transport", std::sqrt(gt.dx() * acc), 1e-5, seed));
    }

    {
        const SolitonFamily fam(2, 1.0);
        const Field w = translate(profile(fam, g), 0.37);
        const FitResult fr = fit(w, 2, 0.3, 0.9);
        out.push_back(bound_check("fit-round-trip", std::abs(fr.x - 0.37) + std::abs(fr.c - 1.0),
                                  1e-9, seed));
    }

    out.push_back(gn_suite(seed, 10));
    out.push_back(sobolev_suite(seed, 10));
    return out;
}

} // namespace solistab
