#include "solistab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace solistab {

namespace {

double fold(double x, double L) { return x - L * std::floor(x / L + 0.5); }

double default_window(const Grid& g, double window) {
    if (window < 0.0) return g.L / 4.0;
    if (!(window > 0.0) || window > g.L / 2.0)
        throw ConfigError("pairing window must satisfy 0 < window <= L/2");
    return window;
}

// Pairings of w - phi_c(. - x) against the dual kernels over the window.
void fit_pairings(const Field& w, const SolitonFamily& fam, double x, double window,
                  double& g1, double& g2) {
    const Grid& g = w.grid;
    const double cf = fold(x, g.L);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double y = g.node(j) - cf;
        if (std::abs(y) > window) continue;
        const double r = w[j] - fam.profile_at(y);
        s1 += r * fam.zeta1_at(y);
        s2 += r * fam.zeta2_at(y);
    }
    g1 = s1 * g.dx();
    g2 = s2 * g.dx();
}

struct Mat2 {
    double a00 = 1.0, a01 = 0.0, a10 = 0.0, a11 = 1.0;
    double det() const { return a00 * a11 - a01 * a10; }
    std::pair<double, double> solve(double b0, double b1) const {
        const double d = det();
        if (std::abs(d) < 1e-12) throw ComputeError("2x2 modulation system is singular");
        return {(b0 * a11 - b1 * a01) / d, (a00 * b1 - a10 * b0) / d};
    }
    double cond1() const {
        const double d = det();
        const double na = std::max(std::abs(a00) + std::abs(a10), std::abs(a01) + std::abs(a11));
        const double ni = std::max(std::abs(a11) + std::abs(a10), std::abs(a01) + std::abs(a00));
        return na * ni / std::abs(d);
    }
};

} // namespace

FitScalars fit_scalars(const Field& w, int p, double x_guess, double c_guess,
                       double window, double tol, int max_iters) {
    const double win = default_window(w.grid, window);
    double x = x_guess, c = c_guess;
    if (!(c > 0.0)) throw ConfigError("fit requires a positive speed guess");
    Mat2 J; // leading-order Jacobian of (g1, g2) in (x, c)
    J.a00 = 1.0;
    J.a11 = -1.0;
    double g1 = 0.0, g2 = 0.0;
    {
        SolitonFamily fam(p, c);
        fit_pairings(w, fam, x, win, g1, g2);
    }
    int it = 0;
    while (std::hypot(g1, g2) > tol) {
        if (it >= max_iters) throw ComputeError("soliton fit did not converge");
        if (it > 0 && it % 5 == 0) {
            // finite-difference Jacobian refresh
            const double d = 1e-7;
            double a1, a2, b1, b2;
            fit_pairings(w, SolitonFamily(p, c), x + d, win, a1, a2);
            fit_pairings(w, SolitonFamily(p, c), x - d, win, b1, b2);
            J.a00 = (a1 - b1) / (2 * d);
            J.a10 = (a2 - b2) / (2 * d);
            fit_pairings(w, SolitonFamily(p, c + d), x, win, a1, a2);
            fit_pairings(w, SolitonFamily(p, c - d), x, win, b1, b2);
            J.a01 = (a1 - b1) / (2 * d);
            J.a11 = (a2 - b2) / (2 * d);
        }
        const auto [dx, dc] = J.solve(g1, g2);
        x -= dx;
        c -= dc;
        if (!(c > 0.0)) throw ComputeError("soliton fit left the family: c <= 0");
        SolitonFamily fam(p, c);
        fit_pairings(w, fam, x, win, g1, g2);
        ++it;
    }
    FitScalars out;
    out.x = x;
    out.c = c;
    out.residual = std::hypot(g1, g2);
    out.g1 = g1;
    out.g2 = g2;
    out.iters = it;
    return out;
}

FitResult fit(const Field& w, int p, double x_guess, double c_guess,
              double window, double tol, int max_iters) {
    const FitScalars fs = fit_scalars(w, p, x_guess, c_guess, window, tol, max_iters);
    SolitonFamily fam(p, fs.c);
    Field v2 = translate(w, -fs.x);
    for (std::size_t j = 0; j < v2.size(); ++j) v2[j] -= fam.profile_at(v2.grid.node(j));
    FitResult out;
    out.x = fs.x;
    out.c = fs.c;
    out.v2 = std::move(v2);
    out.residual = fs.residual;
    out.iters = fs.iters;
    return out;
}

SplitParts split(const Field& u, const Field& v1_lab, const SolitonFamily& fam, double x) {
    if (u.grid != v1_lab.grid) throw ConfigError("split requires matching grids");
    SplitParts out;
    out.v = translate(u, -x);
    for (std::size_t j = 0; j < out.v.size(); ++j)
        out.v[j] -= fam.profile_at(u.grid.node(j));
    out.v1 = translate(v1_lab, -x);
    out.v2 = Field(u.grid);
    for (std::size_t j = 0; j < out.v2.size(); ++j) out.v2[j] = out.v[j] - out.v1[j];
    return out;
}

NonlinearTerms nonlinear_terms(const SolitonFamily& fam, const Field& v1, const Field& v2,
                               double center) {
    if (v1.grid != v2.grid) throw ConfigError("nonlinear terms require matching grids");
    const Grid& g = v1.grid;
    const double cf = fold(center, g.L);
    NonlinearTerms out{Field(g), Field(g), Field(g), Field(g), Field(g)};
    for (std::size_t j = 0; j < g.n; ++j) {
        const double ph = fam.profile_at(g.node(j) - cf);
        const double a = v1[j], b = v2[j];
        if (fam.p == 2) {
            out.n1[j] = 6.0 * ph * a;
            out.n2[j] = 3.0 * b * (2.0 * a + b);
        } else {
            out.n1[j] = 9.0 * ph * ph * a + 9.0 * ph * a * a;
            out.n21[j] = 9.0 * ph * b * (2.0 * a + b);
            out.n22[j] = 3.0 * b * (3.0 * a * a + 3.0 * a * b + b * b);
            out.n2[j] = out.n21[j] + out.n22[j];
        }
        out.total[j] = out.n1[j] + out.n2[j];
    }
    return out;
}

ModulationRhs modulation_rhs(const SolitonFamily& fam, const Field& v1, const Field& v2,
                             double center, double window) {
    if (v1.grid != v2.grid) throw ConfigError("modulation rhs requires matching grids");
    const Grid& g = v1.grid;
    const double win = default_window(g, window);
    const double cf = fold(center, g.L);
    const double eps = 1e-5 * std::max(1.0, fam.c);
    const SolitonFamily famp(fam.p, fam.c + eps), famm(fam.p, fam.c - eps);

    double p00 = 0, p01 = 0, p10 = 0, p11 = 0;
    double r1 = 0, r2 = 0, q1 = 0, q2 = 0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double y = g.node(j) - cf;
        if (std::abs(y) > win) continue;
        const double dyz1 = fam.dzeta1_at(y);
        const double dyz2 = fam.dzeta2_at(y);
        const double dcz1 = (famp.zeta1_at(y) - famm.zeta1_at(y)) / (2 * eps);
        const double dcz2 = (famp.zeta2_at(y) - famm.zeta2_at(y)) / (2 * eps);
        const double a = v1[j], b = v2[j];
        p00 += b * dyz1;
        p01 += b * dcz1;
        p10 += b * dyz2;
        p11 += b * dcz2;
        const double ph = fam.profile_at(y);
        double nt, n22 = 0.0;
        if (fam.p == 2) {
            nt = 6.0 * ph * a + 3.0 * b * (2.0 * a + b);
        } else {
            n22 = 3.0 * b * (3.0 * a * a + 3.0 * a * b + b * b);
            nt = 9.0 * ph * ph * a + 9.0 * ph * a * a + 9.0 * ph * b * (2.0 * a + b) + n22;
        }
        r1 += nt * dyz1;
        r2 += nt * dyz2;
        q1 += n22 * dyz1;
        q2 += n22 * dyz2;
    }
    const double h = g.dx();
    Mat2 A;
    A.a00 = 1.0 - p00 * h;
    A.a01 = -p01 * h;
    A.a10 = -p10 * h;
    A.a11 = 1.0 - p11 * h;

    ModulationRhs out;
    const auto [c_minus_xdot, cdot] = A.solve(r1 * h, r2 * h);
    out.xdot_minus_c = -c_minus_xdot;
    out.cdot = cdot;
    if (fam.p == 3) out.gamma_rate_minus_x = A.solve(q1 * h, q2 * h).first;
    out.cond = A.cond1();
    return out;
}

double refined_speed(const SolitonFamily& fam, const Field& v1, double center, double window) {
    const Grid& g = v1.grid;
    const double win = default_window(g, window);
    const double cf = fold(center, g.L);
    double s = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double y = g.node(j) - cf;
        if (std::abs(y) > win) continue;
        s += v1[j] * fam.profile_at(y);
    }
    return fam.c + fam.theta1_exact() * s * g.dx();
}

double gamma_step(const SolitonFamily& fam, const Field& v1, const Field& v2,
                  double center, double window) {
    if (fam.p != 3)
        throw ConfigError("secondary phase tracking is defined for the cubic nonlinearity only");
    return modulation_rhs(fam, v1, v2, center, window).gamma_rate_minus_x;
}

MQuantities m_quantities(const ModulationTrack& track) {
    MQuantities m;
    double int_w1 = 0.0, int_2 = 0.0;
    double sup_v1 = 0.0, sup_v2a = 0.0;
    const auto& ss = track.samples;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        const TrackSample& s = ss[i];
        sup_v1 = std::max(sup_v1, s.v1_l2);
        sup_v2a = std::max(sup_v2a, s.v2_l2a);
        m.mv = std::max(m.mv, s.v_l2 * s.v_l2);
        m.mc = std::max(m.mc, std::abs(s.c - track.c0));
        m.mx = std::max(m.mx, std::abs(s.xdot_minus_c));
        m.mgamma = std::max(m.mgamma, std::abs(s.gamma_rate_minus_x + s.xdot_minus_c));
        if (i > 0) {
            const double dt = s.t - ss[i - 1].t;
            const double w1a = ss[i - 1].v1_w1, w1b = s.v1_w1;
            int_w1 += 0.5 * (w1a * w1a + w1b * w1b) * dt;
            const double pa = (track.p == 2) ? ss[i - 1].v2_l2a : ss[i - 1].v2_h1a;
            const double pb = (track.p == 2) ? s.v2_l2a : s.v2_h1a;
            int_2 += 0.5 * (pa * pa + pb * pb) * dt;
        }
    }
    m.m1 = sup_v1 + std::sqrt(int_w1);
    m.m2 = sup_v2a + std::sqrt(int_2);
    m.mtotal = m.m1 + m.m2 + m.mv + m.mc + (track.p == 2 ? m.mx : m.mgamma);
    return m;
}

ModulationTrack run_track(int p, double c0, const Field& v0, const EvolveConfig& cfg,
                          const TrackOptions& opt) {
    if (cfg.p != p) throw ConfigError("track nonlinearity degree disagrees with evolve config");
    const Grid& g = v0.grid;
    cfg.validate(g);
    const double win = default_window(g, opt.window);
    const double right_cap = std::min(win, 4.0 / opt.a);
    const SolitonFamily fam0(p, c0);

    Field u0(g);
    for (std::size_t j = 0; j < g.n; ++j) u0[j] = fam0.profile_at(g.node(j)) + v0[j];

    Stepper su(g, cfg), sv(g, cfg);
    su.set_state(u0);
    sv.set_state(v0);

    ModulationTrack track;
    track.p = p;
    track.c0 = c0;
    track.a = opt.a;

    const std::size_t nsteps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    double x_prev = 0.0, c_prev = c0, t_prev = 0.0, gamma_accum = 0.0, rate_prev = 0.0;
    std::size_t sample_idx = 0;

    for (std::size_t step = 0; step <= nsteps; ++step) {
        const bool is_sample = (step % cfg.sample_every == 0) || step == nsteps;
        if (is_sample) {
            const double t = static_cast<double>(step) * cfg.dt;
            Field u = su.state();
            Field v1lab = sv.state();
            Field w(g);
            for (std::size_t j = 0; j < g.n; ++j) w[j] = u[j] - v1lab[j];

            const double x_pred = (sample_idx == 0) ? 0.0 : x_prev + c_prev * (t - t_prev);
            const FitScalars fs =
                fit_scalars(w, p, x_pred, c_prev, win, opt.fit_tol, opt.fit_max_iters);
            const SolitonFamily fam(p, fs.c);
            const double cf = fold(fs.x, g.L);

            // one pass: remainder fields plus the profile-dependent reductions
            Field v2lab(g), vlab(g);
            double nphi2 = 0.0, cross = 0.0, orb2 = 0.0, pr2 = 0.0;
            for (std::size_t j = 0; j < g.n; ++j) {
                const double y = g.node(j) - cf;
                const double ph = fam.profile_at(y);
                v2lab[j] = w[j] - ph;
                vlab[j] = u[j] - ph;
                nphi2 += ph * ph;
                cross += ph * vlab[j];
                const double d0 = u[j] - fam0.profile_at(y);
                orb2 += d0 * d0;
                pr2 += ph * v2lab[j];
            }
            const double h = g.dx();
            nphi2 *= h; cross *= h; orb2 *= h; pr2 *= h;

            TrackSample s;
            s.t = t;
            s.c = fs.c;
            s.x = fs.x;
            s.refined_c = refined_speed(fam, v1lab, fs.x, win);
            s.fit_residual = fs.residual;
            s.fit_iters = fs.iters;
            s.orth1 = fs.g1;
            s.orth2 = fs.g2;

            const ModulationRhs rhs = modulation_rhs(fam, v1lab, v2lab, fs.x, win);
            s.xdot_minus_c = rhs.xdot_minus_c;
            s.cdot = rhs.cdot;
            s.gamma_rate_minus_x = rhs.gamma_rate_minus_x;
            if (sample_idx > 0)
                gamma_accum += 0.5 * (rate_prev + rhs.gamma_rate_minus_x) * (t - t_prev);
            s.gamma = fs.x + gamma_accum;

            s.v1_l2 = norm_l2(v1lab);
            const WeightSpec wspec(opt.a, cf, WeightKind::TwoSided, win);
            s.v1_w = norm(v1lab, NormSpec{NormKind::W, wspec});
            s.v1_w1 = norm(v1lab, NormSpec{NormKind::W1, wspec});
            const WeightSpec aspec(opt.a, cf, WeightKind::OneSided, win, right_cap);
            s.v2_l2a = norm(v2lab, NormSpec{NormKind::L2a, aspec});
            s.v2_h1a = norm(v2lab, NormSpec{NormKind::H1a, aspec});
            s.v_l2 = norm_l2(vlab);
            s.orbital_err = std::sqrt(orb2);

            const double nu2 = inner(u, u);
            const double nv2 = inner(vlab, vlab);
            s.l2_res1 = std::abs(nu2 - nphi2 - 2.0 * cross - nv2) / nu2;
            s.l2_res2 = std::abs(pr2);

            track.samples.push_back(s);
            if (sample_idx % static_cast<std::size_t>(opt.snapshot_stride) == 0 ||
                step == nsteps) {
                if (track.snapshot_times.empty() || track.snapshot_times.back() != t) {
                    track.snapshot_times.push_back(t);
                    track.snapshots.push_back(u);
                }
            }
            x_prev = fs.x;
            c_prev = fs.c;
            t_prev = t;
            rate_prev = rhs.gamma_rate_minus_x;
            ++sample_idx;
        }
        if (step < nsteps) {
            su.advance();
            sv.advance();
        }
    }
    track.c_plus = track.samples.back().refined_c;
    return track;
}

} // namespace solistab
