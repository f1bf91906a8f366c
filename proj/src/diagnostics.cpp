#include "solistab/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "solistab/errors.hpp"
#include "solistab/rng.hpp"

namespace solistab {

namespace {

double fold(double x, double L) { return x - L * std::floor(x / L + 0.5); }

double sech(double z) { return 1.0 / std::cosh(z); }

} // namespace

double chi(double eps, double x) { return 1.0 + std::tanh(eps * x); }

double chi_prime(double eps, double x) {
    const double s = sech(eps * x);
    return eps * s * s;
}

double chi_pp(double eps, double x) {
    const double s = sech(eps * x);
    return -2.0 * eps * eps * s * s * std::tanh(eps * x);
}

double chi_ppp(double eps, double x) {
    const double s2 = sech(eps * x) * sech(eps * x);
    return -2.0 * eps * eps * eps * s2 * (3.0 * s2 - 2.0);
}

ChiReport chi_properties(double eps) {
    if (!(eps > 0.0)) throw ConfigError("chi_properties: eps must be positive");
    ChiReport rep;
    rep.min_prime = std::numeric_limits<double>::infinity();
    const int npts = 10000;
    for (int i = 0; i < npts; ++i) {
        const double x = -50.0 + 100.0 * static_cast<double>(i) / (npts - 1);
        const double c0 = chi(eps, x);
        const double c1 = chi_prime(eps, x);
        const double c2 = chi_pp(eps, x);
        const double c3 = chi_ppp(eps, x);
        rep.min_prime = std::min(rep.min_prime, c1);
        rep.worst_upper = std::max(rep.worst_upper, c1 / (2.0 * eps * c0));
        if (c1 > 0.0) {
            rep.worst_second = std::max(rep.worst_second, std::abs(c2) / (2.0 * eps * c1));
            rep.worst_third = std::max(rep.worst_third, std::abs(c3) / (4.0 * eps * eps * c1));
        }
    }
    rep.limit_err = std::max(std::abs(chi(eps, -50.0 / eps)), std::abs(chi(eps, 50.0 / eps) - 2.0));
    rep.prime0_err = std::abs(chi_prime(eps, 0.0) - eps);
    rep.ok = rep.min_prime > 0.0 && rep.worst_upper < 1.0 && rep.worst_second <= 1.0 &&
             rep.worst_third <= 1.0 && rep.limit_err < 1e-12 && rep.prime0_err == 0.0;
    return rep;
}

void VirialConfig::validate() const {
    if (!(eps > 0.0) || eps > 0.1) throw ConfigError("virial: eps must lie in (0, 0.1]");
    if (!(c1 > 0.0)) throw ConfigError("virial: c1 must be positive");
    if (path == PathKind::Samples && path_samples.empty())
        throw ConfigError("virial: sampled path requested but no samples given");
}

VirialSeries virial_series(const Trajectory& traj, const VirialConfig& cfg) {
    cfg.validate();
    if (traj.states.empty()) throw ConfigError("virial: empty trajectory");
    const Grid& g = traj.states.front().grid;
    const double h = g.dx();
    if (norm_l2(traj.states.front()) > 0.1)
        throw ConfigError("virial: initial data too large (||w(0)|| > 0.1)");
    const std::size_t ns = traj.states.size();
    if (cfg.path == PathKind::Samples && cfg.path_samples.size() != ns)
        throw ConfigError("virial: path samples must align with trajectory samples");

    auto path_at = [&](std::size_t i) {
        return cfg.path == PathKind::Linear ? cfg.c1 * traj.times[i] : cfg.path_samples[i];
    };
    for (std::size_t i = 0; i + 1 < ns; ++i) {
        const double dtt = traj.times[i + 1] - traj.times[i];
        if (path_at(i + 1) - path_at(i) < cfg.c1 * dtt - 1e-9)
            throw ConfigError("virial: path speed drops below c1");
    }

    VirialSeries out;
    out.nu = 0.5 * std::min(3.0, cfg.c1);
    out.times = traj.times;
    out.front.resize(ns);
    out.dissipation.resize(ns);
    std::vector<double> rate(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const Field& w = traj.states[i];
        const Field dw = spectral_deriv(w, 1);
        const double xr = path_at(i) + cfg.x0;
        if (std::abs(xr) > 0.5 * g.L)
            throw ConfigError("virial: reference point left the domain");
        double I = 0.0, R = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            const double arg = g.node(j) - xr;
            I += chi(cfg.eps, arg) * w.v[j] * w.v[j];
            R += chi_prime(cfg.eps, arg) * (dw.v[j] * dw.v[j] + w.v[j] * w.v[j]);
        }
        out.front[i] = h * I;
        rate[i] = h * R;
    }
    double acc = 0.0;
    out.dissipation[0] = 0.0;
    for (std::size_t i = 1; i < ns; ++i) {
        acc += 0.5 * (rate[i] + rate[i - 1]) * (traj.times[i] - traj.times[i - 1]);
        out.dissipation[i] = out.nu * acc;
    }
    out.ledger_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ns; ++i)
        out.ledger_max = std::max(out.ledger_max, out.front[i] + out.dissipation[i] - out.front[0]);
    if (out.ledger_max > 1e-6 * out.front[0] + 1e-14)
        throw ComputeError("virial: ledger violated; eps or the data are too large");
    return out;
}

GnCheck weighted_gn_check(const Field& v, double eps, double x0, int p) {
    if (p < 1 || p > 3) throw ConfigError("gn check: p must lie in {1,2,3}");
    if (!(eps > 0.0)) throw ConfigError("gn check: eps must be positive");
    const Grid& g = v.grid;
    const double h = g.dx();
    const Field dv = spectral_deriv(v, 1);
    double lhs = 0.0, quad = 0.0, l2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double cp = chi_prime(eps, g.node(j) + x0);
        double vp = v.v[j];
        for (int q = 1; q < p; ++q) vp *= v.v[j];
        lhs += cp * vp * v.v[j];
        quad += cp * (dv.v[j] * dv.v[j] + v.v[j] * v.v[j]);
        l2 += v.v[j] * v.v[j];
    }
    GnCheck out;
    out.lhs = std::abs(h * lhs);
    out.rhs = std::pow(1.0 + 2.0 * eps, 0.5 * (p - 1)) *
              std::pow(std::sqrt(h * l2), static_cast<double>(p - 1)) * h * quad;
    return out;
}

SobolevCheck weighted_sobolev_check(const Field& w, double a, double theta, double window) {
    if (!(a > 0.0) || a > std::sqrt(3.0))
        throw ConfigError("sobolev check: a must lie in (0, sqrt(3)]");
    if (theta < 0.0 || theta > 1.0) throw ConfigError("sobolev check: theta must lie in [0,1]");
    const Grid& g = w.grid;
    if (!(window > 0.0) || window > 0.5 * g.L)
        throw ConfigError("sobolev check: window must lie in (0, L/2]");
    const double h = g.dx();
    const Field dw = spectral_deriv(w, 1);
    double l2 = 0.0, dl2 = 0.0, l2a = 0.0, dl2a = 0.0, sup1 = 0.0, sup2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        l2 += w.v[j] * w.v[j];
        dl2 += dw.v[j] * dw.v[j];
        if (std::abs(x) > window) continue;
        const double ea = std::exp(a * x);
        l2a += ea * ea * w.v[j] * w.v[j];
        dl2a += ea * ea * dw.v[j] * dw.v[j];
        sup1 = std::max(sup1, ea * w.v[j] * w.v[j]);
        sup2 = std::max(sup2, ea * std::abs(w.v[j]));
    }
    l2 = std::sqrt(h * l2);
    dl2 = std::sqrt(h * dl2);
    l2a = std::sqrt(h * l2a);
    dl2a = std::sqrt(h * dl2a);
    SobolevCheck out;
    out.lhs_prod = sup1;
    out.rhs_prod = 2.0 * std::pow(l2, theta) * std::pow(dl2, 1.0 - theta) *
                   std::pow(dl2a, theta) * std::pow(l2a, 1.0 - theta);
    out.lhs_sq = sup2 * sup2;
    out.rhs_sq = 2.0 * l2a * std::sqrt(l2a * l2a + dl2a * dl2a);
    return out;
}

L2IdentityCheck l2_identity_check(const Field& u, const SolitonFamily& fam, double x,
                                  const Field& v, const Field& v1) {
    const Grid& g = u.grid;
    if (v.grid.n != g.n || v1.grid.n != g.n)
        throw ConfigError("l2 identity: mismatched grids");
    const double h = g.dx();
    const double xf = fold(x, g.L);
    double uu = 0.0, pp = 0.0, pv = 0.0, vv = 0.0, proj = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double ph = fam.profile_at(g.node(j) - xf);
        uu += u.v[j] * u.v[j];
        pp += ph * ph;
        pv += ph * v.v[j];
        vv += v.v[j] * v.v[j];
        proj += ph * (v.v[j] - v1.v[j]);
    }
    L2IdentityCheck out;
    const double scale = std::max(h * uu, 1e-300);
    out.mass_residual = std::abs(h * (uu - pp - 2.0 * pv - vv)) / scale;
    out.projection_residual = std::abs(h * proj);
    return out;
}

double coercivity_constant(double c, double R, int m) {
    if (!(c > 0.0)) throw ConfigError("coercivity: c must be positive");
    if (m < 16 || !(R > 0.0)) throw ConfigError("coercivity: bad collocation grid");
    const SolitonFamily fam(3, c);
    const double d = 2.0 * R / (m + 1);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) {
                const int k = i - j;
                D(i, j) = ((k & 1) ? -1.0 : 1.0) / (d * k);
            }
    Eigen::MatrixXd S = D.transpose() * D;
    Eigen::MatrixXd H = S;
    Eigen::MatrixXd C(m, 2);
    for (int i = 0; i < m; ++i) {
        const double y = -R + d * (i + 1);
        const double ph = fam.profile_at(y);
        S(i, i) += c - 9.0 * ph * ph;
        H(i, i) += 1.0;
        C(i, 0) = fam.zeta1_at(y);
        C(i, 1) = fam.zeta2_at(y);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd N = Q.rightCols(m - 2);
    Eigen::MatrixXd Sn = N.transpose() * S * N;
    Eigen::MatrixXd Hn = N.transpose() * H * N;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        Sn, Hn, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) throw ComputeError("coercivity: eigensolve failed");
    return ges.eigenvalues()(0);
}

QuadraticFormCheck quadratic_form_check(const SolitonFamily& fam, const Field& v2) {
    if (fam.p != 3) throw ConfigError("quadratic form check: requires p = 3");
    const Grid& g = v2.grid;
    const double h = g.dx();
    double s1 = 0.0, s2 = 0.0, nv = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double y = g.node(j);
        s1 += fam.zeta1_at(y) * v2.v[j];
        s2 += fam.zeta2_at(y) * v2.v[j];
        nv += v2.v[j] * v2.v[j];
    }
    const double scale = std::max(1.0, std::sqrt(h * nv));
    if (std::abs(h * s1) > 1e-6 * scale || std::abs(h * s2) > 1e-6 * scale)
        throw ConfigError("quadratic form check: v2 violates the kernel orthogonality");
    const Field dv = spectral_deriv(v2, 1);
    double val = 0.0, h1 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double ph = fam.profile_at(g.node(j));
        val += dv.v[j] * dv.v[j] + (fam.c - 9.0 * ph * ph) * v2.v[j] * v2.v[j];
        h1 += dv.v[j] * dv.v[j] + v2.v[j] * v2.v[j];
    }
    QuadraticFormCheck out;
    out.value = h * val;
    out.nu_hat = coercivity_constant(fam.c);
    out.lower_bound = out.nu_hat * h * h1;
    return out;
}

double h1_growth_ratio(const Trajectory& traj) {
    if (traj.states.empty()) throw ConfigError("h1 growth: empty trajectory");
    const Field d0 = spectral_deriv(traj.states.front(), 1);
    const double n0 = norm_l2(traj.states.front());
    const double denom = norm_l2(d0) + n0 * n0 * n0;
    if (denom == 0.0) return 0.0;
    double sup = 0.0;
    for (const Field& w : traj.states)
        sup = std::max(sup, norm_l2(spectral_deriv(w, 1)));
    return sup / denom;
}

double tail_norm(const Field& u, const SolitonFamily& fam_plus, double x_t, double sigma,
                 double t) {
    if (!(sigma > 0.0) || sigma >= fam_plus.c)
        throw ConfigError("tail norm: sigma must lie in (0, c+)");
    if (t < 0.0) throw ConfigError("tail norm: t must be nonnegative");
    const Grid& g = u.grid;
    const double st = sigma * t;
    if (st >= 0.5 * g.L) throw ConfigError("tail norm: tail region left the domain");
    const double xf = fold(x_t, g.L);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        if (x < st) continue;
        const double r = u.v[j] - fam_plus.profile_at(x - xf);
        acc += r * r;
    }
    return std::sqrt(g.dx() * acc);
}

SuiteResult gn_suite(std::uint64_t seed, int fields_per_p) {
    const Grid g{2048, 200.0};
    Rng rng(seed);
    SuiteResult out;
    out.name = "localized-gn";
    out.seed = seed;
    for (int p = 1; p <= 3; ++p) {
        for (int i = 0; i < fields_per_p; ++i) {
            const Field v = random_band_limited(g, rng);
            const double x0 = rng.uniform(-20.0, 20.0);
            const GnCheck c = weighted_gn_check(v, 0.1, x0, p);
            if (c.rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, c.lhs / c.rhs);
        }
    }
    out.passed = std::isfinite(out.worst_ratio) && out.worst_ratio <= 1.0;
    return out;
}

SuiteResult sobolev_suite(std::uint64_t seed, int fields_per_a) {
    const Grid g{2048, 200.0};
    Rng rng(seed);
    SuiteResult out;
    out.name = "weighted-interpolation";
    out.seed = seed;
    const double as[3] = {0.3, 0.5, 0.7};
    const double thetas[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (double a : as) {
        for (int i = 0; i < fields_per_a; ++i) {
            Field w = random_band_limited(g, rng);
            // the e^{-(x/10)^2} envelope decays faster than any tested e^{ax}
            // weight grows, so the window-restricted norms see a decayed field
            for (std::size_t j = 0; j < g.n; ++j) {
                const double e = g.node(j) / 10.0;
                w.v[j] *= std::exp(-e * e);
            }
            for (double th : thetas) {
                const SobolevCheck c = weighted_sobolev_check(w, a, th);
                if (c.rhs_prod > 0.0)
                    out.worst_ratio = std::max(out.worst_ratio, c.lhs_prod / c.rhs_prod);
                if (c.rhs_sq > 0.0)
                    out.worst_ratio = std::max(out.worst_ratio, c.lhs_sq / c.rhs_sq);
            }
        }
    }
    out.passed = std::isfinite(out.worst_ratio) && out.worst_ratio <= 1.0;
    return out;
}

} // namespace solistab
