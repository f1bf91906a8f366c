#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "solistab/evolve.hpp"
#include "solistab/grid.hpp"
#include "solistab/soliton.hpp"

namespace solistab {

// Smooth step chi(x) = 1 + tanh(eps x) and derivatives.  Clean closed forms:
// chi' = eps sech^2, chi'' = -2 eps^2 sech^2 tanh, chi''' = -2 eps^3 sech^2
// (3 sech^2 - 2), so the comparison bounds below hold pointwise.
double chi(double eps, double x);
double chi_prime(double eps, double x);
double chi_pp(double eps, double x);
double chi_ppp(double eps, double x);

// Pointwise bounds 0 < chi' < 2 eps chi, |chi''| <= 2 eps chi', and
// |chi'''| <= 4 eps^2 chi', sampled on 1e4 points of [-50, 50], plus the
// asymptotic limits at x = +-50/eps and the exact value chi'(0) = eps.
// worst_* are max ratios of the bounded quantity to its bound.
struct ChiReport {
    bool ok = false;
    double worst_upper = 0.0;  // chi' / (2 eps chi)
    double worst_second = 0.0; // |chi''| / (2 eps chi')
    double worst_third = 0.0;  // |chi'''| / (4 eps^2 chi')
    double min_prime = 0.0;    // positivity witness
    double limit_err = 0.0;    // |chi(-50/eps)| and |chi(50/eps) - 2|
    double prime0_err = 0.0;   // |chi'(0) - eps|
};
ChiReport chi_properties(double eps);

// Moving reference path for the virial window.  Linear uses x = c1 t;
// Samples takes a measured path (fitted center or its integrated-rate
// variant) aligned index-for-index with the trajectory samples.
enum class PathKind { Linear, Samples };

struct VirialConfig {
    double eps = 0.05; // in (0, 0.1]
    double x0 = 0.0;
    double c1 = 0.5;   // > 0; also the required lower bound on path speed
    PathKind path = PathKind::Linear;
    std::vector<double> path_samples;
    void validate() const;
};

// front[i]   = int chi(x - path(t_i) - x0) w(t_i)^2,
// dissipation[i] = nu int_0^{t_i} int chi'(x - path(s) - x0)
//                  ((dx w)^2 + w^2) dx ds,  nu = min(3, c1)/2,
// with the time integral by the trapezoid rule at the sample cadence.
// ledger_max is max_i (front[i] + dissipation[i] - front[0]); the series
// is rejected (ComputeError) when it exceeds 1e-6 * front[0], which signals
// eps or the data too large for the monotone regime.
// Preconditions: ||w(0)||_{L2} <= 0.1, and path increments of at least
// c1 * dt between consecutive samples.
struct VirialSeries {
    std::vector<double> times;
    std::vector<double> front;
    std::vector<double> dissipation;
    double ledger_max = 0.0;
    double nu = 0.0;
};
VirialSeries virial_series(const Trajectory& traj, const VirialConfig& cfg);

// Localized Gagliardo-Nirenberg comparison:
//   lhs = |int chi'(x + x0) v^{p+1}|
//   rhs = (1+2eps)^{(p-1)/2} ||v||_{L2}^{p-1} int chi'(x + x0)((dx v)^2 + v^2)
// The inequality lhs <= rhs holds for p in {1,2,3}.
struct GnCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};
GnCheck weighted_gn_check(const Field& v, double eps, double x0, int p);

// Weighted interpolation comparisons with the e^{a x} one-sided weight,
// restricted to |x| <= window (the fields must decay inside the window):
//   lhs_prod = sup e^{a x} w^2
//   rhs_prod = 2 ||w||^theta ||dx w||^{1-theta} ||dx w||_a^theta ||w||_a^{1-theta}
//   lhs_sq   = (sup e^{a x} |w|)^2
//   rhs_sq   = 2 ||w||_{L2_a} ||w||_{H1_a}
// The factor 2 for rhs_sq needs a <= sqrt(3) (enforced).
struct SobolevCheck {
    double lhs_prod = 0.0;
    double rhs_prod = 0.0;
    double lhs_sq = 0.0;
    double rhs_sq = 0.0;
};
SobolevCheck weighted_sobolev_check(const Field& w, double a, double theta,
                                    double window = 50.0);

// Mass bookkeeping for u = phi_c(. - x) + v and the phi-projection of
// v - v1.  mass_residual is relative:
//   | ||u||^2 - ||phi_c||^2 - 2 <phi_c(.-x), v> - ||v||^2 | / ||u||^2,
// projection_residual is |<phi_c(.-x), v - v1>|, which picks up any
// mis-fitted speed at the 1e-6 level already for c off by 1e-3.
struct L2IdentityCheck {
    double mass_residual = 0.0;
    double projection_residual = 0.0;
};
L2IdentityCheck l2_identity_check(const Field& u, const SolitonFamily& fam,
                                  double x, const Field& v, const Field& v1);

// Quadratic form value = int ((dx v2)^2 + c v2^2 - 9 phi^2 v2^2) for p = 3,
// together with the certified lower bound nu_hat ||v2||_{H1}^2.  nu_hat is
// the smallest eigenvalue of the form restricted to the orthogonal
// complement of {zeta1, zeta2}, computed by a dense constrained eigensolve
// on the sinc collocation grid.  v2 must satisfy the orthogonality
// constraints to 1e-6 (ConfigError otherwise; e.g. v2 = phi' is rejected).
struct QuadraticFormCheck {
    double value = 0.0;
    double nu_hat = 0.0;
    double lower_bound = 0.0;
};
QuadraticFormCheck quadratic_form_check(const SolitonFamily& fam, const Field& v2);

// The constrained coercivity constant itself (p = 3 families), exposed so
// refinement stability can be checked directly.
double coercivity_constant(double c, double R = 40.0, int m = 800);

// sup_t ||dx v(t)|| / (||dx v(0)|| + ||v(0)||^3) over the sampled states of
// a free-flow trajectory; the denominator is the scale the cubic flow
// preserves for small data.
double h1_growth_ratio(const Trajectory& traj);

// L2 norm of u - phi_{c+}(. - x_t) over the tail region x >= sigma t.
// Requires 0 < sigma < c+ and sigma t inside the domain.
double tail_norm(const Field& u, const SolitonFamily& fam_plus, double x_t,
                 double sigma, double t);

struct SuiteResult {
    std::string name;
    bool passed = false;
    double worst_ratio = 0.0;
    std::uint64_t seed = 0;
};

// Randomized suites on the 2048-point, length-200 grid: band-limited unit
// fields for the localized GN bound (p in {1,2,3}, eps = 0.1, random x0),
// and envelope-damped fields for the weighted interpolation bounds
// (a in {0.3, 0.5, 0.7}, theta in {0, .25, .5, .75, 1}).
SuiteResult gn_suite(std::uint64_t seed, int fields_per_p = 100);
SuiteResult sobolev_suite(std::uint64_t seed, int fields_per_a = 100);

} // namespace solistab
