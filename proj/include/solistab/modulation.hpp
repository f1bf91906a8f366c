#pragma once
#include <vector>

#include "solistab/evolve.hpp"
#include "solistab/grid.hpp"
#include "solistab/soliton.hpp"

namespace solistab {

// Decomposition of a field w near the soliton family: w = phi_c(. - x) + v2
// with <v2, zeta^i_c(. - x)> = 0 for i = 1, 2.  All pairings evaluate the
// dual kernels analytically at the unwrapped offset y = x_j - x and apply a
// hard window |y| <= window clipped at the domain edges (see WeightSpec).
struct FitResult {
    double x = 0.0;
    double c = 0.0;
    Field v2;            // co-moving frame remainder: w(. + x) - phi_c
    double residual = 0.0;
    int iters = 0;
};

// Quasi-Newton with the leading-order Jacobian diag(1, -1) and a finite-
// difference refresh every 5 iterations.  Throws ComputeError when the speed
// iterate leaves (0, inf) or the residual fails to reach tol.
FitResult fit(const Field& w, int p, double x_guess, double c_guess,
              double window = -1.0, double tol = 1e-10, int max_iters = 25);

// Internal form of the fit that skips building the co-moving v2 field.
struct FitScalars {
    double x = 0.0, c = 0.0, residual = 0.0;
    double g1 = 0.0, g2 = 0.0; // final pairing components <r, zeta^i>
    int iters = 0;
};
FitScalars fit_scalars(const Field& w, int p, double x_guess, double c_guess,
                       double window = -1.0, double tol = 1e-10, int max_iters = 25);

struct SplitParts {
    Field v;  // u(. + x) - phi_c
    Field v1; // v1_lab(. + x)
    Field v2; // v - v1
};
// Co-moving split of u = phi_c(. - x) + v1_lab + v2_lab given the free
// perturbation v1_lab; translations are spectral.
SplitParts split(const Field& u, const Field& v1_lab, const SolitonFamily& fam, double x);

// Quadratic (p=2) / cubic (p=3) coupling terms of the remainder equation,
// evaluated pointwise from closed forms with phi centered at `center`:
//   p=2:  n1 = 6 phi v1,              n2 = 3 v2 (2 v1 + v2)
//   p=3:  n1 = 9 phi^2 v1 + 9 phi v1^2,
//         n21 = 9 phi v2 (2 v1 + v2), n22 = 3 v2 (3 v1^2 + 3 v1 v2 + v2^2)
// and total = n1 + n2 with n2 = n21 + n22 for p=3.  For p=2 the n21/n22
// fields are zero.
struct NonlinearTerms {
    Field n1, n2, n21, n22, total;
};
NonlinearTerms nonlinear_terms(const SolitonFamily& fam, const Field& v1, const Field& v2,
                               double center = 0.0);

// The 2x2 secular system A (c - xdot, cdot)^T = (<N, dy zeta^i>)_i with
// A = I - [<v2, dy zeta^i>, <v2, dc zeta^i>]_i; dc zeta^i by centered finite
// differences of the closed-form kernels in c.
struct ModulationRhs {
    double xdot_minus_c = 0.0;
    double cdot = 0.0;
    double gamma_rate_minus_x = 0.0; // p=3: (1,0) A^{-1} <N22, dy zeta^i>; 0 for p=2
    double cond = 0.0;               // 1-norm condition estimate of A
};
ModulationRhs modulation_rhs(const SolitonFamily& fam, const Field& v1, const Field& v2,
                             double center = 0.0, double window = -1.0);

// c + theta1(c) <v1, phi_c(. - center)>; drift of this quantity is quadratic
// in the perturbation while c itself drifts linearly.
double refined_speed(const SolitonFamily& fam, const Field& v1, double center = 0.0,
                     double window = -1.0);

// Rate gamma' - x' of the secondary phase (p=3 only; ConfigError otherwise).
// gamma collects the part of the phase driven by N1 + N21, so the difference
// from x is cubic in the perturbation.
double gamma_step(const SolitonFamily& fam, const Field& v1, const Field& v2,
                  double center = 0.0, double window = -1.0);

struct TrackSample {
    double t = 0.0;
    double c = 0.0;
    double x = 0.0;     // unwrapped: continued across the periodic seam
    double gamma = 0.0; // = x for p=2
    double refined_c = 0.0;
    double xdot_minus_c = 0.0;
    double cdot = 0.0;
    double gamma_rate_minus_x = 0.0;
    double fit_residual = 0.0;
    int fit_iters = 0;
    double orth1 = 0.0, orth2 = 0.0; // <v2, zeta^i> re-measured after the fit
    double v1_l2 = 0.0, v1_w = 0.0, v1_w1 = 0.0;
    double v2_l2a = 0.0, v2_h1a = 0.0;
    double v_l2 = 0.0;
    double orbital_err = 0.0; // ||u - phi_{c0}(. - x)||_L2, fixed reference speed
    double l2_res1 = 0.0;     // relative defect of the mass expansion identity
    double l2_res2 = 0.0;     // |<phi_c(. - x), v - v1>|
};

struct ModulationTrack {
    int p = 2;
    double c0 = 1.0;
    double a = 0.4;
    std::vector<TrackSample> samples;
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots; // coarse copies of u for tail-norm post-passes
    double c_plus = 0.0;          // refined speed at the final sample
};

struct MQuantities {
    double m1 = 0.0;     // sup ||v1||_L2 + L2-in-time of ||v1||_W1
    double m2 = 0.0;     // sup ||v2||_L2a + L2-in-time of ||v2||_L2a (p=2) / ||v2||_H1a (p=3)
    double mv = 0.0;     // sup ||v||_L2^2
    double mc = 0.0;     // sup |c - c0|
    double mx = 0.0;     // sup |xdot - c|
    double mgamma = 0.0; // sup |gammadot - c| (p=3)
    double mtotal = 0.0; // m1 + m2 + mv + mc + (mx for p=2, mgamma for p=3)
};
MQuantities m_quantities(const ModulationTrack& track);

struct TrackOptions {
    double a = 0.4;            // weight rate for the W / L2a norm family
    double window = -1.0;      // pairing window; default L/4
    int snapshot_stride = 10;  // samples between stored copies of u
    double fit_tol = 1e-10;
    int fit_max_iters = 25;
};

// Evolve u = phi_{c0} + v0 and the free perturbation v1 (same equation, data
// v0) in lockstep and refit the soliton parameters at every sample.  The fit
// is warm-started from the previous sample and x is accumulated without
// wrapping.  One-sided weighted norms cap their right window at 4/a: beyond
// that the true remainder is below the integrator noise floor, which the
// growing weight would otherwise amplify into the norm.
ModulationTrack run_track(int p, double c0, const Field& v0, const EvolveConfig& cfg,
                          const TrackOptions& opt = {});

} // namespace solistab
