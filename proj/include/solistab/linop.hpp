#pragma once
#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "solistab/grid.hpp"
#include "solistab/soliton.hpp"

namespace solistab {

// The linearized operator L_c = d/dy (d^2/dy^2 - c + f'(phi_c)) conjugated by
// the exponential weight, L_c^(a) = e^{ay} L_c e^{-ay}, discretized on the
// truncated line [-R, R] by sinc (Whittaker cardinal) collocation at the m
// interior nodes y_i = -R + i*delta, delta = 2R/(m+1).  Decay at the ends is
// realized by zero extension of the cardinal basis.
//
// Sinc collocation is used instead of low-order finite differences: the
// generalized kernel of L_c^(a) is a 2x2 Jordan block, and the quoted
// zero-cluster tolerance (|lambda| < 1e-6) requires the discretization error
// of the pair to sit below ~1e-12 since a Jordan pair splits like the square
// root of the perturbation.  Centered 4th-order differences split the pair to
// ~5e-5 and admit a spurious real eigenvalue; the sinc matrix together with
// the extended-precision eigensolve keeps the cluster at ~5e-8.
struct WeightedOperator {
    SolitonFamily fam;
    double a = 0.5;
    double R = 40.0;
    std::size_t m = 800;
    Eigen::MatrixXd matrix;

    double delta() const { return 2.0 * R / static_cast<double>(m + 1); }
    double node(std::size_t i) const { return -R + delta() * static_cast<double>(i + 1); }
};

// Requires 0 < a < sqrt(c).  Assembly is deterministic.
WeightedOperator make_weighted_operator(const SolitonFamily& fam, double a,
                                        double R = 40.0, std::size_t m = 800);

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<std::complex<double>> zero_cluster; // |lambda| < tol_zero
    double gap = 0.0;             // min Re over eigenvalues outside the cluster
    double essential_floor = 0.0; // a (c - a^2)
    double tol_zero = 1e-6;
};

// lambda(xi) = a(c-a^2) + 3 a xi^2 - i (xi^3 + (c - 3a^2) xi): the essential
// spectrum of the conjugated operator on the full line.
std::complex<double> essential_spectrum_curve(double c, double a, double xi);

// Dense eigendecomposition.  Pre: m >= 400, R >= 30/sqrt(c).
SpectrumReport eigen_spectrum(const WeightedOperator& op, double tol_zero = 1e-6);

// Spectral projection Q_c = I - P_c on the periodic grid,
// P_c v = <v,zeta1> xi1 + <v,zeta2> xi2 with windowed pairings.
Field project_Q(const Field& v, const KernelBasis& basis);

// --- weighted-coordinate states on the collocation nodes ------------------

using ColVec = Eigen::VectorXd;

// Samples of e^{ay} xi_i and e^{-ay} zeta_i on the collocation nodes; the
// spectral projection of the conjugated operator uses these directly.
struct CollocationBasis {
    ColVec xi1w, xi2w; // e^{ay} xi_i(y)
    ColVec z1, z2;     // e^{-ay} zeta_i(y)
};
CollocationBasis collocation_basis(const WeightedOperator& op);

// Q in weighted coordinates: w - <w,z1> xi1w - <w,z2> xi2w (Delta-weighted
// dot products).
ColVec apply_Q(const WeightedOperator& op, const CollocationBasis& cb, const ColVec& w);

// Evaluate a periodic-grid field at an arbitrary point by summing its Fourier
// series (exact for band-limited data).
double eval_field_at(const Field& f, double y);

// w(t) = exp(-t * matrix) * w0 by scaling-and-squaring.  t >= 0.
ColVec propagate(const WeightedOperator& op, const ColVec& w0, double t);

struct FitReport {
    double rate = 0.0;     // fitted exponent
    double residual = 0.0; // rms residual of the least-squares fit
    double t_lo = 0.0, t_hi = 0.0;
};

// Least-squares slope of log ||e^{-tA} w0||_{L2_a} over the tail [T/2, T].
// f lives on the periodic grid; it is projected through Q first when
// `project` is set.  Errors on a tail that grows beyond fit noise.
double decay_rate(const WeightedOperator& op, const Field& f, double T,
                  bool project = true, FitReport* report = nullptr);

enum class SourceMode { L1a, L2a };

// Fitted algebraic blow-up exponent alpha in
//   || d^j/dy^j e^{-tL} Q f ||_{L2_a} ~ t^{-alpha}  as t -> 0+,
// measured on a geometric t-ladder t = 1e-3 * 2^k.
//
// L1a mode: f must be a sharply localized bump; it is normalized in L1_a and
// fitted over t in [1e-3, 0.1].  Expected exponents (2j+1)/4.
//
// L2a mode (j=1 only): measured as the operator norm sigma_max(M E(t) Q) by
// power iteration, fitted over t in [1e-3, 1.25e-2] only: past that point the
// norm of the oblique projector Q inflates the prefactor while the maximizing
// mode migrates to low frequency, flattening the apparent slope without
// changing the t->0 exponent.  Expected exponent 1/2.
double smoothing_exponent(const WeightedOperator& op, const Field& f, int j,
                          SourceMode mode, FitReport* report = nullptr);

// Largest singular value of (i*lambda*I + A)^{-1} Q (Q omitted when project
// is false; then the kernel makes lambda = 0 near-singular).
double resolvent_norm(const WeightedOperator& op, std::complex<double> lambda,
                      bool project = true);

// || sum_j e^{-(t-s_j)A} Q g(s_j) ds ||_{L2(0,T;H2_a)} / ||g||_{L2(0,T;L2_a)}
// via trapezoid Duhamel summation on a uniform time grid.
double local_smoothing_gain(const WeightedOperator& op, const std::vector<ColVec>& g,
                            double T);

// Default operator grid for the short-time smoothing measurement: the bump
// width (2 cells) must stay well under sqrt(6 a t_min).
inline constexpr double kSmoothingR = 10.0;
inline constexpr std::size_t kSmoothingM = 1280;

} // namespace solistab
