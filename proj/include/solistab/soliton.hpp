#pragma once
#include <functional>

#include "solistab/grid.hpp"

namespace solistab {

// Solitary-wave family phi_c(y) = alpha * sech^{2/(p-1)}(beta*y) for the
// gKdV nonlinearity f(u) = 3u^p, p in {2,3}, traveling at speed c > 0.
// phi_c solves phi'' - c*phi + 3*phi^p = 0.
struct SolitonFamily {
    int p = 2;
    double c = 1.0;
    double alpha = 0.0;
    double beta = 0.0;

    SolitonFamily(int p_, double c_);

    double f(double u) const;      // 3 u^p
    double fprime(double u) const; // 3p u^{p-1}

    // Pointwise evaluators in the co-moving coordinate y.
    double profile_at(double y) const;      // phi_c(y)
    double dprofile_at(double y) const;     // phi_c'(y)
    double dc_profile_at(double y) const;   // d/dc phi_c(y)
    double dc_antideriv_at(double y) const; // int_{-inf}^y d/dc phi_c
    double zeta1_at(double y) const;        // -theta1*A(y) + theta2*phi(y)
    double zeta2_at(double y) const;        // theta1*phi(y)
    double dzeta1_at(double y) const;       // -theta1*dcphi + theta2*phi'
    double dzeta2_at(double y) const;       // theta1*phi'

    // Closed-form normalization constants of the dual kernel pair.
    double theta1_exact() const;
    double theta2_exact() const;

    double l2norm_sq_exact() const;     // ||phi_c||_{L2}^2
    double mass_integral_exact() const; // int phi_c
};

Field profile(const SolitonFamily& fam, const Grid& g, double center = 0.0);
Field dc_profile(const SolitonFamily& fam, const Grid& g, double center = 0.0);

// sup-norm of phi'' - c*phi + 3*phi^p on the grid (derivatives spectral).
double ode_residual(const SolitonFamily& fam, const Grid& g);

// Generalized-kernel pair xi1 = phi', xi2 = d/dc phi of the linearized
// operator L_c = d/dy (d^2/dy^2 - c + f'(phi_c)), together with the dual pair
// zeta1, zeta2 of the adjoint, normalized so <xi_i, zeta_j> = delta_ij.
struct KernelBasis {
    SolitonFamily fam;
    double center = 0.0;
    Field xi1, xi2, zeta1, zeta2;
    double theta1 = 0.0;
    double theta2 = 0.0;
};

// Precondition: center at least L/4 away from both domain edges, so the
// profile and its c-derivative are below 1e-12 at the left edge where the
// antiderivative defining zeta1 is pinned to zero.
KernelBasis kernel_basis(const SolitonFamily& fam, const Grid& g, double center = 0.0);

struct KernelCheck {
    double res_xi1 = 0.0;      // sup |L xi1|
    double res_xi2 = 0.0;      // sup |L xi2 - xi1|
    double res_zeta1 = 0.0;    // sup |L* zeta1 - zeta2| over |y-center| <= L/4
    double res_zeta2 = 0.0;    // sup |L* zeta2|        over |y-center| <= L/4
};

// linop_apply must apply L_c on the periodic grid.  The adjoint residuals are
// evaluated from the analytic derivatives of zeta1, zeta2 (their raw grid
// samples are not periodic for p=2, so spectral differentiation of the stored
// fields would ring).
KernelCheck check_generalized_kernel(const SolitonFamily& fam, const KernelBasis& basis,
                                     const std::function<Field(const Field&)>& linop_apply);

// Convenience: L_c acting spectrally on the periodic grid with phi centered
// as in the basis.
Field apply_linearized(const SolitonFamily& fam, const Field& v, double center = 0.0);

} // namespace solistab
