#pragma once
#include <complex>
#include <cstddef>
#include <vector>

#include "solistab/grid.hpp"

namespace solistab {

// Time integration of dt(u) + dx^3(u) + 3 dx(u^p) = 0 on the periodic grid.
struct EvolveConfig {
    int p = 2;
    double dt = 1e-3;
    double t_end = 1.0;
    bool dealias = true;         // 2/3-rule mask on the nonlinear product
    std::size_t sample_every = 1; // output cadence in steps

    // dt > 0 and dt * (max|k|)^3 <= 50.  The linear part is integrated
    // exactly; the guard only bounds the error of the nonlinear substeps.
    void validate(const Grid& g) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<std::pair<double, double>> invariants_series; // (momentum, energy)
};

// momentum = int u^2, energy = int( (1/2)(dx u)^2 - 3/(p+1) u^{p+1} ).
std::pair<double, double> invariants(const Field& u, int p);

// Integrating-factor RK4: the dispersive factor e^{i k^3 dt} is exact, the
// nonlinear term -3 dx(u^p) is evaluated pseudospectrally.
class Stepper {
  public:
    Stepper(const Grid& g, const EvolveConfig& cfg);

    void set_state(const Field& u);
    Field state() const;
    const std::vector<std::complex<double>>& spectrum() const { return vhat_; }
    double time() const { return t_; }

    // One IF-RK4 step; throws ComputeError when max|u| exceeds 1e6.
    void advance();

  private:
    void nonlinear(const std::vector<std::complex<double>>& in,
                   std::vector<std::complex<double>>& out);

    Grid g_;
    EvolveConfig cfg_;
    double t_ = 0.0;
    std::vector<std::complex<double>> vhat_, e_, e2_;
    std::vector<std::complex<double>> ka_, kb_, kc_, kd_, tmp_;
    std::vector<double> ikfac_im_; // -3k, imaginary part of the -3ik multiplier
    std::vector<double> mask_;
    std::vector<double> real_buf_;
    std::vector<std::complex<double>> spec_buf_;
};

Field step(const Field& u, const EvolveConfig& cfg);

// Iterated step() with sampling every cfg.sample_every steps (sample 0 and
// the final step always included); invariants recorded per sample.
Trajectory evolve(const Field& u0, const EvolveConfig& cfg);

} // namespace solistab
