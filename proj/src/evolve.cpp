#include "solistab/evolve.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace solistab {

namespace {
constexpr double kBlowupThreshold = 1e6;
}

void EvolveConfig::validate(const Grid& g) const {
    if (p != 2 && p != 3) throw ConfigError("nonlinearity power must be 2 or 3");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (sample_every == 0) throw ConfigError("sample cadence must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("final time must be nonnegative");
    const double kmax = std::numbers::pi * static_cast<double>(g.n) / g.L;
    if (dt * kmax * kmax * kmax > 50.0)
        throw ConfigError("time step violates the stability guard dt*(max|k|)^3 <= 50");
}

std::pair<double, double> invariants(const Field& u, int p) {
    Field du = spectral_deriv(u, 1);
    double momentum = 0.0, energy = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        momentum += u[j] * u[j];
        const double up1 = p == 2 ? u[j] * u[j] * u[j] : u[j] * u[j] * u[j] * u[j];
        energy += 0.5 * du[j] * du[j] - 3.0 / (p + 1) * up1;
    }
    const double h = u.grid.dx();
    return {momentum * h, energy * h};
}

Stepper::Stepper(const Grid& g, const EvolveConfig& cfg) : g_(g), cfg_(cfg) {
    cfg_.validate(g_);
    const std::size_t nb = g_.n / 2 + 1;
    vhat_.assign(nb, 0.0);
    e_.resize(nb);
    e2_.resize(nb);
    ka_.resize(nb);
    kb_.resize(nb);
    kc_.resize(nb);
    kd_.resize(nb);
    tmp_.resize(nb);
    ikfac_im_.resize(nb);
    mask_.assign(nb, 1.0);
    real_buf_.resize(g_.n);
    spec_buf_.resize(nb);
    for (std::size_t m = 0; m < nb; ++m) {
        const double km = g_.k(m);
        const double th = km * km * km * cfg_.dt / 2.0; // e^{i k^3 dt/2}
        e_[m] = {std::cos(th), std::sin(th)};
        e2_[m] = e_[m] * e_[m];
        ikfac_im_[m] = -3.0 * km;
        // 2/3 rule: zero the top third of the retained bins.
        if (cfg_.dealias && 3 * m > g_.n) mask_[m] = 0.0;
    }
    ikfac_im_[nb - 1] = 0.0; // odd derivative has no Nyquist contribution
}

void Stepper::set_state(const Field& u) {
    if (u.grid != g_) throw ConfigError("state grid does not match stepper grid");
    vhat_ = to_spectrum(u);
    if (cfg_.dealias)
        for (std::size_t m = 0; m < vhat_.size(); ++m) vhat_[m] *= mask_[m];
}

Field Stepper::state() const { return from_spectrum(g_, vhat_); }

void Stepper::nonlinear(const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) {
    Field u = from_spectrum(g_, in);
    double peak = 0.0;
    for (std::size_t j = 0; j < g_.n; ++j) {
        const double x = u[j];
        peak = std::max(peak, std::abs(x));
        u[j] = cfg_.p == 2 ? x * x : x * x * x;
    }
    if (peak > kBlowupThreshold)
        throw ComputeError("numeric blow-up: max|u| exceeded 1e6 at t = " + std::to_string(t_));
    auto spec = to_spectrum(u);
    for (std::size_t m = 0; m < spec.size(); ++m) {
        // -3 i k * mask * spec
        const std::complex<double> s = spec[m] * mask_[m];
        out[m] = std::complex<double>(-ikfac_im_[m] * s.imag(), ikfac_im_[m] * s.real());
    }
}

void Stepper::advance() {
    const std::size_t nb = vhat_.size();
    const double dt = cfg_.dt;

    nonlinear(vhat_, ka_); // a = dt N(v)
    for (std::size_t m = 0; m < nb; ++m) {
        ka_[m] *= dt;
        tmp_[m] = e_[m] * (vhat_[m] + 0.5 * ka_[m]);
    }
    nonlinear(tmp_, kb_); // b = dt N(E(v + a/2))
    for (std::size_t m = 0; m < nb; ++m) {
        kb_[m] *= dt;
        tmp_[m] = e_[m] * vhat_[m] + 0.5 * kb_[m];
    }
    nonlinear(tmp_, kc_); // c = dt N(E v + b/2)
    for (std::size_t m = 0; m < nb; ++m) {
        kc_[m] *= dt;
        tmp_[m] = e2_[m] * vhat_[m] + e_[m] * kc_[m];
    }
    nonlinear(tmp_, kd_); // d = dt N(E2 v + E c)
    for (std::size_t m = 0; m < nb; ++m) {
        kd_[m] *= dt;
        vhat_[m] = e2_[m] * vhat_[m] +
                   (e2_[m] * ka_[m] + 2.0 * e_[m] * (kb_[m] + kc_[m]) + kd_[m]) / 6.0;
    }
    t_ += dt;
}

Field step(const Field& u, const EvolveConfig& cfg) {
    Stepper st(u.grid, cfg);
    st.set_state(u);
    st.advance();
    return st.state();
}

Trajectory evolve(const Field& u0, const EvolveConfig& cfg) {
    cfg.validate(u0.grid);
    Stepper st(u0.grid, cfg);
    st.set_state(u0);
    const auto nsteps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));

    Trajectory traj;
    auto record = [&](double t) {
        Field u = st.state();
        traj.times.push_back(t);
        traj.invariants_series.push_back(invariants(u, cfg.p));
        traj.states.push_back(std::move(u));
    };
    record(0.0);
    for (std::size_t k = 1; k <= nsteps; ++k) {
        st.advance();
        if (k % cfg.sample_every == 0 || k == nsteps)
            record(static_cast<double>(k) * cfg.dt);
    }
    return traj;
}

} // namespace solistab
