#include "solistab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace solistab {

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW plans are cached per transform size.  Plan creation is not
// thread-safe, executions via the new-array interface are.  Plans are created
// with FFTW_UNALIGNED so they may execute on any caller buffer.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

PlanPair& plans_for(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanPair p;
    std::vector<double> re(n);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                                 reinterpret_cast<fftw_complex*>(cx.data()), flags);
    p.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(cx.data()), re.data(), flags);
    return cache.emplace(n, p).first->second;
}

} // namespace

Grid::Grid(std::size_t n_, double L_) : n(n_), L(L_) {
    if (!power_of_two(n) || n < 16) throw ConfigError("grid size must be a power of two >= 16");
    if (!(L > 0.0)) throw ConfigError("grid length must be positive");
}

double Grid::k(std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / L;
}

Field::Field(const Grid& g, std::vector<double> vals) : grid(g), v(std::move(vals)) {
    if (v.size() != g.n) throw ConfigError("field length does not match grid");
}

std::vector<std::complex<double>> to_spectrum(const Field& u) {
    const std::size_t n = u.grid.n;
    std::vector<double> in(u.v); // r2c may not preserve input in all builds
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(plans_for(n).r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& c : out) c *= scale;
    return out;
}

Field from_spectrum(const Grid& g, const std::vector<std::complex<double>>& spec) {
    if (spec.size() != g.n / 2 + 1) throw ConfigError("spectrum length does not match grid");
    std::vector<std::complex<double>> in(spec); // 1d c2r destroys its input
    Field out(g);
    fftw_execute_dft_c2r(plans_for(g.n).c2r,
                         reinterpret_cast<fftw_complex*>(in.data()), out.v.data());
    return out;
}

Field spectral_deriv(const Field& u, int order) {
    if (order < 1 || order > 3) throw ConfigError("derivative order must be 1, 2 or 3");
    auto spec = to_spectrum(u);
    const std::size_t nb = spec.size();
    for (std::size_t m = 0; m < nb; ++m) {
        const double km = u.grid.k(m);
        std::complex<double> mult;
        switch (order) {
            case 1: mult = {0.0, km}; break;
            case 2: mult = {-km * km, 0.0}; break;
            default: mult = {0.0, -km * km * km}; break;
        }
        spec[m] *= mult;
    }
    if (order % 2 == 1) spec[nb - 1] = 0.0; // Nyquist has no well-defined sign
    return from_spectrum(u.grid, spec);
}

Field translate(const Field& u, double s) {
    auto spec = to_spectrum(u);
    const std::size_t nb = spec.size();
    const double frac_unit = s / u.grid.L;
    for (std::size_t m = 0; m < nb; ++m) {
        // Reduce m*s/L to its fractional part first so that shifts by exact
        // multiples of L give an identically-1 phase factor.
        const double frac = std::remainder(static_cast<double>(m) * frac_unit, 1.0);
        const double th = -2.0 * std::numbers::pi * frac;
        if (m + 1 == nb) {
            spec[m] *= std::cos(th); // keep the Nyquist coefficient real
        } else {
            spec[m] *= std::complex<double>(std::cos(th), std::sin(th));
        }
    }
    return from_spectrum(u.grid, spec);
}

double inner(const Field& f, const Field& g) {
    if (f.grid != g.grid) throw ConfigError("inner product requires matching grids");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
    return s * f.grid.dx();
}

namespace {

void check_window(const Grid& g, const WeightSpec& w) {
    if (!(w.window > 0.0) || w.window > g.L / 2)
        throw ConfigError("weight window must satisfy 0 < window <= L/2");
    if (w.window_right > w.window)
        throw ConfigError("right window cap cannot exceed the window");
}

double right_edge(const WeightSpec& w) {
    return (w.window_right >= 0.0) ? w.window_right : w.window;
}

double weighted_l2_sq(const Field& u, const WeightSpec& w) {
    check_window(u.grid, w);
    const double hi = right_edge(w);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double y = u.grid.node(j) - w.center;
        if (y < -w.window || y > hi) continue;
        const double q = (w.kind == WeightKind::OneSided)
                             ? std::exp(2.0 * w.a * y)
                             : std::exp(-2.0 * w.a * std::abs(y));
        s += q * u[j] * u[j];
    }
    return s * u.grid.dx();
}

double weighted_l1(const Field& u, const WeightSpec& w) {
    check_window(u.grid, w);
    const double hi = right_edge(w);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double y = u.grid.node(j) - w.center;
        if (y < -w.window || y > hi) continue;
        const double q = (w.kind == WeightKind::OneSided)
                             ? std::exp(w.a * y)
                             : std::exp(-2.0 * w.a * std::abs(y));
        s += q * std::abs(u[j]);
    }
    return s * u.grid.dx();
}

} // namespace

double norm(const Field& u, const NormSpec& spec) {
    switch (spec.kind) {
        case NormKind::L2:
            return std::sqrt(inner(u, u));
        case NormKind::H1: {
            Field du = spectral_deriv(u, 1);
            return std::sqrt(inner(u, u) + inner(du, du));
        }
        case NormKind::L1: {
            double s = 0.0;
            for (double x : u.v) s += std::abs(x);
            return s * u.grid.dx();
        }
        case NormKind::L2a:
            return std::sqrt(weighted_l2_sq(u, spec.weight));
        case NormKind::H1a: {
            Field du = spectral_deriv(u, 1);
            return std::sqrt(weighted_l2_sq(u, spec.weight) + weighted_l2_sq(du, spec.weight));
        }
        case NormKind::L1a:
            return weighted_l1(u, spec.weight);
        case NormKind::W: {
            WeightSpec w = spec.weight;
            w.kind = WeightKind::TwoSided;
            return std::sqrt(weighted_l2_sq(u, w));
        }
        case NormKind::W1: {
            WeightSpec w = spec.weight;
            w.kind = WeightKind::TwoSided;
            Field du = spectral_deriv(u, 1);
            return std::sqrt(weighted_l2_sq(u, w) + weighted_l2_sq(du, w));
        }
    }
    throw ConfigError("unknown norm kind");
}

double pair_kernel(const Field& f, double center, double window,
                   const std::vector<double>& kernel_at_offset) {
    if (kernel_at_offset.size() != f.size())
        throw ConfigError("kernel sample length does not match grid");
    if (!(window > 0.0) || window > f.grid.L / 2)
        throw ConfigError("pairing window must satisfy 0 < window <= L/2");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double y = f.grid.node(j) - center;
        if (std::abs(y) > window) continue;
        s += f[j] * kernel_at_offset[j];
    }
    return s * f.grid.dx();
}

} // namespace solistab
