#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "solistab/grid.hpp"

namespace solistab {

// Deterministic random source.  std::mt19937_64 has a fixed specification,
// and the uniform/normal maps below avoid std::uniform_real_distribution /
// std::normal_distribution, whose outputs may differ between standard-library
// implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; consumes two uniforms per pair, caches the second value.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Random band-limited field: modes 1..m_max with Gaussian spectral decay and
// unit L2 norm.  m_max defaults to n/8 so pointwise products up to fourth
// powers stay alias-free under the rectangle rule.
inline Field random_band_limited(const Grid& g, Rng& rng, std::size_t m_max = 0) {
    if (m_max == 0) m_max = g.n / 8;
    std::vector<std::complex<double>> spec(g.n / 2 + 1, 0.0);
    for (std::size_t m = 1; m < m_max; ++m) {
        const double amp = std::exp(-std::pow(static_cast<double>(m) / (0.4 * static_cast<double>(m_max)), 2));
        spec[m] = amp * std::complex<double>(rng.normal(), rng.normal());
    }
    Field f = from_spectrum(g, spec);
    const double nl2 = norm_l2(f);
    if (nl2 > 0.0)
        for (auto& x : f.v) x /= nl2;
    return f;
}

} // namespace solistab
