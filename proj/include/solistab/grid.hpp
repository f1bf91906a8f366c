#pragma once
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "solistab/errors.hpp"

namespace solistab {

// Uniform periodic grid on [-L/2, L/2) with n nodes, n a power of two.
struct Grid {
    std::size_t n = 0;
    double L = 0.0;

    Grid() = default;
    Grid(std::size_t n_, double L_);

    double dx() const { return L / static_cast<double>(n); }
    double node(std::size_t j) const { return -L / 2 + dx() * static_cast<double>(j); }
    // Wavenumber of real-spectrum bin m, m in [0, n/2].
    double k(std::size_t m) const;

    bool operator==(const Grid& o) const { return n == o.n && L == o.L; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

// Real-valued sampled field on a Grid.  Treated as immutable by all module
// operations: every operation returns a fresh Field.
struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(g.n, 0.0) {}
    Field(const Grid& g, std::vector<double> vals);

    double& operator[](std::size_t j) { return v[j]; }
    double operator[](std::size_t j) const { return v[j]; }
    std::size_t size() const { return v.size(); }
};

enum class WeightKind {
    OneSided, // e^{a y}, y measured from center
    TwoSided, // e^{-2a|y|} applied to the squared integrand (W norm)
};

// Exponential weight with a hard window.  The window is applied in plain
// lab-frame coordinates: node x_j participates iff |x_j - center| <= window.
// The difference is never reduced modulo L, so a window that sticks out past
// a domain edge is clipped there rather than wrapping to the far side.  This
// keeps e^{ay} from amplifying content that is physically far behind the
// window center but adjacent to it across the periodic seam.
struct WeightSpec {
    double a = 0.5;
    double center = 0.0;
    WeightKind kind = WeightKind::OneSided;
    double window = 0.0; // required: 0 < window <= L/2
    // Optional tighter cutoff on the y > 0 side (-1 means use window).  For
    // the one-sided weight the integrand ahead of the center is the product
    // of an exponentially growing factor and an exponentially decaying field,
    // so past a few e-foldings the discrete integrand is pure solver noise;
    // capping the right edge keeps that noise out of the norm.
    double window_right = -1.0;

    WeightSpec() = default;
    WeightSpec(double a_, double center_, WeightKind kind_, double window_,
               double window_right_ = -1.0)
        : a(a_), center(center_), kind(kind_), window(window_), window_right(window_right_) {}
};

enum class NormKind { L2, H1, L1, L2a, H1a, L1a, W, W1 };

struct NormSpec {
    NormKind kind = NormKind::L2;
    WeightSpec weight; // used by the weighted kinds only
};

// --- FFT-backed spectral operations (all pure) ---------------------------

// Real-to-complex spectrum, scaled so that from_spectrum(to_spectrum(u)) == u.
std::vector<std::complex<double>> to_spectrum(const Field& u);
Field from_spectrum(const Grid& g, const std::vector<std::complex<double>>& spec);

// order in {1,2,3}; Nyquist bin zeroed for odd orders.
Field spectral_deriv(const Field& u, int order);

// translate(u, s)(x) = u(x - s), implemented as a spectral phase shift.
Field translate(const Field& u, double s);

// Rectangle-rule inner product h * sum(f*g); grids must match.
double inner(const Field& f, const Field& g);

double norm(const Field& u, const NormSpec& spec);
inline double norm_l2(const Field& u) { return norm(u, NormSpec{NormKind::L2, {}}); }

// Weighted pairing against an analytically evaluated kernel: h * sum over the
// window of f(x_j) * kernel(x_j - center).  Window semantics as in WeightSpec.
double pair_kernel(const Field& f, double center, double window,
                   const std::vector<double>& kernel_at_offset);

// Convenience: evaluate kern(y) at y = x_j - center for all j (no windowing).
template <class F>
std::vector<double> sample_offset(const Grid& g, double center, F&& kern) {
    std::vector<double> out(g.n);
    for (std::size_t j = 0; j < g.n; ++j) out[j] = kern(g.node(j) - center);
    return out;
}

} // namespace solistab
