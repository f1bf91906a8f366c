#include "doctest.h"

#include <cmath>
#include <numbers>

#include "solistab/grid.hpp"
#include "solistab/rng.hpp"

using namespace solistab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid geometry and wavenumbers") {
    Grid g{2048, 200.0};
    CHECK(g.dx() == doctest::Approx(200.0 / 2048).epsilon(1e-15));
    CHECK(g.node(0) == doctest::Approx(-100.0));
    CHECK(g.node(1024) == doctest::Approx(0.0));
    CHECK(g.k(0) == 0.0);
    CHECK(g.k(7) == doctest::Approx(2.0 * kPi * 7 / 200.0).epsilon(1e-15));

    CHECK_THROWS_AS(Grid(1000, 200.0), ConfigError); // not a power of two
    CHECK_THROWS_AS(Grid(8, 200.0), ConfigError);    // too small
    CHECK_THROWS_AS(Grid(2048, 0.0), ConfigError);
    CHECK_THROWS_AS(Field(Grid{32, 1.0}, std::vector<double>(31, 0.0)), ConfigError);
}

TEST_CASE("spectrum round-trip is the identity") {
    Grid g{512, 40.0};
    Rng rng(11);
    Field u = random_band_limited(g, rng);
    Field back = from_spectrum(g, to_spectrum(u));
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) worst = std::max(worst, std::abs(u[j] - back[j]));
    CHECK(worst < 1e-14);
}

TEST_CASE("spectral derivatives of a pure mode") {
    Grid g{256, 2.0 * kPi};
    Field u(g);
    for (std::size_t j = 0; j < g.n; ++j) u[j] = std::sin(3.0 * g.node(j));
    Field d1 = spectral_deriv(u, 1);
    Field d3 = spectral_deriv(u, 3);
    double w1 = 0.0, w3 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        w1 = std::max(w1, std::abs(d1[j] - 3.0 * std::cos(3.0 * g.node(j))));
        w3 = std::max(w3, std::abs(d3[j] + 27.0 * std::cos(3.0 * g.node(j))));
    }
    CHECK(w1 < 1e-12);
    // k^3 amplifies FFT roundoff by kmax^3 ~ 2e6 here
    CHECK(w3 < 5e-9);
    CHECK_THROWS_AS(spectral_deriv(u, 0), ConfigError);
    CHECK_THROWS_AS(spectral_deriv(u, 4), ConfigError);
}

TEST_CASE("translate shifts exactly and inverts") {
    Grid g{512, 100.0};
    Field u(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        u[j] = std::exp(-x * x / 9.0);
    }
    const double s = 7.3125; // not grid-aligned
    Field t = translate(u, s);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j) - s;
        worst = std::max(worst, std::abs(t[j] - std::exp(-x * x / 9.0)));
    }
    CHECK(worst < 1e-12); // tails are ~e^{-230}, periodization is invisible

    Field round = translate(t, -s);
    double w2 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) w2 = std::max(w2, std::abs(round[j] - u[j]));
    CHECK(w2 < 1e-13);

    // a shift by a full period is the identity bit-for-bit in the phase factor
    Field full = translate(u, g.L);
    double w3 = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) w3 = std::max(w3, std::abs(full[j] - u[j]));
    CHECK(w3 < 1e-13);
}

TEST_CASE("inner product requires matching grids") {
    Grid a{64, 10.0}, b{64, 20.0};
    CHECK_THROWS_AS(inner(Field(a), Field(b)), ConfigError);
    Field one(a);
    for (auto& x : one.v) x = 1.0;
    CHECK(inner(one, one) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("weighted norms of a Gaussian against closed forms") {
    // u = e^{-x^2}, one-sided rate a = 1/2:
    //   int e^{ x} u^2 = sqrt(pi/2) e^{1/8}
    //   int e^{x/2} |u| = sqrt(pi) e^{1/16}
    //   int e^{ x} (u'^2 + u^2) = (9/4) sqrt(pi/2) e^{1/8}
    //   int e^{-|x|} u^2 = sqrt(pi/2) e^{1/8} erfc(sqrt(2)/4)
    Grid g{2048, 200.0};
    Field u(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        u[j] = std::exp(-x * x);
    }
    // window 30: wide enough that every closed form holds to roundoff, small
    // enough that e^{2ay} cannot amplify the derivative noise floor at the
    // window edge (the H1a integrand is ~e^{-2y^2+y} there, long dead)
    WeightSpec w(0.5, 0.0, WeightKind::OneSided, 30.0);
    const double g0 = std::sqrt(kPi / 2.0) * std::exp(0.125);

    const double l2a = norm(u, {NormKind::L2a, w});
    CHECK(l2a == doctest::Approx(std::sqrt(g0)).epsilon(1e-12));

    const double l1a = norm(u, {NormKind::L1a, w});
    CHECK(l1a == doctest::Approx(std::sqrt(kPi) * std::exp(1.0 / 16.0)).epsilon(1e-12));

    const double h1a = norm(u, {NormKind::H1a, w});
    CHECK(h1a == doctest::Approx(1.5 * std::sqrt(g0)).epsilon(1e-8));

    const double wn = norm(u, {NormKind::W, w});
    const double wexact = std::sqrt(g0 * std::erfc(std::sqrt(2.0) / 4.0));
    // the two-sided weight has a kink at the center, so the rectangle rule
    // is only second order here: relative error ~ h^2 |f'| jump / 12 ~ 1e-3
    CHECK(wn == doctest::Approx(wexact).epsilon(3e-3));

    CHECK_THROWS_AS(norm(u, {NormKind::L2a, WeightSpec(0.5, 0.0, WeightKind::OneSided, 0.0)}),
                    ConfigError);
    CHECK_THROWS_AS(norm(u, {NormKind::L2a, WeightSpec(0.5, 0.0, WeightKind::OneSided, 150.0)}),
                    ConfigError);
}

TEST_CASE("right window cap truncates the growing side only") {
    Grid g{1024, 100.0};
    Field one(g);
    for (auto& x : one.v) x = 1.0;
    WeightSpec full(0.3, 0.0, WeightKind::OneSided, 20.0);
    WeightSpec capped(0.3, 0.0, WeightKind::OneSided, 20.0, 5.0);
    const double nf = norm(one, {NormKind::L2a, full});
    const double nc = norm(one, {NormKind::L2a, capped});
    // pin the node-inclusion semantics exactly: h * sum e^{2 a y_j} over
    // -window <= y_j <= right edge
    auto discrete = [&](double hi) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            const double y = g.node(j);
            if (y >= -20.0 && y <= hi) s += std::exp(0.6 * y);
        }
        return s * g.dx();
    };
    CHECK(nf * nf == doctest::Approx(discrete(20.0)).epsilon(1e-12));
    CHECK(nc * nc == doctest::Approx(discrete(5.0)).epsilon(1e-12));
    CHECK(nc < nf);
    // cap beyond the window is rejected
    CHECK_THROWS_AS(norm(one, {NormKind::L2a, WeightSpec(0.3, 0.0, WeightKind::OneSided, 20.0, 30.0)}),
                    ConfigError);
}

TEST_CASE("windowed pairing clips at domain edges instead of wrapping") {
    Grid g{1024, 100.0};
    Field f(g);
    // mass near the left edge, which a mod-L window around a right-edge
    // center would wrongly pick up
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        f[j] = std::exp(-(x + 45.0) * (x + 45.0));
    }
    auto ones = sample_offset(g, 0.0, [](double) { return 1.0; });
    const double near = pair_kernel(f, -45.0, 10.0, ones);
    const double far = pair_kernel(f, 45.0, 10.0, ones); // clipped window [35, 50)
    CHECK(near == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    CHECK(std::abs(far) < 1e-15);
    CHECK_THROWS_AS(pair_kernel(f, 0.0, 0.0, ones), ConfigError);
    CHECK_THROWS_AS(pair_kernel(f, 0.0, 10.0, std::vector<double>(3, 1.0)), ConfigError);
}

TEST_CASE("band-limited random fields have unit norm and bounded spectrum") {
    Grid g{512, 50.0};
    Rng rng(20260825);
    Field f = random_band_limited(g, rng);
    CHECK(norm_l2(f) == doctest::Approx(1.0).epsilon(1e-12));
    auto spec = to_spectrum(f);
    for (std::size_t m = g.n / 8; m < spec.size(); ++m) CHECK(std::abs(spec[m]) < 1e-14);
    // deterministic given the seed
    Rng rng2(20260825);
    Field f2 = random_band_limited(g, rng2);
    for (std::size_t j = 0; j < g.n; ++j) CHECK(f[j] == f2[j]);
}
