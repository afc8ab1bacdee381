#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cwkb/errors.hpp"
#include "cwkb/spectrum.hpp"
#include "cwkb/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace cwkb;
using namespace std::complex_literals;
constexpr double pi = std::numbers::pi;

const Poly harmonic = Poly::real({-1, 0, 1});
const Poly dwell = Poly::real({4, 0, -5, 0, 1});
const Poly onewell = Poly::real({-1, 0, 0, 0, 1});

namespace {

// roots of the physicists' Hermite polynomial H_n by Newton from the
// asymptotic guesses, deflated
std::vector<double> hermite_roots(int n)
{
    auto h = [n](double x, double& d) {
        double h0 = 1, h1 = 2 * x;
        if (n == 0) {
            d = 0;
            return h0;
        }
        for (int k = 1; k < n; ++k) {
            double h2 = 2 * x * h1 - 2 * k * h0;
            h0 = h1;
            h1 = h2;
        }
        d = 2 * n * h0;
        return h1;
    };
    std::vector<double> roots;
    for (int k = 0; k < n; ++k) {
        double x = std::sqrt(2.0 * n + 1) * std::cos(pi * (4 * k + 3) / (4 * n + 2));
        for (int it = 0; it < 100; ++it) {
            double d = 0, v = h(x, d);
            double s = 0;
            for (double r : roots)
                s += 1 / (x - r);
            double dx = v / (d - v * s);
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Eigenfunction harmonic_state(int n, double extent)
{
    auto ev = eigenvalues(harmonic, 2 * n + 1.5);
    REQUIRE(static_cast<int>(ev.size()) == n + 1);
    return Eigenfunction::build(harmonic, ev[n], extent);
}

}  // namespace

TEST_CASE("Hermite zeros")
{
    for (int n : {2, 5}) {
        auto f = harmonic_state(n, 2.5);
        auto zs = locate_zeros(f, {-2, 2, -2, 2});
        REQUIRE(static_cast<int>(zs.zeros.size()) == n);
        CHECK(zs.region_winding == n);
        auto oracle = hermite_roots(n);
        for (int k = 0; k < n; ++k) {
            CHECK(std::abs(zs.zeros[k].z.imag()) < 1e-8);
            CHECK(std::abs(zs.zeros[k].z.real() - oracle[k] / std::sqrt(2.0 * n + 1)) < 1e-8);
            CHECK(zs.zeros[k].verified);
            CHECK(zs.zeros[k].residual < 1e-10);
        }
    }
}

TEST_CASE("box counts")
{
    for (int n : {3, 6}) {
        auto f = harmonic_state(n, 2.5);
        CHECK(count_zeros_box(f, {-1.5, 1.5, -0.5, 0.5}).winding == n);
        // far from the real axis one exponential dominates
        CHECK(count_zeros_box(f, {-2, 2, 0.5, 2}).winding == 0);
    }
}

TEST_CASE("winding is additive under splits")
{
    auto ev = eigenvalues(onewell, 16);
    auto f = Eigenfunction::build(onewell, ev.back(), 3.0);
    const Box parent{-2.5, 2.5, 0.05, 2.5};
    const int whole = count_zeros_box(f, parent).winding;
    CHECK(whole > 0);
    for (double s : {0.31, 0.46, 0.77}) {
        double xm = parent.x0 + s * parent.width(), ym = parent.y0 + s * parent.height();
        int v = count_zeros_box(f, {parent.x0, xm, parent.y0, parent.y1}).winding +
                count_zeros_box(f, {xm, parent.x1, parent.y0, parent.y1}).winding;
        int h = count_zeros_box(f, {parent.x0, parent.x1, parent.y0, ym}).winding +
                count_zeros_box(f, {parent.x0, parent.x1, ym, parent.y1}).winding;
        CHECK(v == whole);
        CHECK(h == whole);
    }
}

TEST_CASE("continuation examples")
{
    auto ev = eigenvalues(harmonic, 1.5);
    REQUIRE(ev.size() == 1);
    auto f = Eigenfunction::build(harmonic, ev[0], 3.0);
    const auto& anchor = f.anchors()[f.nearest_anchor(0.0)];
    REQUIRE(anchor.x == 0.0);

    std::vector<cplx> none{0.0};
    auto same = continue_state(harmonic, 1.0, anchor.state, none);
    CHECK(same.y == anchor.state.y);
    CHECK(same.dy == anchor.state.dy);

    // ground state e^{-z^2/2}: no zeros on the way to 2i, exact value at the end
    std::vector<cplx> up;
    for (int k = 0; k <= 20; ++k)
        up.push_back(0.1i * double(k));
    auto y0 = anchor.state.y * std::exp(anchor.state.log_scale);
    for (std::size_t k = 1; k < up.size(); ++k) {
        auto s = continue_state(harmonic, 1.0, anchor.state, std::span<const cplx>(up.data(), k + 1));
        cplx y = s.y * std::exp(s.log_scale);
        CHECK(std::abs(y) > 0);
        CHECK(std::abs(y / y0 - std::exp(-up[k] * up[k] / 2.0)) < 1e-10 * std::abs(std::exp(-up[k] * up[k] / 2.0)));
    }

    std::vector<cplx> loop{0.0, 1.0 + 1.0i, 2.0i, -0.5 + 0.5i};
    auto there = continue_state(harmonic, 1.0, anchor.state, loop);
    std::vector<cplx> back(loop.rbegin(), loop.rend());
    auto home = continue_state(harmonic, 1.0, there, back);
    cplx a = anchor.state.y * std::exp(anchor.state.log_scale), b = home.y * std::exp(home.log_scale);
    CHECK(std::abs(b - a) < 1e-8 * std::abs(a));
}

TEST_CASE("evaluate matches the closed form away from the axis")
{
    auto f = harmonic_state(4, 2.5);
    auto ref = [](cplx z) {
        cplx t = 3.0 * z;
        return (16.0 * std::pow(t, 4) - 48.0 * t * t + 12.0) * std::exp(-4.5 * z * z);
    };
    auto s0 = evaluate(f, 0.3);
    cplx k = s0.y * std::exp(s0.log_scale) / ref(0.3);
    for (cplx z : {0.5 + 1.0i, -1.2 - 0.7i, 1.9 + 1.9i, -0.1 + 0.3i}) {
        auto s = evaluate(f, z);
        cplx v = s.y * std::exp(s.log_scale);
        CHECK(std::abs(v / (k * ref(z)) - 1.0) < 1e-9);
    }
}

TEST_CASE("zero sets are closed under conjugation and anchor independent")
{
    auto ev = eigenvalues(onewell, 14);
    auto f = Eigenfunction::build(onewell, ev.back(), 3.0);
    auto zs = locate_zeros(f, {-2.5, 2.5, -2.5, 2.5});
    REQUIRE(zs.zeros.size() > 4);
    for (const auto& z : zs.zeros) {
        double best = 1e300;
        for (const auto& w : zs.zeros)
            best = std::min(best, std::abs(std::conj(z.z) - w.z));
        CHECK(best < 1e-8);
    }
    auto g = f.thinned(3, 1);
    auto zs2 = locate_zeros(g, {-2.5, 2.5, -2.5, 2.5});
    REQUIRE(zs2.zeros.size() == zs.zeros.size());
    for (std::size_t k = 0; k < zs.zeros.size(); ++k)
        CHECK(std::abs(zs.zeros[k].z - zs2.zeros[k].z) < 1e-8);
}

TEST_CASE("Hille spacing holds for located zeros")
{
    for (double lmax : {10.0, 20.0}) {
        auto ev = eigenvalues(dwell, lmax);
        auto f = Eigenfunction::build(dwell, ev.back(), 3.0);
        auto zs = locate_zeros(f, {-2.6, 2.6, -1.5, 1.5});
        auto h = hille_spacing(zs, dwell);
        CHECK(h.pairs_checked == static_cast<int>(zs.zeros.size()));
        CHECK(h.min_ratio >= 0.999);
    }
}

TEST_CASE("region outside the anchored interval is rejected")
{
    auto f = harmonic_state(2, 2.0);
    CHECK_THROWS_AS(locate_zeros(f, {-1, f.right() + 1, -1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(locate_zeros(f, {1, 0, -1, 1}), std::invalid_argument);
}
