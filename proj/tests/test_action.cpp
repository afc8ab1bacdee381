#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cwkb/action.hpp"
#include "cwkb/errors.hpp"

#include <cmath>
#include <numbers>

using namespace cwkb;
using namespace std::complex_literals;
constexpr double pi = std::numbers::pi;

namespace {
// plain composite Simpson with a huge node count, for cross-checks
double simpson(auto f, double a, double b, int n = 2000000)
{
    double h = (b - a) / n, s = f(a) + f(b);
    for (int k = 1; k < n; ++k)
        s += f(a + k * h) * (k % 2 ? 4 : 2);
    return s * h / 3;
}
}  // namespace

const Poly harmonic = Poly::real({-1, 0, 1});
const Poly dwell = Poly::real({4, 0, -5, 0, 1});
const Poly onewell = Poly::real({-1, 0, 0, 0, 1});

TEST_CASE("branch samples follow the seed")
{
    auto pos = sqrt_q_along(harmonic, {{2.0, 3.0}, std::sqrt(3.0)});
    for (const auto& s : pos) {
        CHECK(s.sqrt_q.real() > 0);
        CHECK(std::abs(s.sqrt_q.imag()) < 1e-14);
    }
    auto neg = sqrt_q_along(harmonic, {{2.0, 3.0}, -std::sqrt(3.0)});
    for (const auto& s : neg)
        CHECK(s.sqrt_q.real() < 0);

    // vertical line through the origin: the continued branch is smooth
    cplx seed = std::sqrt(harmonic(-2i));
    auto vert = sqrt_q_along(harmonic, {{-2i, 2i}, seed});
    for (std::size_t k = 1; k < vert.size(); ++k)
        CHECK(std::abs(std::arg(vert[k].sqrt_q / vert[k - 1].sqrt_q)) < 0.2);
    // closed-form continuation: sqrt(q(iy)) = +-i sqrt(1+y^2) with fixed sign
    for (const auto& s : vert)
        CHECK(std::abs(s.sqrt_q - seed / std::abs(seed) * std::sqrt(1 + s.z.imag() * s.z.imag())) <
              1e-12);
}

TEST_CASE("action examples")
{
    auto a = action(harmonic, {{1.0, 0.0}, 1i});
    CHECK(std::abs(a.S - (-1i * (pi / 4))) < 1e-12);

    PathC loop{{2.0 + 0i, 2.0 + 1i, 0.5 + 1i, 0.5 + 0.5i, 2.0 + 0i}, std::sqrt(3.0)};
    CHECK(std::abs(action(harmonic, loop).S) < 1e-10);

    auto xi = action(dwell, {{-1.0, 1.0}, 1.0});
    double oracle = simpson([](double x) { return std::sqrt((1 - x * x) * (4 - x * x)); }, -1, 1);
    CHECK(xi.S.real() > 0);
    CHECK(std::abs(xi.S.imag()) < 1e-14);
    CHECK(xi.S.real() == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(xi.S.real() == doctest::Approx(barrier_action(dwell, -1, 1)).epsilon(1e-12));
}

TEST_CASE("well and barrier actions")
{
    CHECK(std::abs(well_action(harmonic, -1, 1) - pi / 2) < 1e-12);
    double w = well_action(dwell, 1, 2);
    double oracle = simpson([](double x) { return std::sqrt((x * x - 1) * (4 - x * x)); }, 1, 2,
                            20000000);
    CHECK(w == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(std::abs(well_action(dwell, -2, -1) - w) < 1e-12);
    double xi = barrier_action(dwell, -1, 1);
    double xi_rev = action(dwell, {{1.0, -1.0}, -1.0}).S.real();
    CHECK(std::abs(xi - xi_rev) < 1e-12);  // right-to-left on the negative branch
    CHECK_THROWS_AS(barrier_action(onewell, -1, 1), Failure);
    CHECK_THROWS_AS(well_action(dwell, -1, 1), Failure);
}

TEST_CASE("agmon mass")
{
    std::vector<cplx> seg{-1.0, 1.0};
    CHECK(std::abs(agmon_mass(harmonic, seg) - 0.5) < 1e-12);
    CHECK(agmon_mass(harmonic, std::vector<cplx>{}) == 0.0);
    std::vector<cplx> left{-1.0, 0.0}, right{0.0, 1.0}, split{-1.0, 0.0, 1.0};
    CHECK(std::abs(agmon_mass(harmonic, left) + agmon_mass(harmonic, right) - 0.5) < 1e-10);
    CHECK(std::abs(agmon_mass(harmonic, split) - 0.5) < 1e-10);
    std::vector<cplx> up{1i, 3i}, up3{1i, 1.7i, 2.2i, 3i};
    CHECK(std::abs(agmon_mass(onewell, up) - agmon_mass(onewell, up3)) < 1e-10);
}

TEST_CASE("property: path independence, antisymmetry, conjugation")
{
    for (const Poly* p : {&harmonic, &dwell, &onewell}) {
        cplx a = 0.3 + 2.5i, b = -2.7 + 0.6i;
        cplx seed = std::sqrt((*p)(a));
        PathC p1{{a, b}, seed};
        PathC p2{{a, 0.3 + 3.5i, -2.7 + 3.5i, b}, seed};
        auto s1 = action(*p, p1);
        auto s2 = action(*p, p2);
        CHECK(std::abs(s1.S - s2.S) < 1e-8 * (1 + std::abs(s1.S)));
        CHECK(std::abs(s1.branch_end - s2.branch_end) < 1e-12 * std::abs(s1.branch_end));

        auto r = action(*p, reversed(p2, s2.branch_end));
        CHECK(std::abs(r.S + s2.S) < 1e-10 * (1 + std::abs(s2.S)));
        CHECK(r.abs_mass == doctest::Approx(s2.abs_mass).epsilon(1e-12));

        PathC c2{{}, std::conj(seed)};
        for (auto z : p2.points)
            c2.points.push_back(std::conj(z));
        auto sc = action(*p, c2);
        CHECK(std::abs(sc.S - std::conj(s2.S)) < 1e-12 * (1 + std::abs(s2.S)));
    }
}

TEST_CASE("paths through turning points are refused")
{
    CHECK_THROWS_AS(action(harmonic, {{-2.0, 2.0}, std::sqrt(3.0)}), Failure);
    CHECK_THROWS_AS(action(harmonic, {{1.0, 1.0, 2.0}, 1.0}), std::invalid_argument);
}

TEST_CASE("exclusion radius")
{
    CHECK(exclusion_radius(harmonic, 1.0) == doctest::Approx(std::pow(2.0, -1.0 / 3)));
    CHECK(exclusion_radius(harmonic, 1.0, 16.0) ==
          doctest::Approx(std::pow(2.0, -1.0 / 3) * std::pow(16.0, -7.0 / 12)));
}
