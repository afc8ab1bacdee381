#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cwkb/action.hpp"
#include "cwkb/stokes.hpp"
#include "closure.hpp"

#include <cmath>
#include <numbers>

using namespace cwkb;
constexpr double pi = std::numbers::pi;

const Poly harmonic = Poly::real({-1, 0, 1});
const Poly dwell = Poly::real({4, 0, -5, 0, 1});
const Poly onewell = Poly::real({-1, 0, 0, 0, 1});
const Poly nonsymm = Poly::from_roots(std::vector<cplx>{-2.0, -1.0, 1.0, 3.0}, 1.0);

namespace {

double angle_gap(double a, double b)
{
    return std::abs(std::remainder(a - b, 2 * pi));
}

bool angles_match(std::array<double, 3> got, std::array<double, 3> want)
{
    for (double w : want) {
        bool hit = false;
        for (double g : got)
            hit = hit || angle_gap(g, w) < 1e-12;
        if (!hit)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("launch angles of the harmonic turning points")
{
    TurningPoint left{-1.0, 1, true}, right{1.0, 1, true};
    CHECK(angles_match(launch_angles(harmonic, left, LineKind::stokes), {0, 2 * pi / 3, 4 * pi / 3}));
    CHECK(angles_match(launch_angles(harmonic, right, LineKind::stokes), {pi / 3, pi, 5 * pi / 3}));
    CHECK(angles_match(launch_angles(harmonic, right, LineKind::anti_stokes), {0, 2 * pi / 3, 4 * pi / 3}));
    auto a = launch_angles(harmonic, right, LineKind::stokes);
    CHECK(std::is_sorted(a.begin(), a.end()));
}

TEST_CASE("finite harmonic stokes line carries the well action")
{
    auto l = trace_line(harmonic, {-1.0, 1, true}, 0.0, LineKind::stokes);
    REQUIRE(l.termination == Termination::hits_turning_point);
    CHECK(std::abs(l.end_point - cplx(1.0)) < 1e-12);
    CHECK(std::abs(std::abs(l.actions.back().imag()) - pi / 2) < 1e-8);
}

TEST_CASE("unbounded harmonic line escapes upward")
{
    auto l = trace_line(harmonic, {1.0, 1, true}, pi / 3, LineKind::stokes);
    CHECK(l.termination == Termination::unbounded);
    CHECK(l.nodes.back().imag() > 1.0);
}

TEST_CASE("graph counts")
{
    struct Case {
        Poly p;
        int finite, unbounded;
    };
    for (const auto& c : {Case{harmonic, 1, 4}, Case{dwell, 2, 8}, Case{onewell, 1, 10}, Case{nonsymm, 2, 8}}) {
        auto g = build_graph(c.p);
        CHECK(g.finite_count() == c.finite);
        CHECK(g.unbounded_count() == c.unbounded);
        // three lines per simple turning point, finite lines counted from both ends
        CHECK(3 * static_cast<int>(g.turning_points.size()) == 2 * g.finite_count() + g.unbounded_count());
    }
    auto g = build_graph(dwell);
    int anti = 0;
    for (const auto& s : g.real_axis_segments)
        if (s.kind == LineKind::anti_stokes && std::abs(s.a + 1) < 1e-12 && std::abs(s.b - 1) < 1e-12)
            ++anti;
    CHECK(anti == 1);
}

TEST_CASE("one-well graph has lines along the imaginary axis")
{
    auto g = build_graph(onewell);
    int up = 0;
    for (const auto& l : g.lines) {
        if (std::abs(l.origin.z - cplx(0, 1)) > 1e-12 || l.termination != Termination::unbounded)
            continue;
        bool on_axis = true;
        for (auto z : l.nodes)
            on_axis = on_axis && std::abs(z.real()) < 1e-6;
        up += on_axis && l.nodes.back().imag() > 2;
    }
    CHECK(up == 1);
}

TEST_CASE("real part of the action stays on the level set")
{
    for (const auto& p : {harmonic, dwell, onewell, nonsymm}) {
        auto g = build_graph(p);
        for (const auto& l : g.lines) {
            if (l.kind != LineKind::stokes)
                continue;
            for (auto s : l.actions)
                CHECK(std::abs(s.real()) < 1e-6 * (1 + std::abs(s.imag())));
            // independent re-evaluation on the traced polyline
            PathC path{l.nodes, std::sqrt(p(l.nodes[1]))};
            auto tps = turning_points(p);
            std::vector<cplx> tz;
            for (const auto& t : tps)
                tz.push_back(t.z);
            auto a = action(p, tz, path);
            CHECK(std::abs(a.S.real()) < 1e-6 * (1 + std::abs(a.S.imag())));
        }
    }
}

TEST_CASE("conjugation closure for real polynomials")
{
    for (const auto& p : {harmonic, dwell, onewell, nonsymm}) {
        TraceConfig independent;
        independent.mirror_real = false;
        CHECK(cwkb::testing::conjugation_gap(p, build_graph(p, independent)) < 1e-8);
    }
}

TEST_CASE("quartic pair lines are exact mirror images")
{
    auto g = build_graph(dwell);
    std::vector<const LevelLine*> from_one;
    for (const auto& l : g.lines)
        if (std::abs(l.origin.z - cplx(1.0)) < 1e-12 && l.termination == Termination::unbounded)
            from_one.push_back(&l);
    REQUIRE(from_one.size() == 2);
    const auto& a = from_one[0]->nodes;
    const auto& b = from_one[1]->nodes;
    REQUIRE(a.size() == b.size());
    double worst = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        worst = std::max(worst, std::abs(a[k] - std::conj(b[k])));
    CHECK(worst < 1e-9);
}

TEST_CASE("seed radius shrinks near a close turning point")
{
    Poly close = Poly::from_roots(std::vector<cplx>{-1.0, 1.0, 1.05}, 1.0);
    auto tps = turning_points(close);
    double r = seed_radius(close, tps, 1);
    CHECK(r <= 0.1 * 0.05 + 1e-15);
    CHECK(r > 0);
}
