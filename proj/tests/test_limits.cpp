#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cwkb/action.hpp"
#include "cwkb/errors.hpp"
#include "cwkb/limits.hpp"
#include "cwkb/spectrum.hpp"

#include <cmath>
#include <numbers>

using namespace cwkb;
using namespace std::complex_literals;
constexpr double pi = std::numbers::pi;

const Poly harmonic = Poly::real({-1, 0, 1});

namespace {

ZeroSet zeros_of(const Poly& p, double lmax, const Box& region, int back = 0)
{
    auto ev = eigenvalues(p, lmax);
    REQUIRE(static_cast<int>(ev.size()) > back);
    double extent = std::max(std::abs(region.x0), std::abs(region.x1)) * 1.05;
    auto f = Eigenfunction::build(p, ev[ev.size() - 1 - back], extent);
    return locate_zeros(f, region);
}

PredictedZeroLine interval(const Poly& p, double a, double b)
{
    PredictedZeroLine l;
    l.label = "interval";
    for (int k = 0; k <= 4000; ++k)
        l.curve.push_back(a + (b - a) * k / 4000.0);
    l.anchor_tp = a;
    (void)p;
    return l;
}

}  // namespace

TEST_CASE("empirical measure")
{
    ZeroSet empty;
    empty.lambda = 7;
    CHECK(empirical_measure(empty).total_mass == 0);

    auto zs = zeros_of(harmonic, 22, {-2, 2, -1, 1});
    auto m = empirical_measure(zs);
    CHECK(m.points.size() == 10);
    for (const auto& w : m.points)
        CHECK(w.weight == 1.0 / zs.lambda);
    CHECK(std::abs(m.total_mass - 10.0 / 21.0) < 1e-12);
}

TEST_CASE("family parsing and polynomials")
{
    CHECK(parse_family("2well") == Family::symmetric_double_well);
    CHECK(parse_family("one_well_quartic") == Family::one_well_quartic);
    CHECK(parse_family("nonsymm") == Family::nonsymmetric_double_well);
    CHECK_THROWS_AS(parse_family("triple"), Failure);
    CHECK(family_poly(Family::symmetric_double_well, {1, 2}) == Poly::real({4, 0, -5, 0, 1}));
    CHECK(family_poly(Family::one_well_quartic, {1, 1}) == Poly::real({-1, 0, 0, 0, 1}));
    CHECK_THROWS_AS(family_poly(Family::symmetric_double_well, {2, 1}), std::invalid_argument);
}

TEST_CASE("predicted lines")
{
    auto two = predicted_zero_lines(Family::symmetric_double_well, {1, 2});
    REQUIRE(two.size() == 3);
    Poly p2 = family_poly(Family::symmetric_double_well, {1, 2});
    const double xi = barrier_action(p2, -1, 1);
    CHECK(std::abs(two[2].offset_c + xi / 2) < 1e-12);
    // Re S(1, z) along the imaginary axis equals the offset
    CHECK(std::abs(action(p2, PathC{{1.0, 0.0}, 1.0}).S.real() - two[2].offset_c) < 1e-6);
    for (double y : {0.3, 0.7, 2.5}) {
        PathC path{{1.0, 0.0, cplx(0, y)}, 1.0};
        CHECK(std::abs(action(p2, path).S.real() - two[2].offset_c) < 1e-6);
    }

    auto one = predicted_zero_lines(Family::one_well_quartic, {1, 1});
    REQUIRE(one.size() == 3);
    for (const auto& l : one)
        CHECK(l.offset_c == 0.0);
    CHECK(std::abs(one[1].curve.front() - 1i) < 1e-15);

    auto ns = predicted_zero_lines(Family::nonsymmetric_double_well, {-2, -1, 1, 3});
    int common = 0, g1 = 0, g2 = 0;
    for (const auto& l : ns) {
        common += l.set == 0;
        g1 += l.set == 1;
        g2 += l.set == 2;
        if (l.set == 1)
            CHECK(std::abs(l.curve.front() - 1.0) < 1e-12);
        if (l.set == 2)
            CHECK(std::abs(l.curve.front() + 1.0) < 1e-12);
        // traced branches stay on Re S(origin, .) = 0
        if (l.set != 0) {
            Poly p = family_poly(Family::nonsymmetric_double_well, {-2, -1, 1, 3});
            PathC path{{l.curve.begin(), l.curve.begin() + std::min<std::size_t>(l.curve.size(), 200)},
                       std::sqrt(p(l.curve[1]))};
            std::vector<cplx> tz{-2.0, -1.0, 1.0, 3.0};
            auto a = action(p, tz, path);
            CHECK(std::abs(a.S.real()) < 1e-6 * (1 + std::abs(a.S.imag())));
        }
    }
    CHECK(common == 2);
    CHECK(g1 == 2);
    CHECK(g2 == 2);
    CHECK(select_set(ns, 1).size() == 4);
}

TEST_CASE("Hermite zeros fill the interval with the arcsine density")
{
    auto zs = zeros_of(harmonic, 42, {-2, 2, -1, 1});
    REQUIRE(zs.lambda == doctest::Approx(41));
    MeasureConfig cfg;
    cfg.arc_mass = 0.05;
    auto rep = compare_measure(zs, harmonic, {interval(harmonic, -1, 1)}, cfg);
    CHECK(rep.matched == 20);
    CHECK(rep.unmatched.empty());
    CHECK(rep.max_relative_error <= 0.10);

    double total = 0;
    for (const auto& a : rep.arcs) {
        CHECK(a.predicted_mass >= 0);
        CHECK(a.count >= 0);
        total += a.predicted_mass;
    }
    std::vector<cplx> whole{-1.0, 1.0};
    CHECK(std::abs(total - agmon_mass(harmonic, whole)) < 1e-9);

    cfg.kappa = 0;
    auto none = compare_measure(zs, harmonic, {interval(harmonic, -1, 1)}, cfg);
    CHECK(none.matched == 0);
    CHECK(none.unmatched.size() == zs.zeros.size());
    for (const auto& a : none.arcs)
        CHECK(a.count == 0);
}

TEST_CASE("double-well imaginary-axis fit")
{
    Poly p = family_poly(Family::symmetric_double_well, {1, 2});
    const double xi = barrier_action(p, -1, 1);
    auto zs = zeros_of(p, 20, {-0.5, 0.5, 0.05, 2});
    auto fit = fit_zero_line(zs, p, 1.0, {-0.5, 0.5, 0.05, 2}, {0.0}, 1.0);
    CHECK(std::abs(fit.c_fit + xi / 2) < 0.02 * xi);
    CHECK(fit.residual_rms < 0.5 / zs.lambda);

    // moving the anchor to -1 shifts every action by S(1, -1)
    auto moved = fit_zero_line(zs, p, -1.0, {-0.5, 0.5, 0.05, 2}, {0.0}, 1.0);
    PathC across{{1.0, 0.0, -1.0}, 1.0};
    double shift = action(p, across).S.real();
    CHECK(std::abs(std::abs(moved.c_fit - fit.c_fit) - std::abs(shift)) < 1e-8);

    CHECK_THROWS_AS(fit_zero_line(zs, p, 1.0, {0.4, 0.5, 1.9, 2.0}, {0.0}), Failure);
}

TEST_CASE("ratio classification")
{
    auto a = classify_ratio(1.0 / 3);
    CHECK(a.cls == RatioClass::odd_odd);
    CHECK(a.p == 1);
    CHECK(a.q == 3);
    auto b = classify_ratio(0.5);
    CHECK(b.cls == RatioClass::even_odd);
    CHECK(classify_ratio(2.0 / 3).cls == RatioClass::even_odd);
    CHECK(classify_ratio(std::sqrt(0.5)).cls == RatioClass::irrational_like);
    CHECK(classify_ratio(3.0 / 5 + 1e-7).cls == RatioClass::irrational_like);
}

TEST_CASE("subsequence densities")
{
    QuarticFamily fam{{-2, -1, 1, 3}};
    auto data = [&](double target) {
        auto r = calibrate_ratio(fam, target);
        Poly p = Poly::from_roots(std::vector<cplx>(r.begin(), r.end()), 1.0);
        return DoubleWellData{well_action(p, r[0], r[1]), well_action(p, r[2], r[3]), barrier_action(p, r[1], r[2])};
    };
    auto third = data(1.0 / 3);
    auto rep = subsequence_density(third, 0.1, leading_sequence(third, 500));
    REQUIRE(rep.sequences.size() == 2);
    CHECK(rep.form.cls == RatioClass::odd_odd);
    CHECK(std::abs(rep.sequences[1].predicted - 2.0 / 3) < 1e-15);
    CHECK(std::abs(rep.sequences[1].empirical - 2.0 / 3) < 0.05);

    auto half = data(0.5);
    auto rh = subsequence_density(half, 0.1, leading_sequence(half, 500));
    for (const auto& s : rh.sequences) {
        CHECK(s.predicted == 1.0);
        CHECK(s.empirical >= 0.99);
    }
    for (const auto& r : {rep, rh})
        for (const auto& s : r.sequences) {
            CHECK(s.empirical >= 0);
            CHECK(s.empirical <= 1);
            CHECK(s.predicted >= 0);
            CHECK(s.predicted <= 1);
        }
    CHECK_THROWS_AS(subsequence_density(third, 1.0, leading_sequence(third, 100)), std::invalid_argument);
}

TEST_CASE("concentration does not loosen with growing eigenvalue")
{
    Poly p = family_poly(Family::one_well_quartic, {1, 1});
    auto lines = predicted_zero_lines(Family::one_well_quartic, {1, 1});
    const Box region{-2.5, 2.5, 0.05, 2.5};
    auto early = compare_measure(zeros_of(p, 24, region, 2), p, lines);
    auto late = compare_measure(zeros_of(p, 24, region, 0), p, lines);
    CHECK(late.lambda > early.lambda);
    CHECK(late.max_distance <= 1.2 * early.max_distance + 1e-12);
    CHECK(late.unmatched_outside_discs == 0);
}
