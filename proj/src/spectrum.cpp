#include "cwkb/spectrum.hpp"

#include "cwkb/action.hpp"
#include "cwkb/errors.hpp"
#include "cwkb/shooting.hpp"

#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cwkb {

using boost::multiprecision::float128;
constexpr double pi = std::numbers::pi;

double RealLayout::total_action() const
{
    double s = 0.0;
    for (double a : well_actions)
        s += a;
    return s;
}

RealLayout real_layout(const Poly& p)
{
    if (!p.is_real())
        throw std::invalid_argument("the spectral problem needs a real polynomial");
    if (!p.is_even_well())
        throw std::invalid_argument("q must have even degree and positive leading coefficient");
    RealLayout lay;
    auto tps = turning_points(p);
    assert_simple(tps);
    for (const auto& tp : tps)
        if (tp.is_real)
            lay.turning.push_back(tp.z.real());
    for (std::size_t k = 0; k + 1 < lay.turning.size(); ++k) {
        double a = lay.turning[k], b = lay.turning[k + 1];
        double q = p(cplx(0.5 * (a + b), 0.0)).real();
        if (q < 0) {
            lay.wells.emplace_back(a, b);
            lay.well_actions.push_back(well_action(p, a, b));
        } else {
            lay.barriers.emplace_back(a, b);
        }
    }
    lay.symmetric = symmetry_centre(p, lay.centre);
    return lay;
}

double default_match_point(const RealLayout& lay)
{
    if (lay.barriers.size() == 1)
        return 0.5 * (lay.barriers[0].first + lay.barriers[0].second);
    if (lay.turning.empty())
        return lay.symmetric ? lay.centre : 0.0;
    return 0.5 * (lay.turning.front() + lay.turning.back());
}

Cutoffs choose_cutoffs(const Poly& p, const RealLayout& lay, double lambda, const ShootConfig& cfg,
                       double min_exponent)
{
    double lo = lay.turning.empty() ? 0.0 : lay.turning.front();
    double hi = lay.turning.empty() ? 0.0 : lay.turning.back();
    if (cfg.cutoff > 0.0) {
        Cutoffs c{-cfg.cutoff, cfg.cutoff};
        if (!(c.right > hi) || !(c.left < lo) || p(c.right).real() <= 0.0 ||
            p(c.left).real() <= 0.0) {
            std::ostringstream os;
            os << "q(+-" << cfg.cutoff << ") must be positive and beyond the turning points";
            fail(Errc::CutoffTooSmall, os.str());
        }
        return c;
    }
    double reach = std::max(std::abs(lo), std::abs(hi));
    double margin = 0.5 * reach + 5.0 / std::pow(lambda, 2.0 / 3.0);
    Cutoffs c{lo - margin, hi + margin};
    // push outward until the neglected growing solution is below e^{-min_exponent}
    for (int it = 0; it < 60; ++it) {
        double e = lambda * barrier_action(p, hi, c.right);
        if (e >= min_exponent)
            break;
        c.right = hi + 1.5 * (c.right - hi);
    }
    for (int it = 0; it < 60; ++it) {
        double e = lambda * barrier_action(p, c.left, lo);
        if (e >= min_exponent)
            break;
        c.left = lo - 1.5 * (lo - c.left);
    }
    return c;
}

namespace {

template <class R>
std::vector<R> real_coeffs(const Poly& p)
{
    std::vector<R> out;
    for (const auto& c : p.coeffs())
        out.push_back(R(c.real()));
    return out;
}

template <class R>
R series_tol();
template <>
double series_tol<double>()
{
    return 1e-15;
}
template <>
float128 series_tol<float128>()
{
    return float128(1e-33);
}

template <class R>
R norm2(const R& a, const R& b)
{
    using std::sqrt;
    return sqrt(a * a + b * b);
}

template <class R>
R wronskian_miss(const Poly& p, const RealLayout& lay, const R& lambda, const ShootConfig& cfg,
                 double min_exponent)
{
    Cutoffs cut = choose_cutoffs(p, lay, static_cast<double>(lambda), cfg, min_exponent);
    double xm = std::isnan(cfg.match_point) ? default_match_point(lay) : cfg.match_point;
    auto q = real_coeffs<R>(p);
    R tol = std::is_same_v<R, double> ? R(cfg.series_tol) : series_tol<R>();
    auto l = shooting::decaying<R>(q, lambda, R(cut.left), R(xm), true, tol, false);
    auto r = shooting::decaying<R>(q, lambda, R(cut.right), R(xm), false, tol, false);
    return (l.y * r.dy - l.dy * r.y) / (norm2(l.y, l.dy) * norm2(r.y, r.dy));
}

// even part of q about its centre, in the shifted variable
Poly centred(const Poly& p, double c)
{
    auto s = p.shifted(c).coeffs();
    for (std::size_t k = 1; k < s.size(); k += 2)
        s[k] = 0.0;
    for (auto& v : s)
        v = cplx(v.real(), 0.0);
    return Poly(s);
}

template <class R>
R parity_miss_impl(const Poly& p, const RealLayout& lay, const R& lambda, int parity,
                   const ShootConfig& cfg, double min_exponent)
{
    if (!lay.symmetric)
        throw std::invalid_argument("parity shooting needs a symmetric potential");
    Poly s = centred(p, lay.centre);
    Cutoffs cut = choose_cutoffs(p, lay, static_cast<double>(lambda), cfg, min_exponent);
    double xr = std::min(cut.right - lay.centre, lay.centre - cut.left);
    if (cfg.cutoff > 0.0)
        xr = cut.right - lay.centre;
    auto q = real_coeffs<R>(s);
    R tol = std::is_same_v<R, double> ? R(cfg.series_tol) : series_tol<R>();
    auto r = shooting::decaying<R>(q, lambda, R(xr), R(0), false, tol, false);
    R v = parity == 0 ? r.dy : r.y;
    return v / norm2(r.y, r.dy);
}

template <class R>
int sign_of(const R& v)
{
    return v > R(0) ? 1 : (v < R(0) ? -1 : 0);
}

template <class R>
struct Refined {
    R lambda, residual, lo, hi;
};

// Illinois regula falsi with bisection safeguard
template <class R, class F>
Refined<R> refine(F&& f, R a, R b, R fa, R fb, const R& width)
{
    using std::abs;
    int side = 0;
    for (int it = 0; it < 400; ++it) {
        if (fa == R(0)) {
            b = a;
            fb = fa;
            break;
        }
        if (fb == R(0)) {
            a = b;
            fa = fb;
            break;
        }
        R w = b - a;
        if (w <= width)
            break;
        R c = (a * fb - b * fa) / (fb - fa);
        if (!(c > a && c < b) || it % 4 == 3)
            c = a + w / 2;
        if (c <= a || c >= b)
            break;
        R fc = f(c);
        if (sign_of(fc) == sign_of(fb)) {
            b = c;
            fb = fc;
            if (side == -1)
                fa /= 2;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1)
                fb /= 2;
            side = 1;
        }
    }
    // fa, fb may have been scaled by Illinois; recompute at the ends
    R ga = f(a), gb = a == b ? ga : f(b);
    if (abs(ga) <= abs(gb))
        return {a, abs(ga), a, b};
    return {b, abs(gb), a, b};
}

struct Root {
    double lambda, residual, lo, hi;
    std::optional<int> parity;
};

std::vector<Root> scan(const std::function<double(double)>& f, double step, double lambda_max,
                       double rel_width, std::optional<int> parity)
{
    std::vector<Root> roots;
    double a = 0.25 * step;
    double fa = f(a);
    for (int k = 1;; ++k) {
        double b = step * (k + 0.25);
        double fb = f(b);
        if (fa == 0.0) {
            roots.push_back({a, 0.0, a, a, parity});
        } else if (sign_of(fa) * sign_of(fb) < 0) {
            auto r = refine<double>(f, a, b, fa, fb, 1e-4 * rel_width * b);
            roots.push_back({r.lambda, r.residual, r.lo, r.hi, parity});
        }
        if (a > lambda_max)
            break;
        a = b;
        fa = fb;
    }
    return roots;
}

}  // namespace

double shoot_miss(const Poly& p, double lambda, const ShootConfig& cfg)
{
    if (!(lambda > 0))
        throw std::invalid_argument("lambda must be positive");
    auto lay = real_layout(p);
    return wronskian_miss<double>(p, lay, lambda, cfg, 40.0);
}

double parity_miss(const Poly& p, double lambda, int parity, const ShootConfig& cfg)
{
    if (!(lambda > 0))
        throw std::invalid_argument("lambda must be positive");
    auto lay = real_layout(p);
    return parity_miss_impl<double>(p, lay, lambda, parity, cfg, 40.0);
}

int wkb_count(const RealLayout& lay, double lambda)
{
    int n = 0;
    for (double a : lay.well_actions)
        n += std::max(0, static_cast<int>(std::floor(a * lambda / pi + 0.5)));
    return n;
}

std::vector<double> wkb_sequence(double alpha, int n_begin, int n_end)
{
    if (!(alpha > 0))
        throw std::invalid_argument("alpha must be positive");
    std::vector<double> out;
    for (int n = n_begin; n < n_end; ++n)
        out.push_back((2.0 * n + 1.0) * pi / (2.0 * alpha));
    return out;
}

double quantization_defect(double lambda, double alpha)
{
    double t = lambda * 2.0 * alpha / pi;
    double k = std::max(0.0, std::round((t - 1.0) / 2.0));
    return t - (2.0 * k + 1.0);
}

std::vector<EigenRecord> eigenvalues(const Poly& p, double lambda_max, const SpectrumConfig& cfg)
{
    auto lay = real_layout(p);
    std::vector<EigenRecord> out;
    if (lay.wells.empty() || !(lambda_max > 0))
        return out;
    double step = cfg.scan_step > 0 ? cfg.scan_step : 0.9 * pi / (2.0 * lay.total_action());

    std::vector<Root> roots;
    if (lay.symmetric && cfg.use_parity) {
        for (int parity : {0, 1}) {
            auto f = [&](double l) {
                return parity_miss_impl<double>(p, lay, l, parity, cfg.shoot, 40.0);
            };
            auto r = scan(f, step, lambda_max, cfg.rel_width, parity);
            roots.insert(roots.end(), r.begin(), r.end());
        }
    } else {
        auto f = [&](double l) { return wronskian_miss<double>(p, lay, l, cfg.shoot, 40.0); };
        roots = scan(f, step, lambda_max, cfg.rel_width, std::nullopt);
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.lambda != b.lambda)
            return a.lambda < b.lambda;
        return a.parity.value_or(0) < b.parity.value_or(0);
    });

    for (const auto& r : roots) {
        if (r.lambda > lambda_max)
            continue;
        EigenRecord e;
        e.n = static_cast<int>(out.size());
        e.lambda = r.lambda;
        e.miss_residual = r.residual;
        e.lo = r.lo;
        e.hi = r.hi;
        e.parity = r.parity;
        if (lay.wells.size() == 1) {
            e.well_tag = 1;
        } else {
            std::vector<double> dist;
            for (double a : lay.well_actions)
                dist.push_back(std::abs(quantization_defect(r.lambda, a)));
            auto best = std::min_element(dist.begin(), dist.end()) - dist.begin();
            e.well_tag = static_cast<int>(best) + 1;
            for (std::size_t k = 0; k < dist.size(); ++k)
                if (static_cast<long>(k) != best && std::abs(dist[k] - dist[best]) < 1e-6)
                    e.tag_tie = true;
        }
        out.push_back(e);
    }

    if (cfg.check_count) {
        int expected = wkb_count(lay, lambda_max);
        int found = static_cast<int>(out.size());
        if (std::abs(found - expected) >= 2) {
            std::ostringstream os;
            os << "found " << found << " eigenvalues below " << lambda_max << ", WKB count "
               << expected;
            fail(Errc::MissedEigenvalue, os.str());
        }
    }
    return out;
}

std::vector<PreciseParityPair> parity_pairs_extended(const Poly& p, int pairs,
                                                     const SpectrumConfig& cfg)
{
    auto lay = real_layout(p);
    if (!lay.symmetric)
        throw std::invalid_argument("extended parity pairs need a symmetric potential");
    double lmax = 2.0 * (2.0 * pairs + 2.0) * pi / (2.0 * lay.total_action()) + 1.0;
    std::vector<EigenRecord> recs;
    for (int it = 0; it < 20; ++it) {
        recs = eigenvalues(p, lmax, cfg);
        if (static_cast<int>(recs.size()) >= 2 * pairs)
            break;
        lmax *= 1.5;
    }
    if (static_cast<int>(recs.size()) < 2 * pairs)
        fail(Errc::MissedEigenvalue, "not enough eigenvalues for the requested pairs");

    auto precise = [&](const EigenRecord& rec) {
        int parity = rec.parity.value();
        auto f = [&](const float128& l) {
            return parity_miss_impl<float128>(p, lay, l, parity, cfg.shoot, 85.0);
        };
        for (double rel = 1e-12; rel < 1e-5; rel *= 10) {
            float128 a = float128(rec.lambda) * (1 - float128(rel));
            float128 b = float128(rec.lambda) * (1 + float128(rel));
            float128 fa = f(a), fb = f(b);
            if (sign_of(fa) * sign_of(fb) <= 0)
                return refine<float128>(f, a, b, fa, fb, float128(1e-31) * b).lambda;
        }
        fail(Errc::NoBracket, "extended-precision refinement lost its bracket");
    };

    std::vector<PreciseParityPair> out;
    for (int k = 0; k < pairs; ++k) {
        const auto& e = recs[2 * k];
        const auto& o = recs[2 * k + 1];
        if (e.parity != 0 || o.parity != 1)
            fail(Errc::MissedEigenvalue, "parity pattern of the spectrum is not even/odd");
        float128 le = precise(e), lo = precise(o);
        out.push_back({k, static_cast<double>(le), static_cast<double>(lo),
                       static_cast<double>(lo - le)});
    }
    return out;
}

double action_ratio(const std::array<double, 4>& roots, double leading)
{
    std::vector<cplx> r(roots.begin(), roots.end());
    Poly p = Poly::from_roots(r, leading);
    return well_action(p, roots[0], roots[1]) / well_action(p, roots[2], roots[3]);
}

std::array<double, 4> calibrate_ratio(const QuarticFamily& family, double target,
                                      const CalibrateConfig& cfg)
{
    if (!(target > 0))
        throw std::invalid_argument("target ratio must be positive");
    auto roots = family.roots;
    for (int k = 0; k < 3; ++k)
        if (!(roots[k] < roots[k + 1]))
            throw std::invalid_argument("roots must be strictly increasing");
    const int f = family.free_index;
    if (f < 0 || f > 3)
        throw std::invalid_argument("free_index must be 0..3");

    auto g = [&](double a) {
        auto r = roots;
        r[f] = a;
        return action_ratio(r, family.leading) - target;
    };
    double g0 = g(roots[f]);
    if (std::abs(g0) <= cfg.tol * target)
        return roots;

    double span = roots[3] - roots[0];
    double lo = std::isnan(cfg.lo) ? (f == 0 ? roots[0] - 50.0 * span : roots[f - 1]) : cfg.lo;
    double hi = std::isnan(cfg.hi) ? (f == 3 ? roots[3] + 50.0 * span : roots[f + 1]) : cfg.hi;
    double pad = 1e-9 * (1.0 + std::abs(hi - lo));
    lo += pad;
    hi -= pad;

    // walk outward from the current root until the sign of g flips
    double a = roots[f], ga = g0;
    double b = a, gb = ga;
    bool found = false;
    for (double dir : {1.0, -1.0}) {
        double limit = dir > 0 ? hi : lo;
        double prev = roots[f], gprev = g0;
        for (int k = 1; k <= 60 && !found; ++k) {
            double t = static_cast<double>(k) / 60.0;
            double x = roots[f] + (limit - roots[f]) * t * t;
            double gx = g(x);
            if (sign_of(gx) * sign_of(gprev) <= 0) {
                a = std::min(prev, x);
                b = std::max(prev, x);
                ga = prev < x ? gprev : gx;
                gb = prev < x ? gx : gprev;
                found = true;
            }
            prev = x;
            gprev = gx;
        }
        if (found)
            break;
    }
    if (!found) {
        std::ostringstream os;
        os << "ratio " << target << " is not reachable by moving root " << f;
        fail(Errc::NoBracket, os.str());
    }
    auto r = refine<double>(g, a, b, ga, gb, 1e-15 * (1.0 + std::abs(b)));
    if (r.residual > cfg.tol * target) {
        std::ostringstream os;
        os << "calibration stalled with ratio error " << r.residual;
        fail(Errc::NonConvergence, os.str());
    }
    roots[f] = r.lambda;
    return roots;
}

}  // namespace cwkb
