#include "cwkb/action.hpp"

#include "cwkb/errors.hpp"
#include "cwkb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cwkb {

cplx sqrt_near(cplx w, cplx ref)
{
    cplx s = std::sqrt(w);
    return (s.real() * ref.real() + s.imag() * ref.imag() >= 0.0) ? s : -s;
}

PathC reversed(const PathC& path, cplx end_branch)
{
    PathC r;
    r.points.assign(path.points.rbegin(), path.points.rend());
    r.branch_seed = end_branch;
    return r;
}

double exclusion_radius(const Poly& p, cplx tp, double lambda)
{
    double d = std::abs(p.eval_with_derivative(tp).second);
    return std::pow(d, -1.0 / 3.0) * std::pow(lambda, -7.0 / 12.0);
}

namespace {

constexpr double kNearEnd = 1e-7;

bool at_turning_point(const Poly& p, cplx z)
{
    return std::abs(p(z)) <= 1e-12 * p.magnitude(std::abs(z));
}

struct Piece {
    double ta, tb;
    cplx ref;  // sqrt(q) branch valid across the piece
};

struct SegmentPlan {
    cplx z0, z1;
    bool tp0, tp1;
    std::vector<Piece> pieces;
    cplx end_ref;
};

SegmentPlan plan_segment(const Poly& p, std::span<const cplx> turning, cplx z0, cplx z1,
                         cplx ref_in, bool tp0, bool tp1)
{
    SegmentPlan plan{z0, z1, tp0, tp1, {}, {}};
    const cplx dz = z1 - z0;
    const double len = std::abs(dz);
    const int deg = p.degree();
    auto zt = [&](double t) { return z0 + t * dz; };

    std::vector<cplx> others;
    for (const cplx& tp : turning) {
        double tol = 1e-9 * (1.0 + std::abs(tp));
        if (tp0 && std::abs(tp - z0) <= tol)
            continue;
        if (tp1 && std::abs(tp - z1) <= tol)
            continue;
        others.push_back(tp);
    }

    double t = 0.0;
    cplx ref = tp0 ? sqrt_near(p(zt(kNearEnd)), ref_in) : sqrt_near(p(z0), ref_in);
    while (t < 1.0) {
        cplx z = zt(t);
        double dist = std::numeric_limits<double>::infinity();
        for (const cplx& tp : others)
            dist = std::min(dist, std::abs(z - tp));
        double dt = std::min({0.25, 0.3 * dist / (deg * len), 1.0 - t});
        if (dt * len < 1e-13 * (1.0 + std::abs(z))) {
            std::ostringstream os;
            os << "turning point on or near the path at " << z;
            fail(Errc::BranchJump, os.str());
        }
        double tn = (1.0 - t - dt < 1e-12) ? 1.0 : t + dt;
        double te = (tn == 1.0 && tp1) ? 1.0 - std::min(kNearEnd, 0.5 * (tn - t)) : tn;
        cplx next = sqrt_near(p(zt(te)), ref);
        if (std::abs(next) > 0.0 && std::abs(ref) > 0.0 &&
            std::abs(std::arg(next / ref)) > 0.5 * std::numbers::pi) {
            std::ostringstream os;
            os << "phase jump of sqrt(q) near " << zt(te);
            fail(Errc::BranchJump, os.str());
        }
        plan.pieces.push_back({t, tn, ref});
        ref = next;
        t = tn;
    }
    plan.end_ref = ref;
    return plan;
}

std::vector<SegmentPlan> plan_path(const Poly& p, std::span<const cplx> turning, const PathC& path)
{
    const auto& pts = path.points;
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (pts[k] == pts[k - 1])
            throw std::invalid_argument("consecutive path nodes must be distinct");
    if (path.branch_seed == cplx(0.0))
        throw std::invalid_argument("branch seed must be nonzero");

    std::vector<SegmentPlan> plans;
    cplx ref = path.branch_seed;
    const std::size_t last = pts.size() - 1;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        bool tp0 = (k == 0) && at_turning_point(p, pts[0]);
        bool tp1 = (k + 1 == last) && at_turning_point(p, pts[last]);
        plans.push_back(plan_segment(p, turning, pts[k], pts[k + 1], ref, tp0, tp1));
        ref = plans.back().end_ref;
    }
    return plans;
}

cplx integrate_piece(const Poly& p, const SegmentPlan& seg, const Piece& pc)
{
    const cplx dz = seg.z1 - seg.z0;
    const double w = pc.tb - pc.ta;
    auto sq = [&](double t) { return sqrt_near(p(seg.z0 + t * dz), pc.ref) * dz; };
    const double abs_tol = 1e-15 * std::abs(pc.ref) * std::abs(dz) * w + 1e-300;

    if (seg.tp0 && pc.ta == 0.0 && seg.tp1 && pc.tb == 1.0) {
        auto f = [&](double th) {
            return sq(0.5 + 0.5 * std::sin(th)) * (0.5 * std::cos(th));
        };
        return quad::integrate<cplx>(f, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, abs_tol,
                                     1e-12);
    }
    if (seg.tp0 && pc.ta == 0.0) {
        auto f = [&](double u) { return sq(pc.tb * u * u) * (2.0 * pc.tb * u); };
        return quad::integrate<cplx>(f, 0.0, 1.0, abs_tol, 1e-12);
    }
    if (seg.tp1 && pc.tb == 1.0) {
        auto f = [&](double u) {
            double v = 1.0 - u;
            return sq(1.0 - w * v * v) * (2.0 * w * v);
        };
        return quad::integrate<cplx>(f, 0.0, 1.0, abs_tol, 1e-12);
    }
    auto f = [&](double t) { return sq(t); };
    return quad::integrate<cplx>(f, pc.ta, pc.tb, abs_tol, 1e-12);
}

// integral of sqrt|q| |dz| over one straight segment, endpoint zeros of q
// removed by substitution
double abs_segment(const Poly& p, cplx z0, cplx z1, bool tp0, bool tp1)
{
    const cplx dz = z1 - z0;
    const double len = std::abs(dz);
    auto g = [&](double t) { return std::sqrt(std::abs(p(z0 + t * dz))) * len; };
    const double abs_tol = 1e-15 * len * (1.0 + std::sqrt(p.magnitude(std::abs(z0) + len)));
    if (tp0 && tp1) {
        auto f = [&](double th) { return g(0.5 + 0.5 * std::sin(th)) * (0.5 * std::cos(th)); };
        return quad::integrate<double>(f, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, abs_tol,
                                       1e-13);
    }
    if (tp0) {
        auto f = [&](double u) { return g(u * u) * (2.0 * u); };
        return quad::integrate<double>(f, 0.0, 1.0, abs_tol, 1e-13);
    }
    if (tp1) {
        auto f = [&](double u) { return g(1.0 - (1.0 - u) * (1.0 - u)) * (2.0 * (1.0 - u)); };
        return quad::integrate<double>(f, 0.0, 1.0, abs_tol, 1e-13);
    }
    return quad::integrate<double>(g, 0.0, 1.0, abs_tol, 1e-13);
}

std::vector<cplx> root_locations(const Poly& p)
{
    std::vector<cplx> out;
    for (const auto& tp : turning_points(p))
        out.push_back(tp.z);
    return out;
}

double real_action(const Poly& p, double a, double b, bool want_negative)
{
    if (!(a < b))
        throw std::invalid_argument("interval endpoints must satisfy a < b");
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    const double scale = p.magnitude(std::max(std::abs(a), std::abs(b)));
    auto f = [&](double th) {
        double x = c + h * std::sin(th);
        double q = p(cplx(x, 0.0)).real();
        bool interior = std::abs(std::cos(th)) > 1e-6;
        if (interior && (want_negative ? q >= 1e-14 * scale : q <= -1e-14 * scale)) {
            std::ostringstream os;
            os << "q has the wrong sign at x = " << x;
            fail(Errc::SignError, os.str());
        }
        return std::sqrt(std::abs(q)) * h * std::cos(th);
    };
    double v = quad::integrate<double>(f, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi,
                                       1e-300, 1e-13);
    return v;
}

}  // namespace

ActionValue action(const Poly& p, std::span<const cplx> turning, const PathC& path)
{
    if (path.points.size() < 2)
        return {0.0, path.branch_seed, 0.0};
    auto plans = plan_path(p, turning, path);
    cplx S = 0.0;
    for (const auto& seg : plans)
        for (const auto& pc : seg.pieces)
            S += integrate_piece(p, seg, pc);
    double mass = std::numbers::pi * agmon_mass(p, path.points);
    return {S, plans.back().end_ref, mass};
}

ActionValue action(const Poly& p, const PathC& path)
{
    auto tps = root_locations(p);
    return action(p, tps, path);
}

std::vector<BranchSample> sqrt_q_along(const Poly& p, const PathC& path)
{
    std::vector<BranchSample> out;
    if (path.points.size() < 2)
        return out;
    auto tps = root_locations(p);
    auto plans = plan_path(p, tps, path);
    constexpr int kSub = 8;
    cplx prev = path.branch_seed;
    for (std::size_t k = 0; k < plans.size(); ++k) {
        const auto& seg = plans[k];
        for (const auto& pc : seg.pieces) {
            for (int j = 0; j < kSub; ++j) {
                double t = pc.ta + (pc.tb - pc.ta) * j / kSub;
                cplx z = seg.z0 + t * (seg.z1 - seg.z0);
                cplx v = (t == 0.0 && seg.tp0) ? cplx(0.0) : sqrt_near(p(z), std::abs(prev) > 0 ? prev : pc.ref);
                if (std::abs(v) > 0.0)
                    prev = v;
                out.push_back({static_cast<double>(k) + t, z, v});
            }
        }
    }
    const auto& seg = plans.back();
    cplx v = seg.tp1 ? cplx(0.0) : sqrt_near(p(seg.z1), prev);
    out.push_back({static_cast<double>(plans.size()), seg.z1, v});
    return out;
}

double well_action(const Poly& p, double a, double b) { return real_action(p, a, b, true); }

double barrier_action(const Poly& p, double a, double b) { return real_action(p, a, b, false); }

double agmon_mass(const Poly& p, std::span<const cplx> curve)
{
    double total = 0.0;
    const std::size_t n = curve.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (curve[k] == curve[k + 1])
            continue;
        bool tp0 = at_turning_point(p, curve[k]);
        bool tp1 = at_turning_point(p, curve[k + 1]);
        total += abs_segment(p, curve[k], curve[k + 1], tp0, tp1);
    }
    return total / std::numbers::pi;
}

}  // namespace cwkb
