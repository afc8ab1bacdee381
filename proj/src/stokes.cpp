#include "cwkb/stokes.hpp"

#include "cwkb/action.hpp"
#include "cwkb/errors.hpp"
#include "cwkb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cwkb {

constexpr double pi = std::numbers::pi;

int StokesGraph::finite_count() const
{
    return static_cast<int>(std::count_if(lines.begin(), lines.end(), [](const LevelLine& l) {
        return l.termination == Termination::hits_turning_point;
    }));
}

int StokesGraph::unbounded_count() const
{
    return static_cast<int>(std::count_if(lines.begin(), lines.end(), [](const LevelLine& l) {
        return l.termination == Termination::unbounded;
    }));
}

std::array<double, 3> launch_angles(const Poly& p, const TurningPoint& tp, LineKind kind)
{
    if (tp.multiplicity != 1)
        fail(Errc::MultipleTurningPoint, "launch angles need a simple turning point");
    double a = std::arg(p.eval_with_derivative(tp.z).second);
    double base = kind == LineKind::stokes ? pi : 0.0;
    std::array<double, 3> out;
    for (int k = 0; k < 3; ++k) {
        double t = std::fmod((base + 2.0 * k * pi - a) / 3.0, 2.0 * pi);
        if (t < 0)
            t += 2.0 * pi;
        out[k] = t;
    }
    std::sort(out.begin(), out.end());
    return out;
}

double seed_radius(const Poly& p, const std::vector<TurningPoint>& tps, std::size_t index,
                   double lambda_ref)
{
    double r = exclusion_radius(p, tps[index].z, lambda_ref);
    for (std::size_t j = 0; j < tps.size(); ++j)
        if (j != index)
            r = std::min(r, 0.1 * std::abs(tps[j].z - tps[index].z));
    return r;
}

namespace {

// S along the straight chord a -> b with the branch nearest ref
cplx chord(const Poly& p, cplx a, cplx b, cplx ref)
{
    const cplx dz = b - a;
    auto f = [&](double t) { return sqrt_near(p(a + t * dz), ref) * dz; };
    return quad::integrate<cplx>(f, 0.0, 1.0, 1e-16 * std::abs(ref) * std::abs(dz) + 1e-300,
                                 1e-13);
}

struct Geometry {
    std::vector<TurningPoint> tps;
    std::vector<cplx> locs;
    std::vector<double> radius;
    double R, L;
};

Geometry geometry(const Poly& p, const TraceConfig& cfg)
{
    Geometry g;
    g.tps = turning_points(p);
    assert_simple(g.tps);
    double m = 0.0;
    for (std::size_t k = 0; k < g.tps.size(); ++k) {
        g.locs.push_back(g.tps[k].z);
        g.radius.push_back(seed_radius(p, g.tps, k, cfg.lambda_ref));
        m = std::max(m, std::abs(g.tps[k].z));
    }
    g.R = cfg.bound_radius > 0 ? cfg.bound_radius : 4.0 * (1.0 + m);
    g.L = cfg.max_length > 0 ? cfg.max_length : 50.0 * g.R;
    return g;
}

double point_polyline_distance(cplx z, const std::vector<cplx>& poly)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        cplx a = poly[k], b = poly[k + 1];
        cplx ab = b - a;
        double t = std::norm(ab) > 0 ? std::clamp(((z - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0) : 0.0;
        d = std::min(d, std::abs(z - (a + t * ab)));
    }
    if (poly.size() == 1)
        d = std::abs(z - poly[0]);
    return d;
}

LevelLine trace_raw(const Poly& p, const Geometry& g, std::size_t origin, double angle, LineKind kind,
                    const TraceConfig& cfg)
{
    const cplx tp = g.locs[origin];
    const cplx dir = kind == LineKind::stokes ? cplx(0, 1) : cplx(1, 0);
    auto level = [&](cplx S) { return kind == LineKind::stokes ? S.real() : S.imag(); };
    auto correct = [&](cplx S, cplx s) {
        return kind == LineKind::stokes ? -S.real() / s : cplx(0, -1) * S.imag() / s;
    };

    LevelLine line;
    line.kind = kind;
    line.origin = g.tps[origin];
    line.launch_angle = angle;
    line.nodes.push_back(tp);
    line.actions.push_back(0.0);

    // seed point and branch, oriented so that the motion is outward
    const double r0 = g.radius[origin];
    cplx z = tp + std::polar(r0, angle);
    cplx s = std::sqrt(p(z));
    if ((dir / s * std::polar(1.0, -angle)).real() < 0)
        s = -s;
    cplx S = 0.0;
    for (int it = 0; it < 8; ++it) {
        auto back = action(p, g.locs, PathC{{z, tp}, s});
        S = -back.S;
        if (std::abs(level(S)) <= 1e-14 * (1.0 + std::abs(S)))
            break;
        cplx zn = z + correct(S, s);
        s = sqrt_near(p(zn), s);
        z = zn;
    }
    line.nodes.push_back(z);
    line.actions.push_back(S);

    auto rhs = [&](cplx w, cplx ref) { return dir / sqrt_near(p(w), ref); };
    auto nearest_tp = [&](cplx w) {
        double d = std::numeric_limits<double>::infinity();
        for (const cplx& t : g.locs)
            d = std::min(d, std::abs(w - t));
        return d;
    };

    // Dormand-Prince 5(4)
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2;
    (void)c3;
    (void)c4;
    (void)c5;

    double length = r0;
    double h = 0.1 * std::abs(s) * r0;
    long steps = 0;
    while (true) {
        double dtp = nearest_tp(z);
        double hcap = std::abs(s) * std::min({0.1 * dtp, 0.05 * (1.0 + std::abs(z)), g.R / 40.0});
        h = std::min(h, hcap);
        if (h < 1e-14 * (1.0 + std::abs(S)))
            fail(Errc::StepUnderflow, "level-line step underflow");

        cplx k1 = rhs(z, s);
        cplx k2 = rhs(z + h * (a21 * k1), s);
        cplx k3 = rhs(z + h * (a31 * k1 + a32 * k2), s);
        cplx k4 = rhs(z + h * (a41 * k1 + a42 * k2 + a43 * k3), s);
        cplx k5 = rhs(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), s);
        cplx k6 = rhs(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), s);
        cplx zp = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        cplx k7 = rhs(zp, s);
        double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        double tol = 1e-11 * (1.0 + std::abs(z));
        if (err > tol) {
            h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
            continue;
        }

        // project back onto the level set
        cplx sp = sqrt_near(p(zp), s);
        cplx Sp = S + chord(p, z, zp, s);
        for (int it = 0; it < 4; ++it) {
            if (std::abs(level(Sp)) <= 1e-14 * (1.0 + std::abs(Sp)))
                break;
            zp += correct(Sp, sp);
            sp = sqrt_near(p(zp), s);
            Sp = S + chord(p, z, zp, s);
        }
        length += std::abs(zp - z);
        z = zp;
        s = sp;
        S = Sp;
        line.nodes.push_back(z);
        line.actions.push_back(S);
        h *= std::min(5.0, 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2));

        for (std::size_t j = 0; j < g.locs.size(); ++j) {
            if (std::abs(z - g.locs[j]) >= g.radius[j])
                continue;
            if (j == origin && length < 3.0 * r0)
                continue;
            cplx Send = S + action(p, g.locs, PathC{{z, g.locs[j]}, s}).S;
            if (std::abs(level(Send)) <= cfg.tol_line * (1.0 + std::abs(Send))) {
                line.nodes.push_back(g.locs[j]);
                line.actions.push_back(Send);
                line.termination = Termination::hits_turning_point;
                line.end_point = g.locs[j];
                return line;
            }
        }
        if (std::abs(z) > g.R) {
            line.termination = Termination::unbounded;
            line.end_point = z;
            line.escape_angle = std::arg(z);
            return line;
        }
        if (length > g.L) {
            line.termination = Termination::max_length;
            line.end_point = z;
            return line;
        }
        if (++steps > 2000000)
            fail(Errc::StepUnderflow, "level-line step budget exhausted");
    }
}

std::size_t conjugate_index(const Geometry& g, std::size_t k)
{
    for (std::size_t j = 0; j < g.locs.size(); ++j)
        if (g.locs[j] == std::conj(g.locs[k]))
            return j;
    fail(Errc::NonConvergence, "turning points are not closed under conjugation");
}

LevelLine trace(const Poly& p, const Geometry& g, std::size_t origin, double angle, LineKind kind,
                const TraceConfig& cfg)
{
    const cplx tp = g.locs[origin];
    bool lower = tp.imag() < 0 || (tp.imag() == 0 && std::sin(angle) < -1e-12);
    if (!(cfg.mirror_real && p.is_real() && lower))
        return trace_raw(p, g, origin, angle, kind, cfg);
    double mirrored = 2.0 * pi - angle;
    // reuse the exact launch angle of the upper line so both traces coincide
    for (double t : launch_angles(p, g.tps[conjugate_index(g, origin)], kind))
        if (std::abs(std::remainder(t - mirrored, 2.0 * pi)) < 1e-9)
            mirrored = t;
    LevelLine line = trace_raw(p, g, conjugate_index(g, origin), mirrored, kind, cfg);
    line.origin = g.tps[origin];
    line.launch_angle = angle;
    for (auto& z : line.nodes)
        z = std::conj(z);
    for (auto& S : line.actions)
        S = std::conj(S);
    line.end_point = std::conj(line.end_point);
    line.escape_angle = -line.escape_angle;
    return line;
}

}  // namespace

double polyline_distance(cplx z, const std::vector<cplx>& poly)
{
    return point_polyline_distance(z, poly);
}

LevelLine trace_line(const Poly& p, const TurningPoint& tp, double angle, LineKind kind,
                     const TraceConfig& cfg)
{
    Geometry g = geometry(p, cfg);
    std::size_t idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.locs.size(); ++k)
        if (std::abs(g.locs[k] - tp.z) < best) {
            best = std::abs(g.locs[k] - tp.z);
            idx = k;
        }
    if (best > 1e-8 * (1.0 + std::abs(tp.z)))
        throw std::invalid_argument("trace_line origin is not a turning point of q");
    return trace(p, g, idx, angle, kind, cfg);
}

StokesGraph build_graph(const Poly& p, const TraceConfig& cfg)
{
    Geometry g = geometry(p, cfg);
    StokesGraph graph;
    graph.turning_points = g.tps;
    std::vector<std::pair<std::size_t, std::size_t>> finite_keys;
    for (std::size_t k = 0; k < g.tps.size(); ++k) {
        for (double angle : launch_angles(p, g.tps[k], LineKind::stokes)) {
            LevelLine line = trace(p, g, k, angle, LineKind::stokes, cfg);
            if (line.termination == Termination::hits_turning_point) {
                std::size_t other = 0;
                for (std::size_t j = 0; j < g.locs.size(); ++j)
                    if (g.locs[j] == line.end_point)
                        other = j;
                // the same finite line found again from its other end
                const cplx mid = line.nodes[line.nodes.size() / 2];
                bool dup = false;
                for (const auto& prev : graph.lines) {
                    if (prev.termination != Termination::hits_turning_point)
                        continue;
                    bool same_pair = (prev.origin.z == g.locs[other] && prev.end_point == g.locs[k]) ||
                                     (prev.origin.z == g.locs[k] && prev.end_point == g.locs[other]);
                    if (!same_pair)
                        continue;
                    if (point_polyline_distance(mid, prev.nodes) < 1e-6 * (1.0 + std::abs(mid)))
                        dup = true;
                }
                if (dup)
                    continue;
            }
            graph.lines.push_back(std::move(line));
        }
    }
    if (p.is_real()) {
        std::vector<double> xs;
        for (const auto& tp : g.tps)
            if (tp.is_real)
                xs.push_back(tp.z.real());
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            double q = p(0.5 * (xs[k] + xs[k + 1])).real();
            graph.real_axis_segments.push_back(
                {xs[k], xs[k + 1], q < 0 ? LineKind::stokes : LineKind::anti_stokes});
        }
    }
    return graph;
}

}  // namespace cwkb
