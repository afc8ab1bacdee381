#include "cwkb/limits.hpp"

#include "cwkb/action.hpp"
#include "cwkb/errors.hpp"
#include "cwkb/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace cwkb {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<cplx> segment_nodes(cplx a, cplx b, int n)
{
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        out.push_back(k == n ? b : a + (b - a) * (static_cast<double>(k) / n));
    return out;
}

std::vector<double> density_at(const Poly& p, const std::vector<cplx>& curve)
{
    std::vector<double> out;
    for (auto z : curve)
        out.push_back(std::sqrt(std::abs(p(z))) / pi);
    return out;
}

PredictedZeroLine make_line(const Poly& p, std::string label, int set, std::vector<cplx> curve, cplx anchor,
                            double offset)
{
    PredictedZeroLine l;
    l.label = std::move(label);
    l.set = set;
    l.mass_density = density_at(p, curve);
    l.curve = std::move(curve);
    l.anchor_tp = anchor;
    l.offset_c = offset;
    return l;
}

// the non-real Stokes lines of a real turning point, truncated at radius reach
std::vector<std::vector<cplx>> complex_branches(const Poly& p, double x, double reach)
{
    TurningPoint tp{cplx(x, 0.0), 1, true};
    TraceConfig cfg;
    cfg.bound_radius = reach;
    cfg.mirror_real = false;
    std::vector<std::vector<cplx>> out;
    for (double ang : launch_angles(p, tp, LineKind::stokes)) {
        double s = std::sin(ang);
        if (std::abs(s) < 1e-6)
            continue;
        auto line = trace_line(p, tp, ang, LineKind::stokes, cfg);
        std::vector<cplx> kept;
        for (auto z : line.nodes) {
            if (std::abs(z) > reach)
                break;
            kept.push_back(z);
        }
        out.push_back(std::move(kept));
    }
    // upper branch first
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.back().imag() > b.back().imag();
    });
    return out;
}

// Liang-Barsky clipping of a polyline against a box; returns the inside pieces
std::vector<std::vector<cplx>> clip_polyline(const std::vector<cplx>& curve, const Box& box)
{
    std::vector<std::vector<cplx>> pieces;
    std::vector<cplx> cur;
    auto flush = [&] {
        if (cur.size() >= 2)
            pieces.push_back(cur);
        cur.clear();
    };
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
        cplx a = curve[k], b = curve[k + 1];
        double t0 = 0.0, t1 = 1.0;
        double dx = b.real() - a.real(), dy = b.imag() - a.imag();
        const double pp[4] = {-dx, dx, -dy, dy};
        const double qq[4] = {a.real() - box.x0, box.x1 - a.real(), a.imag() - box.y0, box.y1 - a.imag()};
        bool inside = true;
        for (int i = 0; i < 4 && inside; ++i) {
            if (pp[i] == 0.0) {
                if (qq[i] < 0.0)
                    inside = false;
            } else {
                double r = qq[i] / pp[i];
                if (pp[i] < 0.0)
                    t0 = std::max(t0, r);
                else
                    t1 = std::min(t1, r);
            }
        }
        if (!inside || t0 > t1) {
            flush();
            continue;
        }
        cplx ca = t0 == 0.0 ? a : a + (b - a) * t0;
        cplx cb = t1 == 1.0 ? b : a + (b - a) * t1;
        if (cur.empty() || cur.back() != ca) {
            flush();
            cur.push_back(ca);
        }
        cur.push_back(cb);
        if (t1 < 1.0)
            flush();
    }
    flush();
    return pieces;
}

double segment_distance(cplx z, cplx a, cplx b)
{
    cplx d = b - a;
    double len2 = std::norm(d);
    double t = len2 > 0.0 ? std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
    return std::abs(z - (a + d * t));
}

struct ArcGeom {
    std::vector<cplx> nodes;
};

}  // namespace

EmpiricalMeasure empirical_measure(const ZeroSet& zs)
{
    EmpiricalMeasure m;
    m.lambda = zs.lambda;
    for (const auto& z : zs.zeros)
        m.points.push_back({z.z, 1.0 / zs.lambda});
    m.total_mass = static_cast<double>(zs.zeros.size()) / zs.lambda;
    return m;
}

Family parse_family(const std::string& name)
{
    if (name == "one_well_quartic" || name == "1well")
        return Family::one_well_quartic;
    if (name == "symmetric_double_well" || name == "2well")
        return Family::symmetric_double_well;
    if (name == "nonsymmetric_double_well" || name == "nonsymm")
        return Family::nonsymmetric_double_well;
    fail(Errc::UnsupportedFamily, "unknown family '" + name + "'");
}

std::string to_string(Family f)
{
    switch (f) {
    case Family::one_well_quartic: return "one_well_quartic";
    case Family::symmetric_double_well: return "symmetric_double_well";
    case Family::nonsymmetric_double_well: return "nonsymmetric_double_well";
    }
    return "?";
}

Poly family_poly(Family f, const std::vector<double>& v)
{
    switch (f) {
    case Family::one_well_quartic:
        if (v.size() != 2 || !(v[0] > 0) || !(v[1] > 0))
            throw std::invalid_argument("one_well_quartic needs a > 0, b > 0");
        return Poly::real({-v[0] * v[0] * v[1] * v[1], 0.0, v[1] * v[1] - v[0] * v[0], 0.0, 1.0});
    case Family::symmetric_double_well:
        if (v.size() != 2 || !(v[0] > 0) || !(v[1] > v[0]))
            throw std::invalid_argument("symmetric_double_well needs 0 < a < b");
        return Poly::real({v[0] * v[0] * v[1] * v[1], 0.0, -(v[0] * v[0] + v[1] * v[1]), 0.0, 1.0});
    case Family::nonsymmetric_double_well: {
        if (v.size() != 4 || !(v[0] < v[1] && v[1] < v[2] && v[2] < v[3]))
            throw std::invalid_argument("nonsymmetric_double_well needs four increasing roots");
        std::vector<cplx> r(v.begin(), v.end());
        return Poly::from_roots(r, 1.0);
    }
    }
    fail(Errc::UnsupportedFamily, "unknown family");
}

std::vector<PredictedZeroLine> predicted_zero_lines(Family f, const std::vector<double>& v,
                                                    const LineConfig& cfg)
{
    Poly p = family_poly(f, v);
    double rmax = 0.0;
    for (double x : v)
        rmax = std::max(rmax, std::abs(x));
    const double reach = cfg.reach > 0 ? cfg.reach : 4.0 * (1.0 + rmax);
    const int n = std::max(cfg.nodes, 8);
    std::vector<PredictedZeroLine> out;
    switch (f) {
    case Family::one_well_quartic: {
        const double a = v[0], b = v[1];
        out.push_back(make_line(p, "(-a,a)", 0, segment_nodes(-a, a, n), a, 0.0));
        out.push_back(make_line(p, "i(b,inf)", 0, segment_nodes(cplx(0, b), cplx(0, reach), n), cplx(0, b), 0.0));
        out.push_back(make_line(p, "-i(b,inf)", 0, segment_nodes(cplx(0, -b), cplx(0, -reach), n), cplx(0, -b), 0.0));
        break;
    }
    case Family::symmetric_double_well: {
        const double a = v[0], b = v[1];
        const double xi = barrier_action(p, -a, a);
        out.push_back(make_line(p, "(a,b)", 0, segment_nodes(a, b, n), a, 0.0));
        out.push_back(make_line(p, "(-b,-a)", 0, segment_nodes(-b, -a, n), -a, 0.0));
        out.push_back(make_line(p, "i(-inf,inf)", 0, segment_nodes(cplx(0, -reach), cplx(0, reach), n), a,
                                -0.5 * xi));
        break;
    }
    case Family::nonsymmetric_double_well: {
        out.push_back(make_line(p, "(a0,a1)", 0, segment_nodes(v[0], v[1], n), v[0], 0.0));
        out.push_back(make_line(p, "(a2,a3)", 0, segment_nodes(v[2], v[3], n), v[2], 0.0));
        const double origin[2] = {v[2], v[1]};
        for (int set = 1; set <= 2; ++set) {
            auto br = complex_branches(p, origin[set - 1], reach);
            const char* names[2] = {"upper", "lower"};
            for (std::size_t k = 0; k < br.size() && k < 2; ++k) {
                std::string label = std::string(set == 1 ? "a2 " : "a1 ") + names[k];
                out.push_back(make_line(p, label, set, br[k], origin[set - 1], 0.0));
            }
        }
        break;
    }
    }
    return out;
}

std::vector<PredictedZeroLine> select_set(const std::vector<PredictedZeroLine>& lines, int set)
{
    std::vector<PredictedZeroLine> out;
    for (const auto& l : lines)
        if (l.set == 0 || l.set == set)
            out.push_back(l);
    return out;
}

MeasureReport compare_measure(const ZeroSet& zs, const Poly& p, const std::vector<PredictedZeroLine>& lines,
                              const MeasureConfig& cfg)
{
    MeasureReport rep;
    const double lambda = zs.lambda;
    rep.lambda = lambda;
    rep.kappa = cfg.kappa;
    rep.tube_radius = cfg.kappa / lambda;
    rep.arc_mass = cfg.arc_mass > 0 ? cfg.arc_mass : std::max(0.05, 25.0 / lambda);
    const Box clip = cfg.clip ? *cfg.clip : zs.region;

    struct Disc {
        cplx c;
        double r;
    };
    std::vector<Disc> discs;
    for (const auto& tp : turning_points(p))
        discs.push_back({tp.z, exclusion_radius(p, tp.z, lambda)});
    auto in_disc = [&](cplx z) {
        for (const auto& d : discs)
            if (std::abs(z - d.c) < d.r)
                return true;
        return false;
    };

    std::vector<ArcGeom> geom;
    for (const auto& line : lines) {
        int index = 0;
        for (const auto& piece : clip_polyline(line.curve, clip)) {
            // runs of segments with the same exclusion status
            std::size_t k = 0;
            const std::size_t nseg = piece.size() - 1;
            while (k < nseg) {
                bool ex = in_disc(0.5 * (piece[k] + piece[k + 1]));
                std::size_t e = k;
                std::vector<double> seg_mass;
                while (e < nseg && in_disc(0.5 * (piece[e] + piece[e + 1])) == ex) {
                    seg_mass.push_back(agmon_mass(p, std::span<const cplx>(&piece[e], 2)));
                    ++e;
                }
                double run_mass = 0.0;
                for (double m : seg_mass)
                    run_mass += m;
                int parts = ex ? 1 : std::max(1, static_cast<int>(std::lround(run_mass / rep.arc_mass)));
                double target = run_mass / parts;
                std::size_t start = k;
                double acc = 0.0, total = 0.0;
                int made = 0;
                for (std::size_t j = k; j < e; ++j) {
                    acc += seg_mass[j - k];
                    total += seg_mass[j - k];
                    bool last = j + 1 == e;
                    // cut at the node nearest to the next multiple of the target mass
                    if (last || (made + 1 < parts && total + 0.5 * seg_mass[j - k] >= (made + 1) * target)) {
                        ArcRow row;
                        row.line = line.label;
                        row.arc = index++;
                        row.from = piece[start];
                        row.to = piece[j + 1];
                        row.predicted_mass = acc;
                        row.excluded = ex;
                        rep.arcs.push_back(row);
                        geom.push_back({std::vector<cplx>(piece.begin() + static_cast<long>(start),
                                                          piece.begin() + static_cast<long>(j) + 2)});
                        start = j + 1;
                        acc = 0.0;
                        ++made;
                    }
                }
                k = e;
            }
        }
    }

    for (const auto& zero : zs.zeros) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arc = 0;
        for (std::size_t a = 0; a < geom.size(); ++a) {
            const auto& g = geom[a].nodes;
            for (std::size_t k = 0; k + 1 < g.size(); ++k) {
                double d = segment_distance(zero.z, g[k], g[k + 1]);
                if (d < best) {
                    best = d;
                    arc = a;
                }
            }
        }
        if (best <= rep.tube_radius) {
            ++rep.matched;
            rep.max_distance = std::max(rep.max_distance, best);
            ++rep.arcs[arc].count;
        } else {
            rep.unmatched.push_back(zero.z);
            if (in_disc(zero.z))
                ++rep.unmatched_in_discs;
            else
                ++rep.unmatched_outside_discs;
        }
    }
    for (auto& row : rep.arcs) {
        row.count_over_lambda = row.count / lambda;
        row.relative_error = row.predicted_mass > 0
                                 ? std::abs(row.count_over_lambda - row.predicted_mass) / row.predicted_mass
                                 : 0.0;
        if (!row.excluded)
            rep.max_relative_error = std::max(rep.max_relative_error, row.relative_error);
    }
    return rep;
}

LineFit fit_zero_line(const ZeroSet& zs, const Poly& p, cplx anchor, const Box& subset,
                      const std::vector<cplx>& waypoints, cplx branch_seed)
{
    LineFit fit;
    auto tps = turning_points(p);
    std::vector<cplx> tz;
    for (const auto& t : tps)
        tz.push_back(t.z);
    for (const auto& zero : zs.zeros) {
        if (!subset.contains(zero.z))
            continue;
        PathC path;
        path.points.push_back(anchor);
        path.points.insert(path.points.end(), waypoints.begin(), waypoints.end());
        path.points.push_back(zero.z);
        path.branch_seed = branch_seed;
        fit.actions.push_back(action(p, tz, path).S);
    }
    fit.count = static_cast<int>(fit.actions.size());
    if (fit.count < 3)
        fail(Errc::TooFewZeros, "fewer than 3 zeros in the fitting region");
    double sum = 0.0;
    for (auto s : fit.actions)
        sum += s.real();
    fit.c_fit = sum / fit.count;
    double ss = 0.0;
    for (auto s : fit.actions)
        ss += (s.real() - fit.c_fit) * (s.real() - fit.c_fit);
    fit.residual_rms = std::sqrt(ss / fit.count);
    std::vector<double> im;
    for (auto s : fit.actions)
        im.push_back(s.imag());
    std::sort(im.begin(), im.end());
    std::vector<double> gaps;
    for (std::size_t k = 1; k < im.size(); ++k)
        gaps.push_back((im[k] - im[k - 1]) * zs.lambda / pi);
    std::sort(gaps.begin(), gaps.end());
    std::size_t m = gaps.size();
    fit.median_gap = m % 2 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
    return fit;
}

std::string to_string(RatioClass c)
{
    switch (c) {
    case RatioClass::irrational_like: return "irrational-like";
    case RatioClass::even_odd: return "even/odd rational";
    case RatioClass::odd_odd: return "odd/odd rational";
    }
    return "?";
}

RatioForm classify_ratio(double rho, long cap, double tol)
{
    RatioForm form;
    if (!(rho > 0) || !std::isfinite(rho))
        throw std::invalid_argument("ratio must be positive");
    // convergents h/k of the continued fraction of rho
    long h0 = 1, h1 = 0, k0 = 0, k1 = 1;  // h_{-1}, h_{-2}, k_{-1}, k_{-2}
    double x = rho;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(x);
        long ai = static_cast<long>(a);
        long h = ai * h0 + h1, k = ai * k0 + k1;
        if (k > cap)
            break;
        if (std::abs(rho - static_cast<double>(h) / k) <= tol) {
            form.p = h;
            form.q = k;
            form.cls = (h % 2 == 1 && k % 2 == 1) ? RatioClass::odd_odd : RatioClass::even_odd;
            return form;
        }
        h1 = h0;
        h0 = h;
        k1 = k0;
        k0 = k;
        double frac = x - a;
        if (frac <= 0.0)
            break;
        x = 1.0 / frac;
    }
    return form;
}

std::vector<LeadingRoot> leading_sequence(const DoubleWellData& d, int count)
{
    if (count < 1)
        throw std::invalid_argument("count must be positive");
    double hi = (count + 1) * pi / (d.alpha1 + d.alpha2);
    for (;;) {
        auto roots = leading_roots(d, 0.0, hi);
        std::map<std::pair<int, int>, LeadingRoot> first;
        for (const auto& r : roots) {
            auto key = std::make_pair(r.family, r.n);
            auto it = first.find(key);
            if (it == first.end() || r.lambda < it->second.lambda)
                first[key] = r;
        }
        std::vector<LeadingRoot> seq;
        for (const auto& [key, r] : first)
            seq.push_back(r);
        std::sort(seq.begin(), seq.end(), [](const LeadingRoot& a, const LeadingRoot& b) {
            if (a.lambda != b.lambda)
                return a.lambda < b.lambda;
            return a.family < b.family;
        });
        // only the prefix below the last complete centre of both families is reliable
        if (static_cast<int>(seq.size()) >= count + 4) {
            seq.resize(static_cast<std::size_t>(count));
            return seq;
        }
        hi *= 1.5;
    }
}

DensityReport subsequence_density(const DoubleWellData& d, double delta, const std::vector<LeadingRoot>& eigen)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1)");
    DensityReport rep;
    rep.rho = d.alpha1 / d.alpha2;
    rep.form = classify_ratio(rep.rho);
    rep.delta = delta;
    rep.count = static_cast<int>(eigen.size());
    const double tau = std::asin(delta);
    const double alpha[2] = {d.alpha1, d.alpha2};
    // rho = (2 r1 + 1) / (2 r2 + 1) in the odd/odd case
    const long r[2] = {(rep.form.p - 1) / 2, (rep.form.q - 1) / 2};
    for (int l = 1; l <= 2; ++l) {
        SequenceDensity sd;
        sd.sequence = l;
        const double other = alpha[2 - l];
        long own_hits = 0, other_hits = 0;
        for (const auto& e : eigen) {
            if (e.family != l)
                continue;
            ++sd.size;
            if (std::abs(std::cos(other * e.lambda)) > delta)
                ++sd.flagged;
            if (rep.form.cls == RatioClass::odd_odd) {
                if ((2 * e.n + 1) % (2 * r[l - 1] + 1) != 0)
                    ++own_hits;
                if ((2 * e.n + 1) % (2 * r[2 - l] + 1) != 0)
                    ++other_hits;
            }
        }
        sd.empirical = sd.size ? static_cast<double>(sd.flagged) / sd.size : 0.0;
        sd.equidistributed = 1.0 - 2.0 * tau / pi;
        switch (rep.form.cls) {
        case RatioClass::even_odd:
            sd.predicted = 1.0;
            break;
        case RatioClass::odd_odd:
            sd.predicted = 2.0 * r[l - 1] / (2.0 * r[l - 1] + 1.0);
            if (sd.size) {
                sd.index_density_own = static_cast<double>(own_hits) / sd.size;
                sd.index_density_other = static_cast<double>(other_hits) / sd.size;
            }
            break;
        case RatioClass::irrational_like:
            sd.predicted = std::clamp(1.0 - 2.0 * (other / alpha[l - 1]) * tau, 0.0, 1.0);
            break;
        }
        rep.sequences.push_back(sd);
    }
    return rep;
}

}  // namespace cwkb
