#include "cwkb/zeros.hpp"

#include "cwkb/errors.hpp"
#include "cwkb/shooting.hpp"
#include "cwkb/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cwkb {

constexpr double pi = std::numbers::pi;

namespace {

using RealShot = shooting::Shot<double>;

std::vector<double> real_coeffs(const Poly& p)
{
    std::vector<double> out;
    for (const auto& c : p.coeffs())
        out.push_back(c.real());
    return out;
}

ShootState to_state(const shooting::Node<double>& n)
{
    return {cplx(n.y, 0.0), cplx(n.dy, 0.0), n.log_scale};
}

// factor r with r * (yb, dyb) ~ (ya, dya) in the least-squares sense, weighted
// so that y and dy / (lambda sqrt|q|) count equally
double match_factor(double ya, double dya, double yb, double dyb, double weight)
{
    return (ya * yb + weight * dya * dyb) / (yb * yb + weight * dyb * dyb);
}

// rescale the nodes of shot b so that it continues shot a at their common point
void splice(const shooting::Node<double>& a, std::vector<shooting::Node<double>>& b_nodes,
            const shooting::Node<double>& b_end, double weight)
{
    double r = match_factor(a.y, a.dy, b_end.y, b_end.dy, weight);
    double sign = r < 0 ? -1.0 : 1.0;
    double shift = std::log(std::abs(r)) + a.log_scale - b_end.log_scale;
    for (auto& n : b_nodes) {
        n.y *= sign;
        n.dy *= sign;
        n.log_scale += shift;
    }
}

Poly centred_even(const Poly& p, double c)
{
    auto s = p.shifted(c).coeffs();
    for (std::size_t k = 1; k < s.size(); k += 2)
        s[k] = 0.0;
    for (auto& v : s)
        v = cplx(v.real(), 0.0);
    return Poly(s);
}

}  // namespace

Eigenfunction Eigenfunction::from_anchors(const Poly& p, double lambda, std::vector<RealAnchor> anchors)
{
    if (anchors.empty())
        throw std::invalid_argument("an eigenfunction needs at least one anchor");
    std::sort(anchors.begin(), anchors.end(),
              [](const RealAnchor& a, const RealAnchor& b) { return a.x < b.x; });
    anchors.erase(std::unique(anchors.begin(), anchors.end(),
                              [](const RealAnchor& a, const RealAnchor& b) { return a.x == b.x; }),
                  anchors.end());
    Eigenfunction f;
    f.p_ = p;
    f.lambda_ = lambda;
    f.anchors_ = std::move(anchors);
    return f;
}

Eigenfunction Eigenfunction::build(const Poly& p, const EigenRecord& rec, double extent,
                                   const ShootConfig& cfg)
{
    const double lambda = rec.lambda;
    auto lay = real_layout(p);
    Cutoffs cut = choose_cutoffs(p, lay, lambda, cfg, 40.0);
    cut.right = std::max(cut.right, extent);
    cut.left = std::min(cut.left, -extent);
    const double tol = cfg.series_tol;
    std::vector<RealAnchor> anchors;

    if (lay.symmetric && rec.parity) {
        const double c = lay.centre;
        const double sgn = *rec.parity == 0 ? 1.0 : -1.0;
        auto qs = real_coeffs(centred_even(p, c));
        const double xr = std::max(cut.right - c, c - cut.left);
        std::vector<shooting::Node<double>> nodes;
        if (p(c).real() <= 0.0) {
            nodes = shooting::decaying<double>(qs, lambda, xr, 0.0, false, tol, true).nodes;
        } else {
            double xw = -1.0;
            for (const auto& w : lay.wells)
                if (w.first > c) {
                    xw = 0.5 * (w.first + w.second) - c;
                    break;
                }
            if (xw <= 0.0)
                throw std::invalid_argument("symmetric potential without a well right of the centre");
            auto inner = shooting::integrate<double>(qs, lambda, 0.0, *rec.parity == 0 ? 1.0 : 0.0,
                                                     *rec.parity == 0 ? 0.0 : 1.0, xw, tol, true);
            auto outer = shooting::decaying<double>(qs, lambda, xr, xw, false, tol, true);
            double qw = std::abs(p(c + xw).real());
            splice(inner.nodes.back(), outer.nodes, outer.nodes.back(), 1.0 / (lambda * lambda * qw));
            nodes = inner.nodes;
            nodes.insert(nodes.end(), outer.nodes.begin(), outer.nodes.end());
        }
        for (const auto& n : nodes) {
            anchors.push_back({c + n.x, to_state(n)});
            if (n.x > 0.0) {
                ShootState m{cplx(sgn * n.y, 0.0), cplx(-sgn * n.dy, 0.0), n.log_scale};
                anchors.push_back({c - n.x, m});
            }
        }
    } else {
        double xm = std::isnan(cfg.match_point) ? default_match_point(lay) : cfg.match_point;
        auto q = real_coeffs(p);
        auto l = shooting::decaying<double>(q, lambda, cut.left, xm, true, tol, true);
        auto r = shooting::decaying<double>(q, lambda, cut.right, xm, false, tol, true);
        double qm = std::max(std::abs(p(xm).real()), 1e-3);
        splice(l.nodes.back(), r.nodes, r.nodes.back(), 1.0 / (lambda * lambda * qm));
        for (const auto& n : l.nodes)
            anchors.push_back({n.x, to_state(n)});
        for (const auto& n : r.nodes)
            anchors.push_back({n.x, to_state(n)});
    }
    return from_anchors(p, lambda, std::move(anchors));
}

Eigenfunction Eigenfunction::thinned(int stride, int offset) const
{
    std::vector<RealAnchor> keep;
    for (std::size_t k = static_cast<std::size_t>(offset); k < anchors_.size(); k += stride)
        keep.push_back(anchors_[k]);
    return from_anchors(p_, lambda_, std::move(keep));
}

std::size_t Eigenfunction::nearest_anchor(double x) const
{
    auto it = std::lower_bound(anchors_.begin(), anchors_.end(), x,
                               [](const RealAnchor& a, double v) { return a.x < v; });
    if (it == anchors_.end())
        return anchors_.size() - 1;
    std::size_t k = static_cast<std::size_t>(it - anchors_.begin());
    if (k > 0 && x - anchors_[k - 1].x < it->x - x)
        return k - 1;
    return k;
}

namespace {

constexpr double ln2 = std::numbers::ln2;

class Stepper {
public:
    Stepper(const Poly& p, double lambda, double budget)
        : prop_(p.coeffs(), lambda, 1e-15, budget), lambda_(lambda)
    {
    }

    // straight-line continuation a -> b
    ShootState go(ShootState s, cplx a, cplx b, bool phase_limit)
    {
        const cplx d = b - a;
        const double len = std::abs(d);
        if (len == 0.0)
            return s;
        const cplx u = d / len;
        double t = 0.0;  // arc length done
        while (t < len) {
            cplx z = (t == 0.0) ? a : a + u * t;
            double hb = prop_.prepare(z);
            double h = std::min(hb, len - t);
            bool last = h == len - t;
            for (int tries = 0;; ++tries) {
                cplx y = s.y, dy = s.dy;
                bool ok = prop_.advance(u * h, y, dy);
                if (ok && phase_limit && h > 1e-4 * hb && std::abs(s.y) > 0.0 &&
                    std::abs(std::arg(y / s.y)) > 0.25 * pi)
                    ok = false;
                if (ok) {
                    s.y = y;
                    s.dy = dy;
                    break;
                }
                if (tries > 60)
                    fail(Errc::StepUnderflow, "complex continuation step underflow");
                h *= 0.5;
                last = false;
            }
            t = last ? len : t + h;
            s.log_scale += renormalize(s.y, s.dy) * ln2;
        }
        return s;
    }

    // continuation from a in direction u for n natural steps, or until length
    // limit is reached; returns distance travelled
    double walk(ShootState& s, cplx a, cplx u, int n, double limit)
    {
        double t = 0.0;
        for (int k = 0; k < n && t < limit; ++k) {
            cplx z = a + u * t;
            double h = std::min(prop_.prepare(z), limit - t);
            for (int tries = 0;; ++tries) {
                cplx y = s.y, dy = s.dy;
                if (prop_.advance(u * h, y, dy)) {
                    s.y = y;
                    s.dy = dy;
                    break;
                }
                if (tries > 60)
                    fail(Errc::StepUnderflow, "complex continuation step underflow");
                h *= 0.5;
            }
            t += h;
            s.log_scale += renormalize(s.y, s.dy) * ln2;
        }
        return t;
    }

    double lambda() const { return lambda_; }

private:
    TaylorPropagator<cplx> prop_;
    double lambda_;
};

ShootState anchor_state(const RealAnchor& a)
{
    ShootState s = a.state;
    s.log_scale += renormalize(s.y, s.dy) * ln2;
    return s;
}

// Memoized vertical columns above and below real points.
class Evaluator {
public:
    explicit Evaluator(const Eigenfunction& f) : f_(f), step_(f.poly(), f.lambda(), 1.0) {}

    ShootState at(cplx z)
    {
        Column& col = column(z.real());
        double y = z.imag();
        if (y == 0.0)
            return col.base;
        Side& side = y > 0 ? col.up : col.down;
        const cplx u = y > 0 ? cplx(0, 1) : cplx(0, -1);
        const double h = std::abs(y);
        while (side.heights.back() < h) {
            ShootState s = side.states.back();
            double h0 = side.heights.back();
            double moved = step_.walk(s, cplx(col.x, 0.0) + u * h0, u, kCheckpointSteps, 1e300);
            side.heights.push_back(h0 + moved);
            side.states.push_back(s);
        }
        auto it = std::upper_bound(side.heights.begin(), side.heights.end(), h);
        std::size_t k = static_cast<std::size_t>(it - side.heights.begin()) - 1;
        cplx from = cplx(col.x, 0.0) + u * side.heights[k];
        return step_.go(side.states[k], from, z, false);
    }

    ShootState move(const ShootState& s, cplx a, cplx b) { return step_.go(s, a, b, false); }

    double lambda() const { return step_.lambda(); }
    const Poly& poly() const { return f_.poly(); }

private:
    static constexpr int kCheckpointSteps = 8;
    struct Side {
        std::vector<double> heights;
        std::vector<ShootState> states;
    };
    struct Column {
        double x;
        ShootState base;
        Side up, down;
    };

    Column& column(double x)
    {
        auto it = cols_.find(x);
        if (it != cols_.end())
            return it->second;
        const auto& a = f_.anchors()[f_.nearest_anchor(x)];
        ShootState base = step_.go(anchor_state(a), cplx(a.x, 0.0), cplx(x, 0.0), false);
        Column c{x, base, {{0.0}, {base}}, {{0.0}, {base}}};
        return cols_.emplace(x, std::move(c)).first->second;
    }

    const Eigenfunction& f_;
    Stepper step_;
    std::unordered_map<double, Column> cols_;
};

double local_scale(const Poly& p, double lambda, cplx z)
{
    return lambda * std::sqrt(std::max(std::abs(p(z)), std::pow(lambda, -2.0 / 3.0)));
}

// |y| relative to the local wavelength scale; ~ distance to the nearest zero
// in units of 1 / (lambda sqrt|q|)
double closeness(const Poly& p, double lambda, cplx z, const ShootState& s)
{
    double k = local_scale(p, lambda, z);
    double a = std::abs(s.y), b = std::abs(s.dy) / k;
    return a / (a + b);
}

struct Sampled {
    double t;
    cplx z;
    ShootState s;
};

class BoxCounter {
public:
    BoxCounter(Evaluator& ev, double lattice_x0, double lattice_w)
        : ev_(ev), lx0_(lattice_x0), lw_(lattice_w)
    {
    }

    BoxCount count(const Box& box)
    {
        BoxCount bc;
        bc.box = box;
        const cplx c00(box.x0, box.y0), c10(box.x1, box.y0), c11(box.x1, box.y1), c01(box.x0, box.y1);
        double total = 0.0;
        bool near = false;
        const std::pair<cplx, cplx> edges[4] = {{c00, c10}, {c10, c11}, {c11, c01}, {c01, c00}};
        for (const auto& [a, b] : edges) {
            auto samples = edge(a, b, near);
            for (std::size_t k = 0; k < samples.size(); ++k) {
                if (k > 0)
                    total += std::arg(samples[k].s.y / samples[k - 1].s.y);
                if (k + 1 < samples.size() || &a == &edges[3].first)
                    bc.boundary_samples.push_back({samples[k].z, std::arg(samples[k].s.y)});
            }
        }
        bc.raw_winding = total / (2.0 * pi);
        bc.winding = static_cast<int>(std::lround(bc.raw_winding));
        bc.near_zero_on_boundary = near;
        if (std::abs(bc.raw_winding - bc.winding) > 1e-3)
            fail(Errc::PhaseAliasing, "non-integer winding number");
        return bc;
    }

private:
    double edge_pitch(cplx a, cplx b) const
    {
        const Poly& p = ev_.poly();
        double m = 0.0;
        for (int k = 0; k <= 8; ++k)
            m = std::max(m, std::abs(p(a + (b - a) * (k / 8.0))));
        m = 1.2 * m + std::pow(ev_.lambda(), -2.0 / 3.0);
        return (pi / 8.0) / (ev_.lambda() * std::sqrt(m));
    }

    std::vector<Sampled> edge(cplx a, cplx b, bool& near)
    {
        const double len = std::abs(b - a);
        const double pitch = edge_pitch(a, b);
        const bool horizontal = a.imag() == b.imag();
        std::vector<double> ts{0.0};
        if (horizontal) {
            int level = std::max(0, static_cast<int>(std::ceil(std::log2(lw_ / pitch))));
            double dx = lw_ / std::ldexp(1.0, level);
            double lo = std::min(a.real(), b.real()), hi = std::max(a.real(), b.real());
            long k0 = static_cast<long>(std::floor((lo - lx0_) / dx)) + 1;
            std::vector<double> xs;
            for (long k = k0;; ++k) {
                double x = lx0_ + k * dx;
                if (x >= hi)
                    break;
                if (x > lo)
                    xs.push_back(x);
            }
            if (b.real() < a.real())
                std::reverse(xs.begin(), xs.end());
            for (double x : xs)
                ts.push_back(std::abs(x - a.real()) / len);
        } else {
            int n = std::max(1, static_cast<int>(std::ceil(len / pitch)));
            for (int k = 1; k < n; ++k)
                ts.push_back(static_cast<double>(k) / n);
        }
        ts.push_back(1.0);

        auto point = [&](double t) {
            if (t == 1.0)
                return b;
            if (horizontal)
                return cplx(a.real() + (b.real() - a.real()) * t, a.imag());
            return cplx(a.real(), a.imag() + (b.imag() - a.imag()) * t);
        };
        std::vector<Sampled> out;
        for (double t : ts) {
            cplx z = point(t);
            out.push_back({t, z, ev_.at(z)});
        }
        // adaptive refinement where the phase turns too fast
        std::vector<Sampled> done{out.front()};
        std::vector<Sampled> pending(out.rbegin(), out.rend() - 1);
        while (!pending.empty()) {
            Sampled nxt = pending.back();
            const Sampled& cur = done.back();
            double dphi = std::abs(std::arg(nxt.s.y / cur.s.y));
            if (dphi > 0.25 * pi) {
                double tm = 0.5 * (cur.t + nxt.t);
                cplx zm = point(tm);
                if (std::abs(nxt.z - cur.z) < 1e-12 * (1.0 + std::abs(zm)))
                    fail(Errc::PhaseAliasing, "phase jump unresolved at maximal refinement");
                ShootState sm = ev_.at(zm);
                pending.push_back({tm, zm, sm});
                continue;
            }
            done.push_back(nxt);
            pending.pop_back();
        }
        for (const auto& s : done)
            if (closeness(ev_.poly(), ev_.lambda(), s.z, s.s) < 1e-7)
                near = true;
        return done;
    }

    Evaluator& ev_;
    double lx0_, lw_;
};

struct NewtonResult {
    cplx z;
    double residual;
    bool ok;
};

double residual_of(const ShootState& s) { return std::abs(s.y) / std::hypot(std::abs(s.y), std::abs(s.dy)); }

NewtonResult newton(Evaluator& ev, cplx z, double limit)
{
    ShootState s = ev.at(z);
    double res = residual_of(s);
    for (int it = 0; it < 60; ++it) {
        if (res < 1e-15)
            break;
        cplx dz = -s.y / s.dy;
        if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag()) || std::abs(dz) > limit)
            return {z, res, false};
        s = ev.move(s, z, z + dz);
        z += dz;
        res = residual_of(s);
        if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z)))
            break;
    }
    return {z, res, true};
}

// lexicographic on (Re, Im), treating real parts equal up to rounding noise
bool less_rc(cplx a, cplx b)
{
    if (std::abs(a.real() - b.real()) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)))
        return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

ShootState continue_state(const Poly& p, double lambda, const ShootState& anchor,
                          std::span<const cplx> path)
{
    Stepper st(p, lambda, 0.5);
    ShootState s = anchor;
    s.log_scale += renormalize(s.y, s.dy) * ln2;
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
        s = st.go(s, path[k], path[k + 1], true);
    return path.size() < 2 ? anchor : s;
}

ShootState evaluate(const Eigenfunction& f, cplx z)
{
    Evaluator ev(f);
    return ev.at(z);
}

BoxCount count_zeros_box(const Eigenfunction& f, const Box& box)
{
    if (!(box.x1 > box.x0) || !(box.y1 > box.y0))
        throw std::invalid_argument("box must have positive width and height");
    Evaluator ev(f);
    BoxCounter counter(ev, box.x0, box.width());
    return counter.count(box);
}

ZeroSet locate_zeros(const Eigenfunction& f, const Box& region_in, const LocateConfig& cfg)
{
    if (!(region_in.x1 > region_in.x0) || !(region_in.y1 > region_in.y0))
        throw std::invalid_argument("region must have positive width and height");
    if (region_in.x0 < f.left() || region_in.x1 > f.right())
        throw std::invalid_argument("region extends beyond the anchored part of the real axis");

    Evaluator ev(f);
    Box region = region_in;
    BoxCount top;
    for (int attempt = 0;; ++attempt) {
        BoxCounter counter(ev, region.x0, region.width());
        top = counter.count(region);
        if (!top.near_zero_on_boundary || attempt == 5)
            break;
        double grow = 1e-4 * std::hypot(region.width(), region.height());
        region = {region.x0 - grow, region.x1 + grow, region.y0 - grow, region.y1 + grow};
        if (region.x0 < f.left() || region.x1 > f.right())
            break;
    }

    BoxCounter counter(ev, region.x0, region.width());
    ZeroSet zs;
    zs.lambda = f.lambda();
    zs.region = region;
    zs.region_winding = top.winding;

    struct Item {
        Box box;
        int winding;
        int depth;
    };
    std::vector<Item> stack{{region, top.winding, 0}};
    const double fractions[3] = {0.4871, 0.5213, 0.4537};
    std::vector<cplx> found;
    std::vector<double> residuals;

    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        if (it.winding == 0)
            continue;
        const Box& b = it.box;
        if (it.winding == 1) {
            double diam = std::hypot(b.width(), b.height());
            auto nr = newton(ev, cplx(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)), diam);
            if (nr.ok && nr.residual < cfg.residual_tol && b.contains(nr.z, 1e-9 * diam)) {
                // the continued Newton state can drift far from its anchor, so the
                // candidate must also hold up under a fresh evaluation and a tight count
                double fresh = residual_of(ev.at(nr.z));
                double r = std::min(0.25 * diam, 0.3 / local_scale(f.poly(), f.lambda(), nr.z));
                Box vb{nr.z.real() - r, nr.z.real() + r, nr.z.imag() - r, nr.z.imag() + r};
                if (fresh < cfg.residual_tol && vb.x0 >= f.left() && vb.x1 <= f.right() &&
                    counter.count(vb).winding == 1) {
                    found.push_back(nr.z);
                    residuals.push_back(std::max(fresh, nr.residual));
                    continue;
                }
            }
        }
        if (it.depth >= cfg.max_depth) {
            std::ostringstream os;
            os << "box [" << b.x0 << "," << b.x1 << "]x[" << b.y0 << "," << b.y1
               << "] unresolved at depth " << it.depth;
            fail(Errc::LostZero, os.str());
        }
        bool split = false;
        for (double fr : fractions) {
            double xm = b.x0 + fr * b.width(), ym = b.y0 + fr * b.height();
            Box kids[4] = {{b.x0, xm, b.y0, ym}, {xm, b.x1, b.y0, ym}, {b.x0, xm, ym, b.y1}, {xm, b.x1, ym, b.y1}};
            int w[4], sum = 0;
            bool near = false;
            for (int k = 0; k < 4; ++k) {
                auto c = counter.count(kids[k]);
                w[k] = c.winding;
                near = near || c.near_zero_on_boundary;
                sum += w[k];
            }
            if (sum != it.winding || near)
                continue;
            for (int k = 3; k >= 0; --k)
                stack.push_back({kids[k], w[k], it.depth + 1});
            split = true;
            break;
        }
        if (!split) {
            std::ostringstream os;
            os << "child windings disagree with parent " << it.winding << " in box [" << b.x0 << ","
               << b.x1 << "]x[" << b.y0 << "," << b.y1 << "]";
            fail(Errc::LostZero, os.str());
        }
    }

    if (static_cast<int>(found.size()) != zs.region_winding) {
        std::ostringstream os;
        os << "located " << found.size() << " zeros, region winding " << zs.region_winding;
        fail(Errc::LostZero, os.str());
    }

    // tight verification boxes
    const Poly& p = f.poly();
    for (std::size_t k = 0; k < found.size(); ++k) {
        double nn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < found.size(); ++j)
            if (j != k)
                nn = std::min(nn, std::abs(found[j] - found[k]));
        double r = std::min(0.3 * nn, 0.3 / local_scale(p, f.lambda(), found[k]));
        Box vb{found[k].real() - r, found[k].real() + r, found[k].imag() - r, found[k].imag() + r};
        bool verified = false;
        if (vb.x0 >= f.left() && vb.x1 <= f.right())
            verified = counter.count(vb).winding == 1;
        zs.zeros.push_back({found[k], residuals[k], verified});
    }
    std::sort(zs.zeros.begin(), zs.zeros.end(), [](const Zero& a, const Zero& b) { return less_rc(a.z, b.z); });
    return zs;
}

SpacingCheck hille_spacing(const ZeroSet& zs, const Poly& p)
{
    SpacingCheck out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    const auto& z = zs.zeros;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double nn = std::numeric_limits<double>::infinity();
        std::size_t nj = k;
        for (std::size_t j = 0; j < z.size(); ++j)
            if (j != k && std::abs(z[j].z - z[k].z) < nn) {
                nn = std::abs(z[j].z - z[k].z);
                nj = j;
            }
        if (nj == k)
            continue;
        // max |q| over the closed disc is attained on its boundary circle
        double m = std::abs(p(z[k].z));
        for (int s = 0; s < 256; ++s)
            m = std::max(m, std::abs(p(z[k].z + std::polar(nn, 2.0 * pi * s / 256.0))));
        double ratio = nn * std::sqrt(m) * zs.lambda / pi;
        ++out.pairs_checked;
        if (ratio < out.min_ratio) {
            out.min_ratio = ratio;
            out.worst_a = z[k].z;
            out.worst_b = z[nj].z;
        }
    }
    return out;
}

}  // namespace cwkb
