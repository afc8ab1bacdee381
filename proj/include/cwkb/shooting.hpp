#pragma once

// Real-line integration of y'' = lambda^2 q(x) y for the shooting solvers,
// templated on the floating-point type.

#include "cwkb/errors.hpp"
#include "cwkb/taylor.hpp"

#include <cmath>
#include <vector>

namespace cwkb::shooting {

template <class R>
struct Node {
    R x, y, dy, log_scale;
};

template <class R>
struct Shot {
    R y, dy, log_scale;
    std::vector<Node<R>> nodes;  // filled when recording
};

template <class R>
void eval_q(const std::vector<R>& q, const R& x, R& v, R& d)
{
    v = q.back();
    d = R(0);
    for (int k = static_cast<int>(q.size()) - 2; k >= 0; --k) {
        d = d * x + v;
        v = v * x + q[k];
    }
}

template <class R>
Shot<R> integrate(const std::vector<R>& q, const R& lambda, const R& x0, R y, R dy, const R& x1,
                  const R& tol, bool record)
{
    using std::abs;
    using std::log;
    TaylorPropagator<R> prop(q, lambda, tol, 4.0);
    const R ln2 = log(R(2));
    R L = R(renormalize(y, dy)) * ln2;
    R x = x0;
    const R dir = x1 > x0 ? R(1) : R(-1);
    Shot<R> out;
    if (record)
        out.nodes.push_back({x, y, dy, L});
    long steps = 0;
    while (x != x1) {
        R rem = abs(x1 - x);
        R h = R(prop.prepare(x));
        bool last = false;
        if (h >= rem) {
            h = rem;
            last = true;
        }
        for (int tries = 0;; ++tries) {
            R yy = y, dd = dy;
            if (prop.advance(dir * h, yy, dd)) {
                y = yy;
                dy = dd;
                break;
            }
            if (tries > 40)
                fail(Errc::StepUnderflow, "Taylor series failed to converge on the real axis");
            h /= 2;
            last = false;
        }
        x = last ? x1 : x + dir * h;
        L += R(renormalize(y, dy)) * ln2;
        if (record)
            out.nodes.push_back({x, y, dy, L});
        if (++steps > 20000000)
            fail(Errc::StiffnessFailure, "renormalization cadence exceeded");
    }
    out.y = y;
    out.dy = dy;
    out.log_scale = L;
    return out;
}

// Solution decaying beyond the cutoff x0 (toward -inf if from_left), with
// WKB initial data q^{-1/4} exp(-lambda |S|).
template <class R>
Shot<R> decaying(const std::vector<R>& q, const R& lambda, const R& x0, const R& x1, bool from_left,
                 const R& tol, bool record)
{
    using std::sqrt;
    R v, d;
    eval_q(q, x0, v, d);
    if (!(v > R(0)))
        fail(Errc::CutoffTooSmall, "q must be positive at the integration cutoff");
    R s = from_left ? R(1) : R(-1);
    R dy = s * lambda * sqrt(v) - d / (R(4) * v);
    return integrate(q, lambda, x0, R(1), dy, x1, tol, record);
}

}  // namespace cwkb::shooting
