#pragma once

#include "cwkb/poly.hpp"
#include "cwkb/spectrum.hpp"

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace cwkb {

struct RealAnchor {
    double x;
    ShootState state;
};

// Real L^2 eigenfunction sampled densely on the real axis. All anchors describe
// the same function (one global scale), so any of them can seed a continuation.
class Eigenfunction {
public:
    // extent: the anchors cover at least [-extent, extent] (continuation along
    // the real axis outward into the decaying region is unstable, so zero
    // searches must stay within the anchored interval)
    static Eigenfunction build(const Poly& p, const EigenRecord& rec, double extent = 0.0,
                               const ShootConfig& cfg = {});
    static Eigenfunction from_anchors(const Poly& p, double lambda, std::vector<RealAnchor> anchors);

    const Poly& poly() const { return p_; }
    double lambda() const { return lambda_; }
    const std::vector<RealAnchor>& anchors() const { return anchors_; }
    double left() const { return anchors_.front().x; }
    double right() const { return anchors_.back().x; }

    // copy keeping every stride-th anchor starting at offset (for anchor-independence checks)
    Eigenfunction thinned(int stride, int offset) const;
    std::size_t nearest_anchor(double x) const;

private:
    Poly p_;
    double lambda_ = 0.0;
    std::vector<RealAnchor> anchors_;
};

// Integrate y'' = lambda^2 q y along the polyline path (path[0] is where anchor
// lives). Steps keep |arg change of y| below pi/4 away from near-zeros.
ShootState continue_state(const Poly& p, double lambda, const ShootState& anchor,
                          std::span<const cplx> path);

// State of the eigenfunction at z, continued from the nearest real anchor
// along the real axis and then vertically.
ShootState evaluate(const Eigenfunction& f, cplx z);

struct Box {
    double x0, x1, y0, y1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(cplx z, double margin = 0.0) const
    {
        return z.real() >= x0 - margin && z.real() <= x1 + margin && z.imag() >= y0 - margin &&
               z.imag() <= y1 + margin;
    }
};

struct PhaseSample {
    cplx z;
    double phase;  // arg y
};

struct BoxCount {
    Box box;
    int winding = 0;
    double raw_winding = 0.0;
    bool near_zero_on_boundary = false;
    std::vector<PhaseSample> boundary_samples;
};

BoxCount count_zeros_box(const Eigenfunction& f, const Box& box);

struct Zero {
    cplx z;
    double residual;  // |y| / |(y, dy)|
    bool verified;    // a tight box around it winds exactly once
};

struct ZeroSet {
    double lambda = 0.0;
    Box region{};
    int region_winding = 0;
    std::vector<Zero> zeros;  // sorted by (Re, Im)
};

struct LocateConfig {
    int max_depth = 40;
    double residual_tol = 1e-10;
};

ZeroSet locate_zeros(const Eigenfunction& f, const Box& region, const LocateConfig& cfg = {});

// Nearest-neighbour spacing against pi / (sqrt(M) lambda), M = max |q| on the
// disc centred at one zero through its neighbour.
struct SpacingCheck {
    double min_ratio = 0.0;  // min over pairs of distance * sqrt(M) * lambda / pi
    cplx worst_a = 0.0, worst_b = 0.0;
    int pairs_checked = 0;
};
SpacingCheck hille_spacing(const ZeroSet& zs, const Poly& p);

}  // namespace cwkb
