#pragma once

#include "cwkb/poly.hpp"

#include <span>
#include <vector>

namespace cwkb {

struct PathC {
    std::vector<cplx> points;
    // value of sqrt(q) at the first node; when that node is a turning point it
    // only selects the sign just off the node
    cplx branch_seed = 1.0;
};

struct ActionValue {
    cplx S;
    cplx branch_end;  // sqrt(q) at the last node (continued)
    double abs_mass;  // integral of |sqrt q| |dz|
};

struct BranchSample {
    double s;  // cumulative parameter: segment index + local t
    cplx z;
    cplx sqrt_q;
};

// sqrt(w) with the sign closest to ref
cplx sqrt_near(cplx w, cplx ref);

PathC reversed(const PathC& path, cplx end_branch);

std::vector<BranchSample> sqrt_q_along(const Poly& p, const PathC& path);
ActionValue action(const Poly& p, const PathC& path);
ActionValue action(const Poly& p, std::span<const cplx> turning, const PathC& path);

double well_action(const Poly& p, double a, double b);
double barrier_action(const Poly& p, double a, double b);
// (1/pi) * integral of |sqrt q| along the polyline
double agmon_mass(const Poly& p, std::span<const cplx> curve);

// |q'(tp)|^{-1/3} lambda^{-7/12}
double exclusion_radius(const Poly& p, cplx tp, double lambda = 1.0);

}  // namespace cwkb
