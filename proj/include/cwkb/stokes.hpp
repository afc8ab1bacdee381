#pragma once

#include "cwkb/poly.hpp"

#include <array>
#include <vector>

namespace cwkb {

enum class LineKind { stokes, anti_stokes };
enum class Termination { hits_turning_point, unbounded, max_length };

struct LevelLine {
    LineKind kind = LineKind::stokes;
    TurningPoint origin;
    double launch_angle = 0.0;
    std::vector<cplx> nodes;    // starts at the origin; ends at the target turning point if hit
    std::vector<cplx> actions;  // S(origin, node), same length as nodes
    Termination termination = Termination::max_length;
    cplx end_point = 0.0;       // turning point hit, or last node
    double escape_angle = 0.0;  // arg of the last node for unbounded lines
};

struct RealSegment {
    double a, b;
    LineKind kind;  // stokes where q < 0, anti-Stokes where q > 0
};

struct TraceConfig {
    double bound_radius = 0.0;  // 0: 4 (1 + max |tp|)
    double max_length = 0.0;    // 0: 50 R (arc length in z)
    double tol_line = 1e-6;
    double lambda_ref = 1.0;
    // for real q, produce lines in the lower half plane as exact mirror
    // images of their upper counterparts
    bool mirror_real = true;
};

struct StokesGraph {
    std::vector<TurningPoint> turning_points;
    std::vector<LevelLine> lines;
    std::vector<RealSegment> real_axis_segments;
    int finite_count() const;
    int unbounded_count() const;
};

std::array<double, 3> launch_angles(const Poly& p, const TurningPoint& tp, LineKind kind);

// radius around a turning point used for seeding and hit detection
double seed_radius(const Poly& p, const std::vector<TurningPoint>& tps, std::size_t index,
                   double lambda_ref = 1.0);

LevelLine trace_line(const Poly& p, const TurningPoint& tp, double angle, LineKind kind,
                     const TraceConfig& cfg = {});
// distance from z to a polyline
double polyline_distance(cplx z, const std::vector<cplx>& poly);

StokesGraph build_graph(const Poly& p, const TraceConfig& cfg = {});

}  // namespace cwkb
