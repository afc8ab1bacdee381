#pragma once

#include "cwkb/action.hpp"
#include "cwkb/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace cwkb::testing {

// Distance from z to the level curve that carries line m near its closest node,
// measured through the action: |level(S(z)) - level of m| / |sqrt q|. Unlike a
// polyline distance it does not see the chord sag between nodes.
inline double level_distance(const Poly& p, cplx z, const LevelLine& m)
{
    std::size_t k = 1;
    double best = 1e300;
    for (std::size_t j = 1; j + 1 < m.nodes.size(); ++j) {
        double d = std::abs(z - m.nodes[j]);
        if (d < best) {
            best = d;
            k = j;
        }
    }
    if (best < 1e-10)
        return best;
    cplx slope = (m.actions[k + 1] - m.actions[k]) / (m.nodes[k + 1] - m.nodes[k]);
    cplx s = std::sqrt(p(m.nodes[k]));
    if (std::abs(s - slope) > std::abs(s + slope))
        s = -s;
    cplx S = m.actions[k] + action(p, PathC{{m.nodes[k], z}, s}).S;
    double gap = m.kind == LineKind::stokes ? S.real() - m.actions[k].real() : S.imag() - m.actions[k].imag();
    return std::abs(gap) / std::abs(s);
}

// Largest distance from the conjugate of a node to the graph, over all nodes
// of all lines. Each line is compared with the line whose polyline is closest
// to its reflection.
inline double conjugation_gap(const Poly& p, const StokesGraph& g)
{
    double worst = 0;
    for (const auto& l : g.lines) {
        const LevelLine* match = nullptr;
        double coarse = 1e300;
        for (const auto& m : g.lines) {
            double w = 0;
            for (auto z : l.nodes)
                w = std::max(w, polyline_distance(std::conj(z), m.nodes));
            if (w < coarse) {
                coarse = w;
                match = &m;
            }
        }
        if (coarse > 1e-3)
            return coarse;
        for (std::size_t j = 1; j + 1 < l.nodes.size(); ++j)
            worst = std::max(worst, level_distance(p, std::conj(l.nodes[j]), *match));
    }
    return worst;
}

}  // namespace cwkb::testing
