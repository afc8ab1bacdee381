#pragma once

#include "cwkb/poly.hpp"
#include "cwkb/wkbmat.hpp"
#include "cwkb/zeros.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cwkb {

struct WeightedPoint {
    cplx z;
    double weight;
};

struct EmpiricalMeasure {
    double lambda = 0.0;
    std::vector<WeightedPoint> points;
    double total_mass = 0.0;
};

EmpiricalMeasure empirical_measure(const ZeroSet& zs);

enum class Family { one_well_quartic, symmetric_double_well, nonsymmetric_double_well };

// accepts one_well_quartic / 1well, symmetric_double_well / 2well,
// nonsymmetric_double_well / nonsymm
Family parse_family(const std::string& name);
std::string to_string(Family f);

// one_well_quartic {a, b}: (z^2 - a^2)(z^2 + b^2)
// symmetric_double_well {a, b}, 0 < a < b: (z^2 - a^2)(z^2 - b^2)
// nonsymmetric_double_well {a0, a1, a2, a3} increasing: (z - a0)(z - a1)(z - a2)(z - a3)
Poly family_poly(Family f, const std::vector<double>& params);

struct PredictedZeroLine {
    std::string label;
    int set = 0;  // 0: common to all alternatives, otherwise the alternative index
    std::vector<cplx> curve;
    cplx anchor_tp;
    double offset_c = 0.0;             // Re S(anchor_tp, z) along the curve
    std::vector<double> mass_density;  // |sqrt q| / pi at the nodes
};

struct LineConfig {
    double reach = 0.0;  // extent of unbounded lines; 0: 4 (1 + max |root|)
    int nodes = 4000;    // nodes per curve
};

std::vector<PredictedZeroLine> predicted_zero_lines(Family f, const std::vector<double>& params,
                                                    const LineConfig& cfg = {});

// lines of set 0 plus those of the given alternative
std::vector<PredictedZeroLine> select_set(const std::vector<PredictedZeroLine>& lines, int set);

struct MeasureConfig {
    double kappa = 10.0;     // tube radius kappa / lambda
    double arc_mass = 0.0;   // 0: max(0.05, 25 / lambda)
    std::optional<Box> clip;  // defaults to the ZeroSet region
};

struct ArcRow {
    std::string line;
    int arc = 0;
    cplx from, to;
    double predicted_mass = 0.0;
    int count = 0;
    double count_over_lambda = 0.0;
    double relative_error = 0.0;
    bool excluded = false;  // lies inside a turning-point disc
};

struct MeasureReport {
    double lambda = 0.0;
    double kappa = 0.0;
    double tube_radius = 0.0;
    double arc_mass = 0.0;
    std::vector<ArcRow> arcs;
    int matched = 0;
    double max_distance = 0.0;
    std::vector<cplx> unmatched;
    int unmatched_in_discs = 0;
    int unmatched_outside_discs = 0;
    double max_relative_error = 0.0;  // over arcs outside the discs
};

MeasureReport compare_measure(const ZeroSet& zs, const Poly& p,
                              const std::vector<PredictedZeroLine>& lines, const MeasureConfig& cfg = {});

struct LineFit {
    double c_fit = 0.0;
    double residual_rms = 0.0;
    double median_gap = 0.0;  // median Im S gap times lambda / pi
    std::vector<cplx> actions;  // S(anchor, z_k) for the zeros used
    int count = 0;
};

// Re S(anchor, z_k) over zeros in subset, integrated along anchor -> waypoints
// -> z_k with the branch fixed by branch_seed just off the anchor
LineFit fit_zero_line(const ZeroSet& zs, const Poly& p, cplx anchor, const Box& subset,
                      const std::vector<cplx>& waypoints = {}, cplx branch_seed = 1.0);

enum class RatioClass { irrational_like, even_odd, odd_odd };
std::string to_string(RatioClass c);

struct RatioForm {
    RatioClass cls = RatioClass::irrational_like;
    long p = 0, q = 0;  // rho = p / q when rational
};

RatioForm classify_ratio(double rho, long cap = 50, double tol = 1e-9);

struct SequenceDensity {
    int sequence = 1;       // eigenvalues attached to centres of cos(alpha_l lambda)
    int size = 0;
    int flagged = 0;        // |cos(alpha_{3-l} lambda)| > delta
    double empirical = 0.0;
    double predicted = 0.0;
    double equidistributed = 0.0;  // 1 - 2 arcsin(delta) / pi
    // index-based subsequences {2n+1 != 0 mod 2r+1} with r = r_l and r = r_{3-l}
    std::optional<double> index_density_own;
    std::optional<double> index_density_other;
};

struct DensityReport {
    double rho = 0.0;
    RatioForm form;
    double delta = 0.0;
    int count = 0;
    std::vector<SequenceDensity> sequences;
};

// eigenvalues: the first N leading-order roots, one per (family, n) centre
std::vector<LeadingRoot> leading_sequence(const DoubleWellData& d, int count);

DensityReport subsequence_density(const DoubleWellData& d, double delta,
                                  const std::vector<LeadingRoot>& eigen);

}  // namespace cwkb
