#pragma once

#include "cwkb/poly.hpp"

#include <array>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace cwkb {

struct ShootState {
    cplx y;
    cplx dy;
    double log_scale = 0.0;  // true state = e^{log_scale} (y, dy)
};

// Sign structure of q on the real line.
struct RealLayout {
    std::vector<double> turning;  // sorted real turning points
    std::vector<std::pair<double, double>> wells;     // q < 0
    std::vector<std::pair<double, double>> barriers;  // q > 0, bounded
    std::vector<double> well_actions;
    bool symmetric = false;
    double centre = 0.0;  // symmetry centre (if symmetric)

    double total_action() const;
};

RealLayout real_layout(const Poly& p);

struct ShootConfig {
    double cutoff = 0.0;  // 0: chosen automatically; otherwise integrate from -X and +X
    double match_point = std::numeric_limits<double>::quiet_NaN();  // NaN: automatic
    double series_tol = 1e-15;
};

struct Cutoffs {
    double left, right;
};
// Integration endpoints at which the decaying WKB data are accurate to
// e^{-min_exponent}; throws CutoffTooSmall when q <= 0 at a requested cutoff.
Cutoffs choose_cutoffs(const Poly& p, const RealLayout& lay, double lambda, const ShootConfig& cfg,
                       double min_exponent = 40.0);
double default_match_point(const RealLayout& lay);

// Normalized Wronskian of the solutions decaying at -inf and +inf, at the match point.
double shoot_miss(const Poly& p, double lambda, const ShootConfig& cfg = {});

// For q symmetric about its centre c: dy(c)/|state| (parity 0) or y(c)/|state|
// (parity 1) of the solution decaying at +inf.
double parity_miss(const Poly& p, double lambda, int parity, const ShootConfig& cfg = {});

struct EigenRecord {
    int n = 0;
    double lambda = 0.0;
    double miss_residual = 0.0;
    double lo = 0.0, hi = 0.0;  // final bracket
    std::optional<int> well_tag;  // 1-based well index of the nearest quantization sequence
    bool tag_tie = false;
    std::optional<int> parity;  // 0 even, 1 odd (symmetric q only)
};

struct SpectrumConfig {
    ShootConfig shoot;
    double scan_step = 0.0;  // 0: 0.9 * pi / (2 * total well action)
    double tol_eig = 1e-9;
    double rel_width = 1e-10;
    bool use_parity = true;  // shoot each parity separately for symmetric q
    bool check_count = true;
};

std::vector<EigenRecord> eigenvalues(const Poly& p, double lambda_max, const SpectrumConfig& cfg = {});

// Number of quantization-sequence values (2n+1)pi/(2 alpha_i) <= lambda, summed over wells.
int wkb_count(const RealLayout& lay, double lambda);

std::vector<double> wkb_sequence(double alpha, int n_begin, int n_end);

// lambda * 2 alpha / pi - (2k + 1) for the sequence index k nearest to lambda
double quantization_defect(double lambda, double alpha);

// Eigenvalues of one parity for symmetric q refined in 113-bit floating point.
// Brackets come from the double-precision values. Returned in double.
struct PreciseParityPair {
    int pair;
    double even, odd;
    double splitting;  // odd - even, evaluated before rounding to double
};
std::vector<PreciseParityPair> parity_pairs_extended(const Poly& p, int pairs,
                                                     const SpectrumConfig& cfg = {});

struct QuarticFamily {
    std::array<double, 4> roots;  // increasing
    int free_index = 3;
    double leading = 1.0;
};

struct CalibrateConfig {
    double tol = 1e-10;
    int max_iter = 200;
    // search interval for the free root; NaN bounds fall back to the
    // neighbouring roots (and a width 50 beyond the outermost root)
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
};

// Move the free root so that well_action(a0,a1)/well_action(a2,a3) = target.
std::array<double, 4> calibrate_ratio(const QuarticFamily& family, double target,
                                      const CalibrateConfig& cfg = {});
double action_ratio(const std::array<double, 4>& roots, double leading = 1.0);

}  // namespace cwkb
