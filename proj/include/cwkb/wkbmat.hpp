#pragma once

// Leading-order transition-matrix algebra. Every subleading factor
// alpha_{j,k}(lambda) = 1 + O(1/lambda) is frozen at 1 unless passed explicitly.

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace cwkb {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

Mat2 omega_finite(double lambda, double alpha, double phi = 0.0);
Mat2 omega_anti(double lambda, double a, double phi = 0.0);
// e^{-pi/6} [[0, 1/alpha_jk], [1, i alpha_next]], prefactor as printed in the source
Mat2 omega_rotation(std::complex<double> alpha_jk = 1.0, std::complex<double> alpha_next = 1.0,
                    bool with_prefactor = true);

struct DoubleWellData {
    double alpha1, alpha2, xi;
};

// 2 cos(alpha lambda)
double gamma_leading(double lambda, double alpha);

// closed form e^{i lambda (alpha2 - alpha1)} e^{-lambda xi} - Gamma1 Gamma2 e^{lambda xi}
std::complex<double> double_well_b(double lambda, const DoubleWellData& d);

enum class Grouping { left_to_right, right_to_left, pairwise };

// (a, b) = seven-factor product applied to (0, 1)^T. With the printed
// prefactors the result carries an extra real factor e^{-2 pi/3}.
Vec2 double_well_product(double lambda, const DoubleWellData& d, bool with_prefactor = false,
                         Grouping grouping = Grouping::left_to_right);

struct LeadingRoot {
    int family;     // 1 or 2: which cosine vanishes at the centre
    int n;          // centre index: (2n+1) pi / (2 alpha_family)
    double centre;
    double lambda;  // root of |Gamma1 Gamma2| = e^{-2 lambda xi}
};

// Roots of the modulus condition near each centre of either family, in [lo, hi].
// For alpha1 == alpha2 the families coincide and each centre yields one split pair.
std::vector<LeadingRoot> leading_roots(const DoubleWellData& d, double lo, double hi);

struct SplitPair {
    int n;
    double centre, lower, upper;
    double splitting;  // upper - lower, computed from offsets about the centre
};

// Symmetric case: the two roots of 2|cos(alpha lambda)| = e^{-lambda xi} around
// each centre (2n+1) pi / (2 alpha), n < count.
std::vector<SplitPair> symmetric_pairs(double alpha, double xi, int count);

}  // namespace cwkb
