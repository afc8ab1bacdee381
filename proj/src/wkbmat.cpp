#include "cwkb/wkbmat.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace cwkb {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr cplx I(0.0, 1.0);

Mat2 omega_finite(double lambda, double alpha, double phi)
{
    Mat2 m;
    m << 0.0, std::exp(-I * (lambda * alpha)), std::exp(I * (lambda * alpha)), 0.0;
    return std::exp(I * phi) * m;
}

Mat2 omega_anti(double lambda, double a, double phi)
{
    Mat2 m;
    m << std::exp(-lambda * a), 0.0, 0.0, std::exp(lambda * a);
    return std::exp(I * phi) * m;
}

Mat2 omega_rotation(cplx alpha_jk, cplx alpha_next, bool with_prefactor)
{
    Mat2 m;
    m << 0.0, 1.0 / alpha_jk, 1.0, I * alpha_next;
    return with_prefactor ? Mat2(std::exp(-pi / 6.0) * m) : m;
}

double gamma_leading(double lambda, double alpha) { return 2.0 * std::cos(alpha * lambda); }

cplx double_well_b(double lambda, const DoubleWellData& d)
{
    return std::exp(I * (lambda * (d.alpha2 - d.alpha1))) * std::exp(-lambda * d.xi) -
           gamma_leading(lambda, d.alpha1) * gamma_leading(lambda, d.alpha2) *
               std::exp(lambda * d.xi);
}

Vec2 double_well_product(double lambda, const DoubleWellData& d, bool with_prefactor,
                         Grouping grouping)
{
    const Mat2 r = omega_rotation(1.0, 1.0, with_prefactor);
    const Mat2 f1 = omega_finite(lambda, d.alpha1);
    const Mat2 f2 = omega_finite(lambda, d.alpha2);
    const Mat2 a = omega_anti(lambda, d.xi);
    const Vec2 e2(0.0, 1.0);
    switch (grouping) {
    case Grouping::left_to_right: {
        Mat2 m = r * f1;
        m = m * r;
        m = m * a;
        m = m * r;
        m = m * f2;
        m = m * r;
        return m * e2;
    }
    case Grouping::right_to_left: {
        Vec2 v = r * e2;
        v = f2 * v;
        v = r * v;
        v = a * v;
        v = r * v;
        v = f1 * v;
        return r * v;
    }
    case Grouping::pairwise: {
        Mat2 left = (r * f1) * (r * a);
        Mat2 right = (r * f2) * r;
        return left * (right * e2);
    }
    }
    throw std::invalid_argument("unknown grouping");
}

namespace {

// bisection on g over [a, b] where g(a) < 0 < g(b) or the reverse
template <class G>
double bisect(G&& g, double a, double b)
{
    double ga = g(a);
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        double gm = g(m);
        if ((gm < 0) == (ga < 0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<SplitPair> symmetric_pairs(double alpha, double xi, int count)
{
    if (!(alpha > 0) || !(xi > 0))
        throw std::invalid_argument("alpha and xi must be positive");
    std::vector<SplitPair> out;
    const double half = pi / (2.0 * alpha);
    for (int n = 0; n < count; ++n) {
        const double c = (2 * n + 1) * half;
        // |cos(alpha (c + u))| = |sin(alpha u)| exactly at the centres
        // in logarithmic form so that the exponential never underflows
        auto g = [&](double u) { return std::log(2.0 * std::abs(std::sin(alpha * u))) + (c + u) * xi; };
        double up = bisect(g, 0.0, half);
        double dn = -bisect([&](double v) { return g(-v); }, 0.0, std::min(half, c));
        out.push_back({n, c, c + dn, c + up, up - dn});
    }
    return out;
}

std::vector<LeadingRoot> leading_roots(const DoubleWellData& d, double lo, double hi)
{
    if (!(d.alpha1 > 0) || !(d.alpha2 > 0) || !(d.xi > 0))
        throw std::invalid_argument("actions must be positive");
    std::vector<LeadingRoot> out;
    if (d.alpha1 == d.alpha2) {
        const double half = pi / (2.0 * d.alpha1);
        int count = static_cast<int>(std::ceil(hi / (2.0 * half))) + 1;
        for (const auto& sp : symmetric_pairs(d.alpha1, d.xi, count)) {
            for (double l : {sp.lower, sp.upper})
                if (l >= lo && l <= hi)
                    out.push_back({1, sp.n, sp.centre, l});
        }
        return out;
    }
    const double alpha[2] = {d.alpha1, d.alpha2};
    for (int fam = 0; fam < 2; ++fam) {
        const double a = alpha[fam], other = alpha[1 - fam];
        const double half = pi / (2.0 * a);
        for (int n = 0;; ++n) {
            const double c = (2 * n + 1) * half;
            if (c - half > hi)
                break;
            // log of 4 |sin(a u)| |cos(other (c+u))| = -2 (c+u) xi; search each side of
            // the centre up to the nearest zero of the other cosine
            auto g = [&](double u) {
                return std::log(4.0 * std::abs(std::sin(a * u)) * std::abs(std::cos(other * (c + u)))) +
                       2.0 * (c + u) * d.xi;
            };
            for (int side : {1, -1}) {
                double limit = side > 0 ? half : std::min(half, c);
                // stop before a zero of the other family (handled from its own centre)
                const double oh = pi / (2.0 * other);
                double k = std::floor(((c / oh) - 1.0) / 2.0);
                for (int j = -1; j <= 2; ++j) {
                    double z = (2.0 * (k + j) + 1.0) * oh - c;
                    // a coincident zero of the other cosine is part of this
                    // centre's degenerate pair, not a neighbour
                    if (std::abs(z) < 1e-8 * half)
                        limit = std::min(limit, oh);
                    else if (side * z > 0)
                        limit = std::min(limit, 0.5 * std::abs(z));
                }
                auto gs = [&](double v) { return g(side * v); };
                if (gs(limit) <= 0.0)
                    continue;
                double v = bisect(gs, 0.0, limit);
                double l = c + side * v;
                if (l >= lo && l <= hi)
                    out.push_back({fam + 1, n, c, l});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const LeadingRoot& x, const LeadingRoot& y) { return x.lambda < y.lambda; });
    return out;
}

}  // namespace cwkb
