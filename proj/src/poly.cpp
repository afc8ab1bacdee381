#include "cwkb/poly.hpp"

#include "cwkb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cwkb {

Poly::Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs))
{
    if (c_.size() < 2)
        throw std::invalid_argument("polynomial must have degree >= 1");
    if (c_.back() == cplx(0.0))
        throw std::invalid_argument("leading coefficient must be nonzero");
    for (const auto& c : c_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("non-finite coefficient");
}

Poly Poly::real(const std::vector<double>& coeffs)
{
    return Poly(std::vector<cplx>(coeffs.begin(), coeffs.end()));
}

Poly Poly::from_roots(std::span<const cplx> roots, cplx leading)
{
    std::vector<cplx> c{leading};
    for (const cplx& r : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return Poly(std::move(c));
}

bool Poly::is_real() const
{
    return std::all_of(c_.begin(), c_.end(), [](cplx c) { return c.imag() == 0.0; });
}

bool Poly::is_even_well() const
{
    return is_real() && degree() % 2 == 0 && leading().real() > 0.0;
}

cplx Poly::operator()(cplx z) const
{
    cplx v = c_.back();
    for (int k = degree() - 1; k >= 0; --k)
        v = v * z + c_[k];
    return v;
}

std::pair<cplx, cplx> Poly::eval_with_derivative(cplx z) const
{
    cplx v = c_.back();
    cplx d = 0.0;
    for (int k = degree() - 1; k >= 0; --k) {
        d = d * z + v;
        v = v * z + c_[k];
    }
    return {v, d};
}

Poly Poly::derivative() const
{
    if (degree() == 1)
        throw std::invalid_argument("derivative of a linear polynomial is constant");
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
        d[k - 1] = static_cast<double>(k) * c_[k];
    return Poly(std::move(d));
}

Poly Poly::shifted(cplx z0) const
{
    std::vector<cplx> out;
    taylor_shift(c_, z0, out);
    return Poly(std::move(out));
}

double Poly::magnitude(double r) const
{
    double s = 0.0, rk = 1.0;
    for (const auto& c : c_) {
        s += std::abs(c) * rk;
        rk *= r;
    }
    return s;
}

namespace {

std::vector<cplx> aberth(const Poly& p)
{
    const int n = p.degree();
    const auto& c = p.coeffs();
    double bound = 0.0;
    for (int k = 0; k < n; ++k)
        bound = std::max(bound, std::abs(c[k] / c[n]));
    bound += 1.0;

    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k)
        z[k] = std::polar(bound, 2.0 * std::numbers::pi * k / n + 0.4);

    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            auto [v, d] = p.eval_with_derivative(z[k]);
            if (v == cplx(0.0))
                continue;
            cplx ratio = v / d;
            cplx s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k)
                    s += 1.0 / (z[k] - z[j]);
            cplx w = ratio / (1.0 - ratio * s);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
                w = ratio;
            z[k] -= w;
            worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[k])));
        }
        if (worst < 1e-15)
            break;
    }

    // Newton polish, keeping the best iterate
    for (auto& r : z) {
        double best = std::abs(p(r));
        for (int it = 0; it < 10 && best > 0.0; ++it) {
            auto [v, d] = p.eval_with_derivative(r);
            if (d == cplx(0.0))
                break;
            cplx cand = r - v / d;
            double res = std::abs(p(cand));
            if (!(res < best))
                break;
            r = cand;
            best = res;
        }
    }
    return z;
}

bool less_rc(cplx a, cplx b)
{
    if (a.real() != b.real())
        return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

std::vector<TurningPoint> turning_points(const Poly& p, double tol_cluster)
{
    const int n = p.degree();
    std::vector<cplx> z = aberth(p);

    for (const auto& r : z) {
        double scale = p.magnitude(std::abs(r));
        if (!(std::abs(p(r)) <= 1e-12 * scale)) {
            std::ostringstream os;
            os << "root near " << r << " has residual " << std::abs(p(r));
            fail(Errc::NonConvergence, os.str());
        }
    }

    // Cluster: explicit tolerance, plus numerically coincident copies of a
    // multiple root (Aberth leaves these ~sqrt(eps) apart, with p' ~ 0 at their centroid).
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i)
        parent[i] = i;
    auto find = [&](int i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };
    const auto& c = p.coeffs();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = std::abs(z[i] - z[j]);
            double s = 1.0 + std::max(std::abs(z[i]), std::abs(z[j]));
            bool merge = d <= tol_cluster * s;
            if (!merge && d <= 1e-5 * s) {
                cplx m = 0.5 * (z[i] + z[j]);
                double dscale = 0.0, rk = 1.0;
                for (int k = 1; k <= n; ++k) {
                    dscale += k * std::abs(c[k]) * rk;
                    rk *= std::abs(m);
                }
                merge = std::abs(p.eval_with_derivative(m).second) <= 1e-9 * dscale;
            }
            if (merge)
                parent[find(i)] = find(j);
        }
    }

    std::vector<TurningPoint> out;
    std::vector<int> seen(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (seen[r] < 0) {
            seen[r] = static_cast<int>(out.size());
            out.push_back({z[i], 1, false});
        } else {
            auto& tp = out[seen[r]];
            tp.z = (tp.z * static_cast<double>(tp.multiplicity) + z[i]) /
                   static_cast<double>(tp.multiplicity + 1);
            tp.multiplicity += 1;
        }
    }

    if (p.is_real()) {
        std::vector<TurningPoint> upper, lower, real;
        for (auto& tp : out) {
            if (std::abs(tp.z.imag()) <= 1e-10 * (1.0 + std::abs(tp.z))) {
                tp.z = cplx(tp.z.real(), 0.0);
                tp.is_real = true;
                real.push_back(tp);
            } else if (tp.z.imag() > 0) {
                upper.push_back(tp);
            } else {
                lower.push_back(tp);
            }
        }
        std::vector<bool> used(lower.size(), false);
        std::vector<TurningPoint> sym = real;
        for (auto& u : upper) {
            int best = -1;
            double bd = 0.0;
            for (std::size_t j = 0; j < lower.size(); ++j) {
                if (used[j])
                    continue;
                double d = std::abs(u.z - std::conj(lower[j].z));
                if (best < 0 || d < bd) {
                    best = static_cast<int>(j);
                    bd = d;
                }
            }
            if (best < 0)
                fail(Errc::NonConvergence, "unpaired complex root of a real polynomial");
            used[best] = true;
            cplx avg = 0.5 * (u.z + std::conj(lower[best].z));
            sym.push_back({avg, u.multiplicity, false});
            sym.push_back({std::conj(avg), u.multiplicity, false});
        }
        out = std::move(sym);
    } else {
        for (auto& tp : out)
            tp.is_real = std::abs(tp.z.imag()) <= 1e-10 * (1.0 + std::abs(tp.z));
    }

    std::sort(out.begin(), out.end(),
              [](const TurningPoint& a, const TurningPoint& b) { return less_rc(a.z, b.z); });
    return out;
}

void assert_simple(std::span<const TurningPoint> tps)
{
    for (const auto& tp : tps)
        if (tp.multiplicity != 1) {
            std::ostringstream os;
            os << "turning point " << tp.z << " has multiplicity " << tp.multiplicity;
            fail(Errc::MultipleTurningPoint, os.str());
        }
}

std::vector<double> real_turning_points(const Poly& p)
{
    std::vector<double> xs;
    for (const auto& tp : turning_points(p))
        if (tp.is_real)
            xs.push_back(tp.z.real());
    return xs;
}

bool symmetry_centre(const Poly& p, double& centre)
{
    if (!p.is_real())
        return false;
    const int n = p.degree();
    const auto& c = p.coeffs();
    double x0 = -c[n - 1].real() / (n * c[n].real());
    Poly s = p.shifted(x0);
    double scale = 0.0;
    for (const auto& a : s.coeffs())
        scale += std::abs(a);
    for (int k = 1; k <= n; k += 2)
        if (std::abs(s.coeffs()[k]) > 1e-12 * scale)
            return false;
    centre = x0;
    return true;
}

}  // namespace cwkb
