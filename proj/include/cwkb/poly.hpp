#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace cwkb {

using cplx = std::complex<double>;

class Poly {
public:
    Poly() = default;
    // Ascending coefficients. Trailing zeros are rejected: the leading
    // coefficient must be nonzero and the degree at least 1.
    explicit Poly(std::vector<cplx> coeffs);
    static Poly real(const std::vector<double>& coeffs);
    static Poly from_roots(std::span<const cplx> roots, cplx leading = 1.0);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx leading() const { return c_.back(); }
    bool is_real() const;
    // real, even degree, positive leading coefficient
    bool is_even_well() const;

    cplx operator()(cplx z) const;
    std::pair<cplx, cplx> eval_with_derivative(cplx z) const;
    Poly derivative() const;
    // coefficients of w -> q(z0 + w)
    Poly shifted(cplx z0) const;
    // sum |c_k| r^k, the natural size of q on |z| = r
    double magnitude(double r) const;

    bool operator==(const Poly&) const = default;

private:
    std::vector<cplx> c_;
};

inline cplx eval(const Poly& p, cplx z) { return p(z); }

// Taylor coefficients of q about z0 for any scalar type (used by the propagators).
template <class S>
void taylor_shift(const std::vector<S>& c, const S& z0, std::vector<S>& out)
{
    out = c;
    const int n = static_cast<int>(c.size()) - 1;
    for (int i = 0; i < n; ++i)
        for (int k = n - 1; k >= i; --k)
            out[k] += z0 * out[k + 1];
}

struct TurningPoint {
    cplx z;
    int multiplicity = 1;
    bool is_real = false;
};

std::vector<TurningPoint> turning_points(const Poly& p, double tol_cluster = 1e-9);
void assert_simple(std::span<const TurningPoint> tps);
std::vector<double> real_turning_points(const Poly& p);

// Real centre c with q(c + x) even, if the (real) polynomial has one.
bool symmetry_centre(const Poly& p, double& centre);

}  // namespace cwkb
