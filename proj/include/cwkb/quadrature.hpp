#pragma once

#include "cwkb/errors.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace cwkb::quad {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kronrod_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Estimate {
    T value;
    double error;
};

template <class T, class F>
Estimate<T> gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fc = f(c);
    T k = fc * kronrod_w[7];
    T g = fc * gauss_w[3];
    for (int j = 0; j < 7; ++j) {
        T s = f(c - h * kronrod_x[j]) + f(c + h * kronrod_x[j]);
        k += s * kronrod_w[j];
        if (j % 2 == 1)
            g += s * gauss_w[j / 2];
    }
    return {k * h, std::abs(k * h - g * h)};
}

template <class T, class F>
T adaptive_piece(F& f, double a, double b, double abs_tol, double rel_tol, int depth,
                 const Estimate<T>& whole)
{
    if (whole.error <= std::max(abs_tol, rel_tol * std::abs(whole.value)))
        return whole.value;
    if (depth <= 0)
        fail(Errc::QuadratureFailure, "error target unmet at maximum depth");
    const double m = 0.5 * (a + b);
    auto left = gk15<T>(f, a, m);
    auto right = gk15<T>(f, m, b);
    return adaptive_piece<T>(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, left) +
           adaptive_piece<T>(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, right);
}

// Adaptive Gauss-Kronrod on [a, b], bisection depth limit 30.
template <class T, class F>
T integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_depth = 30)
{
    if (a == b)
        return T{};
    auto whole = gk15<T>(f, a, b);
    return adaptive_piece<T>(f, a, b, abs_tol, rel_tol, max_depth, whole);
}

}  // namespace cwkb::quad
