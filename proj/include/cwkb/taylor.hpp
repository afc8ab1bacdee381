#pragma once

#include "cwkb/poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace cwkb {

template <class S>
struct real_of {
    using type = S;
};
template <class T>
struct real_of<std::complex<T>> {
    using type = T;
};
template <class S>
using real_of_t = typename real_of<S>::type;

template <class S>
real_of_t<S> magnitude(const S& v)
{
    using std::abs;
    return abs(v);
}

// power-of-two rescaling of (y, dy) so that the larger component lies in [1/2, 1)
template <class S>
int renormalize(S& y, S& dy)
{
    using R = real_of_t<S>;
    using std::frexp;
    using std::ldexp;
    R m = std::max(magnitude(y), magnitude(dy));
    if (!(m > R(0)))
        return 0;
    int e = 0;
    frexp(m, &e);
    if constexpr (std::is_same_v<S, R>) {
        y = ldexp(y, -e);
        dy = ldexp(dy, -e);
    } else {
        y = S(ldexp(y.real(), -e), ldexp(y.imag(), -e));
        dy = S(ldexp(dy.real(), -e), ldexp(dy.imag(), -e));
    }
    return e;
}

// One-step Taylor-series propagator for y'' = lambda^2 Q(z) y with polynomial Q.
// The series is re-expanded about the start of every step. Holds scratch
// buffers, so an instance must not be shared between threads.
template <class S>
class TaylorPropagator {
public:
    using R = real_of_t<S>;

    // budget caps lambda^2 sum_j |Q_j| |h|^{j+2}; about the square of the
    // exponential growth allowed over one step
    TaylorPropagator(std::vector<S> q, R lambda, R tol, double budget = 4.0)
        : q_(std::move(q)), lam2_(lambda * lambda), tol_(tol), budget_(budget)
    {
    }

    // Expand about z; returns the admissible step length there.
    double prepare(const S& z)
    {
        taylor_shift(q_, z, shift_);
        const int d = static_cast<int>(shift_.size()) - 1;
        const double l2 = static_cast<double>(lam2_);
        double h = 1e300;
        for (int j = 0; j <= d; ++j) {
            double c = static_cast<double>(magnitude(shift_[j])) * l2;
            if (c > 0.0)
                h = std::min(h, std::pow(budget_ / ((d + 1) * c), 1.0 / (j + 2)));
        }
        return h;
    }

    // Advance (y, dy) from the prepared point by h. Returns false if the
    // series did not converge within the order cap.
    bool advance(const S& h, S& y, S& dy)
    {
        const int d = static_cast<int>(shift_.size()) - 1;
        qh_.resize(d + 1);
        S hp = S(R(1));
        for (int j = 0; j <= d; ++j) {
            qh_[j] = shift_[j] * hp;
            hp *= h;
        }
        const S c = S(lam2_) * h * h;
        b_.assign(1, y);
        b_.push_back(dy * h);
        S Y = b_[0] + b_[1];
        S D = b_[1];
        for (int k = 0; k < kMaxOrder; ++k) {
            S acc = S(R(0));
            const int jm = std::min(k, d);
            for (int j = 0; j <= jm; ++j)
                acc += qh_[j] * b_[k - j];
            S next = c * acc / R((k + 2) * (k + 1));
            b_.push_back(next);
            Y += next;
            D += R(k + 2) * next;
            if (k >= d + 2) {
                R tail = magnitude(next) + magnitude(b_[k + 1]);
                R size = magnitude(Y) + magnitude(D);
                if (tail <= tol_ * size) {
                    y = Y;
                    dy = D / h;
                    return true;
                }
            }
        }
        return false;
    }

    R lambda_squared() const { return lam2_; }

private:
    static constexpr int kMaxOrder = 400;
    std::vector<S> q_;
    R lam2_;
    R tol_;
    double budget_;
    std::vector<S> shift_, qh_, b_;
};

}  // namespace cwkb
