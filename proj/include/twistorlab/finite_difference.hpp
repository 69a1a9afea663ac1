#pragma once

// Central-difference stencils over a generic point type (Vec4 for R^{2,2},
// Mat2 for the Grassmannian chart) and a generic value type (double,
// complex, Eigen vectors/matrices).

#include "twistorlab/core.hpp"

#include <string>
#include <type_traits>
#include <utility>

namespace twistorlab {

struct FDSpec {
    double h = 1e-3;
    bool richardson = true;

    static FDSpec make(double h = 1e-3, bool richardson = true) {
        if (!(h > 0.0)) throw InvalidInput("FDSpec: h must be > 0, got " + std::to_string(h));
        return {h, richardson};
    }
};

namespace fd {

template <typename F, typename P>
using value_t = std::decay_t<std::invoke_result_t<const F&, const P&>>;

/// (f(x + h d) - f(x - h d)) / 2h
template <typename F, typename P>
value_t<F, P> first(const F& f, const P& x, const P& d, double h) {
    using V = value_t<F, P>;
    return V((f(P(x + h * d)) - f(P(x - h * d))) / (2.0 * h));
}

/// (f(x + h d) - 2 f(x) + f(x - h d)) / h^2
template <typename F, typename P>
value_t<F, P> second(const F& f, const P& x, const P& d, double h) {
    using V = value_t<F, P>;
    return V((f(P(x + h * d)) - 2.0 * f(x) + f(P(x - h * d))) / (h * h));
}

/// Four-point cross stencil for d^2 f / (da db), a != b.
template <typename F, typename P>
value_t<F, P> mixed(const F& f, const P& x, const P& a, const P& b, double h) {
    using V = value_t<F, P>;
    const P pa = h * a;
    const P pb = h * b;
    return V((f(P(x + pa + pb)) - f(P(x + pa - pb)) - f(P(x - pa + pb)) + f(P(x - pa - pb))) / (4.0 * h * h));
}

/// Applies a second-order-accurate stencil at h, and with Richardson on
/// combines h and h/2 as (4 D(h/2) - D(h)) / 3.
template <typename Stencil>
auto extrapolate(const Stencil& stencil, const FDSpec& spec) {
    using V = std::decay_t<decltype(stencil(spec.h))>;
    if (!spec.richardson) return stencil(spec.h);
    const V coarse = stencil(spec.h);
    const V fine = stencil(0.5 * spec.h);
    return V((4.0 * fine - coarse) / 3.0);
}

template <typename F, typename P>
value_t<F, P> partial(const F& f, const P& x, const P& d, const FDSpec& spec) {
    return extrapolate([&](double h) { return first(f, x, d, h); }, spec);
}

template <typename F, typename P>
value_t<F, P> second_partial(const F& f, const P& x, const P& d, const FDSpec& spec) {
    return extrapolate([&](double h) { return second(f, x, d, h); }, spec);
}

template <typename F, typename P>
value_t<F, P> mixed_partial(const F& f, const P& x, const P& a, const P& b, const FDSpec& spec) {
    return extrapolate([&](double h) { return mixed(f, x, a, b, h); }, spec);
}

inline Vec4 axis4(int i) { return Vec4::Unit(i); }

inline Mat2 axis2x2(int r, int c) {
    Mat2 e = Mat2::Zero();
    e(r, c) = 1.0;
    return e;
}

}  // namespace fd
}  // namespace twistorlab
