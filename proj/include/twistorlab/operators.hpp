#pragma once

// The ultrahyperbolic operator in chart and diagonal coordinates, the
// connection-coupled operator, and the helicity moment consistency residual.
//
// Chart form (John operator): d^2/dX11 dX22 - d^2/dX12 dX21.
// Diagonal form:              d1^2 + d2^2 - d3^2 - d4^2.
//
// chart_to_diag uses X11 = x1 + x4, X22 = x1 - x4, X12 = x2 + x3,
// X21 = x2 - x3, under which the John operator is
// 1/4 (d1^2 + d3^2 - d2^2 - d4^2). Swapping axes 2 and 3 (chart_to_box)
// turns it into exactly 1/4 of the diagonal form.

#include "twistorlab/core.hpp"
#include "twistorlab/finite_difference.hpp"
#include "twistorlab/instanton.hpp"
#include "twistorlab/xray.hpp"

#include <array>
#include <cmath>
#include <functional>

namespace twistorlab {

/// Sign pattern (+, +, -, -) of the diagonal operator.
inline constexpr std::array<double, 4> box_signs{1.0, 1.0, -1.0, -1.0};

template <typename F>
auto john_operator(const F& phi, const Mat2& X, const FDSpec& spec = FDSpec{}) {
    using V = fd::value_t<F, Mat2>;
    const V a = fd::mixed_partial(phi, X, fd::axis2x2(0, 0), fd::axis2x2(1, 1), spec);
    const V b = fd::mixed_partial(phi, X, fd::axis2x2(0, 1), fd::axis2x2(1, 0), spec);
    return V(a - b);
}

inline Vec4 chart_to_diag(const Mat2& X) {
    return Vec4(0.5 * (X(0, 0) + X(1, 1)), 0.5 * (X(0, 1) + X(1, 0)), 0.5 * (X(0, 1) - X(1, 0)),
                0.5 * (X(0, 0) - X(1, 1)));
}

inline Mat2 diag_to_chart(const Vec4& x) {
    Mat2 X;
    X << x(0) + x(3), x(1) + x(2), x(1) - x(2), x(0) - x(3);
    return X;
}

/// Relabels axes (1, 2, 3, 4) -> (1, 3, 2, 4); an involution.
inline Vec4 swap_middle_axes(const Vec4& x) { return Vec4(x(0), x(2), x(1), x(3)); }

/// Diagonal coordinates in which john_operator = 1/4 box_diag.
inline Vec4 chart_to_box(const Mat2& X) { return swap_middle_axes(chart_to_diag(X)); }
inline Mat2 box_to_chart(const Vec4& y) { return diag_to_chart(swap_middle_axes(y)); }

/// d1^2 + d2^2 - d3^2 - d4^2 by central differences.
template <typename F>
auto box_diag(const F& psi, const Vec4& x, const FDSpec& spec = FDSpec{}) {
    using V = fd::value_t<F, Vec4>;
    V acc = box_signs[0] * fd::second_partial(psi, x, fd::axis4(0), spec);
    for (int i = 1; i < 4; ++i) acc = V(acc + box_signs[i] * fd::second_partial(psi, x, fd::axis4(i), spec));
    return acc;
}

/// sum_i s_i (d_i + A_i)^2 psi
///   = sum_i s_i [d_i^2 psi + (d_i A_i) psi + 2 A_i d_i psi + A_i^2 psi].
/// With A = 0 every added term is an exact zero, so the result equals
/// box_diag bit for bit.
template <typename F>
Eigen::VectorXcd coupled_box(const Connection& A, const F& psi, const Vec4& x, const FDSpec& spec = FDSpec{}) {
    auto field = [&psi](const Vec4& y) { return Eigen::VectorXcd(psi(y)); };
    const Eigen::VectorXcd center = field(x);
    if (center.size() != A.rank)
        throw InvalidInput("coupled_box: field has " + std::to_string(center.size()) + " components, connection rank " +
                           std::to_string(A.rank));
    const Potential a = A.potential(x);
    const PotentialPartials da = connection_partials(A, x, spec);
    Eigen::VectorXcd acc;
    for (int i = 0; i < 4; ++i) {
        const Eigen::VectorXcd d2 = fd::second_partial(field, x, fd::axis4(i), spec);
        const Eigen::VectorXcd d1 = fd::partial(field, x, fd::axis4(i), spec);
        const Eigen::VectorXcd lower = da[i][i] * center + 2.0 * (a[i] * d1) + a[i] * (a[i] * center);
        const Eigen::VectorXcd term = box_signs[i] * Eigen::VectorXcd(d2 + lower);
        acc = i == 0 ? term : Eigen::VectorXcd(acc + term);
    }
    return acc;
}

/// max over j in {1, 2}, k < n of |d phi_k / dX2j - d phi_{k+1} / dX1j|.
inline double dn_residual(const MomentField& m, const Mat2& X, const FDSpec& spec = FDSpec{}) {
    if (m.n < 1) throw InvalidInput("dn_residual: n = 0 has no first-order relations; use john_operator");
    auto field = [&m](const Mat2& Y) { return Eigen::VectorXd(m(Y)); };
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
        const Eigen::VectorXd along_v = fd::partial(field, X, fd::axis2x2(1, j), spec);
        const Eigen::VectorXd along_u = fd::partial(field, X, fd::axis2x2(0, j), spec);
        for (int k = 0; k < m.n; ++k) worst = std::max(worst, std::abs(along_v(k) - along_u(k + 1)));
    }
    return worst;
}

}  // namespace twistorlab
