#pragma once

// X-ray transform of homogeneous functions on R^4 \ 0 into fields on frames:
//
//   R f (u, v) = integral over [0, 2 pi) of f(u cos t + v sin t) dt
//
// evaluated with the periodic trapezoid rule. For deg f = -2 the result
// satisfies R f(frame g) = |det g|^-1 R f(frame), i.e. it is a weight -1
// density on frames. No 1/(2 pi) normalization is applied.

#include "twistorlab/core.hpp"
#include "twistorlab/fields.hpp"
#include "twistorlab/geometry.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace twistorlab {

template <typename Value>
using ChartField = std::function<Value(const Mat2&)>;

/// Uniform periodic trapezoid nodes on [0, 2 pi).
class QuadratureSpec {
public:
    static constexpr int default_nodes = 64;

    static QuadratureSpec make(int n_nodes = default_nodes) {
        if (n_nodes < 4) throw InvalidInput("quadrature: n_nodes must be >= 4, got " + std::to_string(n_nodes));
        return QuadratureSpec(n_nodes);
    }

    int n_nodes() const noexcept { return static_cast<int>(cos_->size()); }
    double weight() const noexcept { return two_pi / n_nodes(); }
    double cos_at(int j) const { return (*cos_)[j]; }
    double sin_at(int j) const { return (*sin_)[j]; }

private:
    explicit QuadratureSpec(int n) {
        auto c = std::make_shared<std::vector<double>>(n);
        auto s = std::make_shared<std::vector<double>>(n);
        for (int j = 0; j < n; ++j) {
            const double t = two_pi * j / n;
            (*c)[j] = std::cos(t);
            (*s)[j] = std::sin(t);
        }
        cos_ = std::move(c);
        sin_ = std::move(s);
    }
    std::shared_ptr<const std::vector<double>> cos_;
    std::shared_ptr<const std::vector<double>> sin_;
};

/// Shared circle engine: weight * sum_j integrand(u cos t_j + v sin t_j).
/// Both the real X-ray transform and the complex contour transform go
/// through here, in the same node order.
template <typename Value, typename Integrand>
Value circle_integral(Integrand&& integrand, const Frame& frame, const QuadratureSpec& q) {
    Value sum{};
    for (int j = 0; j < q.n_nodes(); ++j) sum += integrand(frame.at(q.cos_at(j), q.sin_at(j)));
    return sum * q.weight();
}

inline void require_degree(const HomogeneousFunction& f, int degree, const char* where) {
    if (f.degree() != degree)
        throw InvalidInput(std::string(where) + ": expected degree " + std::to_string(degree) + ", got " +
                           std::to_string(f.degree()));
}

inline double xray_transform(const HomogeneousFunction& f, const Frame& frame,
                             const QuadratureSpec& q = QuadratureSpec::make()) {
    require_degree(f, -2, "xray_transform");
    return circle_integral<double>([&f](const Vec4& x) { return f.eval_unchecked(x); }, frame, q);
}

/// R f as a weight -1 field on frames.
inline WeightedField<double> xray_field(const HomogeneousFunction& f, const QuadratureSpec& q = QuadratureSpec::make()) {
    require_degree(f, -2, "xray_field");
    return {-1, [f, q](const Frame& frame) { return xray_transform(f, frame, q); }};
}

/// X -> R f(plane_from_chart(X)).
inline ChartField<double> xray_chart_field(const HomogeneousFunction& f,
                                           const QuadratureSpec& q = QuadratureSpec::make()) {
    require_degree(f, -2, "xray_chart_field");
    return [f, q](const Mat2& X) { return xray_transform(f, plane_from_chart(X), q); };
}

/// Closed form of R(|x|^-2): 2 pi / sqrt(Gram determinant).
inline double xray_inverse_square_closed_form(const Frame& frame) {
    return two_pi / std::sqrt(frame.gram_determinant());
}

namespace detail {

/// Probe f(-x) = sign f(x) at fixed points.
inline bool has_parity(const HomogeneousFunction& f, int sign) {
    static const Vec4 probes[] = {Vec4(0.3, -0.7, 0.5, 1.1), Vec4(1.0, 2.0, -0.5, 0.25), Vec4(-0.4, 0.1, 0.9, -1.3)};
    for (const Vec4& p : probes) {
        const double a = f(p);
        const double b = f(Vec4(-p));
        if (std::abs(b - sign * a) > 1e-9 * (1.0 + std::abs(a))) return false;
    }
    return true;
}

}  // namespace detail

/// Helicity n/2 moments
///   phi_k(u, v) = integral f(u c + v s) c^(n-k) s^k dt,  k = 0..n,
/// for f of degree -n-2 with f(-x) = (-1)^n f(x). n = 0 is xray_transform.
inline Eigen::VectorXd xray_moments(const HomogeneousFunction& f, const Frame& frame, int n,
                                    const QuadratureSpec& q = QuadratureSpec::make()) {
    if (n < 0) throw InvalidInput("xray_moments: negative helicity index");
    require_degree(f, -n - 2, "xray_moments");
    if (!detail::has_parity(f, n % 2 == 0 ? 1 : -1))
        throw InvalidInput("xray_moments: input parity under x -> -x must be (-1)^n");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd cpow(n + 1), spow(n + 1);
    for (int j = 0; j < q.n_nodes(); ++j) {
        const double c = q.cos_at(j);
        const double s = q.sin_at(j);
        const double value = f.eval_unchecked(frame.at(c, s));
        cpow(0) = 1.0;
        spow(0) = 1.0;
        for (int k = 1; k <= n; ++k) {
            cpow(k) = cpow(k - 1) * c;
            spow(k) = spow(k - 1) * s;
        }
        for (int k = 0; k <= n; ++k) sum(k) += value * cpow(n - k) * spow(k);
    }
    return sum * q.weight();
}

/// Moment components phi_0..phi_n as functions on the affine chart.
struct MomentField {
    int n;
    ChartField<Eigen::VectorXd> eval;

    Eigen::VectorXd operator()(const Mat2& X) const { return eval(X); }
};

inline MomentField moment_chart_field(const HomogeneousFunction& f, int n,
                                      const QuadratureSpec& q = QuadratureSpec::make()) {
    // Validate eagerly so errors surface at construction.
    (void)xray_moments(f, plane_from_chart(Mat2::Zero()), n, QuadratureSpec::make(4));
    return {n, [f, n, q](const Mat2& X) { return xray_moments(f, plane_from_chart(X), n, q); }};
}

/// max over frames of |R(f o g)(u, v) - R f(g u, g v)|.
inline double equivariance_residual(const HomogeneousFunction& f, const Mat4& g, const std::vector<Frame>& frames,
                                    const QuadratureSpec& q = QuadratureSpec::make()) {
    const double d = g.determinant();
    if (d == 0.0 || !std::isfinite(d)) throw InvalidInput("equivariance_residual: singular g");
    const HomogeneousFunction pulled = f.compose_linear(g);
    double worst = 0.0;
    for (const Frame& fr : frames) {
        const double lhs = xray_transform(pulled, fr, q);
        const double rhs = xray_transform(f, Frame::make(g * fr.u(), g * fr.v()), q);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace twistorlab
