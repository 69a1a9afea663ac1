#pragma once

// Contour-integral transform of rational twistor functions restricted to
// real frames: the same circle integral as the X-ray transform, with a
// complex integrand whose poles are kept away from the real circle.

#include "twistorlab/core.hpp"
#include "twistorlab/fields.hpp"
#include "twistorlab/geometry.hpp"
#include "twistorlab/xray.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace twistorlab {

/// Bilinear pairing A . Z (no conjugation).
inline cplx pair(const CVec4& A, const CVec4& Z) { return (A.array() * Z.array()).sum(); }

struct LinearFactor {
    CVec4 covector;
    int exponent;
};

/// prod_i (A_i . Z)^(m_i), homogeneous of degree sum_i m_i.
class TwistorRationalFunction {
public:
    static TwistorRationalFunction make(std::vector<LinearFactor> factors) {
        if (factors.empty()) throw InvalidInput("twistor function: no factors");
        for (const auto& f : factors)
            if (f.covector.norm() == 0.0) throw InvalidInput("twistor function: zero covector");
        return TwistorRationalFunction(std::move(factors));
    }

    const std::vector<LinearFactor>& factors() const noexcept { return factors_; }

    int homogeneity() const {
        int d = 0;
        for (const auto& f : factors_) d += f.exponent;
        return d;
    }

    cplx operator()(const CVec4& Z) const {
        cplx num(1.0, 0.0);
        cplx den(1.0, 0.0);
        for (const auto& f : factors_) {
            const cplx l = pair(f.covector, Z);
            for (int k = 0; k < std::abs(f.exponent); ++k) (f.exponent > 0 ? num : den) *= l;
        }
        return num / den;
    }

    cplx operator()(const Vec4& x) const { return (*this)(CVec4(x.cast<cplx>())); }

    TwistorRationalFunction scaled(cplx lambda) const {
        // Absorb the scalar into the first factor: (lambda^(1/m) A . Z)^m.
        TwistorRationalFunction out = *this;
        auto& first = out.factors_.front();
        first.covector *= std::pow(lambda, 1.0 / first.exponent);
        return out;
    }

private:
    explicit TwistorRationalFunction(std::vector<LinearFactor> f) : factors_(std::move(f)) {}
    std::vector<LinearFactor> factors_;
};

/// 1 / ((A . Z)(B . Z)), homogeneity -2.
inline TwistorRationalFunction elementary_state(const CVec4& A, const CVec4& B) {
    if (A.norm() == 0.0 || B.norm() == 0.0) throw InvalidInput("elementary_state: zero covector");
    Eigen::Matrix<cplx, 4, 2> m;
    m.col(0) = A;
    m.col(1) = B;
    const Eigen::Vector2d s = Eigen::JacobiSVD<Eigen::Matrix<cplx, 4, 2>>(m).singularValues();
    if (s(1) <= 1e-12 * s(0)) throw InvalidInput("elementary_state: A and B are proportional");
    return TwistorRationalFunction::make({{A, -1}, {B, -1}});
}

/// (A . u)(B . v) - (A . v)(B . u): the pairing of A ^ B with u ^ v.
inline cplx plane_pairing(const CVec4& A, const CVec4& B, const Frame& frame) {
    const CVec4 u = frame.u().cast<cplx>();
    const CVec4 v = frame.v().cast<cplx>();
    return pair(A, u) * pair(B, v) - pair(A, v) * pair(B, u);
}

/// Per factor: the minimum of |A . (u cos t + v sin t)| over the whole
/// circle (exact, not sampled), relative to |A| max_t |u cos t + v sin t|,
/// and the winding number of A . x(t) around 0.
struct PoleSafetyReport {
    std::vector<double> min_modulus;
    std::vector<int> winding;
    std::vector<bool> is_pole;
    double margin = 1e-3;

    bool safe() const {
        for (std::size_t i = 0; i < min_modulus.size(); ++i)
            if (is_pole[i] && !(min_modulus[i] > margin)) return false;
        return true;
    }
};

inline PoleSafetyReport pole_safety(const TwistorRationalFunction& f, const Frame& frame, double margin = 1e-3) {
    PoleSafetyReport r;
    r.margin = margin;
    const CVec4 u = frame.u().cast<cplx>();
    const CVec4 v = frame.v().cast<cplx>();
    const double radius = Eigen::JacobiSVD<Frame::Matrix>(frame.matrix()).singularValues()(0);
    const cplx I(0.0, 1.0);
    for (const auto& fac : f.factors()) {
        // A . x(t) = (alpha e^{it} + beta e^{-it}) / 2
        const cplx au = pair(fac.covector, u);
        const cplx av = pair(fac.covector, v);
        const double alpha = std::abs(au - I * av);
        const double beta = std::abs(au + I * av);
        r.min_modulus.push_back(0.5 * std::abs(alpha - beta) / (fac.covector.norm() * radius));
        r.winding.push_back(alpha > beta ? 1 : (alpha < beta ? -1 : 0));
        r.is_pole.push_back(fac.exponent < 0);
    }
    return r;
}

/// Raised when a pole of the integrand comes within the margin of the
/// integration circle.
class PoleTooClose : public DomainError {
public:
    PoleTooClose(std::size_t factor, double modulus, double margin)
        : DomainError(describe(factor, modulus, margin)), factor_(factor), modulus_(modulus) {}
    std::size_t factor() const noexcept { return factor_; }
    double modulus() const noexcept { return modulus_; }

private:
    static std::string describe(std::size_t factor, double modulus, double margin) {
        std::ostringstream os;
        os << "contour_transform: pole of factor " << factor << " within " << modulus
           << " of the real circle (margin " << margin << ")";
        return os.str();
    }
    std::size_t factor_;
    double modulus_;
};

inline void require_pole_safe(const TwistorRationalFunction& f, const Frame& frame, double margin) {
    const PoleSafetyReport r = pole_safety(f, frame, margin);
    for (std::size_t i = 0; i < r.min_modulus.size(); ++i)
        if (r.is_pole[i] && !(r.min_modulus[i] > margin)) throw PoleTooClose(i, r.min_modulus[i], margin);
}

inline constexpr double default_pole_margin = 1e-3;

/// integral over [0, 2 pi) of f(u cos t + v sin t) dt for homogeneity -2.
inline cplx contour_transform(const TwistorRationalFunction& f, const Frame& frame,
                              const QuadratureSpec& q = QuadratureSpec::make(),
                              double margin = default_pole_margin) {
    if (f.homogeneity() != -2)
        throw InvalidInput("contour_transform: homogeneity must be -2, got " + std::to_string(f.homogeneity()));
    require_pole_safe(f, frame, margin);
    return circle_integral<cplx>([&f](const Vec4& x) { return f(x); }, frame, q);
}

/// Helicity n/2 moments with a complex integrand; homogeneity -n-2.
/// Evaluates, but carries no verified field-equation claim beyond n = 0.
inline Eigen::VectorXcd contour_moments(const TwistorRationalFunction& f, const Frame& frame, int n,
                                        const QuadratureSpec& q = QuadratureSpec::make(),
                                        double margin = default_pole_margin) {
    if (n < 0 || f.homogeneity() != -n - 2) throw InvalidInput("contour_moments: homogeneity must be -n-2");
    require_pole_safe(f, frame, margin);
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(n + 1);
    for (int j = 0; j < q.n_nodes(); ++j) {
        const double c = q.cos_at(j);
        const double s = q.sin_at(j);
        const cplx value = f(frame.at(c, s));
        for (int k = 0; k <= n; ++k) sum(k) += value * std::pow(c, n - k) * std::pow(s, k);
    }
    return sum * q.weight();
}

/// Residue evaluation of the elementary state on a frame:
/// -4 pi i / ((A . u)(B . v) - (A . v)(B . u)) when exactly the A pole is
/// enclosed, its negative when only the B pole is, zero otherwise.
inline cplx elementary_state_closed_form(const CVec4& A, const CVec4& B, const Frame& frame,
                                         double margin = default_pole_margin) {
    const TwistorRationalFunction f = elementary_state(A, B);
    require_pole_safe(f, frame, margin);
    const PoleSafetyReport r = pole_safety(f, frame, margin);
    const int sign = r.winding[0] == 1 && r.winding[1] == -1 ? 1 : (r.winding[0] == -1 && r.winding[1] == 1 ? -1 : 0);
    if (sign == 0) return {0.0, 0.0};
    return static_cast<double>(sign) * cplx(0.0, -4.0 * pi) / plane_pairing(A, B, frame);
}

inline WeightedField<cplx> contour_field(const TwistorRationalFunction& f,
                                         const QuadratureSpec& q = QuadratureSpec::make(),
                                         double margin = default_pole_margin) {
    return {-1, [f, q, margin](const Frame& frame) { return contour_transform(f, frame, q, margin); }};
}

inline ChartField<cplx> contour_chart_field(const TwistorRationalFunction& f,
                                            const QuadratureSpec& q = QuadratureSpec::make(),
                                            double margin = default_pole_margin) {
    return [f, q, margin](const Mat2& X) { return contour_transform(f, plane_from_chart(X), q, margin); };
}

}  // namespace twistorlab
