#pragma once

// Split twistor correspondence spaces as coordinate objects.
//
//   P  = RP^3          real lines in R^4            RealProjectivePoint
//   CP^3               complex lines in C^4         ComplexProjectivePoint
//   M~ = oriented Gr(2,R^4)                         Frame (order = orientation)
//   M  = Gr(2,R^4)     Frame up to GL(2), compared via Pluecker coordinates
//   F  = {(l, K) : l subset K}                      FlagPoint
//   G  = {(L, K) : L subset K (x) C}                GPoint
//
// Orientation convention: a frame (u, v) carries the orientation u ^ v.
// Every sign statement downstream (the |det g| weight law, the conjugation
// flip of pi) refers to this convention.

#include "twistorlab/core.hpp"

#include <array>
#include <cmath>
#include <string>

namespace twistorlab {

struct GeometryTolerance {
    /// Projective equality / incidence residual threshold.
    double projective = 1e-10;
    /// Frame rejected when sigma_min < degenerate * sigma_max.
    double degenerate = 1e-8;
};

class RealProjectivePoint {
public:
    static RealProjectivePoint make(const Vec4& rep) {
        const double n = rep.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("projective point: zero representative");
        return RealProjectivePoint(rep / n);
    }

    const Vec4& rep() const noexcept { return rep_; }

    /// Sine of the angle between the two lines; zero iff equal.
    double distance(const RealProjectivePoint& other) const {
        return (rep_ - other.rep_ * other.rep_.dot(rep_)).norm();
    }
    bool equals(const RealProjectivePoint& other, double tol = GeometryTolerance{}.projective) const {
        return distance(other) < tol;
    }

private:
    explicit RealProjectivePoint(const Vec4& unit) : rep_(unit) {}
    Vec4 rep_;
};

class ComplexProjectivePoint {
public:
    static ComplexProjectivePoint make(const CVec4& rep) {
        const double n = rep.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("projective point: zero representative");
        return ComplexProjectivePoint(rep / n);
    }
    static ComplexProjectivePoint from_real(const Vec4& rep) { return make(rep.cast<cplx>()); }

    /// Unit representative. Only the positive scale is normalized; the phase
    /// is kept as given.
    const CVec4& rep() const noexcept { return rep_; }

    double distance(const ComplexProjectivePoint& other) const {
        // Hermitian projection residual
        return (rep_ - other.rep_ * other.rep_.dot(rep_)).norm();
    }
    bool equals(const ComplexProjectivePoint& other, double tol = GeometryTolerance{}.projective) const {
        return distance(other) < tol;
    }

    /// True iff Re and Im of the representative are linearly dependent, i.e.
    /// the point lies on RP^3.
    bool is_real(double tol = GeometryTolerance{}.degenerate) const {
        Eigen::Matrix<double, 4, 2> m;
        m.col(0) = rep_.real();
        m.col(1) = rep_.imag();
        const Eigen::Vector2d s = Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>>(m).singularValues();
        return s(1) <= tol * s(0);
    }

    ComplexProjectivePoint conj() const { return ComplexProjectivePoint(rep_.conjugate()); }

private:
    explicit ComplexProjectivePoint(const CVec4& unit) : rep_(unit) {}
    CVec4 rep_;
};

/// Ordered basis (u, v) of a 2-plane in R^4; a point of the oriented
/// Grassmannian.
class Frame {
public:
    using Matrix = Eigen::Matrix<double, 4, 2>;

    static Frame make(const Vec4& u, const Vec4& v, double degenerate_tol = GeometryTolerance{}.degenerate) {
        Matrix m;
        m.col(0) = u;
        m.col(1) = v;
        return make(m, degenerate_tol);
    }

    static Frame make(const Matrix& m, double degenerate_tol = GeometryTolerance{}.degenerate) {
        if (!m.allFinite()) throw DomainError("frame: non-finite entries");
        const Eigen::Vector2d s = Eigen::JacobiSVD<Matrix>(m).singularValues();
        if (!(s(0) > 0.0) || s(1) < degenerate_tol * s(0))
            throw DomainError("frame: degenerate (rank < 2)");
        return Frame(m);
    }

    Vec4 u() const { return m_.col(0); }
    Vec4 v() const { return m_.col(1); }
    const Matrix& matrix() const noexcept { return m_; }

    /// Point at angle theta on the unit circle of the frame: u cos + v sin.
    Vec4 at(double c, double s) const { return m_.col(0) * c + m_.col(1) * s; }

    /// Right action of GL(2): columns (u, v) -> (u, v) g.
    Frame operator*(const Mat2& g) const {
        if (g.determinant() == 0.0) throw InvalidInput("frame action: singular 2x2 matrix");
        return make(Matrix(m_ * g));
    }

    /// Gram determinant |u|^2 |v|^2 - (u.v)^2.
    double gram_determinant() const {
        const double uu = m_.col(0).squaredNorm();
        const double vv = m_.col(1).squaredNorm();
        const double uv = m_.col(0).dot(m_.col(1));
        return uu * vv - uv * uv;
    }

    /// Orthonormal basis of the spanned plane (same orientation).
    Matrix orthonormal_basis() const {
        Matrix q;
        const Vec4 e1 = m_.col(0).normalized();
        Vec4 w = m_.col(1) - e1 * e1.dot(m_.col(1));
        w -= e1 * e1.dot(w);
        q.col(0) = e1;
        q.col(1) = w.normalized();
        return q;
    }

private:
    explicit Frame(const Matrix& m) : m_(m) {}
    Matrix m_;
};

/// The six 2x2 minors p_ij = u_i v_j - u_j v_i, in the order
/// (p12, p13, p14, p23, p24, p34).
struct PlueckerPoint {
    std::array<double, 6> p{};

    double p12() const { return p[0]; }
    double p13() const { return p[1]; }
    double p14() const { return p[2]; }
    double p23() const { return p[3]; }
    double p24() const { return p[4]; }
    double p34() const { return p[5]; }

    double quadric() const { return p12() * p34() - p13() * p24() + p14() * p23(); }

    double norm() const {
        double s = 0.0;
        for (double x : p) s += x * x;
        return std::sqrt(s);
    }

    /// Distance between the represented planes, ignoring orientation and
    /// scale: min over signs of |p/|p| -+ q/|q||.
    double plane_distance(const PlueckerPoint& other) const {
        const double a = norm();
        const double b = other.norm();
        double dm = 0.0;
        double dp = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double x = p[i] / a;
            const double y = other.p[i] / b;
            dm += (x - y) * (x - y);
            dp += (x + y) * (x + y);
        }
        return std::sqrt(std::min(dm, dp));
    }
};

inline PlueckerPoint plucker_embed(const Frame& f) {
    const Vec4 u = f.u();
    const Vec4 v = f.v();
    PlueckerPoint out;
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) out.p[k++] = u(i) * v(j) - u(j) * v(i);
    return out;
}

/// Same unoriented plane (a point of M).
inline bool same_plane(const Frame& a, const Frame& b, double tol = GeometryTolerance{}.projective) {
    return plucker_embed(a).plane_distance(plucker_embed(b)) < tol;
}

/// Determinant of the change of basis g with b = a g. Both frames must span
/// the same plane; the sign tells whether they carry the same orientation.
inline double change_of_basis_determinant(const Frame& a, const Frame& b,
                                          double tol = GeometryTolerance{}.projective) {
    if (!same_plane(a, b, std::max(tol, 1e-8))) throw InvalidInput("change of basis: frames span different planes");
    const Frame::Matrix& A = a.matrix();
    const Mat2 g = (A.transpose() * A).ldlt().solve(A.transpose() * b.matrix());
    return g.determinant();
}

/// Affine chart p12 != 0: u = (1, 0, X11, X12), v = (0, 1, X21, X22).
inline Frame plane_from_chart(const Mat2& X) {
    return Frame::make(Vec4(1.0, 0.0, X(0, 0), X(0, 1)), Vec4(0.0, 1.0, X(1, 0), X(1, 1)));
}

/// Inverse of plane_from_chart on the chart domain (solves the 2x2 system in
/// the first two coordinates).
inline Mat2 chart_from_plane(const Frame& f) {
    const Frame::Matrix& m = f.matrix();
    const Mat2 top = m.topRows<2>();
    const double d = top.determinant();
    if (std::abs(d) <= GeometryTolerance{}.degenerate * top.norm() * top.norm())
        throw DomainError("chart_from_plane: plane outside the p12 != 0 chart");
    const Mat2 bottom = m.bottomRows<2>();
    return (bottom * top.inverse()).transpose();
}

/// pi: CP^3 \ RP^3 -> M~, the plane spanned by real and imaginary parts,
/// oriented by (Re z, Im z).
inline Frame pi_project(const ComplexProjectivePoint& z) {
    if (z.is_real()) throw DomainError("pi undefined on RP^3 (real point)");
    return Frame::make(z.rep().real(), z.rep().imag());
}

/// Residual of the unit line representative after projection onto the span.
inline double incidence_residual(const Vec4& line, const Frame& plane) {
    const Frame::Matrix q = plane.orthonormal_basis();
    const Vec4 x = line.normalized();
    return (x - q * (q.transpose() * x)).norm();
}

inline double incidence_residual(const CVec4& line, const Frame& plane) {
    const Frame::Matrix q = plane.orthonormal_basis();
    const CVec4 z = line.normalized();
    const Eigen::Vector2cd c = q.transpose().cast<cplx>() * z;
    return (z - q.cast<cplx>() * c).norm();
}

inline bool incidence(const RealProjectivePoint& line, const Frame& plane,
                      double tol = GeometryTolerance{}.projective) {
    return incidence_residual(line.rep(), plane) < tol;
}

inline bool incidence(const ComplexProjectivePoint& line, const Frame& plane,
                      double tol = GeometryTolerance{}.projective) {
    return incidence_residual(line.rep(), plane) < tol;
}

/// Point of F: a real line inside a real plane.
class FlagPoint {
public:
    static FlagPoint make(const RealProjectivePoint& line, const Frame& plane,
                          double tol = GeometryTolerance{}.projective) {
        if (!incidence(line, plane, tol)) throw DomainError("flag: line not contained in plane");
        return FlagPoint(line, plane);
    }
    const RealProjectivePoint& line() const noexcept { return line_; }
    const Frame& plane() const noexcept { return plane_; }

private:
    FlagPoint(const RealProjectivePoint& l, const Frame& p) : line_(l), plane_(p) {}
    RealProjectivePoint line_;
    Frame plane_;
};

/// Point of G: a complex line inside a complexified real plane.
class GPoint {
public:
    static GPoint make(const ComplexProjectivePoint& line, const Frame& plane,
                       double tol = GeometryTolerance{}.projective) {
        if (!incidence(line, plane, tol)) throw DomainError("G point: line not contained in complexified plane");
        return GPoint(line, plane);
    }
    const ComplexProjectivePoint& line() const noexcept { return line_; }
    const Frame& plane() const noexcept { return plane_; }

    /// G \ F is where the line is not real.
    bool in_flag_manifold() const { return line_.is_real(); }

private:
    GPoint(const ComplexProjectivePoint& l, const Frame& p) : line_(l), plane_(p) {}
    ComplexProjectivePoint line_;
    Frame plane_;
};

/// mu restricted to G \ F: forget the plane.
inline ComplexProjectivePoint mu_restrict(const GPoint& gp) {
    if (gp.in_flag_manifold()) throw DomainError("mu_restrict: real line (point of F)");
    return gp.line();
}

/// Inverse of mu on P \ RP^3: z -> (z, pi(z)).
inline GPoint mu_inverse(const ComplexProjectivePoint& z) {
    if (z.is_real()) throw DomainError("mu_inverse: real point (point of RP^3)");
    return GPoint::make(z, pi_project(z));
}

/// Orthonormal completion of a unit vector to a basis of R^4; columns 1..3
/// span the orthogonal complement.
inline Mat4 orthonormal_completion(const Vec4& unit) {
    Eigen::Matrix<double, 4, 1> seed = unit;
    Eigen::HouseholderQR<Eigen::Matrix<double, 4, 1>> qr(seed);
    Mat4 q = qr.householderQ();
    if (q.col(0).dot(unit) < 0.0) q.col(0) *= -1.0;
    return q;
}

/// Fiber of mu_0 over a real line: the RP^2 of planes through it, swept by
/// (s, t) in [0, pi) x [0, 2 pi).
inline FlagPoint flag_through_line(const RealProjectivePoint& line, double s, double t) {
    const Mat4 q = orthonormal_completion(line.rep());
    const Vec4 w = std::cos(s) * q.col(1) + std::sin(s) * (std::cos(t) * q.col(2) + std::sin(t) * q.col(3));
    return FlagPoint::make(line, Frame::make(line.rep(), w));
}

/// Fiber of nu_0 over a plane: the RP^1 of lines in it.
inline FlagPoint flag_in_plane(const Frame& plane, double t) {
    return FlagPoint::make(RealProjectivePoint::make(plane.at(std::cos(t), std::sin(t))), plane);
}

}  // namespace twistorlab
