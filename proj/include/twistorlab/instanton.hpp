#pragma once

// Split self-dual Yang-Mills data on R^{2,2}: connections, curvature,
// the split-signature Hodge star, and gauge transformations.
//
// Conventions (fixed once): metric g = diag(+1, +1, -1, -1), orientation
// eps_1234 = +1, F_ij = d_i A_j - d_j A_i + [A_i, A_j], and
// A^g_i = g A_i g^-1 - (d_i g) g^-1 so that (d + A^g)(g psi) = g (d + A) psi.

#include "twistorlab/core.hpp"
#include "twistorlab/finite_difference.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace twistorlab {

using Potential = std::array<CMat, 4>;
/// partials[i][j] = d_i A_j
using PotentialPartials = std::array<std::array<CMat, 4>, 4>;

struct Connection {
    int rank = 1;
    std::function<Potential(const Vec4&)> potential;
    /// Optional; curvature falls back to finite differences when empty.
    std::function<PotentialPartials(const Vec4&)> partials;
    std::string name;

    Potential operator()(const Vec4& x) const { return potential(x); }
    bool has_analytic_partials() const { return static_cast<bool>(partials); }
};

inline PotentialPartials connection_partials(const Connection& A, const Vec4& x, const FDSpec& fd = FDSpec{}) {
    if (A.has_analytic_partials()) return A.partials(x);
    PotentialPartials out;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            auto component = [&A, j](const Vec4& y) { return CMat(A.potential(y)[j]); };
            out[i][j] = fd::partial(component, x, fd::axis4(i), fd);
        }
    }
    return out;
}

struct SplitMetric {
    static constexpr std::array<double, 4> diagonal{1.0, 1.0, -1.0, -1.0};

    /// eps_ijkl with eps_0123 = +1 (0-based indices).
    static int levi_civita(int i, int j, int k, int l) {
        const int p[4] = {i, j, k, l};
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (p[a] == p[b]) return 0;
        int sign = 1;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (p[a] > p[b]) sign = -sign;
        return sign;
    }
};

/// Antisymmetric matrix-valued 2-form; stores F_ij for i < j in the order
/// (12, 13, 14, 23, 24, 34).
class Curvature {
public:
    explicit Curvature(int rank) : rank_(rank) {
        for (auto& m : upper_) m = CMat::Zero(rank, rank);
    }

    int rank() const noexcept { return rank_; }

    static int slot(int i, int j) {
        static constexpr int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
        return table[i][j];
    }

    /// F_ij with 0-based indices; F_ji = -F_ij and F_ii = 0.
    CMat operator()(int i, int j) const {
        if (i == j) return CMat::Zero(rank_, rank_);
        return i < j ? upper_[slot(i, j)] : CMat(-upper_[slot(i, j)]);
    }

    void set(int i, int j, const CMat& value) {
        if (i == j) throw InvalidInput("curvature: diagonal component is identically zero");
        upper_[slot(i, j)] = i < j ? value : CMat(-value);
    }

    /// sqrt of the sum over i < j of squared Frobenius norms.
    double norm() const {
        double s = 0.0;
        for (const auto& m : upper_) s += m.squaredNorm();
        return std::sqrt(s);
    }

    friend Curvature operator-(const Curvature& a, const Curvature& b) {
        Curvature out(a.rank_);
        for (int k = 0; k < 6; ++k) out.upper_[k] = a.upper_[k] - b.upper_[k];
        return out;
    }

    /// Unit 2-form dx^i ^ dx^j with rank-1 coefficient.
    static Curvature basis_form(int i, int j) {
        Curvature f(1);
        f.set(i, j, CMat::Ones(1, 1));
        return f;
    }

private:
    int rank_;
    std::array<CMat, 6> upper_;
};

inline Curvature curvature(const Connection& A, const Vec4& x, const FDSpec& fd = FDSpec{}) {
    const Potential a = A.potential(x);
    const PotentialPartials d = connection_partials(A, x, fd);
    Curvature F(A.rank);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) F.set(i, j, d[i][j] - d[j][i] + a[i] * a[j] - a[j] * a[i]);
    return F;
}

/// (*F)_ij = 1/2 eps_ijkl g^km g^ln F_mn; ** = id in signature (2,2).
inline Curvature hodge_star(const Curvature& F) {
    Curvature out(F.rank());
    const auto& g = SplitMetric::diagonal;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            CMat acc = CMat::Zero(F.rank(), F.rank());
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    const int e = SplitMetric::levi_civita(i, j, k, l);
                    if (e != 0) acc += (0.5 * e * g[k] * g[l]) * F(k, l);
                }
            out.set(i, j, acc);
        }
    }
    return out;
}

/// max over points of |*F - F|.
inline double selfdual_residual(const Connection& A, const std::vector<Vec4>& points, const FDSpec& fd = FDSpec{}) {
    double worst = 0.0;
    for (const Vec4& x : points) {
        const Curvature F = curvature(A, x, fd);
        worst = std::max(worst, (hodge_star(F) - F).norm());
    }
    return worst;
}

/// max over i < j < k of |D_i F_jk + D_j F_ki + D_k F_ij| with
/// D_i = d_i + [A_i, .], d_i by finite differences of the curvature.
inline double bianchi_residual(const Connection& A, const Vec4& x, const FDSpec& fd = FDSpec{}) {
    const Potential a = A.potential(x);
    const Curvature F = curvature(A, x, fd);
    auto covariant = [&](int i, int j, int k) {
        auto component = [&A, &fd, j, k](const Vec4& y) { return CMat(curvature(A, y, fd)(j, k)); };
        const CMat d = fd::partial(component, x, fd::axis4(i), fd);
        return CMat(d + a[i] * F(j, k) - F(j, k) * a[i]);
    };
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k)
                worst = std::max(worst, (covariant(i, j, k) + covariant(j, k, i) + covariant(k, i, j)).norm());
    return worst;
}

inline double anti_hermitian_defect(const Connection& A, const Vec4& x) {
    double worst = 0.0;
    for (const CMat& m : A.potential(x)) worst = std::max(worst, (m + m.adjoint()).norm());
    return worst;
}

/// Gauge transformation x -> g(x) with analytic first partials and,
/// optionally, second partials (second[i][j] = d_i d_j g).
struct GaugeFunction {
    int rank = 1;
    std::function<CMat(const Vec4&)> value;
    std::function<std::array<CMat, 4>(const Vec4&)> partials;
    std::function<std::array<std::array<CMat, 4>, 4>(const Vec4&)> second_partials;
};

namespace detail {

inline CMat checked_inverse(const CMat& g) {
    Eigen::FullPivLU<CMat> lu(g);
    if (!lu.isInvertible()) throw InvalidInput("gauge transform: g is singular");
    return lu.inverse();
}

}  // namespace detail

inline Connection gauge_transform(const Connection& A, const GaugeFunction& g) {
    if (A.rank != g.rank) throw InvalidInput("gauge transform: rank mismatch");
    Connection out;
    out.rank = A.rank;
    out.name = A.name + "^g";
    out.potential = [A, g](const Vec4& x) {
        const CMat gx = g.value(x);
        const CMat ginv = detail::checked_inverse(gx);
        const auto dg = g.partials(x);
        const Potential a = A.potential(x);
        Potential res;
        for (int i = 0; i < 4; ++i) res[i] = gx * a[i] * ginv - dg[i] * ginv;
        return res;
    };
    if (A.has_analytic_partials() && g.second_partials) {
        out.partials = [A, g](const Vec4& x) {
            const CMat gx = g.value(x);
            const CMat ginv = detail::checked_inverse(gx);
            const auto dg = g.partials(x);
            const auto ddg = g.second_partials(x);
            const Potential a = A.potential(x);
            const PotentialPartials da = A.partials(x);
            PotentialPartials res;
            for (int j = 0; j < 4; ++j) {
                const CMat dginv = -ginv * dg[j] * ginv;
                for (int i = 0; i < 4; ++i)
                    res[j][i] = dg[j] * a[i] * ginv + gx * da[j][i] * ginv + gx * a[i] * dginv - ddg[j][i] * ginv -
                                dg[i] * dginv;
            }
            return res;
        };
    }
    return out;
}

/// chi(x) = l . x + 1/2 x^T Q x (Q symmetric).
struct PhaseFunction {
    Vec4 linear = Vec4::Zero();
    Mat4 quadratic = Mat4::Zero();

    double operator()(const Vec4& x) const { return linear.dot(x) + 0.5 * x.dot(quadratic * x); }
    Vec4 gradient(const Vec4& x) const { return linear + quadratic * x; }

    static PhaseFunction coordinate(int i) {
        PhaseFunction p;
        p.linear(i) = 1.0;
        return p;
    }
    /// chi = x_i x_j, i != j
    static PhaseFunction product(int i, int j) {
        PhaseFunction p;
        p.quadratic(i, j) = 1.0;
        p.quadratic(j, i) = 1.0;
        return p;
    }
};

/// g(x) = exp(i chi(x)) times the identity of the given rank.
inline GaugeFunction phase_gauge(const PhaseFunction& chi, int rank = 1) {
    GaugeFunction g;
    g.rank = rank;
    const cplx I(0.0, 1.0);
    g.value = [chi, rank, I](const Vec4& x) { return CMat(std::exp(I * chi(x)) * CMat::Identity(rank, rank)); };
    g.partials = [chi, rank, I](const Vec4& x) {
        const cplx e = std::exp(I * chi(x));
        const Vec4 d = chi.gradient(x);
        std::array<CMat, 4> out;
        for (int i = 0; i < 4; ++i) out[i] = (I * d(i) * e) * CMat::Identity(rank, rank);
        return out;
    };
    g.second_partials = [chi, rank, I](const Vec4& x) {
        const cplx e = std::exp(I * chi(x));
        const Vec4 d = chi.gradient(x);
        std::array<std::array<CMat, 4>, 4> out;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out[i][j] = ((I * chi.quadratic(i, j) - d(i) * d(j)) * e) * CMat::Identity(rank, rank);
        return out;
    };
    return g;
}

inline GaugeFunction constant_gauge(const CMat& m) {
    GaugeFunction g;
    g.rank = static_cast<int>(m.rows());
    const int n = g.rank;
    g.value = [m](const Vec4&) { return m; };
    g.partials = [n](const Vec4&) {
        std::array<CMat, 4> out;
        for (auto& z : out) z = CMat::Zero(n, n);
        return out;
    };
    g.second_partials = [n](const Vec4&) {
        std::array<std::array<CMat, 4>, 4> out;
        for (auto& row : out)
            for (auto& z : row) z = CMat::Zero(n, n);
        return out;
    };
    return g;
}

namespace presets {

namespace detail {

inline Potential zeros(int n) {
    Potential p;
    for (auto& m : p) m = CMat::Zero(n, n);
    return p;
}

inline PotentialPartials zero_partials(int n) {
    PotentialPartials p;
    for (auto& row : p)
        for (auto& m : row) m = CMat::Zero(n, n);
    return p;
}

/// Abelian A = i (x1 dx2 + s x3 dx4).
inline Connection abelian_pair(double s, std::string name) {
    const cplx I(0.0, 1.0);
    Connection A;
    A.rank = 1;
    A.name = std::move(name);
    A.potential = [I, s](const Vec4& x) {
        Potential p = zeros(1);
        p[1](0, 0) = I * x(0);
        p[3](0, 0) = I * s * x(2);
        return p;
    };
    A.partials = [I, s](const Vec4&) {
        PotentialPartials d = zero_partials(1);
        d[0][1](0, 0) = I;
        d[2][3](0, 0) = I * s;
        return d;
    };
    return A;
}

}  // namespace detail

inline Connection zero(int rank = 1) {
    Connection A;
    A.rank = rank;
    A.name = "zero";
    A.potential = [rank](const Vec4&) { return detail::zeros(rank); };
    A.partials = [rank](const Vec4&) { return detail::zero_partials(rank); };
    return A;
}

/// i (x1 dx2 + x3 dx4): F = i (dx1^dx2 + dx3^dx4), self-dual.
inline Connection flagship_u1() { return detail::abelian_pair(1.0, "flagship-u1"); }

/// i (x1 dx2 - x3 dx4): anti-self-dual.
inline Connection asd_u1() { return detail::abelian_pair(-1.0, "asd-u1"); }

/// A = -(dg) g^-1 for g = exp(i chi): A_i = -i d_i chi.
inline Connection pure_gauge(const PhaseFunction& chi) {
    const cplx I(0.0, 1.0);
    Connection A;
    A.rank = 1;
    A.name = "pure-gauge";
    A.potential = [chi, I](const Vec4& x) {
        Potential p = detail::zeros(1);
        const Vec4 d = chi.gradient(x);
        for (int i = 0; i < 4; ++i) p[i](0, 0) = -I * d(i);
        return p;
    };
    A.partials = [chi, I](const Vec4&) {
        PotentialPartials d = detail::zero_partials(1);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) d[i][j](0, 0) = -I * chi.quadratic(i, j);
        return d;
    };
    return A;
}

/// Constant A_1 = E, A_2 = F from the standard sl(2) triple; F_12 = [E, F] = H.
inline Connection su2_constant() {
    Connection A;
    A.rank = 2;
    A.name = "su2-constant";
    A.potential = [](const Vec4&) {
        Potential p = detail::zeros(2);
        p[0](0, 1) = 1.0;
        p[1](1, 0) = 1.0;
        return p;
    };
    A.partials = [](const Vec4&) { return detail::zero_partials(2); };
    return A;
}

/// Resolves "zero", "flagship-u1", "asd-u1", "su2-constant", "pure-gauge"
/// (chi = x1) and "pure-gauge(c1,c2,c3,c4)" (chi = c . x).
inline Connection by_name(const std::string& name) {
    if (name == "zero") return zero();
    if (name == "flagship-u1") return flagship_u1();
    if (name == "asd-u1") return asd_u1();
    if (name == "su2-constant") return su2_constant();
    if (name == "pure-gauge") return pure_gauge(PhaseFunction::coordinate(0));
    const std::string prefix = "pure-gauge(";
    if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
        std::stringstream ss(name.substr(prefix.size(), name.size() - prefix.size() - 1));
        PhaseFunction chi;
        std::string item;
        int i = 0;
        while (std::getline(ss, item, ',')) {
            if (i >= 4) throw InvalidInput("connection preset: pure-gauge takes 4 coefficients");
            try {
                std::size_t used = 0;
                chi.linear(i++) = std::stod(item, &used);
                if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
            } catch (const std::logic_error&) {
                throw InvalidInput("connection preset: bad coefficient '" + item + "'");
            }
        }
        if (i != 4) throw InvalidInput("connection preset: pure-gauge takes 4 coefficients");
        Connection A = pure_gauge(chi);
        A.name = name;
        return A;
    }
    throw InvalidInput("unknown connection preset '" + name + "'");
}

}  // namespace presets
}  // namespace twistorlab
