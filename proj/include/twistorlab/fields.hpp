#pragma once

// Homogeneous functions on R^4 \ 0 with analytic gradients, exact harmonic
// polynomial bases, and determinant-weighted fields on frames.

#include "twistorlab/core.hpp"
#include "twistorlab/geometry.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace twistorlab {

using Exponent = std::array<int, 4>;

/// Homogeneous polynomial in x1..x4 stored as a monomial -> coefficient table.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int degree) : degree_(degree) {
        if (degree < 0) throw InvalidInput("polynomial: negative degree");
    }

    int degree() const noexcept { return degree_; }
    const std::map<Exponent, double>& terms() const noexcept { return terms_; }

    /// Adds c * x^e; zero results are dropped from the table.
    void add(const Exponent& e, double c) {
        if (e[0] + e[1] + e[2] + e[3] != degree_ || e[0] < 0 || e[1] < 0 || e[2] < 0 || e[3] < 0)
            throw InvalidInput("polynomial: monomial degree mismatch");
        const double v = (terms_[e] += c);
        if (v == 0.0) terms_.erase(e);
    }

    bool is_zero() const noexcept { return terms_.empty(); }

    double operator()(const Vec4& x) const {
        double s = 0.0;
        for (const auto& [e, c] : terms_) s += c * monomial(e, x);
        return s;
    }

    Vec4 gradient(const Vec4& x) const {
        Vec4 g = Vec4::Zero();
        for (const auto& [e, c] : terms_) {
            for (int i = 0; i < 4; ++i) {
                if (e[i] == 0) continue;
                Exponent d = e;
                --d[i];
                g(i) += c * e[i] * monomial(d, x);
            }
        }
        return g;
    }

    /// Euclidean Laplacian, computed on the coefficient table.
    Polynomial laplacian() const {
        Polynomial out(std::max(degree_ - 2, 0));
        if (degree_ < 2) return out;
        for (const auto& [e, c] : terms_) {
            for (int i = 0; i < 4; ++i) {
                if (e[i] < 2) continue;
                Exponent d = e;
                d[i] -= 2;
                out.add(d, c * e[i] * (e[i] - 1));
            }
        }
        return out;
    }

    static double monomial(const Exponent& e, const Vec4& x) {
        double m = 1.0;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < e[i]; ++k) m *= x(i);
        return m;
    }

private:
    int degree_ = 0;
    std::map<Exponent, double> terms_;
};

/// Polynomial with identically zero Laplacian table.
class HarmonicPolynomial {
public:
    static HarmonicPolynomial make(Polynomial p) {
        if (!p.laplacian().is_zero()) throw InvalidInput("harmonic polynomial: nonzero Laplacian");
        return HarmonicPolynomial(std::move(p));
    }
    const Polynomial& poly() const noexcept { return p_; }
    int degree() const noexcept { return p_.degree(); }

private:
    explicit HarmonicPolynomial(Polynomial p) : p_(std::move(p)) {}
    Polynomial p_;
};

/// All exponent vectors of total degree k, in descending lexicographic order.
inline std::vector<Exponent> monomials_of_degree(int k) {
    std::vector<Exponent> out;
    for (int a = k; a >= 0; --a)
        for (int b = k - a; b >= 0; --b)
            for (int c = k - a - b; c >= 0; --c) out.push_back({a, b, c, k - a - b - c});
    return out;
}

namespace detail {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Reduced row echelon form in place; returns pivot column per pivot row.
inline std::vector<std::size_t> rref(std::vector<std::vector<Rational>>& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
        std::size_t sel = row;
        while (sel < a.size() && a[sel][col] == 0) ++sel;
        if (sel == a.size()) continue;
        std::swap(a[sel], a[row]);
        const Rational inv = Rational(1) / a[row][col];
        for (auto& x : a[row]) x *= inv;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace detail

/// Basis of harmonic homogeneous polynomials of degree k in four variables,
/// (k+1)^2 elements. The Laplacian nullspace is computed by exact rational
/// elimination and each basis vector is scaled to coprime integers, so the
/// floating-point coefficient tables are exact.
inline std::vector<HarmonicPolynomial> harmonic_basis(int k) {
    using detail::BigInt;
    using detail::Rational;
    if (k < 0) throw InvalidInput("harmonic_basis: negative degree");
    const std::vector<Exponent> cols = monomials_of_degree(k);
    const std::vector<Exponent> rows = k >= 2 ? monomials_of_degree(k - 2) : std::vector<Exponent>{};

    std::map<Exponent, std::size_t> row_index;
    for (std::size_t r = 0; r < rows.size(); ++r) row_index[rows[r]] = r;

    std::vector<std::vector<Rational>> lap(rows.size(), std::vector<Rational>(cols.size(), Rational(0)));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (int i = 0; i < 4; ++i) {
            if (cols[c][i] < 2) continue;
            Exponent d = cols[c];
            d[i] -= 2;
            lap[row_index.at(d)][c] += cols[c][i] * (cols[c][i] - 1);
        }
    }
    const std::vector<std::size_t> pivots = detail::rref(lap, cols.size());

    std::vector<bool> is_pivot(cols.size(), false);
    for (std::size_t p : pivots) is_pivot[p] = true;

    std::vector<HarmonicPolynomial> basis;
    for (std::size_t free = 0; free < cols.size(); ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> vec(cols.size(), Rational(0));
        vec[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) vec[pivots[r]] = -lap[r][free];

        BigInt scale = 1;
        for (const auto& q : vec)
            if (q != 0) scale = boost::multiprecision::lcm(scale, BigInt(denominator(q)));
        BigInt g = 0;
        std::vector<BigInt> ints(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            ints[c] = BigInt(numerator(vec[c])) * (scale / BigInt(denominator(vec[c])));
            if (ints[c] != 0) g = boost::multiprecision::gcd(g, ints[c]);
        }
        Polynomial p(k);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (ints[c] == 0) continue;
            const BigInt v = ints[c] / g;
            if (boost::multiprecision::abs(v) > (BigInt(1) << 53))
                throw InvalidInput("harmonic_basis: coefficient not exactly representable");
            p.add(cols[c], v.convert_to<double>());
        }
        basis.push_back(HarmonicPolynomial::make(std::move(p)));
    }
    return basis;
}

/// Writes one basis as CSV rows: index,e1,e2,e3,e4,coeff.
inline void write_basis_csv(std::ostream& os, const std::vector<HarmonicPolynomial>& basis) {
    os << "index,e1,e2,e3,e4,coeff\n";
    os.precision(17);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (const auto& [e, c] : basis[i].poly().terms())
            os << i << ',' << e[0] << ',' << e[1] << ',' << e[2] << ',' << e[3] << ',' << c << '\n';
}

/// Smooth function on R^4 \ 0 with f(t x) = t^degree f(x) for t > 0 and an
/// analytic gradient. Built from a closed vocabulary (polynomials, radial
/// powers, linear forms) with sum/product/linear-pullback combinators.
class HomogeneousFunction {
public:
    using Eval = std::function<double(const Vec4&)>;
    using Grad = std::function<Vec4(const Vec4&)>;

    HomogeneousFunction(int degree, Eval eval, Grad grad, std::string label = {})
        : degree_(degree), eval_(std::move(eval)), grad_(std::move(grad)), label_(std::move(label)) {}

    int degree() const noexcept { return degree_; }
    const std::string& label() const noexcept { return label_; }

    double operator()(const Vec4& x) const {
        require_nonzero(x);
        return eval_(x);
    }
    Vec4 gradient(const Vec4& x) const {
        require_nonzero(x);
        return grad_(x);
    }

    /// Evaluation without the x != 0 guard, for quadrature inner loops whose
    /// points are known to be nonzero.
    double eval_unchecked(const Vec4& x) const { return eval_(x); }

    HomogeneousFunction with_label(std::string label) const {
        HomogeneousFunction out = *this;
        out.label_ = std::move(label);
        return out;
    }

    static HomogeneousFunction zero(int degree) {
        return {degree, [](const Vec4&) { return 0.0; }, [](const Vec4&) { return Vec4(Vec4::Zero()); }, "0"};
    }

    /// |x|^p
    static HomogeneousFunction radial_power(int p) {
        return {p,
                [p](const Vec4& x) { return std::pow(x.squaredNorm(), 0.5 * p); },
                [p](const Vec4& x) { return Vec4(p * std::pow(x.squaredNorm(), 0.5 * p - 1.0) * x); },
                "|x|^" + std::to_string(p)};
    }

    static HomogeneousFunction linear_form(const Vec4& a) {
        return {1, [a](const Vec4& x) { return a.dot(x); }, [a](const Vec4&) { return a; }, "linear"};
    }

    static HomogeneousFunction polynomial(const Polynomial& p) {
        auto shared = std::make_shared<const Polynomial>(p);
        return {p.degree(),
                [shared](const Vec4& x) { return (*shared)(x); },
                [shared](const Vec4& x) { return shared->gradient(x); },
                "poly"};
    }

    friend HomogeneousFunction operator*(const HomogeneousFunction& f_, const HomogeneousFunction& g_) {
        auto f = share(f_), g = share(g_);
        return {f_.degree_ + g_.degree_,
                [f, g](const Vec4& x) { return f->eval_(x) * g->eval_(x); },
                [f, g](const Vec4& x) { return Vec4(f->grad_(x) * g->eval_(x) + f->eval_(x) * g->grad_(x)); },
                "(" + f_.label_ + ")*(" + g_.label_ + ")"};
    }

    friend HomogeneousFunction operator*(double a, const HomogeneousFunction& f_) {
        auto f = share(f_);
        return {f_.degree_,
                [a, f](const Vec4& x) { return a * f->eval_(x); },
                [a, f](const Vec4& x) { return Vec4(a * f->grad_(x)); },
                f_.label_};
    }

    friend HomogeneousFunction operator+(const HomogeneousFunction& f_, const HomogeneousFunction& g_) {
        if (f_.degree_ != g_.degree_) throw InvalidInput("sum of homogeneous functions of different degree");
        auto f = share(f_), g = share(g_);
        return {f_.degree_,
                [f, g](const Vec4& x) { return f->eval_(x) + g->eval_(x); },
                [f, g](const Vec4& x) { return Vec4(f->grad_(x) + g->grad_(x)); },
                f_.label_ + "+" + g_.label_};
    }

    /// x -> f(g x); the chain rule gives grad = g^T (grad f)(g x).
    HomogeneousFunction compose_linear(const Mat4& g) const {
        if (g.determinant() == 0.0) throw InvalidInput("compose_linear: singular matrix");
        auto f = share(*this);
        return {degree_,
                [f, g](const Vec4& x) { return f->eval_(g * x); },
                [f, g](const Vec4& x) { return Vec4(g.transpose() * f->grad_(g * x)); },
                label_ + "∘g"};
    }

private:
    static std::shared_ptr<const HomogeneousFunction> share(const HomogeneousFunction& f) {
        return std::make_shared<const HomogeneousFunction>(f);
    }

    static void require_nonzero(const Vec4& x) {
        if (x.squaredNorm() == 0.0) throw DomainError("homogeneous function evaluated at x = 0");
    }

    int degree_;
    Eval eval_;
    Grad grad_;
    std::string label_;
};

/// H(x) |x|^(degree - deg H)
inline HomogeneousFunction with_radial_weight(const Polynomial& p, int degree) {
    return HomogeneousFunction::polynomial(p) * HomogeneousFunction::radial_power(degree - p.degree());
}

/// f = H |x|^(-k-2): a degree -2 input for the X-ray transform. Odd k is
/// rejected: f(-x) = -f(x).
inline HomogeneousFunction basis_to_degree_minus_2(const HarmonicPolynomial& h) {
    if (h.degree() % 2 != 0)
        throw InvalidInput("basis_to_degree_minus_2: odd degree " + std::to_string(h.degree()) +
                           " is odd under x -> -x");
    return with_radial_weight(h.poly(), -2);
}

/// f = H |x|^(-k-n-2): degree -n-2 input with parity (-1)^n for the moment
/// transform of helicity n/2. Requires k = n mod 2.
inline HomogeneousFunction moment_input(const HarmonicPolynomial& h, int n) {
    if (n < 0) throw InvalidInput("moment_input: negative helicity index");
    if ((h.degree() - n) % 2 != 0) throw InvalidInput("moment_input: parity of H does not match (-1)^n");
    return with_radial_weight(h.poly(), -n - 2);
}

/// Degree -2 transform inputs for harmonic degrees 0, 2, ..., max_degree.
/// Each entry carries the harmonic degree k it came from.
struct BasisEntry {
    int harmonic_degree;
    std::size_t index;
    HomogeneousFunction f;
    std::string id() const { return "k" + std::to_string(harmonic_degree) + "_" + std::to_string(index); }
};

inline std::vector<BasisEntry> degree_minus_2_basis(int max_degree) {
    if (max_degree < 0 || max_degree % 2 != 0) throw InvalidInput("max_degree must be an even integer >= 0");
    std::vector<BasisEntry> out;
    for (int k = 0; k <= max_degree; k += 2) {
        const auto hs = harmonic_basis(k);
        for (std::size_t i = 0; i < hs.size(); ++i) {
            BasisEntry e{k, i, basis_to_degree_minus_2(hs[i])};
            e.f = e.f.with_label(e.id());
            out.push_back(std::move(e));
        }
    }
    return out;
}

/// sum over even k <= max_degree of (k+1)^2
inline std::size_t degree_minus_2_dimension(int max_degree) {
    std::size_t d = 0;
    for (int k = 0; k <= max_degree; k += 2) d += static_cast<std::size_t>((k + 1) * (k + 1));
    return d;
}

/// Function on frames with phi(frame g) = |det g|^weight phi(frame).
template <typename Value = double>
struct WeightedField {
    int weight;
    std::function<Value(const Frame&)> eval;

    Value operator()(const Frame& f) const { return eval(f); }
};

/// |phi(frame g) - |det g|^w phi(frame)| / (1 + |phi(frame)|)
template <typename Value>
double weight_transform_residual(const WeightedField<Value>& phi, const Frame& frame, const Mat2& g) {
    const double d = g.determinant();
    if (d == 0.0 || !std::isfinite(d)) throw InvalidInput("weight_transform_residual: singular g");
    const Value base = phi(frame);
    const Value moved = phi(frame * g);
    const double factor = std::pow(std::abs(d), phi.weight);
    return std::abs(moved - factor * base) / (1.0 + std::abs(base));
}

}  // namespace twistorlab
