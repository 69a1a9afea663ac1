#include "twistorlab/fields.hpp"
#include "twistorlab/sampling.hpp"
#include "twistorlab/xray.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace twistorlab;

namespace {

// Laplacian of the monomial space P_k -> P_{k-2} as a dense double matrix,
// built straight from d^2/dx_i^2 x^e = e_i (e_i - 1) x^(e - 2 e_i).
Eigen::MatrixXd laplacian_matrix(int k) {
    std::vector<Exponent> src, dst;
    for (int a = k; a >= 0; --a)
        for (int b = k - a; b >= 0; --b)
            for (int c = k - a - b; c >= 0; --c) src.push_back({a, b, c, k - a - b - c});
    for (int a = k - 2; a >= 0; --a)
        for (int b = k - 2 - a; b >= 0; --b)
            for (int c = k - 2 - a - b; c >= 0; --c) dst.push_back({a, b, c, k - 2 - a - b - c});
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
    for (std::size_t j = 0; j < src.size(); ++j)
        for (int i = 0; i < 4; ++i) {
            if (src[j][i] < 2) continue;
            Exponent e = src[j];
            e[i] -= 2;
            const auto row = std::find(dst.begin(), dst.end(), e) - dst.begin();
            L(row, static_cast<Eigen::Index>(j)) += src[j][i] * (src[j][i] - 1);
        }
    return L;
}

Eigen::Index nullity_oracle(int k) {
    const Eigen::MatrixXd L = laplacian_matrix(k);
    if (L.rows() == 0) return L.cols();
    return L.cols() - Eigen::FullPivLU<Eigen::MatrixXd>(L).rank();
}

Eigen::MatrixXd coefficient_matrix(const std::vector<HarmonicPolynomial>& basis, int k) {
    const auto monos = monomials_of_degree(k);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(monos.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (const auto& [e, c] : basis[j].poly().terms())
            M(std::find(monos.begin(), monos.end(), e) - monos.begin(), static_cast<Eigen::Index>(j)) = c;
    return M;
}

Vec4 fd_gradient(const HomogeneousFunction& f, const Vec4& x, double h) {
    Vec4 g;
    for (int i = 0; i < 4; ++i) {
        const Vec4 e = h * Vec4::Unit(i);
        g(i) = (f(Vec4(x + e)) - f(Vec4(x - e))) / (2.0 * h);
    }
    return g;
}

std::vector<HomogeneousFunction> vocabulary() {
    Polynomial p(2);
    p.add({1, 0, 1, 0}, 2.0);
    p.add({0, 2, 0, 0}, -1.0);
    std::vector<HomogeneousFunction> out = {
        HomogeneousFunction::radial_power(-2),
        HomogeneousFunction::radial_power(3),
        HomogeneousFunction::linear_form(Vec4(1.0, -2.0, 0.5, 0.0)),
        HomogeneousFunction::polynomial(p),
        with_radial_weight(p, -4),
        HomogeneousFunction::radial_power(-2) + 3.0 * with_radial_weight(p, -2),
        HomogeneousFunction::linear_form(Vec4(0, 1, 0, 0)) * HomogeneousFunction::radial_power(-3),
    };
    Mat4 g = Mat4::Identity();
    g(0, 1) = 0.4;
    g(3, 2) = -1.1;
    out.push_back(with_radial_weight(p, -2).compose_linear(g));
    for (int k = 0; k <= 4; k += 2)
        for (const auto& h : harmonic_basis(k)) out.push_back(basis_to_degree_minus_2(h));
    return out;
}

}  // namespace

TEST(Polynomial, EvaluationGradientLaplacian) {
    Polynomial p(3);
    p.add({2, 1, 0, 0}, 3.0);  // 3 x1^2 x2
    p.add({0, 0, 1, 2}, -1.0);  // -x3 x4^2
    const Vec4 x(1.0, 2.0, -1.0, 0.5);
    EXPECT_DOUBLE_EQ(p(x), 3.0 * 2.0 + 0.25);
    EXPECT_TRUE(p.gradient(x).isApprox(Vec4(12.0, 3.0, -0.25, 1.0)));
    const Polynomial l = p.laplacian();  // 6 x2 - 2 x3
    EXPECT_DOUBLE_EQ(l(x), 12.0 + 2.0);
    EXPECT_THROW(p.add({1, 0, 0, 0}, 1.0), InvalidInput);
}

TEST(Polynomial, HarmonicRejectsNonHarmonic) {
    Polynomial p(2);
    p.add({2, 0, 0, 0}, 1.0);
    EXPECT_THROW(HarmonicPolynomial::make(p), InvalidInput);
    p.add({0, 0, 2, 0}, -1.0);
    EXPECT_NO_THROW(HarmonicPolynomial::make(p));
}

TEST(Monomials, CountIsBinomial) {
    for (int k = 0; k <= 6; ++k)
        EXPECT_EQ(monomials_of_degree(k).size(), static_cast<std::size_t>((k + 3) * (k + 2) * (k + 1) / 6));
}

TEST(HarmonicBasis, DegreeZeroIsConstant) {
    const auto b = harmonic_basis(0);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_DOUBLE_EQ(b[0].poly()(Vec4(0.3, 2.0, -1.0, 7.0)), b[0].poly()(Vec4::Zero()));
}

TEST(HarmonicBasis, SizeMatchesLaplacianNullspace) {
    for (int k = 0; k <= 6; ++k) {
        const auto b = harmonic_basis(k);
        EXPECT_EQ(static_cast<Eigen::Index>(b.size()), nullity_oracle(k)) << "k=" << k;
        EXPECT_EQ(b.size(), static_cast<std::size_t>((k + 1) * (k + 1)));
    }
}

TEST(HarmonicBasis, ExactlyHarmonicAndIndependent) {
    for (int k = 0; k <= 4; ++k) {
        const auto b = harmonic_basis(k);
        for (const auto& h : b) {
            EXPECT_TRUE(h.poly().laplacian().is_zero());
            EXPECT_EQ(h.degree(), k);
        }
        const Eigen::MatrixXd M = coefficient_matrix(b, k);
        EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(M).rank(), static_cast<Eigen::Index>(b.size()));
        if (k >= 2) EXPECT_LT((laplacian_matrix(k) * M).norm(), 1e-12);
    }
}

TEST(HarmonicBasis, CsvExport) {
    std::ostringstream os;
    write_basis_csv(os, harmonic_basis(2));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "index,e1,e2,e3,e4,coeff");
    int rows = 0, max_index = -1;
    while (std::getline(is, line)) {
        ++rows;
        max_index = std::max(max_index, std::stoi(line.substr(0, line.find(','))));
    }
    EXPECT_EQ(max_index, 8);
    EXPECT_GE(rows, 9);
}

TEST(HomogeneousFunction, InverseSquareExamples) {
    const auto f = HomogeneousFunction::radial_power(-2);
    EXPECT_DOUBLE_EQ(f(Vec4(1, 1, 1, 1)), 0.25);
    EXPECT_TRUE(f.gradient(Vec4::Unit(0)).isApprox(Vec4(-2, 0, 0, 0)));
    EXPECT_LT((fd_gradient(f, Vec4::Unit(0), 1e-5) - Vec4(-2, 0, 0, 0)).norm(), 1e-8);
    EXPECT_THROW(f(Vec4::Zero()), DomainError);
    EXPECT_THROW(f.gradient(Vec4::Zero()), DomainError);
}

TEST(HomogeneousFunction, HomogeneityEulerAndFdGradient) {
    Sampler rng(21);
    for (const auto& f : vocabulary()) {
        for (int i = 0; i < 100; ++i) {
            const Vec4 x = rng.normal4();
            const double fx = f(x);
            const double lam = rng.uniform(0.3, 3.0);
            EXPECT_NEAR(f(Vec4(lam * x)), std::pow(lam, f.degree()) * fx, 1e-12 * (1.0 + std::abs(fx)) * std::pow(lam, f.degree()) + 1e-12);
            const double euler = x.dot(f.gradient(x)) - f.degree() * fx;
            EXPECT_LE(std::abs(euler), 1e-9 * (1.0 + std::abs(fx))) << f.label();
        }
        for (int i = 0; i < 5; ++i) {
            const Vec4 x = rng.normal4() + Vec4::Constant(0.5);
            const Vec4 g = f.gradient(x);
            EXPECT_LT((fd_gradient(f, x, 1e-5) - g).norm(), 1e-6 * (1.0 + g.norm())) << f.label();
        }
    }
}

TEST(HomogeneousFunction, SumRequiresEqualDegree) {
    EXPECT_THROW(HomogeneousFunction::radial_power(-2) + HomogeneousFunction::radial_power(-4), InvalidInput);
    EXPECT_THROW(HomogeneousFunction::radial_power(-2).compose_linear(Mat4::Zero()), InvalidInput);
}

TEST(HomogeneousFunction, DeepSumsStayCheap) {
    HomogeneousFunction f = HomogeneousFunction::zero(-2);
    for (int i = 0; i < 200; ++i) f = f + 0.01 * HomogeneousFunction::radial_power(-2);
    EXPECT_NEAR(f(Vec4(1, 1, 1, 1)), 0.5, 1e-12);
}

TEST(BasisToDegreeMinus2, Examples) {
    EXPECT_DOUBLE_EQ(basis_to_degree_minus_2(harmonic_basis(0)[0])(Vec4(1, 1, 1, 1)),
                     harmonic_basis(0)[0].poly()(Vec4::Zero()) * 0.25);
    Polynomial p(2);
    p.add({2, 0, 0, 0}, 1.0);
    p.add({0, 2, 0, 0}, -1.0);
    const auto f = basis_to_degree_minus_2(HarmonicPolynomial::make(p));
    EXPECT_EQ(f.degree(), -2);
    EXPECT_DOUBLE_EQ(f(Vec4::Unit(0)), 1.0);
    EXPECT_NEAR(f(Vec4(1, 2, 0, 0)), (1.0 - 4.0) / 25.0, 1e-15);
    EXPECT_THROW(basis_to_degree_minus_2(harmonic_basis(1)[0]), InvalidInput);
}

TEST(BasisToDegreeMinus2, EvenParityAndIds) {
    const auto basis = degree_minus_2_basis(4);
    EXPECT_EQ(basis.size(), 35u);
    EXPECT_EQ(degree_minus_2_dimension(4), 35u);
    EXPECT_EQ(basis.front().id(), "k0_0");
    EXPECT_EQ(basis.back().id(), "k4_24");
    Sampler rng(22);
    for (const auto& e : basis) {
        const Vec4 x = rng.normal4();
        EXPECT_EQ(e.f.degree(), -2);
        EXPECT_NEAR(e.f(Vec4(-x)), e.f(x), 1e-14 * (1.0 + std::abs(e.f(x))));
    }
}

TEST(MomentInput, ParityRule) {
    EXPECT_EQ(moment_input(harmonic_basis(1)[0], 1).degree(), -3);
    EXPECT_EQ(moment_input(harmonic_basis(2)[0], 2).degree(), -4);
    EXPECT_THROW(moment_input(harmonic_basis(2)[0], 1), InvalidInput);
    EXPECT_THROW(moment_input(harmonic_basis(0)[0], -1), InvalidInput);
}

TEST(WeightedField, IdentitySwapAndDiagonal) {
    const WeightedField<double> phi = xray_field(HomogeneousFunction::radial_power(-2));
    const Frame f = Frame::make(Vec4(1.0, 0.2, 0.0, -0.3), Vec4(0.1, 1.0, 0.5, 0.0));
    EXPECT_EQ(weight_transform_residual(phi, f, Mat2::Identity()), 0.0);
    Mat2 d = Mat2::Zero();
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    EXPECT_LT(weight_transform_residual(phi, f, d), 1e-10);
    Mat2 swap;
    swap << 0.0, 1.0, 1.0, 0.0;
    EXPECT_LT(weight_transform_residual(phi, f, swap), 1e-10);
    EXPECT_THROW(weight_transform_residual(phi, f, Mat2::Zero()), InvalidInput);
}

TEST(WeightedField, RandomGroupElementsIncludingNegativeDeterminant) {
    Sampler rng(23);
    const auto q = QuadratureSpec::make(128);
    for (const auto& e : degree_minus_2_basis(2)) {
        const WeightedField<double> phi = xray_field(e.f, q);
        const Frame f = random_orthonormal_frame(rng);
        for (int i = 0; i < 20; ++i) {
            const Mat2 g = random_gl2(rng, i % 2 == 1);
            EXPECT_LE(weight_transform_residual(phi, f, g), 1e-9) << e.id();
        }
    }
}
