#include "twistorlab/fields.hpp"
#include "twistorlab/sampling.hpp"
#include "twistorlab/xray.hpp"

#include <gtest/gtest.h>

using namespace twistorlab;

namespace {

// Gauss-Legendre rule on [a, b] by Golub-Welsch; a non-periodic method, so
// agreement with the trapezoid engine is an independent check.
struct GaussLegendre {
    std::vector<double> x, w;

    GaussLegendre(int n, double a, double b) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const double beta = i / std::sqrt(4.0 * i * i - 1.0);
            J(i, i - 1) = J(i - 1, i) = beta;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        for (int i = 0; i < n; ++i) {
            x.push_back(0.5 * (b - a) * es.eigenvalues()(i) + 0.5 * (b + a));
            const double v = es.eigenvectors()(0, i);
            w.push_back((b - a) * v * v);
        }
    }

    template <typename F>
    double operator()(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
        return s;
    }
};

double gl_circle(const HomogeneousFunction& f, const Frame& fr, int ck, int sk) {
    // split at pi so each panel is smooth enough for a moderate rule
    GaussLegendre a(120, 0.0, pi), b(120, pi, two_pi);
    auto g = [&](double t) {
        return f(fr.at(std::cos(t), std::sin(t))) * std::pow(std::cos(t), ck) * std::pow(std::sin(t), sk);
    };
    return a(g) + b(g);
}

double gram_closed_form(const Mat2& X) {
    const double a = 1.0 + X(0, 0) * X(0, 0) + X(0, 1) * X(0, 1);
    const double b = 1.0 + X(1, 0) * X(1, 0) + X(1, 1) * X(1, 1);
    const double c = X(0, 0) * X(1, 0) + X(0, 1) * X(1, 1);
    return two_pi / std::sqrt(a * b - c * c);
}

const Frame e12 = Frame::make(Vec4::Unit(0), Vec4::Unit(1));

HomogeneousFunction x1_power(int k, int radial) {
    Polynomial p(k);
    p.add({k, 0, 0, 0}, 1.0);
    return with_radial_weight(p, radial);
}

}  // namespace

TEST(Quadrature, RejectsTooFewNodes) {
    EXPECT_THROW(QuadratureSpec::make(3), InvalidInput);
    EXPECT_NO_THROW(QuadratureSpec::make(4));
    EXPECT_EQ(QuadratureSpec::make().n_nodes(), 64);
}

TEST(XRay, FlagshipClosedForm) {
    const auto f = HomogeneousFunction::radial_power(-2);
    EXPECT_NEAR(xray_transform(f, e12, QuadratureSpec::make(64)), two_pi, 1e-12);
    const Frame f23 = Frame::make(Vec4(2, 0, 0, 0), Vec4(0, 3, 0, 0));
    EXPECT_NEAR(xray_transform(f, f23), two_pi / 6.0, 1e-12);
    EXPECT_NEAR(xray_inverse_square_closed_form(f23), two_pi / 6.0, 1e-15);
    EXPECT_EQ(xray_transform(HomogeneousFunction::zero(-2), e12), 0.0);
}

TEST(XRay, HarmonicQuadraticIntegratesToZero) {
    Polynomial p(2);
    p.add({2, 0, 0, 0}, 1.0);
    p.add({0, 2, 0, 0}, -1.0);
    EXPECT_NEAR(xray_transform(with_radial_weight(p, -2), e12), 0.0, 1e-14);
}

TEST(XRay, RejectsWrongDegree) {
    EXPECT_THROW(xray_transform(HomogeneousFunction::radial_power(-3), e12), InvalidInput);
    EXPECT_THROW(xray_chart_field(HomogeneousFunction::radial_power(-4)), InvalidInput);
}

TEST(XRay, ChartFieldMatchesGramClosedForm) {
    const auto phi = xray_chart_field(HomogeneousFunction::radial_power(-2));
    EXPECT_NEAR(phi(Mat2::Zero()), two_pi, 1e-12);
    Sampler rng(31);
    for (int i = 0; i < 20; ++i) {
        const Mat2 X = random_chart_point(rng);
        EXPECT_NEAR(phi(X), gram_closed_form(X), 1e-10);
    }
    const auto zero = xray_chart_field(HomogeneousFunction::zero(-2));
    EXPECT_EQ(zero(random_chart_point(rng)), 0.0);
}

TEST(XRay, AgreesWithGaussLegendreOnBasis) {
    Sampler rng(32);
    for (const auto& e : degree_minus_2_basis(4)) {
        const Frame fr = random_orthonormal_frame(rng);
        EXPECT_NEAR(xray_transform(e.f, fr), gl_circle(e.f, fr, 0, 0), 1e-10) << e.id();
    }
}

TEST(XRay, SpectralConvergence) {
    const auto f = HomogeneousFunction::radial_power(-2);
    const Frame fr = Frame::make(Vec4(1.0, 0.0, 0.0, 0.0), Vec4(0.3, 0.4, 0.0, 0.0));
    const double exact = xray_inverse_square_closed_form(fr);
    const double e16 = std::abs(xray_transform(f, fr, QuadratureSpec::make(16)) - exact);
    const double e32 = std::abs(xray_transform(f, fr, QuadratureSpec::make(32)) - exact);
    EXPECT_GT(e16, 0.0);
    EXPECT_LE(e32 * 1e3, e16);
}

TEST(XRay, Linearity) {
    Sampler rng(33);
    const auto basis = degree_minus_2_basis(2);
    for (int t = 0; t < 10; ++t) {
        const Frame fr = random_orthonormal_frame(rng);
        const double a = rng.normal(), b = rng.normal();
        const auto& f = basis[1].f;
        const auto& h = basis[5].f;
        const double lhs = xray_transform(a * f + b * h, fr);
        const double rhs = a * xray_transform(f, fr) + b * xray_transform(h, fr);
        EXPECT_NEAR(lhs, rhs, 1e-14 * (1.0 + std::abs(rhs)));
    }
}

TEST(XRay, WeightLawOnBasis) {
    Sampler rng(34);
    const auto q = QuadratureSpec::make(128);
    for (const auto& e : degree_minus_2_basis(4)) {
        const auto phi = xray_field(e.f, q);
        EXPECT_EQ(phi.weight, -1);
        const Frame fr = random_orthonormal_frame(rng);
        for (int i = 0; i < 20; ++i) EXPECT_LE(weight_transform_residual(phi, fr, random_gl2(rng, i % 2 == 1)), 1e-9);
    }
}

TEST(Moments, HelicityOneExample) {
    const auto m = xray_moments(x1_power(1, -3), e12, 1);
    ASSERT_EQ(m.size(), 2);
    EXPECT_NEAR(m(0), pi, 1e-13);
    EXPECT_NEAR(m(1), 0.0, 1e-14);
}

TEST(Moments, HelicityTwoExample) {
    const auto m = xray_moments(x1_power(2, -4), e12, 2);
    ASSERT_EQ(m.size(), 3);
    EXPECT_NEAR(m(0), 3.0 * pi / 4.0, 1e-13);
    EXPECT_NEAR(m(1), 0.0, 1e-14);
    EXPECT_NEAR(m(2), pi / 4.0, 1e-13);
}

TEST(Moments, ZeroInputAndN0Reduction) {
    EXPECT_EQ(xray_moments(HomogeneousFunction::zero(-5), e12, 3).norm(), 0.0);
    Sampler rng(35);
    const auto f = degree_minus_2_basis(2)[3].f;
    const Frame fr = random_orthonormal_frame(rng);
    EXPECT_EQ(xray_moments(f, fr, 0)(0), xray_transform(f, fr));
}

TEST(Moments, AgreeWithGaussLegendre) {
    Sampler rng(36);
    for (int n = 1; n <= 2; ++n)
        for (const auto& h : harmonic_basis(n)) {
            const auto f = moment_input(h, n);
            const Frame fr = random_orthonormal_frame(rng);
            const auto m = xray_moments(f, fr, n);
            for (int k = 0; k <= n; ++k) EXPECT_NEAR(m(k), gl_circle(f, fr, n - k, k), 1e-10);
        }
}

TEST(Moments, Preconditions) {
    EXPECT_THROW(xray_moments(x1_power(1, -3), e12, 2), InvalidInput);
    EXPECT_THROW(xray_moments(x1_power(2, -3), e12, 1), InvalidInput);  // wrong parity
    EXPECT_THROW(xray_moments(x1_power(1, -3), e12, -1), InvalidInput);
    EXPECT_THROW(moment_chart_field(x1_power(2, -3), 1), InvalidInput);
}

TEST(Equivariance, Examples) {
    Sampler rng(37);
    std::vector<Frame> frames;
    for (int i = 0; i < 20; ++i) frames.push_back(random_orthonormal_frame(rng));
    const auto f = HomogeneousFunction::radial_power(-2);
    EXPECT_EQ(equivariance_residual(f, Mat4::Identity(), frames), 0.0);
    Mat4 d = Mat4::Identity();
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    EXPECT_LT(equivariance_residual(f, d, frames, QuadratureSpec::make(128)), 1e-10);
    Mat4 rot = Mat4::Identity();
    rot.topLeftCorner<2, 2>() = rotation2(pi / 6.0);
    EXPECT_LT(equivariance_residual(f, rot, frames), 1e-10);
    EXPECT_THROW(equivariance_residual(f, Mat4::Zero(), frames), InvalidInput);
}

TEST(Equivariance, ClosedFormBothSides) {
    // R(f o g)(u, v) = 2 pi / sqrt(G(g u, g v)) for f = |x|^-2.
    Sampler rng(38);
    const auto f = HomogeneousFunction::radial_power(-2);
    const auto q = QuadratureSpec::make(128);
    for (int i = 0; i < 5; ++i) {
        const Mat4 g = random_sl4(rng);
        const Frame fr = random_orthonormal_frame(rng);
        const Frame moved = Frame::make(Vec4(g * fr.u()), Vec4(g * fr.v()));
        EXPECT_NEAR(xray_transform(f.compose_linear(g), fr, q), xray_inverse_square_closed_form(moved), 1e-10);
    }
}

TEST(Equivariance, SeededSl4OnBasis) {
    Sampler rng(39);
    std::vector<Frame> frames;
    for (int i = 0; i < 20; ++i) frames.push_back(random_orthonormal_frame(rng));
    const auto q = QuadratureSpec::make(128);
    for (int i = 0; i < 10; ++i) {
        const Mat4 g = random_sl4(rng);
        EXPECT_NEAR(g.determinant(), 1.0, 1e-12);
        for (const auto& e : degree_minus_2_basis(2)) EXPECT_LE(equivariance_residual(e.f, g, frames, q), 1e-9);
    }
}

TEST(Engine, RealAndComplexPathsAgreeBitForBit) {
    Sampler rng(40);
    const auto q = QuadratureSpec::make();
    for (const auto& e : degree_minus_2_basis(2)) {
        const Frame fr = random_orthonormal_frame(rng);
        const double r = circle_integral<double>([&](const Vec4& x) { return e.f.eval_unchecked(x); }, fr, q);
        const cplx c = circle_integral<cplx>([&](const Vec4& x) { return cplx(e.f.eval_unchecked(x), 0.0); }, fr, q);
        EXPECT_EQ(r, c.real());
        EXPECT_EQ(c.imag(), 0.0);
        EXPECT_EQ(r, xray_transform(e.f, fr, q));
    }
}
