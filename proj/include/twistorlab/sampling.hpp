#pragma once

// Seeded generators for frames, chart points and group elements.

#include "twistorlab/core.hpp"
#include "twistorlab/geometry.hpp"

#include <cmath>

namespace twistorlab {

/// Orthonormalized pair of Gaussian 4-vectors: a plane drawn from the
/// O(4)-invariant measure on the Grassmannian, with a random orientation.
inline Frame random_orthonormal_frame(Sampler& rng) {
    for (;;) {
        const Vec4 a = rng.normal4();
        const Vec4 b = rng.normal4();
        Frame::Matrix m;
        m.col(0) = a;
        m.col(1) = b;
        try {
            return Frame::make(Frame::make(m).orthonormal_basis());
        } catch (const DomainError&) {
            continue;
        }
    }
}

/// Chart point with i.i.d. N(0, scale^2) entries.
inline Mat2 random_chart_point(Sampler& rng, double scale = 0.5) { return rng.normal2x2(scale); }

inline Mat2 rotation2(double angle) {
    Mat2 r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

/// R(a) diag(s1, s2) R(b), singular values drawn log-uniformly from
/// [1/spread, spread]; the determinant sign is forced negative when asked.
inline Mat2 random_gl2(Sampler& rng, bool negative_det, double spread = 2.0) {
    const double ls = std::log(spread);
    Mat2 d = Mat2::Zero();
    d(0, 0) = std::exp(rng.uniform(-ls, ls));
    d(1, 1) = std::exp(rng.uniform(-ls, ls));
    if (negative_det) d(1, 1) = -d(1, 1);
    return rotation2(rng.uniform(0.0, two_pi)) * d * rotation2(rng.uniform(0.0, two_pi));
}

/// Element of SL(4, R): Gram-Schmidt orthogonal matrix times I + eps N,
/// rescaled to unit determinant.
inline Mat4 random_sl4(Sampler& rng, double perturbation = 0.3) {
    Mat4 gauss;
    for (int c = 0; c < 4; ++c) gauss.col(c) = rng.normal4();
    Mat4 q = Eigen::HouseholderQR<Mat4>(gauss).householderQ();
    Mat4 noise;
    for (int c = 0; c < 4; ++c) noise.col(c) = rng.normal4();
    Mat4 g = q * (Mat4::Identity() + perturbation * noise);
    if (g.determinant() < 0.0) g.row(0) *= -1.0;
    return g / std::pow(g.determinant(), 0.25);
}

}  // namespace twistorlab
