#pragma once

// Finite-dimensional injectivity and least-squares reconstruction for the
// X-ray transform on spans of harmonic degree -2 inputs.

#include "twistorlab/core.hpp"
#include "twistorlab/fields.hpp"
#include "twistorlab/geometry.hpp"
#include "twistorlab/sampling.hpp"
#include "twistorlab/xray.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace twistorlab {

/// Rows are frames, columns basis functions; entry (i, j) = R f_j(frame_i).
struct DesignMatrix {
    Eigen::MatrixXd values;
    std::vector<Frame> frames;
    std::vector<std::string> basis_ids;
    int quadrature_nodes = QuadratureSpec::default_nodes;
    std::optional<std::uint64_t> seed;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

inline std::vector<Frame> sample_frames(std::size_t n, std::uint64_t seed) {
    Sampler rng(seed);
    std::vector<Frame> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_orthonormal_frame(rng));
    return out;
}

inline DesignMatrix design_matrix(const std::vector<HomogeneousFunction>& basis, const std::vector<Frame>& frames,
                                  const QuadratureSpec& q = QuadratureSpec::make()) {
    for (const auto& f : basis) require_degree(f, -2, "design_matrix");
    DesignMatrix d;
    d.values.resize(static_cast<Eigen::Index>(frames.size()), static_cast<Eigen::Index>(basis.size()));
    d.frames = frames;
    d.quadrature_nodes = q.n_nodes();
    for (std::size_t j = 0; j < basis.size(); ++j)
        d.basis_ids.push_back(basis[j].label().empty() ? "f" + std::to_string(j) : basis[j].label());
    const std::size_t cells = frames.size() * basis.size();
    parallel_for(cells, [&](std::size_t cell) {
        const std::size_t i = cell / basis.size();
        const std::size_t j = cell % basis.size();
        d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xray_transform(basis[j], frames[i], q);
    });
    return d;
}

inline DesignMatrix design_matrix(const std::vector<BasisEntry>& basis, const std::vector<Frame>& frames,
                                  const QuadratureSpec& q = QuadratureSpec::make()) {
    std::vector<HomogeneousFunction> fs;
    for (const auto& e : basis) fs.push_back(e.f);
    return design_matrix(fs, frames, q);
}

inline constexpr double rank_threshold = 1e-8;

struct SpectrumSummary {
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd right_vectors;
    Eigen::Index rank = 0;
    /// sigma_max / sigma_min over the retained singular values.
    double condition = 0.0;
};

inline SpectrumSummary spectrum(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    SpectrumSummary s;
    s.singular_values = svd.singularValues();
    s.right_vectors = svd.matrixV();
    if (s.singular_values.size() == 0 || s.singular_values(0) == 0.0) return s;
    const double cut = rank_threshold * s.singular_values(0);
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i)
        if (s.singular_values(i) > cut) ++s.rank;
    s.condition = s.singular_values(0) / s.singular_values(s.rank - 1);
    return s;
}

/// Rank-deficient design; carries a null combination of basis columns.
class RankDeficient : public InvalidInput {
public:
    RankDeficient(const std::string& what, Eigen::VectorXd null_vector)
        : InvalidInput(what), null_vector_(std::move(null_vector)) {}
    const Eigen::VectorXd& null_vector() const noexcept { return null_vector_; }

private:
    Eigen::VectorXd null_vector_;
};

struct ReconstructionReport {
    Eigen::VectorXd coefficients;
    std::optional<double> relative_error;
    double residual_norm = 0.0;
    Eigen::Index rank = 0;
    double condition = 0.0;
};

/// Least squares D c = samples by column-pivoting Householder QR.
inline ReconstructionReport reconstruct(const Eigen::VectorXd& samples, const DesignMatrix& D) {
    if (samples.size() != D.rows()) throw InvalidInput("reconstruct: sample count does not match design rows");
    if (D.rows() < D.cols())
        throw InsufficientSamples("reconstruct: need at least " + std::to_string(D.cols()) + " frames, got " +
                                      std::to_string(D.rows()),
                                  static_cast<std::size_t>(D.cols()));
    const SpectrumSummary s = spectrum(D.values);
    if (s.rank < D.cols()) {
        const Eigen::VectorXd null = s.right_vectors.col(D.cols() - 1);
        const double big = null.cwiseAbs().maxCoeff();
        std::ostringstream os;
        os << "reconstruct: design matrix rank " << s.rank << " < " << D.cols() << "; null combination:";
        os.precision(6);
        for (Eigen::Index j = 0; j < null.size(); ++j)
            if (std::abs(null(j)) > 1e-6 * big) os << ' ' << (null(j) >= 0 ? "+" : "") << null(j) << '*' << D.basis_ids[j];
        throw RankDeficient(os.str(), null);
    }
    ReconstructionReport r;
    r.coefficients = D.values.colPivHouseholderQr().solve(samples);
    r.residual_norm = (D.values * r.coefficients - samples).norm();
    r.rank = s.rank;
    r.condition = s.condition;
    return r;
}

inline ReconstructionReport reconstruct(const Eigen::VectorXd& samples, const DesignMatrix& D,
                                        const Eigen::VectorXd& truth) {
    ReconstructionReport r = reconstruct(samples, D);
    const double n = truth.norm();
    r.relative_error = n > 0.0 ? (r.coefficients - truth).norm() / n : r.coefficients.norm();
    return r;
}

struct InjectivityReport {
    std::size_t dimension = 0;
    Eigen::Index rank = 0;
    double condition = 0.0;
    /// harmonic degree -> smallest singular value of that degree's columns
    std::map<int, double> min_singular_value;

    bool full_rank() const { return static_cast<std::size_t>(rank) == dimension; }
};

inline InjectivityReport injectivity_report(int max_degree, std::size_t n_frames, std::uint64_t seed,
                                            const QuadratureSpec& q = QuadratureSpec::make()) {
    const std::size_t dim = degree_minus_2_dimension(max_degree);
    if (n_frames < dim)
        throw InsufficientSamples("injectivity_report: max_degree " + std::to_string(max_degree) + " needs at least " +
                                      std::to_string(dim) + " frames, got " + std::to_string(n_frames),
                                  dim);
    const auto basis = degree_minus_2_basis(max_degree);
    const DesignMatrix D = design_matrix(basis, sample_frames(n_frames, seed), q);
    const SpectrumSummary s = spectrum(D.values);

    InjectivityReport r;
    r.dimension = dim;
    r.rank = s.rank;
    r.condition = s.condition;
    Eigen::Index col = 0;
    for (int k = 0; k <= max_degree; k += 2) {
        const Eigen::Index width = (k + 1) * (k + 1);
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(D.values.middleCols(col, width)).singularValues();
        r.min_singular_value[k] = sv(sv.size() - 1);
        col += width;
    }
    return r;
}

}  // namespace twistorlab
