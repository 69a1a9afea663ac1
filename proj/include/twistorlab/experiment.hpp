#pragma once

// Named verification suites behind the CLI. Each suite appends check
// records to a Report; run() dispatches on config.command.

#include "twistorlab/fields.hpp"
#include "twistorlab/finite_difference.hpp"
#include "twistorlab/geometry.hpp"
#include "twistorlab/instanton.hpp"
#include "twistorlab/inversion.hpp"
#include "twistorlab/inversion_io.hpp"
#include "twistorlab/operators.hpp"
#include "twistorlab/penrose.hpp"
#include "twistorlab/report.hpp"
#include "twistorlab/sampling.hpp"
#include "twistorlab/xray.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace twistorlab {

namespace suites {

/// Default sample count for geometry-roundtrip.
inline constexpr int geometry_points = 100;
/// Random g per field in verify-weight-law.
inline constexpr int weight_law_group_samples = 20;
/// SL(4) elements and frames in verify-equivariance.
inline constexpr int equivariance_group_samples = 10;
inline constexpr int equivariance_frames = 20;
/// Chart points per input in verify-moments.
inline constexpr int moment_points = 5;
/// Relative pole margin required of the sample frames in penrose-elementary.
inline constexpr double penrose_frame_margin = 0.05;

inline FDSpec fd_spec(const ExperimentConfig& c) { return FDSpec::make(c.fd_h, c.richardson); }

inline double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

inline std::vector<Mat2> chart_points(Sampler& rng, int n) {
    std::vector<Mat2> out;
    for (int i = 0; i < n; ++i) out.push_back(random_chart_point(rng));
    return out;
}

inline std::vector<Vec4> space_points(Sampler& rng, int n) {
    std::vector<Vec4> out;
    for (int i = 0; i < n; ++i) out.push_back(rng.normal4());
    return out;
}

inline void verify_john(const ExperimentConfig& c, Report& r) {
    const auto q = QuadratureSpec::make(c.nodes_or(128));
    const FDSpec spec = fd_spec(c);
    const auto basis = degree_minus_2_basis(c.max_degree_or(4));
    Sampler rng(c.seed);
    const auto points = chart_points(rng, c.n_points);
    std::vector<ChartField<double>> fields;
    for (const auto& e : basis) fields.push_back(xray_chart_field(e.f, q));

    std::vector<double> res(basis.size() * points.size());
    parallel_for(res.size(), [&](std::size_t cell) {
        const std::size_t j = cell / points.size();
        res[cell] = std::abs(john_operator(fields[j], points[cell % points.size()], spec));
    });
    std::map<int, double> per_degree;
    for (std::size_t cell = 0; cell < res.size(); ++cell) {
        double& slot = per_degree[basis[cell / points.size()].harmonic_degree];
        slot = std::max(slot, res[cell]);
    }
    for (const auto& [k, v] : per_degree) r.check_le("john_residual_k" + std::to_string(k), v, c.tol("john"));
    r.check_le("john_residual_max", max_of(res), c.tol("john"));
    r.add_info("basis_size", basis.size());
}

inline void verify_weight_law(const ExperimentConfig& c, Report& r) {
    const auto q = QuadratureSpec::make(c.nodes_or(128));
    const auto basis = degree_minus_2_basis(c.max_degree_or(4));
    Sampler rng(c.seed);
    struct Case {
        std::size_t field;
        Frame frame;
        Mat2 g;
    };
    std::vector<Case> cases;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const Frame frame = random_orthonormal_frame(rng);
        for (int s = 0; s < weight_law_group_samples; ++s) cases.push_back({j, frame, random_gl2(rng, s % 2 == 1)});
    }
    std::vector<WeightedField<double>> fields;
    for (const auto& e : basis) fields.push_back(xray_field(e.f, q));
    std::vector<double> res(cases.size());
    parallel_for(cases.size(), [&](std::size_t i) {
        res[i] = weight_transform_residual(fields[cases[i].field], cases[i].frame, cases[i].g);
    });
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        double& slot = cases[i].g.determinant() < 0.0 ? neg : pos;
        slot = std::max(slot, res[i]);
    }
    r.check_le("weight_law_residual_det_positive", pos, c.tol("weight_law"));
    r.check_le("weight_law_residual_det_negative", neg, c.tol("weight_law"));
    r.add_info("cases", cases.size());
}

inline void verify_equivariance(const ExperimentConfig& c, Report& r) {
    const auto q = QuadratureSpec::make(c.nodes_or(128));
    const auto basis = degree_minus_2_basis(c.max_degree_or(2));
    Sampler rng(c.seed);
    std::vector<Mat4> group;
    for (int i = 0; i < equivariance_group_samples; ++i) group.push_back(random_sl4(rng));
    std::vector<Frame> frames;
    for (int i = 0; i < equivariance_frames; ++i) frames.push_back(random_orthonormal_frame(rng));
    std::vector<double> res(group.size() * basis.size());
    parallel_for(res.size(), [&](std::size_t cell) {
        res[cell] = equivariance_residual(basis[cell % basis.size()].f, group[cell / basis.size()], frames, q);
    });
    r.check_le("equivariance_residual_max", max_of(res), c.tol("equivariance"));
    r.add_info("group_samples", group.size());
    r.add_info("basis_size", basis.size());
}

inline void verify_moments(const ExperimentConfig& c, Report& r) {
    const auto q = QuadratureSpec::make(c.nodes_or(128));
    const FDSpec spec = fd_spec(c);
    Sampler rng(c.seed);
    for (int n = 1; n <= 2; ++n) {
        std::vector<MomentField> inputs;
        for (int k = n % 2; k <= n % 2 + 2; k += 2)
            for (const auto& h : harmonic_basis(k)) inputs.push_back(moment_chart_field(moment_input(h, n), n, q));
        const auto points = chart_points(rng, moment_points);
        std::vector<double> res(inputs.size() * points.size());
        parallel_for(res.size(), [&](std::size_t cell) {
            res[cell] = dn_residual(inputs[cell / points.size()], points[cell % points.size()], spec);
        });
        r.check_le("moment_residual_n" + std::to_string(n), max_of(res), c.tol("moments"));
    }
}

inline void verify_selfdual(const ExperimentConfig& c, Report& r) {
    const Connection A = presets::by_name(c.connection);
    const FDSpec spec = fd_spec(c);
    Sampler rng(c.seed);
    const auto points = space_points(rng, c.n_points);
    r.check_le("selfdual_residual", selfdual_residual(A, points, spec), c.tol("selfdual"));

    double hodge = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const Curvature e = Curvature::basis_form(i, j);
            hodge = std::max(hodge, (hodge_star(hodge_star(e)) - e).norm());
        }
    r.check_le("hodge_star_involution", hodge, c.tol("hodge"));

    double bianchi = 0.0;
    for (const Vec4& x : points) bianchi = std::max(bianchi, bianchi_residual(A, x, spec));
    r.check_le("bianchi_residual", bianchi, c.tol("bianchi"));
    r.add_info("connection", A.name);
}

/// g = exp(i x1 x2), scalar phase at the connection's rank.
inline GaugeFunction reference_gauge(int rank) { return phase_gauge(PhaseFunction::product(0, 1), rank); }

inline void verify_gauge(const ExperimentConfig& c, Report& r) {
    const Connection A = presets::by_name(c.connection);
    const FDSpec spec = fd_spec(c);
    const GaugeFunction g = reference_gauge(A.rank);
    const Connection Ag = gauge_transform(A, g);
    Sampler rng(c.seed);
    const auto points = space_points(rng, c.n_points);
    r.check_le("selfdual_residual_gauge_change",
               std::abs(selfdual_residual(Ag, points, spec) - selfdual_residual(A, points, spec)), c.tol("gauge"));
    double cov = 0.0;
    for (const Vec4& x : points) {
        const CMat gx = g.value(x);
        const CMat ginv = gx.inverse();
        const Curvature F = curvature(A, x, spec);
        const Curvature Fg = curvature(Ag, x, spec);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) cov = std::max(cov, (Fg(i, j) - gx * F(i, j) * ginv).norm());
    }
    r.check_le("curvature_gauge_covariance", cov, c.tol("gauge"));
    r.add_info("connection", A.name);
}

inline void verify_coupled_box(const ExperimentConfig& c, Report& r) {
    const FDSpec spec = fd_spec(c);
    {
        const Connection A = presets::flagship_u1();
        auto one = [](const Vec4&) { return Eigen::VectorXcd::Ones(1).eval(); };
        const Eigen::VectorXcd v = coupled_box(A, one, Vec4(1.0, 0.0, 2.0, 0.0), spec);
        r.check_le("coupled_box_hand_value", std::abs(v(0) - 3.0), c.tol("coupled_box"));
    }

    const Connection A = presets::by_name(c.connection);
    const int n = A.rank;
    auto psi = [n](const Vec4& x) {
        Eigen::VectorXcd out(n);
        for (int k = 0; k < n; ++k)
            out(k) = cplx(std::cos(x(0) + 0.5 * x(2) + k), std::sin(x(1) - 0.3 * x(3) * (k + 1)));
        return out;
    };
    Sampler rng(c.seed);
    const auto points = space_points(rng, c.n_points);

    double reduction = 0.0;
    const Connection Z = presets::zero(n);
    for (const Vec4& x : points) reduction = std::max(reduction, (coupled_box(Z, psi, x, spec) - box_diag(psi, x, spec)).norm());
    r.check_eq("coupled_box_zero_connection_reduction", reduction, 0.0);

    const GaugeFunction g = reference_gauge(n);
    const Connection Ag = gauge_transform(A, g);
    auto gpsi = [&g, &psi](const Vec4& x) { return Eigen::VectorXcd(g.value(x) * psi(x)); };
    double cov = 0.0;
    for (const Vec4& x : points)
        cov = std::max(cov, (coupled_box(Ag, gpsi, x, spec) - g.value(x) * coupled_box(A, psi, x, spec)).norm());
    r.check_le("coupled_box_gauge_covariance", cov, c.tol("gauge_covariance"));
    r.add_info("connection", A.name);
}

inline CVec4 covector_from(const std::vector<double>& v) {
    CVec4 out;
    for (int i = 0; i < 4; ++i) out(i) = cplx(v[2 * i], v[2 * i + 1]);
    return out;
}

inline bool usable_frame(const CVec4& A, const CVec4& B, const Frame& f, std::vector<int>* winding = nullptr) {
    const PoleSafetyReport s = pole_safety(elementary_state(A, B), f, penrose_frame_margin);
    if (!s.safe() || s.winding[0] == s.winding[1]) return false;
    if (winding) *winding = s.winding;
    return true;
}

inline void penrose_elementary(const ExperimentConfig& c, Report& r) {
    const CVec4 A = covector_from(c.twistor_a);
    const CVec4 B = covector_from(c.twistor_b);
    TwistorRationalFunction f = [&] {
        try {
            return elementary_state(A, B);
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what());
        }
    }();
    const auto q = QuadratureSpec::make(c.nodes_or(64));
    Sampler rng(c.seed);

    // Reference frame (e1, e3), else the first usable seeded frame.
    Frame ref = Frame::make(Vec4::Unit(0), Vec4::Unit(2));
    std::vector<int> winding;
    for (int tries = 0; !usable_frame(A, B, ref, &winding); ++tries) {
        if (tries > 1000) throw ConfigError("penrose-elementary: no frame separates the two poles");
        ref = random_orthonormal_frame(rng);
    }
    const cplx value = contour_transform(f, ref, q);
    r.check_le("elementary_value_error", std::abs(value - elementary_state_closed_form(A, B, ref)), c.tol("penrose_value"));
    r.add_info("reference_value", {value.real(), value.imag()});
    r.check_le("elementary_node_doubling_change",
               std::abs(contour_transform(f, ref, QuadratureSpec::make(2 * q.n_nodes())) - value), c.tol("closed_form"));

    // phi * pairing is constant on frames with the same pole separation.
    const cplx r0 = value * plane_pairing(A, B, ref);
    double spread = 0.0;
    int found = 0;
    for (int tries = 0; found < c.n_points; ++tries) {
        if (tries > 100000) throw ConfigError("penrose-elementary: too few frames in the reference component");
        Frame::Matrix m = ref.matrix();
        for (int k = 0; k < 2; ++k) m.col(k) += 0.3 * rng.normal4();
        Frame fr = ref;
        try {
            fr = Frame::make(m);
        } catch (const DomainError&) {
            continue;
        }
        std::vector<int> w;
        if (!usable_frame(A, B, fr, &w) || w != winding) continue;
        spread = std::max(spread, std::abs(contour_transform(f, fr, q) * plane_pairing(A, B, fr) - r0) / std::abs(r0));
        ++found;
    }
    r.check_le("elementary_ratio_spread", spread, c.tol("penrose_spread"));

    // John residual of the chart field at a pole-safe chart point.
    const auto qj = QuadratureSpec::make(c.nodes_or(128));
    Mat2 X = random_chart_point(rng, 1.0);
    for (int tries = 0; !usable_frame(A, B, plane_from_chart(X)); ++tries) {
        if (tries > 1000) throw ConfigError("penrose-elementary: no pole-safe chart point found");
        X = random_chart_point(rng, 1.0);
    }
    r.add_info("john_chart_point", {X(0, 0), X(0, 1), X(1, 0), X(1, 1)});
    const cplx john = john_operator(contour_chart_field(f, qj), X, fd_spec(c));
    r.check_le("elementary_john_residual_real", std::abs(john.real()), c.tol("penrose_john"));
    r.check_le("elementary_john_residual_imag", std::abs(john.imag()), c.tol("penrose_john"));

    const WeightedField<cplx> phi = contour_field(f, QuadratureSpec::make(c.nodes_or(128)));
    double wl = 0.0;
    for (int s = 0; s < 10; ++s) {
        const Mat2 g = random_gl2(rng, s % 2 == 1, 1.5);
        if (!pole_safety(f, ref * g, default_pole_margin).safe()) continue;
        wl = std::max(wl, weight_transform_residual(phi, ref, g));
    }
    r.check_le("elementary_weight_law", wl, c.tol("weight_law"));
}

inline ComplexProjectivePoint random_nonreal_point(Sampler& rng) {
    for (;;) {
        const auto z = ComplexProjectivePoint::make(rng.cnormal4());
        if (!z.is_real()) return z;
    }
}

inline void geometry_roundtrip(const ExperimentConfig& c, Report& r) {
    Sampler rng(c.seed);
    double p_trip = 0.0, g_line = 0.0, g_plane = 0.0, scale_plane = 0.0, quadric = 0.0;
    int scale_flips = 0, conj_keeps = 0;
    for (int i = 0; i < geometry_points; ++i) {
        const ComplexProjectivePoint z = random_nonreal_point(rng);
        p_trip = std::max(p_trip, mu_restrict(mu_inverse(z)).distance(z));

        const Frame plane = random_orthonormal_frame(rng);
        const cplx a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
        const CVec4 line = a * plane.u().cast<cplx>() + b * plane.v().cast<cplx>();
        const GPoint gp = GPoint::make(ComplexProjectivePoint::make(line), plane);
        if (!gp.in_flag_manifold()) {
            const GPoint back = mu_inverse(mu_restrict(gp));
            g_line = std::max(g_line, back.line().distance(gp.line()));
            g_plane = std::max(g_plane, plucker_embed(back.plane()).plane_distance(plucker_embed(plane)));
        }

        const Frame base = pi_project(z);
        const cplx lambda(rng.normal(), rng.normal());
        const Frame scaled = pi_project(ComplexProjectivePoint::make(lambda * z.rep()));
        scale_plane = std::max(scale_plane, plucker_embed(scaled).plane_distance(plucker_embed(base)));
        if (change_of_basis_determinant(base, scaled) <= 0.0) ++scale_flips;
        if (change_of_basis_determinant(base, pi_project(z.conj())) >= 0.0) ++conj_keeps;
        quadric = std::max(quadric, std::abs(plucker_embed(base).quadric()));
    }
    const double tol = c.tol("geometry");
    r.check_le("mu_round_trip_projective", p_trip, tol);
    r.check_le("mu_round_trip_g_line", g_line, tol);
    r.check_le("mu_round_trip_g_plane", g_plane, tol);
    r.check_le("pi_scale_plane_distance", scale_plane, tol);
    r.check_eq("pi_scale_orientation_flips", scale_flips, 0);
    r.check_eq("pi_conjugate_orientation_kept", conj_keeps, 0);
    r.check_le("plucker_quadric", quadric, tol);
}

inline Eigen::VectorXd transform_samples(const std::vector<BasisEntry>& basis, const Eigen::VectorXd& coeffs,
                                         const std::vector<Frame>& frames, const QuadratureSpec& q) {
    HomogeneousFunction combined = HomogeneousFunction::zero(-2);
    for (std::size_t j = 0; j < basis.size(); ++j) combined = combined + coeffs(static_cast<Eigen::Index>(j)) * basis[j].f;
    Eigen::VectorXd out(static_cast<Eigen::Index>(frames.size()));
    parallel_for(frames.size(), [&](std::size_t i) { out(static_cast<Eigen::Index>(i)) = xray_transform(combined, frames[i], q); });
    return out;
}

inline void reconstruct_suite(const ExperimentConfig& c, Report& r) {
    const int max_degree = c.max_degree_or(4);
    const auto basis = degree_minus_2_basis(max_degree);
    DesignMatrix D;
    if (!c.design_in.empty()) {
        D = load_design(c.design_in);
        std::vector<std::string> ids;
        for (const auto& e : basis) ids.push_back(e.id());
        if (D.basis_ids != ids) throw ConfigError("design_in: basis ids do not match max_degree " + std::to_string(max_degree));
    } else {
        if (static_cast<std::size_t>(c.n_frames) < basis.size())
            throw InsufficientSamples("reconstruct: max_degree " + std::to_string(max_degree) + " requires at least " +
                                          std::to_string(basis.size()) + " frames, got " + std::to_string(c.n_frames),
                                      basis.size());
        D = design_matrix(basis, sample_frames(static_cast<std::size_t>(c.n_frames), c.seed),
                          QuadratureSpec::make(c.nodes_or(64)));
        D.seed = c.seed;
    }
    if (!c.design_out.empty()) save_design(c.design_out, D);

    Sampler rng(c.seed + 1);
    Eigen::VectorXd truth(D.cols());
    for (Eigen::Index j = 0; j < truth.size(); ++j) truth(j) = rng.normal();
    Eigen::VectorXd samples = transform_samples(basis, truth, D.frames, QuadratureSpec::make(D.quadrature_nodes));
    if (c.noise > 0.0) {
        const double scale = c.noise * samples.norm() / std::sqrt(static_cast<double>(samples.size()));
        for (Eigen::Index i = 0; i < samples.size(); ++i) samples(i) += scale * rng.normal();
    }
    const ReconstructionReport rep = reconstruct(samples, D, truth);
    r.check_eq("design_rank", static_cast<double>(rep.rank), static_cast<double>(D.cols()));
    r.check_le("reconstruction_relative_error", *rep.relative_error, c.tol("reconstruct"));
    r.add_info("condition", rep.condition);
    r.add_info("residual_norm", rep.residual_norm);
    r.add_info("rows", D.rows());
    r.add_info("cols", D.cols());
}

inline void injectivity_suite(const ExperimentConfig& c, Report& r) {
    const int max_degree = c.max_degree_or(4);
    const InjectivityReport rep = injectivity_report(max_degree, static_cast<std::size_t>(c.n_frames), c.seed,
                                                     QuadratureSpec::make(c.nodes_or(64)));
    r.check_eq("design_rank", static_cast<double>(rep.rank), static_cast<double>(rep.dimension));
    for (const auto& [k, s] : rep.min_singular_value)
        r.check_gt("min_singular_value_k" + std::to_string(k), s, 0.0);
    r.add_info("condition", rep.condition);
    r.add_info("dimension", rep.dimension);
}

/// Writes basis_k{k}.csv for each even k <= max_degree into config.output
/// (a directory) and records the element counts.
inline void export_basis(const ExperimentConfig& c, Report& r) {
    if (c.output.empty()) throw ConfigError("export-basis: output directory required");
    std::filesystem::create_directories(c.output);
    for (int k = 0; k <= c.max_degree_or(4); k += 2) {
        const auto basis = harmonic_basis(k);
        std::ofstream os(std::filesystem::path(c.output) / ("basis_k" + std::to_string(k) + ".csv"));
        if (!os) throw ConfigError("export-basis: cannot write into '" + c.output + "'");
        write_basis_csv(os, basis);
        r.check_eq("basis_size_k" + std::to_string(k), static_cast<double>(basis.size()), (k + 1.0) * (k + 1.0));
    }
}

}  // namespace suites

/// Runs the configured suite. Configuration problems raise ConfigError or
/// InsufficientSamples; failed checks are reported, not thrown.
inline Report run(const ExperimentConfig& config) {
    config.validate();
    Report r;
    r.set_environment({{"seed", config.seed}, {"config", config.to_json()}});
    const std::string& cmd = config.command;
    try {
        if (cmd == "verify-john") suites::verify_john(config, r);
        else if (cmd == "verify-weight-law") suites::verify_weight_law(config, r);
        else if (cmd == "verify-equivariance") suites::verify_equivariance(config, r);
        else if (cmd == "verify-moments") suites::verify_moments(config, r);
        else if (cmd == "verify-selfdual") suites::verify_selfdual(config, r);
        else if (cmd == "verify-gauge") suites::verify_gauge(config, r);
        else if (cmd == "verify-coupled-box") suites::verify_coupled_box(config, r);
        else if (cmd == "penrose-elementary") suites::penrose_elementary(config, r);
        else if (cmd == "geometry-roundtrip") suites::geometry_roundtrip(config, r);
        else if (cmd == "reconstruct") suites::reconstruct_suite(config, r);
        else if (cmd == "injectivity") suites::injectivity_suite(config, r);
        else if (cmd == "export-basis") suites::export_basis(config, r);
    } catch (const InsufficientSamples&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return r;
}

}  // namespace twistorlab
