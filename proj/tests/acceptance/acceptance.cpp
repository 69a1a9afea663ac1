// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria (0 when all pass).

#include "twistorlab/experiment.hpp"
#include "twistorlab/operators.hpp"
#include "twistorlab/xray.hpp"

#include <functional>
#include <iostream>
#include <sstream>

using namespace twistorlab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

ExperimentConfig config_for(const std::string& command) {
    ExperimentConfig c;
    c.command = command;
    return c;
}

// Folds the check records of one or more suite runs into a single outcome.
Outcome from_reports(const std::vector<Report>& reports) {
    bool pass = true;
    std::ostringstream os;
    os.precision(3);
    for (const Report& r : reports) {
        pass = pass && r.pass();
        for (const auto& c : r.records()) {
            if (os.tellp() > 0) os << "; ";
            os << c.name << '=' << c.value << (c.pass ? "" : " [FAIL]");
        }
    }
    return {pass, os.str()};
}

Outcome flagship_closed_form() {
    const auto f = HomogeneousFunction::radial_power(-2);
    const Frame e12 = Frame::make(Vec4::Unit(0), Vec4::Unit(1));
    const double value_err = std::abs(xray_transform(f, e12, QuadratureSpec::make(64)) - two_pi);
    const auto phi = xray_chart_field(f, QuadratureSpec::make(64));
    Sampler rng(20240601);
    double chart_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Mat2 X = random_chart_point(rng);
        const double a = 1.0 + X.row(0).squaredNorm();
        const double b = 1.0 + X.row(1).squaredNorm();
        const double c = X.row(0).dot(X.row(1));
        chart_err = std::max(chart_err, std::abs(phi(X) - two_pi / std::sqrt(a * b - c * c)));
    }
    Report r;
    r.check_le("value_error", value_err, 1e-12);
    r.check_le("chart_field_error", chart_err, 1e-10);
    return from_reports({r});
}

Outcome bijectivity() {
    std::vector<Report> reports{run(config_for("injectivity"))};
    for (std::uint64_t seed : {20240601ULL, 7ULL, 11ULL}) {
        ExperimentConfig c = config_for("reconstruct");
        c.seed = seed;
        reports.push_back(run(c));
    }
    return from_reports(reports);
}

Outcome coordinate_forms() {
    const std::vector<std::function<double(const Mat2&)>> fields = {
        [](const Mat2& X) { return std::exp(0.3 * X(0, 0) - 0.2 * X(1, 1)) * std::cos(X(0, 1) + 0.5 * X(1, 0)); },
        [](const Mat2& X) { return X.determinant() * X(0, 1) + std::sin(X(1, 0) * X(0, 0)); },
        [](const Mat2& X) { return 1.0 / (2.0 + X.squaredNorm()); },
    };
    Sampler rng(20240601);
    double worst = 0.0;
    for (const auto& phi : fields) {
        auto pulled = [&phi](const Vec4& y) { return phi(box_to_chart(y)); };
        for (int i = 0; i < 10; ++i) {
            const Mat2 X = random_chart_point(rng);
            worst = std::max(worst, std::abs(john_operator(phi, X) - 0.25 * box_diag(pulled, chart_to_box(X))));
        }
    }
    Report r;
    r.check_le("john_minus_quarter_box", worst, 1e-6);
    return from_reports({r});
}

// Default covectors, then a generic pair.
Outcome elementary_state_checks() {
    ExperimentConfig generic = config_for("penrose-elementary");
    generic.twistor_a = {1.0, 0.0, 0.3, 0.2, 0.0, 1.0, -0.4, 0.1};
    generic.twistor_b = {0.0, 1.0, 0.5, -0.2, 1.0, 0.0, 0.2, 0.3};
    return from_reports({run(config_for("penrose-elementary")), run(generic)});
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"flagship closed form", flagship_closed_form},
        {"John's equation on the degree <= 4 basis", [] { return from_reports({run(config_for("verify-john"))}); }},
        {"weight law", [] { return from_reports({run(config_for("verify-weight-law"))}); }},
        {"SL(4,R) equivariance", [] { return from_reports({run(config_for("verify-equivariance"))}); }},
        {"moment consistency", [] { return from_reports({run(config_for("verify-moments"))}); }},
        {"injectivity and reconstruction", bijectivity},
        {"split instanton",
         [] {
             return from_reports({run(config_for("verify-selfdual")), run(config_for("verify-gauge")),
                                  run(config_for("verify-coupled-box"))});
         }},
        {"elementary state", elementary_state_checks},
        {"geometry round trips", [] { return from_reports({run(config_for("geometry-roundtrip"))}); }},
        {"coordinate-form consistency", coordinate_forms},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
                  << o.detail << ")\n";
    }
    return failed;
}
