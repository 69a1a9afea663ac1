#pragma once

// DesignMatrix persistence: values as CSV (header row of basis ids) plus a
// JSON sidecar holding frames, basis ids, quadrature nodes and seed.

#include "twistorlab/inversion.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace twistorlab {

inline void write_design_csv(std::ostream& os, const DesignMatrix& D) {
    for (std::size_t j = 0; j < D.basis_ids.size(); ++j) os << (j ? "," : "") << D.basis_ids[j];
    os << '\n';
    os.precision(17);
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        for (Eigen::Index j = 0; j < D.cols(); ++j) os << (j ? "," : "") << D.values(i, j);
        os << '\n';
    }
}

inline nlohmann::json design_sidecar(const DesignMatrix& D) {
    nlohmann::json j;
    j["basis_ids"] = D.basis_ids;
    j["quadrature_nodes"] = D.quadrature_nodes;
    j["seed"] = D.seed ? nlohmann::json(*D.seed) : nlohmann::json(nullptr);
    j["rows"] = D.rows();
    j["cols"] = D.cols();
    nlohmann::json frames = nlohmann::json::array();
    for (const Frame& f : D.frames) {
        const Vec4 u = f.u();
        const Vec4 v = f.v();
        frames.push_back({{"u", {u(0), u(1), u(2), u(3)}}, {"v", {v(0), v(1), v(2), v(3)}}});
    }
    j["frames"] = frames;
    return j;
}

/// Writes <stem>.csv and <stem>.json.
inline void save_design(const std::string& stem, const DesignMatrix& D) {
    std::ofstream csv(stem + ".csv");
    std::ofstream side(stem + ".json");
    if (!csv || !side) throw InvalidInput("save_design: cannot open output '" + stem + "'");
    write_design_csv(csv, D);
    side << design_sidecar(D).dump(2) << '\n';
}

inline DesignMatrix load_design(const std::string& stem) {
    std::ifstream side(stem + ".json");
    std::ifstream csv(stem + ".csv");
    if (!side || !csv) throw InvalidInput("load_design: cannot open '" + stem + ".csv/.json'");
    const nlohmann::json j = nlohmann::json::parse(side);

    DesignMatrix D;
    D.basis_ids = j.at("basis_ids").get<std::vector<std::string>>();
    D.quadrature_nodes = j.at("quadrature_nodes").get<int>();
    if (!j.at("seed").is_null()) D.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& fr : j.at("frames")) {
        const auto u = fr.at("u").get<std::vector<double>>();
        const auto v = fr.at("v").get<std::vector<double>>();
        if (u.size() != 4 || v.size() != 4) throw InvalidInput("load_design: frame vectors must have 4 entries");
        D.frames.push_back(Frame::make(Vec4(u[0], u[1], u[2], u[3]), Vec4(v[0], v[1], v[2], v[3])));
    }
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    if (static_cast<Eigen::Index>(D.frames.size()) != rows || static_cast<Eigen::Index>(D.basis_ids.size()) != cols)
        throw InvalidInput("load_design: sidecar shape disagrees with its frame/basis lists");

    D.values.resize(rows, cols);
    std::string line;
    std::getline(csv, line);  // header
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(csv, line)) throw InvalidInput("load_design: CSV has fewer rows than the sidecar");
        std::stringstream ss(line);
        std::string cell;
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!std::getline(ss, cell, ',')) throw InvalidInput("load_design: short CSV row");
            D.values(i, c) = std::stod(cell);
        }
    }
    return D;
}

}  // namespace twistorlab
