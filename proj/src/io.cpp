#include "ratchet/io.hpp"

#include <cstdio>
#include <fstream>

#include "ratchet/errors.hpp"

namespace ratchet {

nlohmann::json potential_to_json(const PeriodicPotential& p) {
    return nlohmann::json{{"cos", p.cos_coeffs()}, {"sin", p.sin_coeffs()}};
}

PeriodicPotential potential_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("cos") || !j.contains("sin"))
        throw InvalidInputError("potential JSON must be an object with `cos` and `sin` arrays");
    for (const auto& [key, val] : j.items())
        if (key != "cos" && key != "sin")
            throw InvalidInputError("potential JSON: unknown key `" + key + "`");
    return make_trig_potential(j.at("cos").get<std::vector<double>>(),
                               j.at("sin").get<std::vector<double>>());
}

nlohmann::json steady_state_to_json(const SteadyState& ss) {
    return nlohmann::json{{"sigma", ss.params.sigma}, {"v", ss.params.v},
                          {"current", ss.current},   {"kappa", ss.kappa},
                          {"beta_reduced", ss.beta_reduced},
                          {"n", ss.n},               {"rho", ss.rho}};
}

SteadyState steady_state_from_json(const nlohmann::json& j) {
    SteadyState ss;
    ss.params.sigma = j.at("sigma").get<double>();
    ss.params.v = j.at("v").get<double>();
    ss.current = j.at("current").get<double>();
    ss.kappa = j.at("kappa").get<double>();
    ss.beta_reduced = j.at("beta_reduced").get<double>();
    ss.n = j.at("n").get<int>();
    ss.rho = j.at("rho").get<std::vector<double>>();
    if (static_cast<int>(ss.rho.size()) != ss.n)
        throw InvalidInputError("steady-state JSON: rho length does not match n");
    ss.grid.resize(ss.n);
    for (int i = 0; i < ss.n; ++i) ss.grid[i] = static_cast<double>(i) / ss.n;
    return ss;
}

nlohmann::json moment_recovery_to_json(const MomentRecovery& rec) {
    return nlohmann::json{{"c", rec.coeffs},
                          {"M_even", rec.even_moments},
                          {"residual", rec.fit_residual},
                          {"condition", rec.condition_estimate}};
}

std::vector<std::vector<std::string>> correlation_csv_rows(const CorrelationProfile& prof) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(prof.z_grid.size());
    for (std::size_t i = 0; i < prof.z_grid.size(); ++i)
        rows.push_back({csv_number(prof.z_grid[i]), csv_number(prof.values[i])});
    return rows;
}

std::vector<std::vector<std::string>> resistance_csv_rows(const ResistanceCurve& curve) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(curve.sigmas.size());
    for (std::size_t i = 0; i < curve.sigmas.size(); ++i)
        rows.push_back({csv_number(curve.sigmas[i]), csv_number(curve.resistance[i])});
    return rows;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw InvalidInputError("write_csv: cannot open " + tmp.string());
        out << header << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                out << row[i];
            }
            out << '\n';
        }
        if (!out.good()) {
            std::filesystem::remove(tmp);
            throw InvalidInputError("write_csv: write failed for " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw InvalidInputError("write_text_file: cannot open " + tmp.string());
        out << content;
        if (!out.good()) {
            std::filesystem::remove(tmp);
            throw InvalidInputError("write_text_file: write failed for " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ratchet
