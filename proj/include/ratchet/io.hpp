#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratchet/potential.hpp"
#include "ratchet/response.hpp"
#include "ratchet/steady.hpp"

namespace ratchet {

/// {"cos": [...], "sin": [...]}; coefficient of harmonic k sits at index k-1.
nlohmann::json potential_to_json(const PeriodicPotential& p);
PeriodicPotential potential_from_json(const nlohmann::json& j);

/// {sigma, v, current, kappa, beta_reduced, n, rho: [...]}. beta_reduced is
/// the ansatz constant in the reduced-current convention J = I / sigma.
nlohmann::json steady_state_to_json(const SteadyState& ss);
SteadyState steady_state_from_json(const nlohmann::json& j);

/// {c: [...], M_even: [...], residual, condition}.
nlohmann::json moment_recovery_to_json(const MomentRecovery& rec);

/// Rows for the z,F correlation-profile CSV.
std::vector<std::vector<std::string>> correlation_csv_rows(const CorrelationProfile& prof);

/// Rows for the sigma,R resistance-curve CSV.
std::vector<std::vector<std::string>> resistance_csv_rows(const ResistanceCurve& curve);

/// One CSV cell with 12 significant digits (plot-grade).
std::string csv_number(double v);

/// Write rows of preformatted cells under a header line. The file is written
/// to a temporary name and renamed into place so failures leave no partial
/// output behind.
void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ratchet
