#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bjj/noise.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

namespace bjj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

struct Gate {
  std::string name;
  bool pass;
  std::string detail;
};

NoiseModel<double> make_noise_model(const RunConfig& config);

/// Columns t, nu_noiseless, nu_noisy, nu_matrix, chi.
struct VisibilityData {
  Table table{{"t", "nu_noiseless", "nu_noisy", "nu_matrix", "chi"}};
  double max_matrix_deviation = 0;  ///< max |nu_matrix - nu_noisy|
  std::vector<Gate> gates;
};
VisibilityData visibility_data(const RunConfig& config);

struct CatRelaxationData {
  Table matrices{{"q", "a", "part", "n", "n_prime", "re", "im", "abs"}};
  Table husimi{{"q", "a", "phi", "Q_d", "Q_full", "Q_approx"}};
  nlohmann::ordered_json summary;
  std::vector<Gate> gates;
};
CatRelaxationData cat_relaxation_data(const RunConfig& config);

/// Columns a, F_Q, dir_x, dir_y, dir_z, gain_db.
struct FisherScanData {
  Table table{{"a", "F_Q", "dir_x", "dir_y", "dir_z", "gain_db"}};
  std::vector<Gate> gates;
};
FisherScanData fisher_scan_data(const RunConfig& config);

struct McValidation {
  nlohmann::ordered_json report;
  std::vector<Gate> gates;
  std::optional<TrajectoryEnsemble<double>> ensemble;
};
McValidation mc_validation(const RunConfig& config, bool keep_ensemble = false);

bool all_pass(const std::vector<Gate>& gates);

/// Runs `config.command`, writes its outputs, returns the exit status.
/// Errors propagate as exceptions; see exit_code_for().
int run_command(const RunConfig& config, std::ostream& log,
                const std::optional<std::filesystem::path>& ensemble_out = std::nullopt);

/// Maps the current exception (inside a catch block) to an exit status and message.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace bjj::cli
