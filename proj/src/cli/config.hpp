#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace bjj::cli {

enum class Format { csv, json_lines };

std::string to_string(Format f);
Format format_from_string(const std::string& name);

struct NoiseConfig {
  std::string kind = "gaussian-ou";  ///< gaussian-ou | gaussian-white | gaussian-quasistatic
  double h0 = 0;                     ///< rad^2/s^2
  double Tc = 1;                     ///< s
  double D = 0;                      ///< rad^2/s

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

/// Uniform grid start + k (stop - start)/(count - 1), k < count.
struct TimeGrid {
  double start = 0;
  double stop = 0;
  int count = 1;

  std::vector<double> points() const;
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct MonteCarloConfig {
  long long M = 20000;
  double dt = 0.004;
  std::uint64_t seed = 1;

  friend bool operator==(const MonteCarloConfig&, const MonteCarloConfig&) = default;
};

struct OutputConfig {
  std::string path;
  Format format = Format::csv;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// Everything one command needs. Frequencies are angular (rad/s); values quoted
/// such as "chi = pi 0.05 Hz" are entered as the number pi * 0.05.
struct RunConfig {
  std::string command;
  int N = 10;
  std::vector<double> chi{1.0};
  double lambda_bar = 0;
  NoiseConfig noise;
  int q = 2;
  TimeGrid time;
  std::vector<double> a_values;  ///< noise amplitudes a_q = a(t_q)
  MonteCarloConfig mc;
  OutputConfig output;
  unsigned threads = 0;  ///< 0: hardware concurrency

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"visibility", "cat-relaxation", "fisher-scan",
                                              "mc-validate"};
  return names;
}

/// Defaults for a command (the reference experiment parameters where there are any).
RunConfig default_config(const std::string& command);

/// Throws ConfigError on non-finite or out-of-range values.
void validate(const RunConfig& config);

void to_json(nlohmann::json& j, const RunConfig& c);
/// Fields absent from `j` keep the values already in `c`.
void merge_from_json(const nlohmann::json& j, RunConfig& c);

std::string serialize(const RunConfig& c);
RunConfig parse(const std::string& text, const std::string& command = {});
RunConfig load_config(const std::string& path, const std::string& command);

}  // namespace bjj::cli
