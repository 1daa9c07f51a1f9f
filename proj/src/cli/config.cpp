#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "bjj/errors.hpp"
#include "bjj/noise.hpp"

namespace bjj::cli {

using nlohmann::json;

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json-lines"; }

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json-lines") return Format::json_lines;
  throw ConfigError("unknown output format '" + name + "' (expected csv or json-lines)");
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    t[k] = count == 1 ? start : start + (stop - start) * k / (count - 1);
  return t;
}

RunConfig default_config(const std::string& command) {
  constexpr double pi = std::numbers::pi;
  RunConfig c;
  c.command = command;
  if (command == "visibility") {
    c.N = 400;
    c.chi = {pi * 0.05, pi * 0.13, pi * 0.25};
    c.noise = {"gaussian-quasistatic", 64.0, 1.0, 0.0};  // h(0)^{1/2} = 8 rad/s
    c.time = {0.0, 0.5, 101};
    c.output.path = "visibility.csv";
  } else if (command == "cat-relaxation") {
    c.N = 10;
    c.q = 2;
    c.a_values = {0.0, 0.9, 2.9};
    c.output.path = "cat_relaxation";
  } else if (command == "fisher-scan") {
    c.N = 10;
    c.q = 2;
    for (int i = 0; i <= 30; ++i) c.a_values.push_back(0.1 * i);
    c.a_values.push_back(10.0);
    c.output.path = "fisher_scan.csv";
  } else if (command == "mc-validate") {
    c.N = 10;
    c.lambda_bar = 0.5;
    c.noise = {"gaussian-ou", 1.0, 0.2, 0.0};
    c.time = {0.2, 1.0, 5};
    c.mc = {20000, 0.004, 1};
    c.output.path = "mc_report.json";
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return c;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void validate(const RunConfig& c) {
  require(std::find(command_names().begin(), command_names().end(), c.command) != command_names().end(),
          "unknown command '" + c.command + "'");
  require(c.N >= 1 && c.N <= 4000, "N must lie in [1, 4000]");
  require(!c.chi.empty(), "chi list is empty");
  for (double x : c.chi) require(finite(x) && x > 0, "chi must be finite and > 0");
  require(finite(c.lambda_bar), "lambda_bar must be finite");
  const NoiseKind kind = noise_kind_from_string(c.noise.kind);
  require(kind != NoiseKind::gaussian_custom, "gaussian-custom noise cannot be configured from a file");
  require(finite(c.noise.h0) && c.noise.h0 >= 0, "noise.h0 must be finite and >= 0");
  require(finite(c.noise.Tc) && c.noise.Tc > 0, "noise.Tc must be finite and > 0");
  require(finite(c.noise.D) && c.noise.D >= 0, "noise.D must be finite and >= 0");
  require(c.q >= 1 && c.q <= 64, "q must lie in [1, 64]");
  require(finite(c.time.start) && finite(c.time.stop) && c.time.start >= 0 && c.time.stop >= c.time.start,
          "time grid needs 0 <= start <= stop");
  require(c.time.count >= 1 && c.time.count <= 1000000, "time.count must lie in [1, 1e6]");
  for (double a : c.a_values) require(finite(a) && a >= 0, "a_values must be finite and >= 0");
  require(c.mc.M >= 1 && c.mc.M <= 100000000, "mc.M must lie in [1, 1e8]");
  require(finite(c.mc.dt) && c.mc.dt > 0, "mc.dt must be finite and > 0");
  require(c.threads <= 1024, "threads must be <= 1024");
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"command", c.command},
           {"N", c.N},
           {"chi", c.chi},
           {"lambda_bar", c.lambda_bar},
           {"noise", {{"kind", c.noise.kind}, {"h0", c.noise.h0}, {"Tc", c.noise.Tc}, {"D", c.noise.D}}},
           {"q", c.q},
           {"time", {{"start", c.time.start}, {"stop", c.time.stop}, {"count", c.time.count}}},
           {"a_values", c.a_values},
           {"mc", {{"M", c.mc.M}, {"dt", c.mc.dt}, {"seed", c.mc.seed}}},
           {"output", {{"path", c.output.path}, {"format", to_string(c.output.format)}}},
           {"threads", c.threads}};
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError("config: unknown key '" + where + item.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void merge_from_json(const json& j, RunConfig& c) {
  try {
    check_keys(j, {"command", "N", "chi", "lambda_bar", "noise", "q", "time", "a_values", "mc", "output", "threads"},
               "");
    read(j, "command", c.command);
    read(j, "N", c.N);
    if (j.contains("chi")) {
      const auto& chi = j.at("chi");
      c.chi = chi.is_array() ? chi.get<std::vector<double>>() : std::vector<double>{chi.get<double>()};
    }
    read(j, "lambda_bar", c.lambda_bar);
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      check_keys(n, {"kind", "h0", "Tc", "D"}, "noise.");
      read(n, "kind", c.noise.kind);
      read(n, "h0", c.noise.h0);
      read(n, "Tc", c.noise.Tc);
      read(n, "D", c.noise.D);
    }
    read(j, "q", c.q);
    if (j.contains("time")) {
      const auto& t = j.at("time");
      check_keys(t, {"start", "stop", "count"}, "time.");
      read(t, "start", c.time.start);
      read(t, "stop", c.time.stop);
      read(t, "count", c.time.count);
    }
    read(j, "a_values", c.a_values);
    if (j.contains("mc")) {
      const auto& m = j.at("mc");
      check_keys(m, {"M", "dt", "seed"}, "mc.");
      read(m, "M", c.mc.M);
      read(m, "dt", c.mc.dt);
      read(m, "seed", c.mc.seed);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      check_keys(o, {"path", "format"}, "output.");
      read(o, "path", c.output.path);
      if (o.contains("format")) c.output.format = format_from_string(o.at("format").get<std::string>());
    }
    read(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string serialize(const RunConfig& c) {
  json j;
  to_json(j, c);
  return j.dump(2) + "\n";
}

RunConfig parse(const std::string& text, const std::string& command) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  std::string name = command;
  if (j.is_object() && j.contains("command") && j.at("command").is_string()) {
    const auto stated = j.at("command").get<std::string>();
    if (!name.empty() && stated != name)
      throw ConfigError("config is for command '" + stated + "', not '" + name + "'");
    name = stated;
  }
  if (name.empty()) throw ConfigError("config does not name a command");
  RunConfig c = default_config(name);
  merge_from_json(j, c);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), command);
}

}  // namespace bjj::cli
