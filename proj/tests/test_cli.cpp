#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

using namespace bjj;
using namespace bjj::cli;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bjj_test_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double cell(const Table& t, std::size_t row, std::size_t col) { return std::get<double>(t.row(row).at(col)); }

int run_binary(const std::string& args) {
  const char* exe = std::getenv("BJJSIM");
  if (!exe) return -1;
  const int status = std::system((std::string(exe) + " " + args + " 2>/dev/null >/dev/null").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("default configurations carry the reference parameters") {
  const auto vis = default_config("visibility");
  CHECK(vis.N == 400);
  REQUIRE(vis.chi.size() == 3);
  CHECK(vis.chi[0] == doctest::Approx(pi * 0.05));
  CHECK(vis.chi[2] == doctest::Approx(pi * 0.25));
  CHECK(vis.noise.kind == "gaussian-quasistatic");
  CHECK(vis.noise.h0 == 64);

  const auto cat = default_config("cat-relaxation");
  CHECK(cat.N == 10);
  CHECK(cat.q == 2);
  CHECK(cat.a_values == std::vector<double>{0, 0.9, 2.9});

  const auto mc = default_config("mc-validate");
  CHECK(mc.mc.M == 20000);
  CHECK(mc.mc.dt == doctest::Approx(mc.noise.Tc / 50));
  CHECK_THROWS_AS(default_config("plot"), ConfigError);
}

TEST_CASE("config round-trips through serialization") {
  for (const auto& name : command_names()) {
    auto c = default_config(name);
    c.mc.seed = 0xfedcba9876543210ull;
    c.lambda_bar = 0.1 + 0.2;  // not exactly representable in short decimal
    c.output.format = Format::json_lines;
    CHECK(parse(serialize(c), name) == c);
  }
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(parse(R"({"command": "visibility", "N": 10, "nope": 1})", "visibility"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"command": "visibility", "noise": {"colour": "pink"}})", "visibility"), ConfigError);
  CHECK_THROWS_AS(parse("{not json", "visibility"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"command": "fisher-scan"})", "visibility"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"command": "visibility", "N": "ten"})", "visibility"), ConfigError);

  const auto c = parse(R"({"command": "visibility", "chi": 0.5, "noise": {"kind": "gaussian-white", "D": 0.2}})",
                       "visibility");
  CHECK(c.chi == std::vector<double>{0.5});
  CHECK(c.noise.kind == "gaussian-white");
  CHECK(c.N == 400);  // unspecified fields keep the command defaults
}

TEST_CASE("validate rejects out-of-range values") {
  auto c = default_config("cat-relaxation");
  CHECK_NOTHROW(validate(c));
  auto bad = c;
  bad.N = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.chi = {std::nan("")};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.a_values = {-1};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.noise.kind = "gaussian-custom";
  CHECK_THROWS(make_noise_model(bad));
}

TEST_CASE("table rendering") {
  Table t({"a", "b", "c"});
  t.add_row({1.5, 2LL, std::string("x")});
  t.add_row({std::nan(""), -3LL, std::string("y")});
  CHECK(t.render(Format::csv) == "a,b,c\n1.5,2,x\nnan,-3,y\n");
  CHECK(t.render(Format::json_lines) == "{\"a\":1.5,\"b\":2,\"c\":\"x\"}\n{\"a\":null,\"b\":-3,\"c\":\"y\"}\n");
  CHECK_THROWS(t.add_row({1.0}));
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("write_file_atomic reports unwritable paths") {
  CHECK_THROWS_AS(write_file_atomic("/nonexistent_dir_bjj/x.csv", "x"), IoError);
  const auto p = scratch("atomic.txt");
  write_file_atomic(p, "hello\n");
  CHECK(slurp(p) == "hello\n");
}

TEST_CASE("visibility command") {
  auto c = default_config("visibility");
  c.time = {0, 0.3, 7};
  const auto data = visibility_data(c);
  CHECK(data.table.rows() == 21);
  CHECK(all_pass(data.gates));
  for (std::size_t r : {0u, 7u, 14u})
    for (std::size_t col = 1; col <= 3; ++col) CHECK(std::abs(cell(data.table, r, col) - 1) < 1e-12);
  for (std::size_t r = 0; r < data.table.rows(); ++r)
    CHECK(std::abs(cell(data.table, r, 3) - cell(data.table, r, 2)) < 1e-10);
}

TEST_CASE("cat-relaxation command") {
  const auto c = default_config("cat-relaxation");
  const auto data = cat_relaxation_data(c);
  CHECK(all_pass(data.gates));
  const auto& pairs = data.summary["markov_pairs"];
  REQUIRE(pairs.size() == 3);
  CHECK(std::abs(pairs[1]["a_companion"].get<double>() - 0.64) < 0.01);
  CHECK(std::abs(pairs[2]["a_companion"].get<double>() - 2.05) < 0.01);
  // 2 values of q x 3 amplitudes x 2 parts x 11^2 entries; 360 phi points per (q, a)
  CHECK(data.matrices.rows() == 2 * 3 * 2 * 121);
  CHECK(data.husimi.rows() == 2 * 3 * 360);

  const auto& entries = data.summary["entries"];
  CHECK(entries[0]["F_Q"].get<double>() == doctest::Approx(100).epsilon(1e-10));
  CHECK(std::isnan(cell(data.husimi, 0, 5)));  // a = 0
  CHECK(std::isfinite(cell(data.husimi, 360, 5)));
}

TEST_CASE("fisher-scan command") {
  auto c = default_config("fisher-scan");
  c.a_values = {0, 0.9, 10};
  const auto data = fisher_scan_data(c);
  CHECK(all_pass(data.gates));
  CHECK(std::abs(cell(data.table, 0, 1) - 100) < 1e-8);
  CHECK(cell(data.table, 0, 2) == doctest::Approx(1));
  CHECK(std::abs(cell(data.table, 0, 5) + 5) < 1e-10);
  CHECK(std::abs(cell(data.table, 1, 5) + 3.8) < 0.1);
  CHECK(cell(data.table, 2, 1) < 10);
}

TEST_CASE("mc-validate command") {
  SUBCASE("default OU run passes") {
    auto c = default_config("mc-validate");
    c.mc.M = 4000;
    const auto v = mc_validation(c);
    CHECK(all_pass(v.gates));
    CHECK(v.report["bound"].get<double>() == doctest::Approx(5 / std::sqrt(4000.0)));
  }
  SUBCASE("degenerate ensemble reproduces the noiseless state") {
    auto c = default_config("mc-validate");
    c.noise = {"gaussian-quasistatic", 0, 1, 0};
    c.lambda_bar = 0;
    c.mc.M = 3;
    const auto v = mc_validation(c);
    for (const auto& row : v.report["times"]) CHECK(row["max_deviation"].get<double>() < 1e-14);
  }
  SUBCASE("time grid off the sampling grid") {
    auto c = default_config("mc-validate");
    c.mc.M = 10;
    c.time = {0.2, 0.9, 4};  // 0.4333 is not a multiple of dt
    CHECK_THROWS_AS(mc_validation(c), DomainError);
  }
  SUBCASE("same seed gives the same report for any thread count") {
    auto c = default_config("mc-validate");
    c.mc.M = 2000;
    c.threads = 1;
    const auto a = mc_validation(c).report;
    c.threads = 3;
    CHECK(mc_validation(c).report == a);
  }
}

TEST_CASE("run_command writes the declared files") {
  auto c = default_config("cat-relaxation");
  c.output.path = scratch("cat").string();
  c.output.format = Format::json_lines;
  std::ostringstream log;
  CHECK(run_command(c, log) == kExitOk);
  CHECK(fs::exists(fs::path(c.output.path) / "matrices.jsonl"));
  CHECK(fs::exists(fs::path(c.output.path) / "husimi.jsonl"));
  const auto summary = nlohmann::json::parse(slurp(fs::path(c.output.path) / "summary.json"));
  CHECK(summary.contains("gates"));
  CHECK(log.str().find("warning") != std::string::npos);  // N = 10 is below the large-N regime
}

TEST_CASE("bjjsim exit codes") {
  if (!std::getenv("BJJSIM")) {
    MESSAGE("BJJSIM not set; skipping binary checks");
    return;
  }
  const auto out = scratch("fisher.csv");
  CHECK(run_binary("fisher-scan --out " + out.string()) == kExitOk);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("a,F_Q,dir_x,dir_y,dir_z,gain_db\n", 0) == 0);

  CHECK(run_binary("visibility --out /nonexistent_dir_bjj/v.csv") == kExitIo);
  CHECK(run_binary("visibility --format xml") == kExitConfig);
  CHECK(run_binary("no-such-command") == kExitConfig);

  const auto cfg = scratch("bad.json");
  std::ofstream(cfg) << R"({"command": "cat-relaxation", "q": 3, "output": {"path": ")" << scratch("c3").string()
                     << R"("}})";
  CHECK(run_binary("cat-relaxation --config " + cfg.string()) == kExitConfig);

  // --print-config output parses back to the same configuration
  const auto printed = scratch("printed.json");
  [[maybe_unused]] const int rc = std::system((std::string(std::getenv("BJJSIM")) + " visibility --seed 9 --print-config > " + printed.string()).c_str());
  auto expected = default_config("visibility");
  expected.mc.seed = 9;
  CHECK(parse(slurp(printed), "visibility") == expected);
}
