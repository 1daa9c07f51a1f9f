#include "cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bjj::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::logic_error("Table: row width differs from header");
  rows_.push_back(std::move(row));
}

namespace {

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

std::string Table::render(Format format) const {
  std::ostringstream out;
  if (format == Format::csv) {
    for (std::size_t k = 0; k < columns_.size(); ++k) out << (k ? "," : "") << columns_[k];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_cell(row[k]);
      out << '\n';
    }
  } else {
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < row.size(); ++k) obj[columns_[k]] = json_cell(row[k]);
      out << obj.dump() << '\n';
    }
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

Table ensemble_table(const TrajectoryEnsemble<double>& ensemble) {
  Table t({"trajectory", "t", "phi"});
  for (Eigen::Index r = 0; r < ensemble.trajectories(); ++r)
    for (Eigen::Index k = 0; k <= ensemble.steps(); ++k)
      t.add_row({static_cast<long long>(r), ensemble.time(k), ensemble.phases(r, k)});
  return t;
}

}  // namespace bjj::cli
