#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bjj/noise.hpp"
#include "cli/config.hpp"

namespace bjj::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string>;

/// Fixed-column table rendered as CSV (header row, 17 significant digits) or
/// JSON lines (one object per row, keys in column order).
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<Cell>& row(std::size_t i) const { return rows_.at(i); }

  std::string render(Format format) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// %.17g, with nan/inf spelled as such.
std::string format_double(double x);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Long-format dump of an ensemble: trajectory, t, phi.
Table ensemble_table(const TrajectoryEnsemble<double>& ensemble);

}  // namespace bjj::cli
