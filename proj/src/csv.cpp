#include "emi/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace emi::csv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r') {
    cells.back().pop_back();
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
    throw CsvParseError("cell '" + cell + "' at row " + std::to_string(row) +
                            ", column " + std::to_string(col) +
                            " is not a finite number",
                        row, col);
  }
  return value;
}

namespace {

std::vector<std::vector<double>> read_table(const std::string& path,
                                            std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvParseError("file " + path + " has no header row", 1, 1);
  }
  header = split_line(line);
  if (header.empty() || header.front().empty()) {
    throw CsvParseError("empty header in " + path, 1, 1);
  }
  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw CsvParseError("row " + std::to_string(row_no) + " has " +
                              std::to_string(cells.size()) +
                              " cells, expected " +
                              std::to_string(header.size()),
                          row_no, 1);
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      values[c] = parse_cell(cells[c], row_no, c + 1);
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

}  // namespace

Dataset read_dataset(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  if (header.size() < 2) {
    throw CsvParseError("dataset needs a y column and at least one covariate",
                        1, 1);
  }
  if (header.front() != "y") {
    throw CsvParseError("first dataset column must be named 'y', got '" +
                            header.front() + "'",
                        1, 1);
  }
  Dataset out;
  out.covariate_names.assign(header.begin() + 1, header.end());
  out.observations.reserve(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 1;
  for (const auto& row : rows) {
    Observation obs;
    obs.y = row.front();
    obs.x = Eigen::Map<const Eigen::VectorXd>(row.data() + 1, p);
    out.observations.push_back(std::move(obs));
  }
  return out;
}

CovariateTable read_covariates(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  CovariateTable out;
  out.names = header;
  out.rows.reserve(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(header.size());
  for (const auto& row : rows) {
    out.rows.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data(), p));
  }
  return out;
}

}  // namespace emi::csv
