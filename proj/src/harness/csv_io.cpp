#include "sossm/harness/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sossm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

ObsSequence load_observations(const std::string& path, const std::vector<Transform>& transforms) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty input file: " + path);
  const std::size_t n_cols = split_csv_line(line).size();
  if (n_cols == 0) throw std::runtime_error("input file has an empty header: " + path);

  ObsSequence rows;
  long row_index = 1;  // header was row 0
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != n_cols)
      throw std::runtime_error(path + ": row " + std::to_string(row_index) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(n_cols));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t pos = 0;
      try {
        row[c] = std::stod(cells[c], &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != cells[c].size())
        throw std::runtime_error(path + ": non-numeric cell at row " + std::to_string(row_index) +
                                 ", column " + std::to_string(c + 1) + ": '" + cells[c] + "'");
    }
    rows.push_back(std::move(row));
    ++row_index;
  }
  if (rows.empty()) throw std::runtime_error("input file has no data rows: " + path);

  for (const auto& tr : transforms) {
    switch (tr.op) {
      case Transform::Op::divide:
        if (tr.value == 0.0) throw std::runtime_error("divide transform: zero divisor");
        for (auto& row : rows)
          for (auto& v : row) v /= tr.value;
        break;
      case Transform::Op::day_start_diff: {
        if (tr.period < 1) throw std::runtime_error("day_start_diff: period must be >= 1");
        if (rows.size() < 2) throw std::runtime_error("day_start_diff: need at least two rows");
        ObsSequence out;
        out.reserve(rows.size() - 1);
        for (std::size_t t = 1; t < rows.size(); ++t) {
          const std::size_t anchor =
              static_cast<std::size_t>(tr.period) * ((t - 1) / static_cast<std::size_t>(tr.period));
          std::vector<double> row(rows[t].size());
          for (std::size_t c = 0; c < row.size(); ++c) row[c] = rows[t][c] - rows[anchor][c];
          out.push_back(std::move(row));
        }
        rows = std::move(out);
        break;
      }
    }
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace sossm
