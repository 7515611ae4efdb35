#pragma once

#include "skewscore/dag.hpp"
#include "skewscore/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace skewscore {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  return os;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace detail

/// Header x1,...,xd then one sample per row, 17 significant digits.
inline void write_data_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& data) {
  auto os = detail::open_out(path);
  for (Eigen::Index j = 0; j < data.cols(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
  os << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) os << (j ? "," : "") << format_double(data(i, j));
    os << '\n';
  }
  if (!os) throw DataError("write failed for '" + path.string() + "'");
}

inline DataMatrix read_data_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line)) throw DataError("'" + path.string() + "' is empty");
  detail::strip_cr(line);
  const std::size_t d = detail::split(line, ',').size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != d)
      throw DataError("'" + path.string() + "' row " + std::to_string(rows + 2) + " has " +
                      std::to_string(cells.size()) + " fields, expected " + std::to_string(d));
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size())
        throw DataError("'" + path.string() + "' row " + std::to_string(rows + 2) + ": cannot parse '" + c + "'");
      if (!std::isfinite(v)) throw DataError("'" + path.string() + "' contains a non-finite value");
      values.push_back(v);
    }
    ++rows;
  }
  DataMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * d + c];
  return out;
}

inline void write_adjacency_csv(const std::filesystem::path& path, const Dag& g) {
  auto os = detail::open_out(path);
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) os << (j ? "," : "") << (g.has_edge(i, j) ? 1 : 0);
    os << '\n';
  }
}

inline Dag read_adjacency_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(is, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    std::vector<int> row;
    for (const auto& c : detail::split(line, ',')) {
      if (c != "0" && c != "1") throw DataError("'" + path.string() + "': adjacency entries must be 0 or 1");
      row.push_back(c == "1");
    }
    rows.push_back(std::move(row));
  }
  const auto d = static_cast<Eigen::Index>(rows.size());
  Dag::Adjacency adj(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
      throw DataError("'" + path.string() + "': adjacency is not square");
    for (Eigen::Index j = 0; j < d; ++j) adj(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return Dag::from_adjacency(adj);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = detail::open_out(path);
  os << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = detail::open_out(path);
  os << text;
}

}  // namespace skewscore
