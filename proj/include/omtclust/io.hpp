#pragma once

// Point-cloud CSV, scatter-plot SVG, and atomic file output.
//
// CSV header: x0,x1,...,x{d-1} with an optional trailing "label" column.
// Coordinates are written with 17 significant digits and round-trip exactly.

#include "omtclust/clustering.hpp"
#include "omtclust/core.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace omtclust {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = {})
      : std::runtime_error((source.empty() ? "" : source + ": ") + "line " + std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Locale-independent rendering with a fixed number of significant digits.
inline std::string format_double(double value, int significantDigits = 17) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general,
                                 significantDigits);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& cell : cells) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  }
  return cells;
}

template <class T>
T parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  T value{};
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && cell.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (cell.empty() || res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, "column " + std::to_string(column + 1) + ": cannot parse '" + std::string(cell) + "'");
  return value;
}

}  // namespace detail

inline PointCloud read_points(std::istream& in) {
  std::string text;
  std::size_t lineNo = 0;
  std::size_t dim = 0;
  bool hasLabel = false;
  bool headerSeen = false;
  std::vector<Eigen::VectorXd> points;
  std::vector<int> labels;

  while (std::getline(in, text)) {
    ++lineNo;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(text);
    if (!headerSeen) {
      headerSeen = true;
      hasLabel = cells.back() == "label";
      dim = cells.size() - (hasLabel ? 1 : 0);
      if (dim == 0) throw ParseError(lineNo, "header has no coordinate columns");
      for (std::size_t k = 0; k < dim; ++k)
        if (cells[k] != "x" + std::to_string(k))
          throw ParseError(lineNo, "expected header column 'x" + std::to_string(k) + "', found '" +
                                       std::string(cells[k]) + "'");
      continue;
    }
    const std::size_t expected = dim + (hasLabel ? 1 : 0);
    if (cells.size() != expected)
      throw ParseError(lineNo, "expected " + std::to_string(expected) + " cells, found " + std::to_string(cells.size()));
    Eigen::VectorXd p(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      p[static_cast<Eigen::Index>(k)] = detail::parse_cell<double>(cells[k], lineNo, k);
      if (!std::isfinite(p[static_cast<Eigen::Index>(k)]))
        throw ParseError(lineNo, "column " + std::to_string(k + 1) + ": non-finite coordinate");
    }
    if (hasLabel) labels.push_back(detail::parse_cell<int>(cells[dim], lineNo, dim));
    points.push_back(std::move(p));
  }
  if (!headerSeen) throw ParseError(lineNo, "empty input: missing header");
  if (points.empty()) throw ParseError(lineNo, "no data rows");
  return PointCloud(std::move(points), std::move(labels));
}

inline PointCloud read_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  try {
    return read_points(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

inline void write_points(std::ostream& out, const PointCloud& cloud) {
  const auto d = cloud.dimension();
  for (Eigen::Index k = 0; k < d; ++k) out << (k ? "," : "") << 'x' << k;
  if (cloud.hasLabels()) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out << (k ? "," : "") << format_double(cloud[i][k]);
    if (cloud.hasLabels()) out << ',' << cloud.labels()[i];
    out << '\n';
  }
}

inline std::string points_to_csv(const PointCloud& cloud) {
  std::ostringstream os;
  write_points(os, cloud);
  return os.str();
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

inline void write_points(const std::filesystem::path& path, const PointCloud& cloud) {
  write_file_atomic(path, points_to_csv(cloud));
}

// ---------------------------------------------------------------------------
// SVG scatter plot

inline constexpr std::array<const char*, 12> kClusterPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

struct SvgStyle {
  double size = 600.0;
  double margin = 30.0;
  double markerRadius = 4.0;
  double crossHalfWidth = 7.0;
};

/// Cluster k (k-th smallest representative) gets palette colour k mod 12 and
/// marker shape circle/square/triangle by k / 12 mod 3.
inline std::string render_scatter_svg(const PointCloud& cloud, const ClusteringResult& result,
                                      const SvgStyle& style = {}) {
  if (cloud.dimension() != 2)
    throw std::invalid_argument("scatter SVG needs 2-D points (got d = " + std::to_string(cloud.dimension()) +
                                "); project the data to two coordinates first");
  if (result.assignment.size() != cloud.size())
    throw std::invalid_argument("scatter SVG: clustering and point cloud differ in size");

  std::map<int, std::size_t> clusterId;
  for (int rep : result.representatives) clusterId.emplace(rep, clusterId.size());
  for (int a : result.assignment)
    if (!clusterId.count(a)) throw std::invalid_argument("scatter SVG: assignment target is not a representative");

  Eigen::Vector2d lo(cloud[0][0], cloud[0][1]);
  Eigen::Vector2d hi = lo;
  for (const auto& p : cloud.points()) {
    lo = lo.cwiseMin(p.head<2>());
    hi = hi.cwiseMax(p.head<2>());
  }
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double scale = (style.size - 2.0 * style.margin) / span;
  const Eigen::Vector2d centre = 0.5 * (lo + hi);
  auto fmt = [](double v) { return format_double(v, 6); };
  auto sx = [&](double x) { return style.size / 2.0 + (x - centre.x()) * scale; };
  auto sy = [&](double y) { return style.size / 2.0 - (y - centre.y()) * scale; };

  std::ostringstream os;
  const std::string size = fmt(style.size);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<g class=\"points\">\n";
  const double r = style.markerRadius;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::size_t k = clusterId.at(result.assignment[i]);
    const char* colour = kClusterPalette[k % kClusterPalette.size()];
    const std::size_t shape = (k / kClusterPalette.size()) % 3;
    const double cx = sx(cloud[i][0]);
    const double cy = sy(cloud[i][1]);
    os << "<g class=\"point cluster-" << k << "\" fill=\"" << colour << "\">";
    if (shape == 0) {
      os << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r) << "\"/>";
    } else if (shape == 1) {
      os << "<rect x=\"" << fmt(cx - r) << "\" y=\"" << fmt(cy - r) << "\" width=\""
         << fmt(2 * r) << "\" height=\"" << fmt(2 * r) << "\"/>";
    } else {
      os << "<polygon points=\"" << fmt(cx) << ',' << fmt(cy - r) << ' ' << fmt(cx - r) << ',' << fmt(cy + r) << ' '
         << fmt(cx + r) << ',' << fmt(cy + r) << "\"/>";
    }
    os << "</g>\n";
  }
  os << "</g>\n<g class=\"representatives\" stroke=\"black\" stroke-width=\"2\">\n";
  const double w = style.crossHalfWidth;
  for (int rep : result.representatives) {
    const double cx = sx(cloud[static_cast<std::size_t>(rep)][0]);
    const double cy = sy(cloud[static_cast<std::size_t>(rep)][1]);
    os << "<g class=\"representative\" data-index=\"" << rep << "\">"
       << "<line x1=\"" << fmt(cx - w) << "\" y1=\"" << fmt(cy - w) << "\" x2=\"" << fmt(cx + w) << "\" y2=\""
       << fmt(cy + w) << "\"/>"
       << "<line x1=\"" << fmt(cx - w) << "\" y1=\"" << fmt(cy + w) << "\" x2=\"" << fmt(cx + w) << "\" y2=\""
       << fmt(cy - w) << "\"/></g>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

inline void emit_scatter_svg(const PointCloud& cloud, const ClusteringResult& result,
                             const std::filesystem::path& path, const SvgStyle& style = {}) {
  write_file_atomic(path, render_scatter_svg(cloud, result, style));
}

}  // namespace omtclust
