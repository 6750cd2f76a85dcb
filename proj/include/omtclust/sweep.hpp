#pragma once

// Lambda sweeps: load or generate a dataset, solve one relaxation per grid
// value, extract clusters, and write a deterministic JSON report.
//
// Wall-clock times go to a separate timings file so the report itself is
// byte-identical across runs.

#include "omtclust/clustering.hpp"
#include "omtclust/core.hpp"
#include "omtclust/datagen.hpp"
#include "omtclust/facility.hpp"
#include "omtclust/io.hpp"
#include "omtclust/linf.hpp"
#include "omtclust/omt.hpp"
#include "omtclust/son.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace omtclust {

enum class Method { son, lp, linf, exactOmt };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::son: return "son";
    case Method::lp: return "lp";
    case Method::linf: return "linf";
    case Method::exactOmt: return "exact-omt";
  }
  return "unknown";
}

inline Method parse_method(const std::string& name) {
  if (name == "son") return Method::son;
  if (name == "lp") return Method::lp;
  if (name == "linf") return Method::linf;
  if (name == "exact-omt") return Method::exactOmt;
  throw std::invalid_argument("unknown method '" + name + "' (expected son, lp, linf or exact-omt)");
}

inline constexpr const char* kFourClusterDataset = "four-cluster";
inline constexpr const char* kTenClusterDataset = "ten-cluster";

/// A builtin name generates that mixture; anything else is a CSV path.
inline PointCloud load_dataset(const std::string& dataset, std::uint64_t seed, std::size_t samplesPerComponent = 0) {
  if (dataset == kFourClusterDataset)
    return sample_gaussian_mixture(four_cluster_config(samplesPerComponent ? samplesPerComponent : 20, seed));
  if (dataset == kTenClusterDataset)
    return sample_gaussian_mixture(ten_cluster_config(samplesPerComponent ? samplesPerComponent : 10, seed));
  return read_points(std::filesystem::path(dataset));
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw std::invalid_argument("log_grid: need 0 < lo <= hi, count >= 1");
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    grid[k] = std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)));
  }
  grid.back() = hi;
  return grid;
}

struct ExperimentSpec {
  std::string dataset = kFourClusterDataset;
  std::string target;  // exact-omt: second dataset, empty means the dataset itself
  Method method = Method::son;
  std::vector<double> lambdaGrid;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samplesPerComponent = 0;  // builtin datasets; 0 keeps the default
  std::string outputDirectory;          // empty: nothing written
  bool emitSvg = false;
  std::size_t jobs = 1;
  bool facilityWarmStart = false;  // chain LP bases along the grid (forces sequential solves)
  AdmmConfig admm;
  LinfOptions linf;
  FacilityOptions facility;

  void validate() const {
    if (method != Method::exactOmt) {
      if (lambdaGrid.empty()) throw std::invalid_argument("experiment: lambda grid is empty");
      for (double l : lambdaGrid) {
        if (!std::isfinite(l) || l < 0.0) throw std::invalid_argument("experiment: lambda values must be finite and >= 0");
        if (method == Method::linf && l == 0.0) throw std::invalid_argument("experiment: linf needs lambda > 0");
      }
    }
    if (jobs == 0) throw std::invalid_argument("experiment: jobs must be >= 1");
    admm.validate();
    if (!(linf.searchTol > 0.0)) throw std::invalid_argument("experiment: linf search tolerance must be positive");
  }
};

struct SweepEntry {
  double lambda = 0.0;
  SolveReport report;
  ClusteringResult clustering;
  std::optional<double> ari;
  double wallSeconds = 0.0;
  std::string error;  // set when the solve threw

  bool ok() const { return error.empty() && report.status == SolveStatus::optimal; }
};

struct SweepReport {
  ExperimentSpec spec;
  std::size_t pointCount = 0;
  std::vector<SweepEntry> entries;
  std::optional<WassersteinResult> transport;  // exact-omt
  std::string transportError;
  double totalSeconds = 0.0;

  bool allOptimal() const {
    if (spec.method == Method::exactOmt) return transport.has_value();
    for (const auto& e : entries)
      if (!e.ok()) return false;
    return true;
  }
};

/// Solves one relaxation at one lambda and extracts clusters.
inline SweepEntry solve_clustering(const PointCloud& cloud, const CostMatrix& c, const ProbabilityVector& p0,
                                   Method method, double lambda, const ExperimentSpec& spec,
                                   FacilityWarmStart* warm = nullptr) {
  SweepEntry entry;
  entry.lambda = lambda;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::son: {
        auto r = solve_son(c, p0, lambda, spec.admm);
        entry.report = r.report;
        entry.clustering = extract_clusters(r.plan);
        break;
      }
      case Method::lp: {
        auto r = solve_facility_relaxation(c, p0, lambda, spec.facility, warm);
        entry.report = r.report;
        entry.clustering = extract_clusters(r.plan);
        break;
      }
      case Method::linf: {
        auto r = solve_linf(c, p0, lambda, spec.linf);
        entry.report = r.report;
        entry.clustering = extract_clusters(r.plan);
        break;
      }
      case Method::exactOmt:
        throw std::invalid_argument("exact-omt does not produce a clustering");
    }
    if (cloud.hasLabels()) entry.ari = adjusted_rand_index(entry.clustering.assignment, cloud.labels());
  } catch (const std::exception& e) {
    entry.error = e.what();
  }
  entry.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return entry;
}

// ---------------------------------------------------------------------------
// JSON

inline constexpr int kSweepSchemaVersion = 1;

/// Rounds to 12 significant digits; non-finite values become null.
inline nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  const std::string text = format_double(v, 12);
  double rounded = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), rounded);
  return rounded;
}

inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["dataset"] = spec.dataset;
  j["method"] = to_string(spec.method);
  j["seed"] = spec.seed;
  j["samplesPerComponent"] = spec.samplesPerComponent;
  auto grid = nlohmann::json::array();
  for (double l : spec.lambdaGrid) grid.push_back(json_number(l));
  j["lambdaGrid"] = grid;
  if (spec.method == Method::exactOmt) j["target"] = spec.target.empty() ? spec.dataset : spec.target;
  j["solver"] = {
      {"admm",
       {{"rho", json_number(spec.admm.rho)},
        {"epsAbs", json_number(spec.admm.epsAbs)},
        {"epsRel", json_number(spec.admm.epsRel)},
        {"maxIterations", spec.admm.maxIterations},
        {"residualBalancing", spec.admm.residualBalancing}}},
      {"linf", {{"searchTol", json_number(spec.linf.searchTol)}, {"warmStart", spec.linf.warmStart}}},
      {"facility",
       {{"lazyCoupling", spec.facility.lazyCoupling},
        {"initialNeighbors", spec.facility.initialNeighbors},
        {"maxPoints", spec.facility.maxPoints},
        {"warmStartAcrossLambda", spec.facilityWarmStart}}}};
  return j;
}

inline nlohmann::json entry_to_json(const SweepEntry& e) {
  nlohmann::json j;
  j["lambda"] = json_number(e.lambda);
  j["status"] = e.error.empty() ? to_string(e.report.status) : "error";
  j["error"] = e.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(e.error);
  j["objective"] = e.error.empty() ? json_number(e.report.objective) : nlohmann::json(nullptr);
  j["iterations"] = e.report.iterations;
  j["primalResidual"] = json_number(e.report.primalResidual);
  j["dualResidual"] = json_number(e.report.dualResidual);
  j["notes"] = e.report.notes;
  j["clusterCount"] = e.clustering.clusterCount;
  j["representatives"] = e.clustering.representatives;
  j["assignment"] = e.clustering.assignment;
  j["ari"] = e.ari ? json_number(*e.ari) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json sweep_to_json(const SweepReport& report) {
  nlohmann::json j;
  j["schemaVersion"] = kSweepSchemaVersion;
  j["config"] = spec_to_json(report.spec);
  j["pointCount"] = report.pointCount;
  auto results = nlohmann::json::array();
  for (const auto& e : report.entries) results.push_back(entry_to_json(e));
  j["results"] = results;
  if (report.spec.method == Method::exactOmt) {
    j["transport"] = report.transport
                         ? nlohmann::json{{"cost", json_number(report.transport->cost)},
                                          {"metric", json_number(report.transport->metric)},
                                          {"error", nullptr}}
                         : nlohmann::json{{"cost", nullptr}, {"metric", nullptr}, {"error", report.transportError}};
  }
  j["allOptimal"] = report.allOptimal();
  return j;
}

inline nlohmann::json timings_to_json(const SweepReport& report) {
  auto results = nlohmann::json::array();
  for (const auto& e : report.entries) results.push_back({{"lambda", json_number(e.lambda)}, {"wallSeconds", e.wallSeconds}});
  return {{"method", to_string(report.spec.method)}, {"results", results}, {"totalSeconds", report.totalSeconds}};
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::filesystem::path report_path(const ExperimentSpec& spec) {
  return std::filesystem::path(spec.outputDirectory) / (std::string("sweep-") + to_string(spec.method) + ".json");
}

inline std::filesystem::path timings_path(const ExperimentSpec& spec) {
  return std::filesystem::path(spec.outputDirectory) / (std::string("timings-") + to_string(spec.method) + ".json");
}

inline std::filesystem::path svg_path(const ExperimentSpec& spec, std::size_t index) {
  return std::filesystem::path(spec.outputDirectory) /
         (std::string(to_string(spec.method)) + "-lambda-" + std::to_string(index) + ".svg");
}

// ---------------------------------------------------------------------------

inline SweepReport run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  SweepReport report;
  report.spec = spec;
  const PointCloud cloud = load_dataset(spec.dataset, spec.seed, spec.samplesPerComponent);
  report.pointCount = cloud.size();

  if (spec.method == Method::exactOmt) {
    try {
      const PointCloud other =
          spec.target.empty() ? cloud : load_dataset(spec.target, spec.seed, spec.samplesPerComponent);
      report.transport = wasserstein2(cloud, ProbabilityVector::uniform(cloud.size()), other,
                                      ProbabilityVector::uniform(other.size()));
    } catch (const std::exception& e) {
      report.transportError = e.what();
    }
  } else {
    const CostMatrix c = build_cost_matrix(cloud);
    const ProbabilityVector p0 = ProbabilityVector::uniform(cloud.size());
    const auto count = spec.lambdaGrid.size();
    report.entries.resize(count);
    const bool chained = spec.method == Method::lp && spec.facilityWarmStart;
    if (chained || spec.jobs == 1 || count == 1) {
      FacilityWarmStart warm;
      for (std::size_t k = 0; k < count; ++k)
        report.entries[k] = solve_clustering(cloud, c, p0, spec.method, spec.lambdaGrid[k], spec, chained ? &warm : nullptr);
    } else {
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++)
          report.entries[k] = solve_clustering(cloud, c, p0, spec.method, spec.lambdaGrid[k], spec);
      };
      std::vector<std::thread> pool;
      const auto threads = std::min(spec.jobs, count);
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
  }
  report.totalSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!spec.outputDirectory.empty()) {
    write_file_atomic(report_path(spec), dump_json(sweep_to_json(report)));
    write_file_atomic(timings_path(spec), dump_json(timings_to_json(report)));
    if (spec.emitSvg && cloud.dimension() == 2)
      for (std::size_t k = 0; k < report.entries.size(); ++k)
        if (report.entries[k].error.empty()) emit_scatter_svg(cloud, report.entries[k].clustering, svg_path(spec, k));
  }
  return report;
}

}  // namespace omtclust
