// omtclust command-line interface.
//
// Exit status: 0 when every requested solve reached optimal/converged status,
// 1 when some solve did not, 2 on usage or input errors.

#include "omtclust/sweep.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace omtclust;

constexpr int kExitNotOptimal = 1;
constexpr int kExitUsage = 2;

std::string default_out_dir() {
  const char* env = std::getenv("OMTCLUST_OUT_DIR");
  return env && *env ? env : "omtclust-out";
}

struct CommonOptions {
  std::string data = kFourClusterDataset;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 0;
  std::string out;
};

struct SolverOptions {
  std::string method = "son";
  double rho = 1.0;
  std::size_t maxIterations = 10000;
  double searchTol = 1e-5;
  bool svg = false;
  bool warmStart = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--data", o.data, "builtin dataset (four-cluster, ten-cluster) or CSV path")->capture_default_str();
  cmd->add_option("--seed", o.seed, "generator seed for builtin datasets")->capture_default_str();
  cmd->add_option("--samples", o.samples, "points per mixture component for builtin datasets (0: default)");
}

void add_solver(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--method", s.method, "son, lp or linf")
      ->check(CLI::IsMember({"son", "lp", "linf"}))
      ->capture_default_str();
  cmd->add_option("--rho", s.rho, "ADMM penalty (natural-scale units)")->capture_default_str();
  cmd->add_option("--max-iterations", s.maxIterations, "ADMM iteration cap")->capture_default_str();
  cmd->add_option("--search-tol", s.searchTol, "golden-section tolerance for linf")->capture_default_str();
  cmd->add_flag("--svg", s.svg, "also write one scatter SVG per lambda");
  cmd->add_flag("--warm-start", s.warmStart, "lp: reuse coupling rows and basis along the grid");
}

ExperimentSpec make_spec(const CommonOptions& c, const SolverOptions& s) {
  ExperimentSpec spec;
  spec.dataset = c.data;
  spec.seed = c.seed;
  spec.samplesPerComponent = c.samples;
  spec.outputDirectory = c.out.empty() ? default_out_dir() : c.out;
  spec.method = parse_method(s.method);
  spec.admm.rho = s.rho;
  spec.admm.maxIterations = s.maxIterations;
  spec.linf.searchTol = s.searchTol;
  spec.emitSvg = s.svg;
  spec.facilityWarmStart = s.warmStart;
  return spec;
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:count" is a log grid; otherwise a comma-separated list.
  std::vector<std::string> parts;
  std::stringstream ss(text);
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  auto number = [&](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw std::invalid_argument("bad lambda value '" + s + "'");
    return v;
  };
  if (sep == ':') {
    if (parts.size() != 3) throw std::invalid_argument("log grid must be lo:hi:count");
    return log_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(number(parts[2])));
  }
  std::vector<double> grid;
  for (const auto& p : parts) grid.push_back(number(p));
  return grid;
}

void print_summary(const SweepReport& report) {
  for (const auto& e : report.entries) {
    std::cout << "lambda " << format_double(e.lambda, 6) << "  ";
    if (!e.error.empty()) {
      std::cout << "error: " << e.error << '\n';
      continue;
    }
    std::cout << "clusters " << e.clustering.clusterCount << "  objective " << format_double(e.report.objective, 8)
              << "  status " << to_string(e.report.status);
    if (e.ari) std::cout << "  ARI " << format_double(*e.ari, 4);
    std::cout << '\n';
  }
}

int finish_sweep(const SweepReport& report) {
  print_summary(report);
  std::cout << "report: " << report_path(report.spec).string() << '\n';
  return report.allOptimal() ? 0 : kExitNotOptimal;
}

ClusteringResult clustering_from_report(const nlohmann::json& report, std::size_t index) {
  const auto& results = report.at("results");
  if (index >= results.size())
    throw std::invalid_argument("report has " + std::to_string(results.size()) + " results; index " +
                                std::to_string(index) + " is out of range");
  const auto& entry = results.at(index);
  if (!entry.at("error").is_null()) throw std::invalid_argument("selected result has no clustering (solve failed)");
  ClusteringResult r;
  r.assignment = entry.at("assignment").get<std::vector<int>>();
  r.representatives = entry.at("representatives").get<std::vector<int>>();
  r.clusterCount = r.representatives.size();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-support transport relaxations for clustering"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample a builtin Gaussian mixture to CSV");
  std::string genConfig = kFourClusterDataset;
  std::uint64_t genSeed = kDefaultSeed;
  std::size_t genSamples = 0;
  std::string genOut;
  gen->add_option("--config", genConfig, "four-cluster or ten-cluster")
      ->check(CLI::IsMember({kFourClusterDataset, kTenClusterDataset}))
      ->capture_default_str();
  gen->add_option("--seed", genSeed, "generator seed")->capture_default_str();
  gen->add_option("--samples", genSamples, "points per component (0: default)");
  gen->add_option("--out", genOut, "output CSV (default: <out dir>/<config>.csv)");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "solve one relaxation at one lambda");
  CommonOptions clusterCommon;
  SolverOptions clusterSolver;
  double clusterLambda = 0.0;
  add_common(cluster, clusterCommon);
  add_solver(cluster, clusterSolver);
  cluster->add_option("--lambda", clusterLambda, "penalty weight")->required();
  cluster->add_option("--out", clusterCommon.out, "output directory (default: $OMTCLUST_OUT_DIR or ./omtclust-out)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "solve over a lambda grid");
  CommonOptions sweepCommon;
  SolverOptions sweepSolver;
  std::string sweepGrid = "1:2000:30";
  std::size_t jobs = 1;
  add_common(sweep, sweepCommon);
  add_solver(sweep, sweepSolver);
  sweep->add_option("--lambdas", sweepGrid, "comma list, or lo:hi:count for a log grid")->capture_default_str();
  sweep->add_option("--jobs", jobs, "concurrent solves")->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--out", sweepCommon.out, "output directory (default: $OMTCLUST_OUT_DIR or ./omtclust-out)");

  // plot
  auto* plot = app.add_subcommand("plot", "scatter SVG of one clustering from a report");
  CommonOptions plotCommon;
  std::string plotReport;
  std::size_t plotIndex = 0;
  std::string plotOut;
  add_common(plot, plotCommon);
  plot->add_option("--report", plotReport, "sweep or cluster report JSON")->required();
  plot->add_option("--index", plotIndex, "result index within the report")->capture_default_str();
  plot->add_option("--out", plotOut, "output SVG (default: <out dir>/plot.svg)");

  // omt
  auto* omt = app.add_subcommand("omt", "2-Wasserstein distance between two point sets (uniform weights)");
  CommonOptions omtCommon;
  std::string omtTarget;
  add_common(omt, omtCommon);
  omt->add_option("--target", omtTarget, "second dataset (default: --data itself)");
  omt->add_option("--out", omtCommon.out, "output directory (default: $OMTCLUST_OUT_DIR or ./omtclust-out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const auto cloud = load_dataset(genConfig, genSeed, genSamples);
      const std::filesystem::path out = genOut.empty() ? std::filesystem::path(default_out_dir()) / (genConfig + ".csv")
                                                       : std::filesystem::path(genOut);
      write_points(out, cloud);
      std::cout << "wrote " << cloud.size() << " points to " << out.string() << '\n';
      return 0;
    }
    if (cluster->parsed()) {
      auto spec = make_spec(clusterCommon, clusterSolver);
      spec.lambdaGrid = {clusterLambda};
      return finish_sweep(run_sweep(spec));
    }
    if (sweep->parsed()) {
      auto spec = make_spec(sweepCommon, sweepSolver);
      spec.lambdaGrid = parse_grid(sweepGrid);
      spec.jobs = jobs;
      return finish_sweep(run_sweep(spec));
    }
    if (plot->parsed()) {
      std::ifstream in(plotReport);
      if (!in) throw std::runtime_error("cannot open '" + plotReport + "'");
      const auto report = nlohmann::json::parse(in);
      const auto cloud = load_dataset(plotCommon.data, plotCommon.seed, plotCommon.samples);
      const std::filesystem::path out = plotOut.empty() ? std::filesystem::path(default_out_dir()) / "plot.svg"
                                                        : std::filesystem::path(plotOut);
      emit_scatter_svg(cloud, clustering_from_report(report, plotIndex), out);
      std::cout << "wrote " << out.string() << '\n';
      return 0;
    }
    if (omt->parsed()) {
      SolverOptions none;
      none.method = "son";
      auto spec = make_spec(omtCommon, none);
      spec.method = Method::exactOmt;
      spec.target = omtTarget;
      const auto report = run_sweep(spec);
      if (report.transport)
        std::cout << "cost " << format_double(report.transport->cost, 12) << "  metric "
                  << format_double(report.transport->metric, 12) << '\n';
      else
        std::cout << "error: " << report.transportError << '\n';
      std::cout << "report: " << report_path(spec).string() << '\n';
      return report.allOptimal() ? 0 : kExitNotOptimal;
    }
  } catch (const std::exception& e) {
    std::cerr << "omtclust: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
