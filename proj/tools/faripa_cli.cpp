// Command-line front end: dataset generation, full experiment runs,
// global-matrix scoring, and box-plot statistics, all driven by JSON
// configs and CSV files.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "faripa/csv.hpp"
#include "faripa/harness.hpp"
#include "faripa/metrics.hpp"
#include "faripa/types.hpp"

namespace {

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw faripa::ConfigError("cannot parse dimension '" + tok + "'");
    }
    if (used != tok.size() || v < 1)
      throw faripa::ConfigError("cannot parse dimension '" + tok + "'");
    dims.push_back(v);
  }
  if (dims.empty()) throw faripa::ConfigError("empty dimension list");
  return dims;
}

int cmd_generate(const std::string& config_path, const std::string& out_path,
                 int run) {
  const auto cfg = faripa::harness::ExperimentConfig::load(config_path);
  if (run < 0 || run >= cfg.runs)
    throw faripa::ConfigError("run index outside [0, runs)");
  const auto s = faripa::harness::build_sources(
      cfg, cfg.seed + static_cast<std::uint64_t>(run));
  faripa::write_series_csv(out_path, s);
  std::cout << "wrote " << s.length() << "x" << s.dim() << " sources to "
            << out_path << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& csv_path, bool no_timings) {
  const auto cfg = faripa::harness::ExperimentConfig::load(config_path);
  const auto report = faripa::harness::run_experiment(cfg);
  if (!out_path.empty()) report.save_json(out_path, !no_timings);
  if (!csv_path.empty()) report.write_csv_summary(csv_path);
  std::cout << "completed " << report.completed << "/" << report.runs.size()
            << " runs";
  if (report.completed > 0)
    std::cout << ", median amari " << report.median_amari();
  std::cout << "\n";
  if (!out_path.empty()) std::cout << "report: " << out_path << "\n";
  return report.completed > 0 ? 0 : 2;
}

int cmd_amari(const std::string& g_path, const std::string& rows_text,
              const std::string& cols_text, const std::string& blocks_path) {
  const Eigen::MatrixXd G = faripa::read_matrix_csv(g_path);
  const auto rows = parse_dims(rows_text);
  const auto cols = cols_text.empty() ? rows : parse_dims(cols_text);
  const auto blocks = faripa::metrics::BlockStructure::of(rows, cols);
  const Eigen::MatrixXd sums = faripa::metrics::block_sums(G, blocks);
  const double r = faripa::metrics::amari_index(G, blocks);
  std::cout << "amari " << faripa::format_double(r) << "\n";
  if (!blocks_path.empty()) {
    faripa::write_matrix_csv(blocks_path, sums);
    std::cout << "block sums: " << blocks_path << "\n";
  }
  return 0;
}

int cmd_stats(const std::string& in_path, const std::string& column) {
  const faripa::TimeSeries ts = faripa::read_series_csv(in_path);
  long idx = 0;
  try {
    size_t used = 0;
    idx = std::stol(column, &used);
    if (used != column.size()) idx = -1;
  } catch (const std::exception&) {
    idx = -1;
  }
  if (idx < 0 || idx >= ts.dim())
    throw faripa::ConfigError("column index outside the CSV width");
  std::vector<double> values(ts.values.col(idx).data(),
                             ts.values.col(idx).data() + ts.length());
  const auto bs = faripa::harness::boxplot_stats(values);
  nlohmann::ordered_json j;
  j["count"] = values.size();
  j["q1"] = bs.q1;
  j["median"] = bs.q2;
  j["q3"] = bs.q3;
  j["whisker_low"] = bs.whisker_low;
  j["whisker_high"] = bs.whisker_high;
  j["outliers"] = bs.outliers;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("FARIPA_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"blind source separation pipeline for nonparametric "
               "autoregressive mixtures"};
  app.require_subcommand(1);

  std::string config_path, out_path, csv_path;
  int run_index = 0;
  bool no_timings = false;

  auto* generate = app.add_subcommand(
      "generate", "write one run's hidden sources to CSV");
  generate->add_option("--config", config_path, "experiment config JSON")
      ->required();
  generate->add_option("--out", out_path, "output CSV path")->required();
  generate->add_option("--run", run_index, "run index (default 0)");

  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out", out_path, "report JSON path");
  run->add_option("--csv", csv_path, "per-run summary CSV path");
  run->add_flag("--no-timings", no_timings, "omit wall times from the report");

  std::string g_path, rows_text, cols_text, blocks_path;
  auto* amari = app.add_subcommand(
      "amari", "score a global matrix CSV against block dimensions");
  amari->add_option("--g", g_path, "global matrix CSV (no header)")->required();
  amari->add_option("--rows", rows_text, "estimated dims, e.g. 2,2")->required();
  amari->add_option("--cols", cols_text, "true dims (default: same as rows)");
  amari->add_option("--blocks", blocks_path, "write block sums CSV here");

  std::string stats_in, stats_column = "0";
  auto* stats = app.add_subcommand(
      "stats", "box-plot statistics of one CSV column");
  stats->add_option("--in", stats_in, "input CSV (header row expected)")
      ->required();
  stats->add_option("--column", stats_column, "0-based column index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_path, run_index);
    if (run->parsed()) return cmd_run(config_path, out_path, csv_path, no_timings);
    if (amari->parsed()) return cmd_amari(g_path, rows_text, cols_text, blocks_path);
    if (stats->parsed()) return cmd_stats(stats_in, stats_column);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
