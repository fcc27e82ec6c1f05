// torusquant: batch front end for the experiments and the invariant suite.
//
//   torusquant run <config>        sweep, write report JSON + CSV
//   torusquant star <config>       print the star_N table of f and g
//   torusquant assemble <config>   dump the Toeplitz matrix of f as CSV
//   torusquant check               run the invariant suite
//
// Exit status: 0 all pass, 1 some check failed, 2 bad usage or config, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "torusquant/checks.hpp"
#include "torusquant/experiment.hpp"

namespace fs = std::filesystem;
using namespace torusquant;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load_config(const GlobalOptions& g, const std::string& positional) {
  const std::string path = positional.empty() ? g.config_path : positional;
  if (path.empty()) throw UsageError("no config given (positional argument or --config)");
  ExperimentConfig config = parse_config_text(read_file(path));
  if (g.seed) config.seed = *g.seed;
  return config;
}

fs::path output_path(const GlobalOptions& g, const std::string& name) {
  const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

int command_run(const GlobalOptions& g, const std::string& positional) {
  const ExperimentConfig config = load_config(g, positional);
  const ConvergenceReport report = run_experiment(config, g.threads);
  const fs::path report_path = output_path(g, config.report_file);
  write_text(report_path, report_to_json(report).dump(2) + "\n");
  std::ostringstream csv;
  write_report_csv(csv, report);
  const fs::path csv_path = output_path(g, config.csv_file);
  write_text(csv_path, csv.str());
  if (!g.quiet) {
    std::cout << to_string(config.kind) << ": " << report.status;
    for (const auto& s : report.fits) {
      std::cout << "  [" << s.norm_kind << " " << to_string(s.fit.outcome);
      if (s.fit.outcome == SlopeFit::Outcome::kFitted) std::cout << " slope " << format_double(s.fit.slope);
      std::cout << "]";
    }
    std::cout << "\n  report: " << report_path.string() << "\n  csv:    " << csv_path.string() << "\n";
  }
  return report.pass ? 0 : 1;
}

int command_star(const GlobalOptions& g, const std::string& positional) {
  const ExperimentConfig config = load_config(g, positional);
  if (!config.f || !config.g) throw UsageError("star needs both 'f' and 'g' in the config");
  RandomSource rng(config.seed);
  const TrigPoly f = config.f->materialize(config.n, rng);
  const TrigPoly h = config.g->materialize(config.n, rng);
  const Json table = star_table(f, h, config.order, config.orientation);
  if (!g.quiet) {
    std::cout << "order,p,q,re,im\n";
    for (const auto& row : table) {
      std::cout << row["order"].get<int>() << ',' << row["p"].dump() << ',' << row["q"].dump() << ','
                << format_double(row["re"].get<double>()) << ',' << format_double(row["im"].get<double>()) << '\n';
    }
  }
  if (!g.out_dir.empty()) {
    const Json echo = config.to_json();
    Json out{{"orientation", std::string(to_string(config.orientation))},
             {"order", config.order},
             {"config", echo},
             {"config_hash", config_hash(echo)},
             {"table", table}};
    write_text(output_path(g, "star_table.json"), out.dump(2) + "\n");
  }
  return 0;
}

int command_assemble(const GlobalOptions& g, const std::string& positional) {
  const ExperimentConfig config = load_config(g, positional);
  if (!config.f) throw UsageError("assemble needs 'f' in the config");
  RandomSource rng(config.seed);
  const TrigPoly f = config.f->materialize(config.n, rng);
  const int k = config.k.value_or(config.k_min);
  const QuantumOperator q = assemble_toeplitz(f, HilbertSpec(config.n, k, config.polarization));
  std::ostringstream csv;
  write_operator_csv(csv, q);
  if (g.out_dir.empty()) {
    std::cout << csv.str();
  } else {
    const fs::path path = output_path(g, "operator.csv");
    write_text(path, csv.str());
    if (!g.quiet) std::cout << "wrote " << q.dimension() << "x" << q.dimension() << " operator to " << path.string() << "\n";
  }
  return 0;
}

int command_check(const GlobalOptions& g) {
  CheckOptions options;
  if (g.seed) options.seed = *g.seed;
  options.threads = g.threads;
  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<CheckResult> results = run_checks(options);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    if (!g.quiet) std::cout << format_check_line(r) << "\n";
  }
  if (!g.out_dir.empty()) {
    Json report = checks_to_json(results, options);
    report["timestamp"] = {{"started", started},
                           {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_text(output_path(g, "check_report.json"), report.dump(2) + "\n");
  }
  if (!g.quiet) std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star products and Toeplitz quantization on the torus"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Config file (JSON)");
  app.add_option("--out", g.out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Override the seed");
  app.add_option("--threads", g.threads, "Worker threads for k-sweeps")->check(CLI::Range(1, 256));
  app.add_flag("--quiet", g.quiet, "Print nothing on success");

  std::string positional;
  auto* run = app.add_subcommand("run", "Run a convergence experiment");
  auto* star = app.add_subcommand("star", "Print the truncated star-product table of f and g");
  auto* assemble = app.add_subcommand("assemble", "Dump the Toeplitz matrix of f as CSV");
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  for (auto* sub : {run, star, assemble}) {
    sub->add_option("config", positional, "Config file (JSON)");
    sub->fallthrough();
  }
  check->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  try {
    if (*run) return command_run(g, positional);
    if (*star) return command_star(g, positional);
    if (*assemble) return command_assemble(g, positional);
    if (*check) return command_check(g);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
