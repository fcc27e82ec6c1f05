// One line per acceptance criterion; exit status is nonzero if any fails.
// Library checks are paired with oracles computed here from closed forms.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <unistd.h>

#include <Eigen/SVD>

#include "torusquant/checks.hpp"

using namespace torusquant;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Q_f for n = 1 in the P_T convention, written straight from the coefficients:
// e(p, a) maps basis vector m' to e^{2 pi i a m'/k} times basis vector m' + p.
Eigen::MatrixXcd oracle_toeplitz(const TrigPoly& f, int k) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(k, k);
  for (const auto& [mode, c] : f.coeffs())
    for (int col = 0; col < k; ++col) {
      const int row = ((col + mode.p[0]) % k + k) % k;
      q(row, col) += c * std::polar(1.0, kTwoPi * mode.q[0] * col / static_cast<double>(k));
    }
  return q;
}

// f * g at hbar = 1/k: e(p, a) * e(q, b) = e^{2 pi i a q / k} e(p + q, a + b).
TrigPoly oracle_star(const TrigPoly& f, const TrigPoly& g, int k) {
  TrigPoly::CoeffMap out;
  for (const auto& [mf, cf] : f.coeffs())
    for (const auto& [mg, cg] : g.coeffs()) {
      const Mode m{{mf.p[0] + mg.p[0]}, {mf.q[0] + mg.q[0]}};
      out[m] += cf * cg * std::polar(1.0, kTwoPi * mf.q[0] * mg.p[0] / static_cast<double>(k));
    }
  return TrigPoly(1, out);
}

double svd_norm(const Eigen::MatrixXcd& a) { return Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()(0); }

void criterion_1(const CheckOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const CheckResult r = check_exact_homomorphism(options);
  const double elapsed = seconds_since(t0);

  RandomSource rng(options.seed + 1);
  double oracle_gap = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int bandwidth = 1 + trial % 3;
    const TrigPoly f = random_trig_poly(1, bandwidth, rng), g = random_trig_poly(1, bandwidth, rng);
    for (int k : {8, 16, 32}) {
      const Eigen::MatrixXcd qf = oracle_toeplitz(f, k), qg = oracle_toeplitz(g, k);
      const TrigPoly fg = star_exact(f, g, HbarValue(k), Orientation::kStar);
      const double scale = 1.0 + svd_norm(qf) * svd_norm(qg);
      oracle_gap = std::max(oracle_gap, svd_norm(qf * qg - oracle_toeplitz(fg, k)) / scale);
      oracle_gap = std::max(oracle_gap, distance_l1(fg, oracle_star(f, g, k)));
      oracle_gap = std::max(oracle_gap,
                            (assemble_toeplitz(f, HilbertSpec(1, k)).entries - qf).cwiseAbs().maxCoeff());
    }
  }
  const bool pass = r.pass && oracle_gap <= 1e-10 && elapsed < 60.0;
  report(1, "exact homomorphism", pass,
         r.detail + "; closed-form oracle gap " + sci(oracle_gap) + "; " + (elapsed < 60.0 ? "under" : "over") +
             " 1 min");
}

void library_criterion(const CheckResult& r) { report(r.id, r.name, r.pass, r.detail); }

void criterion_7(const CheckOptions& options) {
  const CheckResult r = check_holder_variant(options);
  RandomSource rng(options.seed + 7);
  int violations = 0;
  double worst_norm_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int size = rng.uniform_int(2, 64);
    const Eigen::MatrixXcd a = random_matrix(size, size, rng);
    const double l1 = a.cwiseAbs().colwise().sum().maxCoeff();
    const double linf = a.cwiseAbs().rowwise().sum().maxCoeff();
    const double sigma = svd_norm(a);
    if (sigma > std::sqrt(l1 * linf) + 1e-9) ++violations;
    worst_norm_gap = std::max(worst_norm_gap, std::abs(operator_norm(a, NormKind::kL2) - sigma) / sigma);
  }
  const bool pass = r.pass && violations == 0 && worst_norm_gap <= 1e-8;
  report(7, r.name, pass,
         r.detail + "; SVD oracle: violations " + std::to_string(violations) + ", iterative vs SVD rel gap " +
             sci(worst_norm_gap));
}

void criterion_8(const CheckOptions& options) {
  const CheckResult r = check_riemann_sums(options);
  // Direct sum of exp(cos 2 pi m/k) against I_0(1).
  const double mean = std::cyl_bessel_i(0.0, 1.0);
  bool decreasing = true;
  double previous = 1e300;
  for (int k = 8; k <= 128; k *= 2) {
    double sum = 0.0;
    for (int m = 0; m < k; ++m) sum += std::exp(std::cos(kTwoPi * m / k));
    const double scaled = std::abs(sum / k - mean) * std::pow(k, 4.0);
    if (scaled > 1e-13 * std::pow(k, 4.0) && scaled >= previous) decreasing = false;
    previous = scaled;
  }
  report(8, r.name, r.pass && decreasing, r.detail + "; direct-sum oracle " + (decreasing ? "agrees" : "disagrees"));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10(const CheckOptions& options) {
  const auto base = std::filesystem::temp_directory_path() / ("torusquant_acceptance_" + std::to_string(::getpid()));
  std::string outputs[2], reports[2];
  bool ok = true;
  double slowest = 0.0;
  for (int run = 0; run < 2; ++run) {
    const auto dir = base / std::to_string(run);
    std::filesystem::create_directories(dir);
    const std::string cmd = std::string("\"") + TORUSQUANT_CLI + "\" check --seed " + std::to_string(options.seed) +
                            " --threads 4 --out \"" + dir.string() + "\" > \"" + (dir / "stdout.txt").string() +
                            "\" 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    slowest = std::max(slowest, seconds_since(t0));
    ok = ok && status == 0;
    outputs[run] = read_file(dir / "stdout.txt");
    Json tree = Json::parse(read_file(dir / "check_report.json"), nullptr, false);
    if (tree.is_discarded() || !tree.contains("timestamp")) {
      ok = false;
      continue;
    }
    tree.erase("timestamp");
    reports[run] = tree.dump(2);
  }
  std::filesystem::remove_all(base);
  const bool stable = !reports[0].empty() && reports[0] == reports[1] && outputs[0] == outputs[1];
  const bool fast = slowest < 300.0;
  report(10, "determinism", ok && stable && fast,
         std::string("two `check` runs ") + (ok ? "exit 0" : "failed") + ", report " +
             (stable ? "byte-identical" : "differs") + " modulo timestamp, " + (fast ? "under" : "over") +
             " 5 min per run");
}

}  // namespace

int main() {
  const CheckOptions options;
  criterion_1(options);
  library_criterion(check_product_rate(options));
  library_criterion(check_intertwining(options));
  library_criterion(check_trace(options));
  library_criterion(check_torus_relations(options));
  library_criterion(check_norm_bound(options));
  criterion_7(options);
  criterion_8(options);
  library_criterion(check_star_algebra(options));
  criterion_10(options);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
