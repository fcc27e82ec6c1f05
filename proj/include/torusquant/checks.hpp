#pragma once

// The invariant suite behind `torusquant check`: one function per criterion,
// deterministic given the seed. Details never contain timings.

#include <cstdint>
#include <string>
#include <vector>

#include "torusquant/experiment.hpp"

namespace torusquant {

struct CheckOptions {
  std::uint64_t seed = 20240501;
  int threads = 1;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  Json data = Json::object();
};

CheckResult check_exact_homomorphism(const CheckOptions& options);   // 1
CheckResult check_product_rate(const CheckOptions& options);         // 2
CheckResult check_intertwining(const CheckOptions& options);         // 3
CheckResult check_trace(const CheckOptions& options);                // 4
CheckResult check_torus_relations(const CheckOptions& options);      // 5
CheckResult check_norm_bound(const CheckOptions& options);           // 6
CheckResult check_holder_variant(const CheckOptions& options);       // 7
CheckResult check_riemann_sums(const CheckOptions& options);         // 8
CheckResult check_star_algebra(const CheckOptions& options);         // 9

std::vector<CheckResult> run_checks(const CheckOptions& options);

/// "[PASS] 3 name: detail"
std::string format_check_line(const CheckResult& result);

Json checks_to_json(const std::vector<CheckResult>& results, const CheckOptions& options);

}  // namespace torusquant
