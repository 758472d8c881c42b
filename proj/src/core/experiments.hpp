#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/direct.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/splitting.hpp"
#include "core/stats.hpp"
#include "core/web.hpp"

namespace coalflow {

struct MeetRunConfig {
  DriftModel drift = DriftModel::zero();
  double u1 = 0.0;
  double u2 = 0.5;
  double horizon = 1.0;
  double dt = 1e-4;
  std::uint64_t reps = 10000;
  RngSpec seed;
  int threads = 0;
  std::vector<double> survival_times;
};

struct SurvivalPoint {
  double t = 0.0;
  double empirical = 0.0;
  double stderr_ = 0.0;
  double oracle = 0.0;  // NaN when no closed form exists for the drift
};

struct MeetRunResult {
  std::vector<MeetingSample> samples;
  double meet_fraction = 0.0;
  double meet_stderr = 0.0;
  bool have_oracle = false;
  double oracle_meet_prob = 0.0;
  double atom_z = 0.0;
  bool ks_defined = false;
  double ks_d = 0.0;
  std::vector<SurvivalPoint> survival;
};

MeetRunResult run_meet(const MeetRunConfig& config);

struct ClusterRunConfig {
  DriftModel drift = DriftModel::linear(1.0);
  std::vector<double> ts;
  int grid_m = 200;
  std::uint64_t reps = 20000;
  double dt = 0.0;  // <= 0: per-t default t/400
  ClusterMethod method = ClusterMethod::pair_quadrature;
  RngSpec seed;
  int threads = 0;
};

std::vector<ClusterEstimate> run_cluster(const ClusterRunConfig& config);

struct TrotterCompareConfig {
  DriftModel drift = DriftModel::cosine();
  double u1 = 0.0;
  double u2 = 0.3;
  std::vector<int> ns = {4, 16, 64};
  double dt = 1e-4;
  std::uint64_t reps = 20000;
  RngSpec seed;
  int threads = 0;
};

struct TrotterCompareRow {
  int n = 0;
  double ks1 = 0.0;      // particle started at u1
  double ks2 = 0.0;      // particle started at u2
  double ks_max = 0.0;
  double meet_trotter = 0.0;
  double meet_direct = 0.0;
  double meet_z = 0.0;
};

// One shared direct-simulator sample vs a Trotter sample per N; the Trotter
// runs reuse replica streams across N (common random numbers).
std::vector<TrotterCompareRow> run_trotter_compare(
    const TrotterCompareConfig& config);

struct TrotterDiagConfig {
  DriftModel drift = DriftModel::cosine();
  std::vector<double> starts = {0.0};
  int partition_n = 16;
  double dt = 1e-4;
  std::uint64_t reps = 1000;
  RngSpec seed;
  int threads = 0;
};

struct TrotterDiagResult {
  std::uint64_t reps = 0;
  std::uint64_t jump_bound_ok = 0;  // replicas with every particle in bound
  bool bookkeeping_ok = true;       // bitwise m = X - sum(jumps) everywhere
  std::uint64_t increments = 0;
  BmReport bm;
  double terminal_mean = 0.0;  // particle 0
  double terminal_se = 0.0;
};

TrotterDiagResult run_trotter_diagnostics(const TrotterDiagConfig& config);

struct Prop1Config {
  int n = 4;
  double r = 0.5;
  double s = 0.25;
  double t = 0.75;
  std::uint64_t reps = 10000;
  double dt = 1e-4;
  RngSpec seed;
  int threads = 0;
};

// Mean of sum_k phi_{k/n,(k+1)/n}(0) * phi_{s,t}(r) over web replicas with
// full coalescing interaction among concurrently live paths.
EstimateResult prop1_sum_estimate(const Prop1Config& config);

struct SandwichRunConfig {
  DriftModel drift = DriftModel::cosine();
  double u1 = 0.0;
  double u2 = 0.5;
  double gamma = 1.0;
  double horizon = 1.0;
  double dt = 1e-4;
  std::uint64_t reps = 1000;
  RngSpec seed;
  int threads = 0;
  double tol = 1e-10;  // floating-point floor for the pathwise comparison
};

struct SandwichRunResult {
  std::uint64_t reps = 0;
  std::uint64_t holds = 0;
  double max_violation = 0.0;
  std::uint64_t stopped = 0;
  bool zero_case_bitwise = false;  // C_a = 0: eta == dxi == eta_tilde
};

SandwichRunResult run_sandwich(const SandwichRunConfig& config);

struct OracleSelfCheck {
  double l_dual_max_gap = 0.0;        // |route a - route b| on the 5x5 grid
  bool l_bounds_ok = false;           // l <= min(t, l_upper_bound)
  double phi_quad_max_gap = 0.0;      // phi_c vs quadrature of its integrand
  double survival_quad_max_gap = 0.0; // erf form vs direct quadrature
  double ecs_quad_max_gap = 0.0;      // closed form vs nested quadrature
  bool monotonicity_ok = false;
  double l_bound_constant = 0.0;
};

OracleSelfCheck oracle_selfcheck();

struct WebTestConfig {
  double dt = 1e-4;
  std::uint64_t reps = 10000;
  RngSpec seed;
  int threads = 0;
};

struct WebTestResult {
  OracleSelfCheck oracle;
  double product_mean = 0.0;  // E[X_1(0) X_1(1)] for births (0,0), (1,0)
  double product_se = 0.0;
  double l11 = 0.0;
  double product_z = 0.0;
  double martingale_mean = 0.0;  // single birth (2,0) evaluated at 1
  double martingale_se = 0.0;
  bool composition_bitwise_ok = false;
  bool noncrossing_ok = false;
  bool coalescence_bitwise_ok = false;
};

WebTestResult run_webtest(const WebTestConfig& config);

}  // namespace coalflow
