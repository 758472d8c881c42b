#pragma once

#include <vector>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "core/web.hpp"

namespace coalflow {

// A_h(u): solution at time h of dA = a(A) dt, A_0 = u.  Exact for the zero
// and linear drifts; classical RK4 with substeps h_sub * C_a <= 0.1 for the
// named drifts, which keeps the numerical map strictly monotone.
double drift_flow_map(const DriftModel& model, double h, double u);

// One replica of the fractional-step scheme for all particles.  Rows at an
// interior partition point come in pairs: the left limit (is_partition_point
// = 0, last substep of the interval) and the post-jump value
// (is_partition_point = 1).  The t_0 and t_N rows carry flag 1; the terminal
// value is the left limit (no drift map at t_N).
struct SplitPathRecord {
  Partition partition;
  std::vector<double> times;
  std::vector<std::uint8_t> is_partition_point;
  // Row index of the partition-point samples used for m increments:
  // t_0 row, post-jump rows at t_1..t_{N-1}, and the t_N row.
  std::vector<std::size_t> partition_rows;

  struct ParticlePath {
    int id = 0;
    double start = 0.0;
    std::vector<double> x;
    std::vector<double> m;      // m = x - accumulated jumps, stored per row
    std::vector<double> jumps;  // indexed by partition point 0..N; 0 at both ends
    double sup_abs_drift = 0.0;
  };
  std::vector<ParticlePath> particles;
  std::vector<MergeEvent> events;
};

enum class SplitRecordMode { full, partition_only };

// Web evolution on each partition interval, drift map A_{t_k - t_{k-1}} at
// every interior partition point, terminal value by left limit.
SplitPathRecord trotter_simulate(const std::vector<double>& starts,
                                 const Partition& partition,
                                 const DriftModel& model, double dt,
                                 RngStream& gauss, RngStream& bridge,
                                 SplitRecordMode mode = SplitRecordMode::full);

// Pathwise jump bound: |jump_k| <= sup_path |a(X)| * e^{C_a * mesh} * h_k,
// with h_k the duration of the map applied at t_k.
std::vector<bool> jump_bound_check(const SplitPathRecord& record,
                                   const DriftModel& model);

// Exact bookkeeping identity m = X - sum of jumps at every stored row,
// bitwise (m is stored that way; this recomputes the prefix sums).
bool bookkeeping_identity_holds(const SplitPathRecord& record);

// Non-overlapping m increments over partition intervals, per particle, for
// the Brownian-motion diagnostics.  All records must share the partition and
// the row grid.
std::vector<BmIncrement> martingale_diagnostics_input(
    const std::vector<SplitPathRecord>& records);
void append_martingale_increments(const SplitPathRecord& record,
                                  std::vector<BmIncrement>& out);

struct PairTerminal {
  double x1 = 0.0;
  double x2 = 0.0;
  bool met = false;
};

// Two-particle terminal sampler used by the convergence experiments.  Draws
// two gaussians every step (the survivor's is used once merged) so that runs
// with different partitions consume the same increment sequence; bridge
// uniforms live on their own stream.
PairTerminal trotter_pair_terminal(double u1, double u2,
                                   const Partition& partition,
                                   const DriftModel& model, double dt,
                                   RngStream& gauss, RngStream& bridge);

}  // namespace coalflow
