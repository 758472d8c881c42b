#pragma once

#include <cstdint>
#include <vector>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/splitting.hpp"
#include "core/web.hpp"

namespace coalflow {

// Reference simulator: Euler-Maruyama with independent unit-variance noises
// per cluster plus the drift, coalescence by sign change + drift-frozen
// bridge test; shared noise and drift after a merge.
PathRecord direct_simulate(const std::vector<double>& starts,
                           const DriftModel& model, double horizon, double dt,
                           RngStream& gauss, RngStream& bridge,
                           RecordMode mode = RecordMode::full_grid);

// First meeting time of the two-particle direct simulation.
MeetingSample pair_meeting_time(double u1, double u2, const DriftModel& model,
                                double horizon, double dt, RngStream& gauss,
                                RngStream& bridge);

// Two-particle terminal state at the horizon (keeps evolving after the
// merge); draw discipline matches trotter_pair_terminal.
PairTerminal direct_pair_terminal(double u1, double u2, const DriftModel& model,
                                  double horizon, double dt, RngStream& gauss,
                                  RngStream& bridge);

enum class ClusterMethod { pair_quadrature, fan };

struct ClusterEstimate {
  double t = 0.0;
  ClusterMethod method = ClusterMethod::pair_quadrature;
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t reps = 0;
};

// E nu_t estimate.  pair_quadrature: midpoint rule over grid_m nodes of
// P{tau_{0,r} <= t}, reps meeting experiments per node.  fan: particles from
// {0, 1/m, ..., 1} simulated jointly; the coalesced fraction approximates the
// cluster measure from below with error O(1/m).
ClusterEstimate cluster_size_estimate(const DriftModel& model, double t,
                                      int grid_m, std::uint64_t reps, double dt,
                                      RngSpec seed, ClusterMethod method,
                                      int threads);

// Coupled paths of the gap and its linear bounding processes, on [0, tau ^
// horizon] where tau is the first grid time with a nonpositive gap.  All
// three recursions use the identical per-step update v += h*d + dW with the
// shared noise difference dW, so the zero-Lipschitz case is bitwise equal.
struct SandwichRecord {
  std::vector<double> times;
  std::vector<double> xi1;
  std::vector<double> dxi;
  std::vector<double> eta;
  std::vector<double> eta_tilde;
  bool stopped = false;  // gap hit zero before the horizon
};

SandwichRecord sandwich_simulate(const DriftModel& model, double u1, double u2,
                                 double horizon, double dt, RngStream& gauss,
                                 double gamma = 1.0);

// eta_tilde <= dxi <= eta at every stored row, within tol.
bool sandwich_holds(const SandwichRecord& record, double tol);
double sandwich_max_violation(const SandwichRecord& record);

}  // namespace coalflow
