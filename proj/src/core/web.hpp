#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "core/model.hpp"
#include "core/rng.hpp"

namespace coalflow {

struct Birth {
  double position = 0.0;
  double time = 0.0;
};

// Outcome of a pairwise first-meeting experiment.  Not-met carries the +inf
// sentinel: the law is mixed, estimators must treat the atom explicitly.
struct MeetingSample {
  bool met = false;
  double time = std::numeric_limits<double>::infinity();
};

struct MergeEvent {
  double time = 0.0;
  int survivor = 0;
  int absorbed = 0;
};

// Probability that the gap process of two independent unit-variance motions
// (variance rate 2, hence the exponent -d0*d1/h rather than the rate-1
// -2*d0*d1/h) touched zero inside a step of length h with endpoint gaps
// d0, d1 > 0.
double bridge_meet_prob(double d0, double d1, double h);

// N-point coalescing engine with staggered births.  Drift-free by default;
// with a drift model attached it is the direct Euler-Maruyama simulator
// (independent noises per cluster, shared noise and drift after a merge).
// Single-threaded; replicas are independent instances on disjoint streams.
class WebEngine {
 public:
  explicit WebEngine(double start_time = 0.0,
                     const DriftModel* drift = nullptr);

  // Inserts a particle at the current time; joins an existing cluster when
  // the position matches a live particle's exactly.  Returns the particle id.
  int spawn(double position);

  // One step: each cluster representative gets an independent N(0,h)
  // increment (plus drift when attached); adjacent clusters that crossed or
  // bridge-met are merged, left to right, collapsing multi-way groups.
  void advance(double h, RngStream& gauss, RngStream& bridge);

  // Advance with even substeps of length <= dt.
  void advance_to(double target, double dt, RngStream& gauss,
                  RngStream& bridge);

  // Applies a strictly monotone map to every cluster position (the drift
  // flow map of the splitting scheme).
  void map_positions(const std::function<double(double)>& f);

  // Removes a particle whose value has been recorded; its cluster survives
  // while other members remain.
  void drop(int particle);

  double position(int particle) const;
  int cluster_rep(int particle) const;
  bool is_live(int particle) const;
  double current_time() const { return time_; }
  std::size_t live_cluster_count() const { return clusters_.size(); }
  std::size_t spawned_count() const { return cluster_index_.size(); }
  const std::vector<MergeEvent>& events() const { return events_; }

 private:
  struct Cluster {
    int rep;  // smallest live member id
    double pos;
    std::vector<int> members;
  };

  void rebuild_index();
  void collapse(std::vector<char>& merge_with_next);
  void enforce_order();
  void merge_into(std::size_t dst, std::size_t src);

  std::vector<Cluster> clusters_;   // sorted by position
  std::vector<int> cluster_index_;  // particle id -> cluster slot, -1 if gone
  std::vector<MergeEvent> events_;
  std::vector<double> start_pos_;   // scratch, reused across steps
  std::vector<char> merge_flags_;   // scratch
  double time_;
  const DriftModel* drift_;
  int next_id_ = 0;
};

enum class RecordMode { full_grid, eval_only };

struct PathRecord {
  std::vector<double> times;
  struct Path {
    int id = 0;
    Birth birth;
    std::size_t first_index = 0;  // index into times of the first sample
    std::vector<double> x;
    std::vector<int> rep;
  };
  std::vector<Path> paths;
  std::vector<MergeEvent> events;
};

// Simulates all births on a shared grid refined to include every birth and
// eval time (each segment between consecutive event times is divided evenly
// into steps of length <= dt).  In eval_only mode just the eval rows are
// stored.
PathRecord evaluate_flow(const std::vector<Birth>& births,
                         const std::vector<double>& eval_times, double horizon,
                         double dt, RngStream& gauss, RngStream& bridge,
                         RecordMode mode = RecordMode::full_grid);

// Same recording machinery with an optional drift (the direct simulator).
PathRecord record_flow(const std::vector<Birth>& births,
                       const std::vector<double>& eval_times, double horizon,
                       double dt, RngStream& gauss, RngStream& bridge,
                       RecordMode mode, const DriftModel* drift);

// First meeting of the two-particle system (drift allowed; pass the zero
// model for the plain web).  Stops early on coalescence.
MeetingSample pair_meeting_kernel(double u1, double u2, const DriftModel& drift,
                                  double horizon, double dt, RngStream& gauss,
                                  RngStream& bridge);

// Steps per [from, to) segment when the maximum step is dt.
std::int64_t even_step_count(double from, double to, double dt);

}  // namespace coalflow
