#include "core/direct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/parallel.hpp"

namespace coalflow {

namespace {

constexpr double kBridgeExponentCutoff = 40.0;

}  // namespace

PathRecord direct_simulate(const std::vector<double>& starts,
                           const DriftModel& model, double horizon, double dt,
                           RngStream& gauss, RngStream& bridge,
                           RecordMode mode) {
  if (!std::is_sorted(starts.begin(), starts.end())) {
    throw std::invalid_argument("direct_simulate: starts must be sorted");
  }
  std::vector<Birth> births;
  births.reserve(starts.size());
  for (double u : starts) births.push_back({u, 0.0});
  return record_flow(births, {horizon}, horizon, dt, gauss, bridge, mode,
                     &model);
}

MeetingSample pair_meeting_time(double u1, double u2, const DriftModel& model,
                                double horizon, double dt, RngStream& gauss,
                                RngStream& bridge) {
  return pair_meeting_kernel(u1, u2, model, horizon, dt, gauss, bridge);
}

PairTerminal direct_pair_terminal(double u1, double u2, const DriftModel& model,
                                  double horizon, double dt, RngStream& gauss,
                                  RngStream& bridge) {
  if (u1 > u2) throw std::invalid_argument("direct pair: requires u1 <= u2");
  PairTerminal state{u1, u2, u1 == u2};
  const std::int64_t steps = even_step_count(0.0, horizon, dt);
  const double h = horizon / static_cast<double>(steps);
  const double sq = std::sqrt(h);
  for (std::int64_t i = 0; i < steps; ++i) {
    const double g1 = gauss.next_gaussian();
    const double g2 = gauss.next_gaussian();
    if (state.met) {
      state.x1 += model.eval(state.x1) * h + sq * g1;
      state.x2 = state.x1;
      continue;
    }
    const double d0 = state.x2 - state.x1;
    state.x1 += model.eval(state.x1) * h + sq * g1;
    state.x2 += model.eval(state.x2) * h + sq * g2;
    const double d1 = state.x2 - state.x1;
    bool hit = d1 <= 0.0;
    if (!hit) {
      const double x = d0 * d1 / h;
      if (x <= kBridgeExponentCutoff) {
        hit = bridge.next_uniform() < std::exp(-x);
      }
    }
    if (hit) {
      state.met = true;
      state.x2 = state.x1;
    }
  }
  return state;
}

ClusterEstimate cluster_size_estimate(const DriftModel& model, double t,
                                      int grid_m, std::uint64_t reps, double dt,
                                      RngSpec seed, ClusterMethod method,
                                      int threads) {
  if (!(t > 0.0)) throw std::invalid_argument("cluster_size: t must be > 0");
  if (grid_m < 2) throw std::invalid_argument("cluster_size: grid_m >= 2");
  if (reps == 0) throw std::invalid_argument("cluster_size: reps >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("cluster_size: dt must be > 0");

  ClusterEstimate est;
  est.t = t;
  est.method = method;

  if (method == ClusterMethod::pair_quadrature) {
    const auto m = static_cast<std::uint64_t>(grid_m);
    const std::uint64_t total = m * reps;
    // One meeting experiment per (node, rep); replica index = node*reps + rep.
    std::vector<std::uint8_t> met(total, 0);
    for_each_replica(total, threads, [&](std::uint64_t idx) {
      const std::uint64_t node = idx / reps;
      const double r =
          (static_cast<double>(node) + 0.5) / static_cast<double>(grid_m);
      RngStream g(seed, idx, StreamPurpose::direct_increments);
      RngStream b(seed, idx, StreamPurpose::direct_bridge);
      met[idx] = pair_meeting_kernel(0.0, r, model, t, dt, g, b).met ? 1 : 0;
    });
    double value = 0.0;
    double var = 0.0;
    for (std::uint64_t node = 0; node < m; ++node) {
      std::uint64_t count = 0;
      for (std::uint64_t i = node * reps; i < (node + 1) * reps; ++i) {
        count += met[i];
      }
      const double p =
          static_cast<double>(count) / static_cast<double>(reps);
      value += p;
      var += p * (1.0 - p) / static_cast<double>(reps);
    }
    est.value = value / static_cast<double>(m);
    est.stderr_ = std::sqrt(var) / static_cast<double>(m);
    est.reps = total;
    return est;
  }

  // fan: joint run from {0, 1/m, ..., 1}; nu ~ (largest grid start merged
  // with 0) -- an interval by monotonicity.
  StreamStats stats = parallel_stats(reps, threads, [&](std::uint64_t rep) {
    RngStream g(seed, rep, StreamPurpose::direct_increments);
    RngStream b(seed, rep, StreamPurpose::direct_bridge);
    WebEngine engine(0.0, &model);
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(grid_m) + 1);
    for (int j = 0; j <= grid_m; ++j) {
      ids.push_back(engine.spawn(static_cast<double>(j) / grid_m));
    }
    engine.advance_to(t, dt, g, b);
    const int rep0 = engine.cluster_rep(ids[0]);
    int top = 0;
    for (int j = 1; j <= grid_m; ++j) {
      if (engine.cluster_rep(ids[static_cast<std::size_t>(j)]) == rep0) {
        top = j;
      } else {
        break;
      }
    }
    return static_cast<double>(top) / static_cast<double>(grid_m);
  });
  est.value = stats.mean;
  est.stderr_ = stats.stderr_of_mean();
  est.reps = reps;
  return est;
}

SandwichRecord sandwich_simulate(const DriftModel& model, double u1, double u2,
                                 double horizon, double dt, RngStream& gauss,
                                 double gamma) {
  if (u1 > u2) throw std::invalid_argument("sandwich: requires u1 <= u2");
  const double ca = model.lipschitz();
  const std::int64_t steps = even_step_count(0.0, horizon, dt);
  const double h = horizon / static_cast<double>(steps);
  if (ca * h >= 1.0) {
    throw std::invalid_argument("sandwich: needs dt < 1/C_a");
  }
  const double sq = std::sqrt(h);

  SandwichRecord rec;
  rec.times.reserve(static_cast<std::size_t>(steps) + 1);
  double xi1 = u1;
  double dxi = u2 - u1;
  double eta = u2 - u1;
  double eta_tilde = u2 - u1;
  const auto push = [&](double t) {
    rec.times.push_back(t);
    rec.xi1.push_back(xi1);
    rec.dxi.push_back(dxi);
    rec.eta.push_back(eta);
    rec.eta_tilde.push_back(eta_tilde);
  };
  push(0.0);
  if (dxi <= 0.0) {
    rec.stopped = true;
    return rec;
  }
  for (std::int64_t i = 0; i < steps; ++i) {
    const double g1 = gauss.next_gaussian();
    const double g2 = gauss.next_gaussian();
    const double dw = gamma * sq * (g2 - g1);
    // identical update shape for all three recursions
    const double drift_gap = model.eval(xi1 + dxi) - model.eval(xi1);
    dxi = dxi + h * drift_gap + dw;
    eta = eta + h * (ca * eta) + dw;
    eta_tilde = eta_tilde + h * (-ca * eta_tilde) + dw;
    xi1 += model.eval(xi1) * h + gamma * sq * g1;
    push(static_cast<double>(i + 1) * h);
    if (dxi <= 0.0) {
      rec.stopped = true;
      break;
    }
  }
  return rec;
}

double sandwich_max_violation(const SandwichRecord& record) {
  double worst = 0.0;
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    worst = std::max(worst, record.eta_tilde[i] - record.dxi[i]);
    worst = std::max(worst, record.dxi[i] - record.eta[i]);
  }
  return worst;
}

bool sandwich_holds(const SandwichRecord& record, double tol) {
  return sandwich_max_violation(record) <= tol;
}

}  // namespace coalflow
