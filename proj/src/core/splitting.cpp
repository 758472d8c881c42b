#include "core/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coalflow {

namespace {

constexpr double kBridgeExponentCutoff = 40.0;

double rk4_step(const DriftModel& a, double h, double u) {
  const double k1 = a.eval(u);
  const double k2 = a.eval(u + 0.5 * h * k1);
  const double k3 = a.eval(u + 0.5 * h * k2);
  const double k4 = a.eval(u + h * k3);
  return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

double drift_flow_map(const DriftModel& model, double h, double u) {
  if (h < 0.0) throw std::invalid_argument("drift_flow_map: h must be >= 0");
  switch (model.kind()) {
    case DriftKind::zero:
      return u;
    case DriftKind::linear:
      return u * std::exp(model.params()[0] * h);
    default:
      break;
  }
  if (h == 0.0) return u;
  // h_sub * C_a <= 0.005 keeps the one-step error near 1e-11 and the
  // numerical map strictly monotone.
  const double ca = model.lipschitz();
  const auto substeps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(h * ca / 0.005)));
  const double hs = h / static_cast<double>(substeps);
  double x = u;
  for (std::int64_t i = 0; i < substeps; ++i) x = rk4_step(model, hs, x);
  return x;
}

SplitPathRecord trotter_simulate(const std::vector<double>& starts,
                                 const Partition& partition,
                                 const DriftModel& model, double dt,
                                 RngStream& gauss, RngStream& bridge,
                                 SplitRecordMode mode) {
  if (!std::is_sorted(starts.begin(), starts.end())) {
    throw std::invalid_argument("trotter_simulate: starts must be sorted");
  }
  if (starts.empty()) throw std::invalid_argument("trotter_simulate: no starts");
  if (!(dt > 0.0) || dt > partition.mesh) {
    throw std::invalid_argument("trotter_simulate: need 0 < dt <= mesh");
  }
  const int n_intervals = partition.intervals();
  const std::size_t np = starts.size();

  SplitPathRecord rec;
  rec.partition = partition;
  rec.particles.resize(np);

  WebEngine engine(0.0);
  std::vector<int> ids(np);
  std::vector<double> jump_sum(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    ids[p] = engine.spawn(starts[p]);
    auto& path = rec.particles[p];
    path.id = ids[p];
    path.start = starts[p];
    path.jumps.assign(static_cast<std::size_t>(n_intervals) + 1, 0.0);
    path.sup_abs_drift = std::abs(model.eval(starts[p]));
  }

  const auto record_row = [&](double t, bool partition_flag, bool track) {
    rec.times.push_back(t);
    rec.is_partition_point.push_back(partition_flag ? 1 : 0);
    if (track) rec.partition_rows.push_back(rec.times.size() - 1);
    for (std::size_t p = 0; p < np; ++p) {
      const double x = engine.position(ids[p]);
      rec.particles[p].x.push_back(x);
      rec.particles[p].m.push_back(x - jump_sum[p]);
    }
  };
  const auto update_sup = [&] {
    for (std::size_t p = 0; p < np; ++p) {
      auto& path = rec.particles[p];
      path.sup_abs_drift = std::max(
          path.sup_abs_drift, std::abs(model.eval(engine.position(ids[p]))));
    }
  };

  record_row(0.0, true, true);
  for (int k = 1; k <= n_intervals; ++k) {
    const double t_prev = partition.breakpoints[static_cast<std::size_t>(k - 1)];
    const double t_k = partition.breakpoints[static_cast<std::size_t>(k)];
    const double len = t_k - t_prev;
    const std::int64_t steps = even_step_count(t_prev, t_k, dt);
    const double h = len / static_cast<double>(steps);
    for (std::int64_t i = 0; i < steps; ++i) {
      engine.advance(h, gauss, bridge);
      update_sup();
      const bool last = (i + 1 == steps);
      const double row_time = last ? t_k : t_prev + static_cast<double>(i + 1) * h;
      if (mode == SplitRecordMode::full || last) {
        // the t_k row here is the left limit; t_N is terminal by left limit
        record_row(row_time, last && k == n_intervals, last && k == n_intervals);
      }
    }
    if (k < n_intervals) {
      const auto flow = [&](double u) { return drift_flow_map(model, len, u); };
      std::vector<double> pre(np);
      for (std::size_t p = 0; p < np; ++p) pre[p] = engine.position(ids[p]);
      engine.map_positions(flow);
      for (std::size_t p = 0; p < np; ++p) {
        const double jump = engine.position(ids[p]) - pre[p];
        rec.particles[p].jumps[static_cast<std::size_t>(k)] = jump;
        jump_sum[p] += jump;
      }
      update_sup();
      record_row(t_k, true, true);
    }
  }
  rec.events = engine.events();
  return rec;
}

std::vector<bool> jump_bound_check(const SplitPathRecord& record,
                                   const DriftModel& model) {
  const auto& bp = record.partition.breakpoints;
  const double growth = std::exp(model.lipschitz() * record.partition.mesh);
  std::vector<bool> ok(record.particles.size(), true);
  for (std::size_t p = 0; p < record.particles.size(); ++p) {
    const auto& path = record.particles[p];
    for (std::size_t k = 1; k + 1 < bp.size(); ++k) {
      const double h_k = bp[k] - bp[k - 1];
      const double bound = path.sup_abs_drift * growth * h_k;
      if (std::abs(path.jumps[k]) > bound) {
        ok[p] = false;
        break;
      }
    }
  }
  return ok;
}

bool bookkeeping_identity_holds(const SplitPathRecord& record) {
  const auto& bp = record.partition.breakpoints;
  for (const auto& path : record.particles) {
    double prefix = 0.0;
    std::size_t next_jump = 1;
    for (std::size_t row = 0; row < record.times.size(); ++row) {
      // Jumps land on the flagged interior rows, in partition order.
      if (record.is_partition_point[row] && record.times[row] > 0.0 &&
          next_jump + 1 < bp.size() && record.times[row] == bp[next_jump]) {
        prefix += path.jumps[next_jump];
        ++next_jump;
      }
      if (path.m[row] != path.x[row] - prefix) return false;
    }
  }
  return true;
}

void append_martingale_increments(const SplitPathRecord& record,
                                  std::vector<BmIncrement>& out) {
  const auto& rows = record.partition_rows;
  const auto& bp = record.partition.breakpoints;
  if (rows.size() != bp.size()) {
    throw std::invalid_argument("martingale increments: malformed record");
  }
  for (const auto& path : record.particles) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      out.push_back({path.m[rows[k]] - path.m[rows[k - 1]],
                     bp[k] - bp[k - 1]});
    }
  }
}

std::vector<BmIncrement> martingale_diagnostics_input(
    const std::vector<SplitPathRecord>& records) {
  std::vector<BmIncrement> out;
  if (records.empty()) return out;
  const auto& first = records.front();
  for (const auto& rec : records) {
    if (rec.partition.breakpoints != first.partition.breakpoints ||
        rec.times != first.times) {
      throw std::invalid_argument(
          "martingale_diagnostics_input: records on mismatched grids");
    }
    append_martingale_increments(rec, out);
  }
  return out;
}

PairTerminal trotter_pair_terminal(double u1, double u2,
                                   const Partition& partition,
                                   const DriftModel& model, double dt,
                                   RngStream& gauss, RngStream& bridge) {
  if (u1 > u2) throw std::invalid_argument("trotter pair: requires u1 <= u2");
  PairTerminal state{u1, u2, u1 == u2};
  const auto& bp = partition.breakpoints;
  for (std::size_t k = 1; k < bp.size(); ++k) {
    const double len = bp[k] - bp[k - 1];
    const std::int64_t steps = even_step_count(bp[k - 1], bp[k], dt);
    const double h = len / static_cast<double>(steps);
    const double sq = std::sqrt(h);
    for (std::int64_t i = 0; i < steps; ++i) {
      const double g1 = gauss.next_gaussian();
      const double g2 = gauss.next_gaussian();
      if (state.met) {
        state.x1 += sq * g1;
        state.x2 = state.x1;
        continue;
      }
      const double d0 = state.x2 - state.x1;
      state.x1 += sq * g1;
      state.x2 += sq * g2;
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
        state.x2 = state.x1;  // survivor is the smaller id
      }
    }
    if (k + 1 < bp.size()) {
      state.x1 = drift_flow_map(model, len, state.x1);
      state.x2 = state.met ? state.x1 : drift_flow_map(model, len, state.x2);
    }
  }
  return state;
}

}  // namespace coalflow
