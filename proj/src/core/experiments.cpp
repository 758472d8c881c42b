#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/oracles.hpp"
#include "core/parallel.hpp"

namespace coalflow {

namespace {

constexpr std::uint64_t kChunk = 1024;

bool drift_has_meeting_oracle(const DriftModel& m) {
  return m.kind() == DriftKind::zero || m.kind() == DriftKind::linear;
}

double meeting_oracle_cdf(const DriftModel& m, double u1, double u2, double t) {
  if (m.kind() == DriftKind::zero) {
    return oracles::reflection_meet_cdf(u2 - u1, t);
  }
  return oracles::meeting_cdf_linear(m.params()[0], u1, u2, t);
}

}  // namespace

MeetRunResult run_meet(const MeetRunConfig& config) {
  if (config.reps == 0) throw std::invalid_argument("run_meet: reps >= 1");
  MeetRunResult out;
  out.samples.resize(config.reps);
  for_each_replica(config.reps, config.threads, [&](std::uint64_t rep) {
    RngStream g(config.seed, rep, StreamPurpose::direct_increments);
    RngStream b(config.seed, rep, StreamPurpose::direct_bridge);
    out.samples[rep] = pair_meeting_kernel(config.u1, config.u2, config.drift,
                                           config.horizon, config.dt, g, b);
  });

  std::uint64_t met = 0;
  for (const auto& s : out.samples) met += s.met ? 1 : 0;
  const double n = static_cast<double>(config.reps);
  out.meet_fraction = static_cast<double>(met) / n;
  out.meet_stderr =
      std::sqrt(out.meet_fraction * (1.0 - out.meet_fraction) / n);

  out.have_oracle = drift_has_meeting_oracle(config.drift);
  if (out.have_oracle) {
    const auto cdf = [&](double t) {
      return meeting_oracle_cdf(config.drift, config.u1, config.u2, t);
    };
    const KsResult ks = ks_against_cdf(out.samples, cdf, config.horizon);
    out.oracle_meet_prob = ks.oracle_meet_prob;
    out.atom_z = ks.atom_z;
    out.ks_defined = ks.d_defined;
    out.ks_d = ks.d;
  }

  for (double t : config.survival_times) {
    SurvivalPoint point;
    point.t = t;
    std::uint64_t surv = 0;
    for (const auto& s : out.samples) surv += (!s.met || s.time > t) ? 1 : 0;
    point.empirical = static_cast<double>(surv) / n;
    point.stderr_ =
        std::sqrt(point.empirical * (1.0 - point.empirical) / n);
    point.oracle = out.have_oracle
                       ? 1.0 - meeting_oracle_cdf(config.drift, config.u1,
                                                  config.u2, t)
                       : std::numeric_limits<double>::quiet_NaN();
    out.survival.push_back(point);
  }
  return out;
}

std::vector<ClusterEstimate> run_cluster(const ClusterRunConfig& config) {
  std::vector<ClusterEstimate> rows;
  std::uint64_t salt = 0;
  for (double t : config.ts) {
    const double dt = config.dt > 0.0 ? config.dt : t / 400.0;
    // distinct seeds per t so the rows are independent experiments
    RngSpec seed{detail::mix64(config.seed.master_seed + salt++)};
    rows.push_back(cluster_size_estimate(config.drift, t, config.grid_m,
                                         config.reps, dt, seed, config.method,
                                         config.threads));
  }
  return rows;
}

std::vector<TrotterCompareRow> run_trotter_compare(
    const TrotterCompareConfig& config) {
  const std::uint64_t reps = config.reps;
  if (reps == 0) throw std::invalid_argument("trotter_compare: reps >= 1");
  std::vector<double> dx1(reps), dx2(reps);
  std::vector<std::uint8_t> dmet(reps);
  for_each_replica(reps, config.threads, [&](std::uint64_t rep) {
    RngStream g(config.seed, rep, StreamPurpose::direct_increments);
    RngStream b(config.seed, rep, StreamPurpose::direct_bridge);
    const PairTerminal term = direct_pair_terminal(
        config.u1, config.u2, config.drift, 1.0, config.dt, g, b);
    dx1[rep] = term.x1;
    dx2[rep] = term.x2;
    dmet[rep] = term.met ? 1 : 0;
  });

  std::vector<TrotterCompareRow> rows;
  for (int n : config.ns) {
    const Partition partition = Partition::uniform(n);
    std::vector<double> tx1(reps), tx2(reps);
    std::vector<std::uint8_t> tmet(reps);
    for_each_replica(reps, config.threads, [&](std::uint64_t rep) {
      RngStream g(config.seed, rep, StreamPurpose::gaussian_increments);
      RngStream b(config.seed, rep, StreamPurpose::bridge_tests);
      const PairTerminal term = trotter_pair_terminal(
          config.u1, config.u2, partition, config.drift, config.dt, g, b);
      tx1[rep] = term.x1;
      tx2[rep] = term.x2;
      tmet[rep] = term.met ? 1 : 0;
    });
    TrotterCompareRow row;
    row.n = n;
    row.ks1 = two_sample_ks(tx1, dx1);
    row.ks2 = two_sample_ks(tx2, dx2);
    row.ks_max = std::max(row.ks1, row.ks2);
    std::uint64_t mt = 0, md = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
      mt += tmet[r];
      md += dmet[r];
    }
    const double nn = static_cast<double>(reps);
    row.meet_trotter = static_cast<double>(mt) / nn;
    row.meet_direct = static_cast<double>(md) / nn;
    const double se = std::sqrt(
        row.meet_trotter * (1.0 - row.meet_trotter) / nn +
        row.meet_direct * (1.0 - row.meet_direct) / nn);
    row.meet_z = (row.meet_trotter - row.meet_direct) / std::max(se, 1e-300);
    rows.push_back(row);
  }
  return rows;
}

TrotterDiagResult run_trotter_diagnostics(const TrotterDiagConfig& config) {
  if (config.reps == 0) throw std::invalid_argument("diagnostics: reps >= 1");
  const Partition partition = Partition::uniform(config.partition_n);
  const std::uint64_t chunks = (config.reps + kChunk - 1) / kChunk;

  struct ChunkAccum {
    std::vector<BmIncrement> increments;
    StreamStats terminal;
    std::uint64_t jump_ok = 0;
    bool bookkeeping_ok = true;
  };
  std::vector<ChunkAccum> accum(chunks);

  for_each_replica(config.reps, config.threads, [&](std::uint64_t rep) {
    RngStream g(config.seed, rep, StreamPurpose::gaussian_increments);
    RngStream b(config.seed, rep, StreamPurpose::bridge_tests);
    const SplitPathRecord rec =
        trotter_simulate(config.starts, partition, config.drift, config.dt, g,
                         b, SplitRecordMode::partition_only);
    auto& acc = accum[rep / kChunk];
    const auto ok = jump_bound_check(rec, config.drift);
    acc.jump_ok +=
        std::all_of(ok.begin(), ok.end(), [](bool v) { return v; }) ? 1 : 0;
    if (!bookkeeping_identity_holds(rec)) acc.bookkeeping_ok = false;
    append_martingale_increments(rec, acc.increments);
    acc.terminal.update(rec.particles[0].x.back());
  });

  TrotterDiagResult out;
  out.reps = config.reps;
  std::vector<BmIncrement> increments;
  StreamStats terminal;
  for (auto& acc : accum) {
    out.jump_bound_ok += acc.jump_ok;
    out.bookkeeping_ok = out.bookkeeping_ok && acc.bookkeeping_ok;
    increments.insert(increments.end(), acc.increments.begin(),
                      acc.increments.end());
    terminal = StreamStats::merged(terminal, acc.terminal);
  }
  out.increments = increments.size();
  out.bm = bm_diagnostics(increments);
  out.terminal_mean = terminal.mean;
  out.terminal_se = terminal.stderr_of_mean();
  return out;
}

EstimateResult prop1_sum_estimate(const Prop1Config& config) {
  if (config.n < 1) throw std::invalid_argument("prop1: n >= 1");
  if (!(config.s <= config.t)) {
    throw std::invalid_argument("prop1: requires s <= t");
  }
  if (config.s < 0.0 || config.t > 1.0) {
    throw std::invalid_argument("prop1: requires 0 <= s <= t <= 1");
  }
  const int n = config.n;

  // Event timeline: increment-particle births/records at k/n, the r-particle
  // birth at s and record at t.
  std::vector<double> events;
  for (int k = 0; k <= n; ++k) {
    events.push_back(static_cast<double>(k) / n);
  }
  events.push_back(config.s);
  events.push_back(config.t);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  const StreamStats stats = parallel_stats(
      config.reps, config.threads, [&](std::uint64_t rep) {
        RngStream g(config.seed, rep, StreamPurpose::gaussian_increments);
        RngStream b(config.seed, rep, StreamPurpose::bridge_tests);
        WebEngine engine(0.0);
        double sum_vals = 0.0;
        double r_val = 0.0;
        int live_k = -1;      // index of the live increment particle
        int live_k_id = -1;
        int r_id = -1;
        bool r_recorded = false;
        for (double target : events) {
          if (target > engine.current_time()) {
            engine.advance_to(target, config.dt, g, b);
          }
          // record + retire the increment particle due at this time
          if (live_k >= 0 &&
              target == static_cast<double>(live_k + 1) / n) {
            sum_vals += engine.position(live_k_id);
            engine.drop(live_k_id);
            live_k = -1;
            live_k_id = -1;
          }
          if (target < 1.0) {
            // next increment particle born at k/n, position 0
            const double scaled = target * n;
            const int k = static_cast<int>(std::llround(scaled));
            if (static_cast<double>(k) / n == target && k < n) {
              live_k_id = engine.spawn(0.0);
              live_k = k;
            }
          }
          if (r_id < 0 && target == config.s) {
            r_id = engine.spawn(config.r);
          }
          if (!r_recorded && r_id >= 0 && target == config.t) {
            r_val = engine.position(r_id);
            engine.drop(r_id);
            r_recorded = true;
          }
        }
        return sum_vals * r_val;
      });

  EstimateResult out;
  out.value = stats.mean;
  out.stderr_ = stats.stderr_of_mean();
  out.reps = config.reps;
  out.seed = config.seed.master_seed;
  return out;
}

SandwichRunResult run_sandwich(const SandwichRunConfig& config) {
  if (config.reps == 0) throw std::invalid_argument("sandwich: reps >= 1");
  const std::uint64_t chunks = (config.reps + kChunk - 1) / kChunk;
  struct ChunkAccum {
    std::uint64_t holds = 0;
    std::uint64_t stopped = 0;
    double worst = 0.0;
  };
  std::vector<ChunkAccum> accum(chunks);
  for_each_replica(config.reps, config.threads, [&](std::uint64_t rep) {
    RngStream g(config.seed, rep, StreamPurpose::sandwich);
    const SandwichRecord rec =
        sandwich_simulate(config.drift, config.u1, config.u2, config.horizon,
                          config.dt, g, config.gamma);
    auto& acc = accum[rep / kChunk];
    const double v = sandwich_max_violation(rec);
    acc.worst = std::max(acc.worst, v);
    acc.holds += v <= config.tol ? 1 : 0;
    acc.stopped += rec.stopped ? 1 : 0;
  });
  SandwichRunResult out;
  out.reps = config.reps;
  for (const auto& acc : accum) {
    out.holds += acc.holds;
    out.stopped += acc.stopped;
    out.max_violation = std::max(out.max_violation, acc.worst);
  }

  // Equality case: with C_a = 0 all three recursions share the update
  // expression, so the arrays must be bitwise equal.
  out.zero_case_bitwise = true;
  const DriftModel zero = DriftModel::zero();
  for (std::uint64_t rep = 0; rep < std::min<std::uint64_t>(config.reps, 100);
       ++rep) {
    RngStream g(config.seed, rep, StreamPurpose::sandwich);
    const SandwichRecord rec = sandwich_simulate(
        zero, config.u1, config.u2, config.horizon, config.dt, g, config.gamma);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      if (rec.eta[i] != rec.dxi[i] || rec.eta_tilde[i] != rec.dxi[i]) {
        out.zero_case_bitwise = false;
        break;
      }
    }
    if (!out.zero_case_bitwise) break;
  }
  return out;
}

OracleSelfCheck oracle_selfcheck() {
  using namespace oracles;
  OracleSelfCheck out;
  out.l_bound_constant = l_bound_constant();

  const double t_grid[5] = {0.2, 0.4, 0.6, 0.8, 1.0};
  const double u_grid[5] = {0.1, 0.5, 1.0, 2.0, 4.0};
  out.l_bounds_ok = true;
  for (double t : t_grid) {
    for (double u : u_grid) {
      const double a = l_defect_density_route(t, u);
      const double b = l_defect(t, u);
      out.l_dual_max_gap = std::max(out.l_dual_max_gap, std::abs(a - b));
      if (b > t + 1e-12 || b > l_upper_bound(t, u) + 1e-12) {
        out.l_bounds_ok = false;
      }
    }
  }
  // tiny-u branch of the density route
  {
    const double a = l_defect_density_route(0.5, 1e-4);
    const double b = l_defect(0.5, 1e-4);
    out.l_dual_max_gap = std::max(out.l_dual_max_gap, std::abs(a - b));
  }

  for (double c : {-1.0, 0.5, 2.0, 1e-8}) {
    for (double t : {0.25, 1.0}) {
      const double closed = phi_c(c, t);
      const double quad = adaptive_simpson(
          [c](double s) { return std::exp(-2.0 * c * s); }, 0.0, t);
      out.phi_quad_max_gap =
          std::max(out.phi_quad_max_gap, std::abs(closed - quad));
    }
  }

  for (double c : {-1.0, 0.0, 0.5}) {
    for (double gap : {0.1, 0.5, 1.5}) {
      for (double t : {0.25, 1.0}) {
        const double closed = meeting_survival_linear(c, 0.0, gap, t);
        const double phi = phi_time_change(c, t);
        const double upper = gap / std::sqrt(2.0) / std::sqrt(phi);
        const double quad =
            std::sqrt(2.0 / 3.14159265358979323846) *
            adaptive_simpson([](double v) { return std::exp(-0.5 * v * v); },
                             0.0, upper, {1e-12, 48});
        out.survival_quad_max_gap =
            std::max(out.survival_quad_max_gap, std::abs(closed - quad));
      }
    }
  }

  for (double c : {-1.0, 0.5, 2.0}) {
    for (double t : {0.01, 0.1, 1.0}) {
      const double closed = expected_cluster_size_linear(c, t);
      const double quad = expected_cluster_size_quadrature(c, t);
      out.ecs_quad_max_gap =
          std::max(out.ecs_quad_max_gap, std::abs(closed - quad));
    }
  }

  out.monotonicity_ok = true;
  for (double c : {-1.0, 0.0, 0.7}) {
    double prev = 2.0;
    for (double t : {0.1, 0.2, 0.5, 1.0}) {
      const double s = meeting_survival_linear(c, 0.0, 0.5, t);
      if (s > prev + 1e-12) out.monotonicity_ok = false;
      prev = s;
    }
    double prev_gap = -1.0;
    for (double gap : {0.1, 0.4, 1.0, 2.0}) {
      const double s = meeting_survival_linear(c, 0.0, gap, 0.5);
      if (s < prev_gap - 1e-12) out.monotonicity_ok = false;
      prev_gap = s;
    }
    double prev_ecs = 0.0;
    for (double t : {0.01, 0.05, 0.2, 1.0}) {
      const double v = expected_cluster_size_linear(c, t);
      if (v < prev_ecs - 1e-12) out.monotonicity_ok = false;
      if (!(v > 0.0 && v < 1.0)) out.monotonicity_ok = false;
      prev_ecs = v;
    }
  }
  double prev_never = -1.0;
  for (double c : {0.1, 0.5, 2.0, 8.0}) {
    const double v = meeting_never_prob_linear(c, 0.0, 0.5);
    if (v < prev_never - 1e-12) out.monotonicity_ok = false;
    prev_never = v;
  }
  return out;
}

WebTestResult run_webtest(const WebTestConfig& config) {
  WebTestResult out;
  out.oracle = oracle_selfcheck();
  out.l11 = oracles::l_defect(1.0, 1.0);

  const DriftModel zero = DriftModel::zero();
  const StreamStats product = parallel_stats(
      config.reps, config.threads, [&](std::uint64_t rep) {
        RngStream g(config.seed, rep, StreamPurpose::gaussian_increments);
        RngStream b(config.seed, rep, StreamPurpose::bridge_tests);
        const PairTerminal term =
            direct_pair_terminal(0.0, 1.0, zero, 1.0, config.dt, g, b);
        return term.x1 * term.x2;
      });
  out.product_mean = product.mean;
  out.product_se = product.stderr_of_mean();
  out.product_z =
      (out.product_mean - out.l11) / std::max(out.product_se, 1e-300);

  const std::uint64_t mart_reps = std::max<std::uint64_t>(config.reps / 4, 1);
  const StreamStats mart = parallel_stats(
      mart_reps, config.threads, [&](std::uint64_t rep) {
        RngStream g(config.seed, rep, StreamPurpose::generic);
        const std::int64_t steps = even_step_count(0.0, 1.0, config.dt);
        const double sq = std::sqrt(1.0 / static_cast<double>(steps));
        double x = 2.0;
        for (std::int64_t i = 0; i < steps; ++i) x += sq * g.next_gaussian();
        return x;
      });
  out.martingale_mean = mart.mean;
  out.martingale_se = mart.stderr_of_mean();

  // Composition bitwise: one evaluate_flow call over [0,1] with an eval at
  // 0.5 vs an engine paused at 0.5 and resumed on the same streams.
  {
    const std::vector<Birth> births = {{0.0, 0.0}, {0.7, 0.0}};
    RngStream g1(config.seed, 7, StreamPurpose::gaussian_increments);
    RngStream b1(config.seed, 7, StreamPurpose::bridge_tests);
    const PathRecord rec = evaluate_flow(births, {0.5, 1.0}, 1.0, config.dt,
                                         g1, b1, RecordMode::eval_only);
    RngStream g2(config.seed, 7, StreamPurpose::gaussian_increments);
    RngStream b2(config.seed, 7, StreamPurpose::bridge_tests);
    WebEngine engine(0.0);
    const int id0 = engine.spawn(0.0);
    const int id1 = engine.spawn(0.7);
    engine.advance_to(0.5, config.dt, g2, b2);
    const bool mid_ok = engine.position(id0) == rec.paths[0].x[0] &&
                        engine.position(id1) == rec.paths[1].x[0];
    engine.advance_to(1.0, config.dt, g2, b2);
    const bool end_ok = engine.position(id0) == rec.paths[0].x[1] &&
                        engine.position(id1) == rec.paths[1].x[1];
    out.composition_bitwise_ok = mid_ok && end_ok;
  }

  // Non-crossing and absorbing coalescence on full-grid records.
  out.noncrossing_ok = true;
  out.coalescence_bitwise_ok = true;
  for (std::uint64_t rep = 0; rep < 64; ++rep) {
    RngStream g(config.seed, rep, StreamPurpose::gaussian_increments);
    RngStream b(config.seed, rep, StreamPurpose::bridge_tests);
    const std::vector<Birth> births = {
        {0.0, 0.0}, {0.3, 0.0}, {0.31, 0.25}, {1.0, 0.0}};
    const PathRecord rec = evaluate_flow(births, {1.0}, 1.0, 1e-3, g, b,
                                         RecordMode::full_grid);
    for (std::size_t a = 0; a < rec.paths.size(); ++a) {
      for (std::size_t c = a + 1; c < rec.paths.size(); ++c) {
        const auto& pa = rec.paths[a];
        const auto& pc = rec.paths[c];
        const std::size_t first = std::max(pa.first_index, pc.first_index);
        const std::size_t last = rec.times.size();
        if (first >= last) continue;
        const double xa0 = pa.x[first - pa.first_index];
        const double xc0 = pc.x[first - pc.first_index];
        const bool a_below = xa0 <= xc0;
        bool merged = false;
        for (std::size_t row = first; row < last; ++row) {
          const double xa = pa.x[row - pa.first_index];
          const double xc = pc.x[row - pc.first_index];
          if (a_below ? xa > xc : xc > xa) out.noncrossing_ok = false;
          if (merged && xa != xc) out.coalescence_bitwise_ok = false;
          if (pa.rep[row - pa.first_index] == pc.rep[row - pc.first_index]) {
            merged = true;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace coalflow
