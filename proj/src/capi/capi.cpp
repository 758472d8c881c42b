#include "coalflow/coalflow.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/experiments.hpp"
#include "core/model.hpp"
#include "core/oracles.hpp"
#include "core/version.hpp"

using json = nlohmann::ordered_json;
using namespace coalflow;

struct coalflow_drift {
  DriftModel model;
};

struct coalflow_run {
  std::string summary;
  std::vector<std::pair<std::string, std::string>> documents;
};

namespace {

thread_local std::string g_last_error;

coalflow_status set_error(coalflow_status code, const char* what) {
  g_last_error = what != nullptr ? what : "";
  return code;
}

template <typename Fn>
coalflow_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return COALFLOW_OK;
  } catch (const std::invalid_argument& e) {
    return set_error(COALFLOW_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc& e) {
    return set_error(COALFLOW_ERR_NO_MEMORY, e.what());
  } catch (const std::exception& e) {
    return set_error(COALFLOW_ERR_RUNTIME, e.what());
  } catch (...) {
    return set_error(COALFLOW_ERR_RUNTIME, "unknown error");
  }
}

coalflow_status scalar_out(double value, double* out) {
  if (out == nullptr) {
    return set_error(COALFLOW_ERR_INVALID_ARGUMENT, "null output pointer");
  }
  *out = value;
  g_last_error.clear();
  return COALFLOW_OK;
}

// JSON has no inf/nan literals; the summaries encode them as null.
json number_or_null(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

const DriftModel& model_of(const coalflow_drift* drift) {
  if (drift == nullptr) throw std::invalid_argument("null drift handle");
  return drift->model;
}

coalflow_run* make_run(std::string summary,
                       std::vector<std::pair<std::string, std::string>> docs) {
  auto* run = new coalflow_run;
  run->summary = std::move(summary);
  run->documents = std::move(docs);
  return run;
}

}  // namespace

const char* coalflow_version(void) { return kVersion; }

const char* coalflow_last_error(void) { return g_last_error.c_str(); }

coalflow_status coalflow_drift_create(const char* kind, const double* params,
                                      size_t n_params, coalflow_drift** out) {
  return guarded([&] {
    if (kind == nullptr || out == nullptr) {
      throw std::invalid_argument("null argument");
    }
    std::vector<double> p(params, params + n_params);
    *out = new coalflow_drift{DriftModel::from_name(kind, p)};
  });
}

void coalflow_drift_destroy(coalflow_drift* drift) { delete drift; }

coalflow_status coalflow_drift_eval(const coalflow_drift* drift, double u,
                                    double* out) {
  return guarded([&] { scalar_out(model_of(drift).eval(u), out); });
}

coalflow_status coalflow_drift_lipschitz(const coalflow_drift* drift,
                                         double* out) {
  return guarded([&] { scalar_out(model_of(drift).lipschitz(), out); });
}

coalflow_status coalflow_oracle_phi_c(double c, double t, double* out) {
  return guarded([&] { scalar_out(oracles::phi_time_change(c, t), out); });
}

coalflow_status coalflow_oracle_meeting_survival_linear(double c, double u1,
                                                        double u2, double t,
                                                        double* out) {
  return guarded(
      [&] { scalar_out(oracles::meeting_survival_linear(c, u1, u2, t), out); });
}

coalflow_status coalflow_oracle_meeting_never_prob_linear(double c, double u1,
                                                          double u2,
                                                          double* out) {
  return guarded(
      [&] { scalar_out(oracles::meeting_never_prob_linear(c, u1, u2), out); });
}

coalflow_status coalflow_oracle_l_defect(double t, double u, double* out) {
  return guarded([&] { scalar_out(oracles::l_defect(t, u), out); });
}

coalflow_status coalflow_oracle_l_upper_bound(double t, double u, double* out) {
  return guarded([&] { scalar_out(oracles::l_upper_bound(t, u), out); });
}

coalflow_status coalflow_oracle_expected_cluster_size_linear(double c, double t,
                                                             double* out) {
  return guarded(
      [&] { scalar_out(oracles::expected_cluster_size_linear(c, t), out); });
}

coalflow_status coalflow_oracle_normal_cdf(double x, double* out) {
  return guarded([&] { scalar_out(oracles::normal_cdf(x), out); });
}

const char* coalflow_run_summary(const coalflow_run* run) {
  return run != nullptr ? run->summary.c_str() : "";
}

size_t coalflow_run_document_count(const coalflow_run* run) {
  return run != nullptr ? run->documents.size() : 0;
}

const char* coalflow_run_document_name(const coalflow_run* run, size_t index) {
  if (run == nullptr || index >= run->documents.size()) return nullptr;
  return run->documents[index].first.c_str();
}

const char* coalflow_run_document_content(const coalflow_run* run,
                                          size_t index) {
  if (run == nullptr || index >= run->documents.size()) return nullptr;
  return run->documents[index].second.c_str();
}

void coalflow_run_destroy(coalflow_run* run) { delete run; }

coalflow_status coalflow_run_meet(const coalflow_drift* drift, double u1,
                                  double u2, double horizon, double dt,
                                  const double* survival_times,
                                  size_t n_survival_times, uint64_t reps,
                                  uint64_t seed, int threads,
                                  coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("null output pointer");
    MeetRunConfig config;
    config.drift = model_of(drift);
    config.u1 = u1;
    config.u2 = u2;
    config.horizon = horizon;
    config.dt = dt;
    config.reps = reps;
    config.seed = {seed};
    config.threads = threads;
    config.survival_times.assign(survival_times,
                                 survival_times + n_survival_times);
    const MeetRunResult result = run_meet(config);

    json summary;
    summary["command"] = "meet";
    summary["drift"] = config.drift.name();
    summary["reps"] = reps;
    summary["meet_probability"] = result.meet_fraction;
    summary["meet_stderr"] = result.meet_stderr;
    summary["have_oracle"] = result.have_oracle;
    if (result.have_oracle) {
      summary["oracle_meet_probability"] = result.oracle_meet_prob;
      summary["atom_z"] = result.atom_z;
      summary["ks_conditioned"] =
          result.ks_defined ? json(result.ks_d) : json(nullptr);
    }
    json survival = json::array();
    for (const auto& p : result.survival) {
      json row;
      row["t"] = p.t;
      row["empirical_survival"] = p.empirical;
      row["stderr"] = p.stderr_;
      row["oracle_survival"] = number_or_null(p.oracle);
      survival.push_back(row);
    }
    summary["survival"] = survival;
    *out = make_run(summary.dump(2),
                    {{"samples.csv",
                      render_meeting_samples_csv(result.samples)}});
  });
}

coalflow_status coalflow_run_cluster(const coalflow_drift* drift,
                                     const double* ts, size_t n_ts, int grid_m,
                                     uint64_t reps_per_node, double dt,
                                     const char* method, uint64_t seed,
                                     int threads, coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr || ts == nullptr || method == nullptr) {
      throw std::invalid_argument("null argument");
    }
    ClusterRunConfig config;
    config.drift = model_of(drift);
    config.ts.assign(ts, ts + n_ts);
    config.grid_m = grid_m;
    config.reps = reps_per_node;
    config.dt = dt;
    config.seed = {seed};
    config.threads = threads;
    const std::string method_name = method;
    if (method_name == "pair-quadrature") {
      config.method = ClusterMethod::pair_quadrature;
    } else if (method_name == "fan") {
      config.method = ClusterMethod::fan;
    } else {
      throw std::invalid_argument("method must be pair-quadrature or fan");
    }
    const auto rows = run_cluster(config);

    json summary;
    summary["command"] = "cluster";
    summary["drift"] = config.drift.name();
    summary["method"] = method_name;
    summary["grid_m"] = grid_m;
    json estimates = json::array();
    for (const auto& r : rows) {
      json row;
      row["t"] = r.t;
      row["value"] = r.value;
      row["stderr"] = r.stderr_;
      row["reps"] = r.reps;
      if (config.drift.kind() == DriftKind::linear ||
          config.drift.is_zero()) {
        const double c = config.drift.is_zero() ? 0.0
                                                : config.drift.params()[0];
        row["oracle"] = oracles::expected_cluster_size_linear(c, r.t);
        row["ratio_sqrt_t"] = r.value / std::sqrt(r.t);
      }
      estimates.push_back(row);
    }
    summary["estimates"] = estimates;
    *out = make_run(summary.dump(2),
                    {{"cluster.csv", render_cluster_estimates_csv(rows)}});
  });
}

coalflow_status coalflow_run_trotter_record(const coalflow_drift* drift,
                                            const double* starts,
                                            size_t n_starts, int partition_n,
                                            double dt, uint64_t seed,
                                            coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr || starts == nullptr) {
      throw std::invalid_argument("null argument");
    }
    const std::vector<double> start_list(starts, starts + n_starts);
    const Partition partition = Partition::uniform(partition_n);
    RngStream g({seed}, 0, StreamPurpose::gaussian_increments);
    RngStream b({seed}, 0, StreamPurpose::bridge_tests);
    const SplitPathRecord rec =
        trotter_simulate(start_list, partition, model_of(drift), dt, g, b,
                         SplitRecordMode::full);
    json summary;
    summary["command"] = "trotter-record";
    summary["drift"] = model_of(drift).name();
    summary["partition_n"] = partition_n;
    summary["rows"] = rec.times.size();
    summary["bookkeeping_identity"] = bookkeeping_identity_holds(rec);
    json sups = json::array();
    for (const auto& p : rec.particles) sups.push_back(p.sup_abs_drift);
    summary["sup_abs_drift"] = sups;
    *out = make_run(summary.dump(2),
                    {{"record.csv", render_split_record_csv(rec)}});
  });
}

coalflow_status coalflow_run_trotter_compare(const coalflow_drift* drift,
                                             double u1, double u2,
                                             const int* ns, size_t n_ns,
                                             double dt, uint64_t reps,
                                             uint64_t seed, int threads,
                                             coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr || ns == nullptr) {
      throw std::invalid_argument("null argument");
    }
    TrotterCompareConfig config;
    config.drift = model_of(drift);
    config.u1 = u1;
    config.u2 = u2;
    config.ns.assign(ns, ns + n_ns);
    config.dt = dt;
    config.reps = reps;
    config.seed = {seed};
    config.threads = threads;
    const auto rows = run_trotter_compare(config);
    json summary;
    summary["command"] = "trotter-compare";
    summary["drift"] = config.drift.name();
    summary["reps_per_side"] = reps;
    json comparisons = json::array();
    for (const auto& r : rows) {
      json row;
      row["partition_n"] = r.n;
      row["ks_terminal_1"] = r.ks1;
      row["ks_terminal_2"] = r.ks2;
      row["ks_max"] = r.ks_max;
      row["meet_trotter"] = r.meet_trotter;
      row["meet_direct"] = r.meet_direct;
      row["meet_z"] = r.meet_z;
      comparisons.push_back(row);
    }
    summary["comparisons"] = comparisons;
    *out = make_run(summary.dump(2), {});
  });
}

coalflow_status coalflow_run_trotter_diagnostics(
    const coalflow_drift* drift, const double* starts, size_t n_starts,
    int partition_n, double dt, uint64_t reps, uint64_t seed, int threads,
    coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr || starts == nullptr) {
      throw std::invalid_argument("null argument");
    }
    TrotterDiagConfig config;
    config.drift = model_of(drift);
    config.starts.assign(starts, starts + n_starts);
    config.partition_n = partition_n;
    config.dt = dt;
    config.reps = reps;
    config.seed = {seed};
    config.threads = threads;
    const TrotterDiagResult result = run_trotter_diagnostics(config);
    json summary;
    summary["command"] = "trotter-diagnostics";
    summary["drift"] = config.drift.name();
    summary["partition_n"] = partition_n;
    summary["reps"] = result.reps;
    summary["jump_bound_ok"] = result.jump_bound_ok;
    summary["jump_bound_fraction"] =
        static_cast<double>(result.jump_bound_ok) /
        static_cast<double>(result.reps);
    summary["bookkeeping_identity"] = result.bookkeeping_ok;
    summary["m_increments"] = result.increments;
    summary["bm_mean_z"] = result.bm.mean_z;
    summary["bm_variance_ratio"] = result.bm.variance_ratio;
    summary["bm_lag1_corr"] = result.bm.lag1_corr;
    summary["bm_qv_mean"] = result.bm.qv_mean;
    summary["bm_qv_paths"] = result.bm.qv_paths;
    summary["terminal_mean"] = result.terminal_mean;
    summary["terminal_se"] = result.terminal_se;
    *out = make_run(summary.dump(2), {});
  });
}

coalflow_status coalflow_run_prop1(const int* ns, size_t n_ns, double r,
                                   double s, double t, uint64_t reps, double dt,
                                   uint64_t seed, int threads,
                                   coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr || ns == nullptr) {
      throw std::invalid_argument("null argument");
    }
    json summary;
    summary["command"] = "prop1";
    summary["r"] = r;
    summary["s"] = s;
    summary["t"] = t;
    summary["reps"] = reps;
    json estimates = json::array();
    for (size_t i = 0; i < n_ns; ++i) {
      Prop1Config config;
      config.n = ns[i];
      config.r = r;
      config.s = s;
      config.t = t;
      config.reps = reps;
      config.dt = dt;
      config.seed = {seed};
      config.threads = threads;
      const EstimateResult est = prop1_sum_estimate(config);
      json row;
      row["n"] = ns[i];
      row["estimate"] = est.value;
      row["stderr"] = est.stderr_;
      row["z_vs_zero"] = est.value / (est.stderr_ > 0 ? est.stderr_ : 1.0);
      estimates.push_back(row);
    }
    summary["estimates"] = estimates;
    *out = make_run(summary.dump(2), {});
  });
}

coalflow_status coalflow_run_sandwich(const coalflow_drift* drift, double u1,
                                      double u2, double gamma, double horizon,
                                      double dt, uint64_t reps, uint64_t seed,
                                      int threads, coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("null output pointer");
    SandwichRunConfig config;
    config.drift = model_of(drift);
    config.u1 = u1;
    config.u2 = u2;
    config.gamma = gamma;
    config.horizon = horizon;
    config.dt = dt;
    config.reps = reps;
    config.seed = {seed};
    config.threads = threads;
    const SandwichRunResult result = run_sandwich(config);
    json summary;
    summary["command"] = "sandwich";
    summary["drift"] = config.drift.name();
    summary["lipschitz"] = config.drift.lipschitz();
    summary["reps"] = result.reps;
    summary["holds"] = result.holds;
    summary["holds_fraction"] = static_cast<double>(result.holds) /
                                static_cast<double>(result.reps);
    summary["max_violation"] = result.max_violation;
    summary["stopped"] = result.stopped;
    summary["zero_case_bitwise"] = result.zero_case_bitwise;

    // one replica's coupled record for inspection
    RngStream g({seed}, 0, StreamPurpose::sandwich);
    const SandwichRecord rec = sandwich_simulate(config.drift, u1, u2, horizon,
                                                 dt, g, gamma);
    *out = make_run(summary.dump(2),
                    {{"sandwich.csv", render_sandwich_record_csv(rec)}});
  });
}

coalflow_status coalflow_run_webtest(double dt, uint64_t reps, uint64_t seed,
                                     int threads, coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("null output pointer");
    WebTestConfig config;
    config.dt = dt;
    config.reps = reps;
    config.seed = {seed};
    config.threads = threads;
    const WebTestResult result = run_webtest(config);
    json summary;
    summary["command"] = "webtest";
    summary["reps"] = reps;
    json oracle;
    oracle["l_dual_max_gap"] = result.oracle.l_dual_max_gap;
    oracle["l_bounds_ok"] = result.oracle.l_bounds_ok;
    oracle["phi_quad_max_gap"] = result.oracle.phi_quad_max_gap;
    oracle["survival_quad_max_gap"] = result.oracle.survival_quad_max_gap;
    oracle["ecs_quad_max_gap"] = result.oracle.ecs_quad_max_gap;
    oracle["monotonicity_ok"] = result.oracle.monotonicity_ok;
    oracle["l_bound_constant"] = result.oracle.l_bound_constant;
    summary["oracle_selfcheck"] = oracle;
    summary["product_mean"] = result.product_mean;
    summary["product_se"] = result.product_se;
    summary["l_1_1"] = result.l11;
    summary["product_z"] = result.product_z;
    summary["martingale_mean"] = result.martingale_mean;
    summary["martingale_se"] = result.martingale_se;
    summary["composition_bitwise_ok"] = result.composition_bitwise_ok;
    summary["noncrossing_ok"] = result.noncrossing_ok;
    summary["coalescence_bitwise_ok"] = result.coalescence_bitwise_ok;
    *out = make_run(summary.dump(2), {});
  });
}

coalflow_status coalflow_run_web_record(const double* starts, size_t n_starts,
                                        double horizon, double dt,
                                        uint64_t seed, coalflow_run** out) {
  return guarded([&] {
    if (out == nullptr || starts == nullptr) {
      throw std::invalid_argument("null argument");
    }
    std::vector<Birth> births;
    births.reserve(n_starts);
    for (size_t i = 0; i < n_starts; ++i) births.push_back({starts[i], 0.0});
    std::sort(births.begin(), births.end(),
              [](const Birth& a, const Birth& b) {
                return a.position < b.position;
              });
    RngStream g({seed}, 0, StreamPurpose::gaussian_increments);
    RngStream b({seed}, 0, StreamPurpose::bridge_tests);
    const PathRecord rec = evaluate_flow(births, {horizon}, horizon, dt, g, b,
                                         RecordMode::full_grid);
    json summary;
    summary["command"] = "web-record";
    summary["particles"] = n_starts;
    summary["rows"] = rec.times.size();
    summary["merge_events"] = rec.events.size();
    *out = make_run(summary.dump(2),
                    {{"paths.csv", render_path_record_csv(rec)},
                     {"events.csv", render_merge_events_csv(rec.events)}});
  });
}
