#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coalflow {

double StreamStats::stderr_of_mean() const {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

KsResult ks_against_cdf(const std::vector<MeetingSample>& samples,
                        const std::function<double(double)>& cdf,
                        double horizon) {
  if (samples.empty()) throw std::invalid_argument("ks: empty sample");
  KsResult out;
  std::vector<double> met_times;
  met_times.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.met) met_times.push_back(s.time);
  }
  out.n_met = met_times.size();
  out.emp_meet_fraction =
      static_cast<double>(out.n_met) / static_cast<double>(samples.size());
  out.oracle_meet_prob = cdf(horizon);
  const double p = out.oracle_meet_prob;
  const double se =
      std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                static_cast<double>(samples.size()));
  out.atom_z = (out.emp_meet_fraction - p) / se;

  if (out.n_met == 0) return out;  // KS undefined, atom comparison stands
  std::sort(met_times.begin(), met_times.end());
  const double denom = cdf(horizon);
  double d = 0.0;
  for (std::size_t i = 0; i < met_times.size(); ++i) {
    const double g = cdf(met_times[i]) / denom;
    const double f =
        static_cast<double>(i + 1) / static_cast<double>(met_times.size());
    d = std::max(d, std::abs(f - g));
  }
  out.d_defined = true;
  out.d = d;
  return out;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("two_sample_ks: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    // step both CDFs past the smaller value; ties advance together
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

BmReport bm_diagnostics(const std::vector<BmIncrement>& increments) {
  if (increments.empty()) {
    throw std::invalid_argument("bm_diagnostics: empty input");
  }
  BmReport report;
  report.n = increments.size();

  StreamStats z_stats;
  double lag_num = 0.0;
  double prev_z = 0.0;
  bool have_prev = false;
  double qv_acc = 0.0, span_acc = 0.0, qv_total = 0.0;
  std::size_t paths = 0;
  for (const auto& inc : increments) {
    if (!(inc.span > 0.0)) {
      throw std::invalid_argument("bm_diagnostics: nonpositive span");
    }
    const double z = inc.value / std::sqrt(inc.span);
    z_stats.update(z);
    if (have_prev) lag_num += prev_z * z;
    prev_z = z;
    have_prev = true;
    qv_acc += inc.value * inc.value;
    span_acc += inc.span;
    if (span_acc >= 1.0 - 1e-9) {
      qv_total += qv_acc;
      ++paths;
      qv_acc = 0.0;
      span_acc = 0.0;
    }
  }
  const double n = static_cast<double>(report.n);
  report.mean_z = z_stats.mean * std::sqrt(n);
  report.variance_ratio = z_stats.variance();
  report.lag1_corr =
      report.n > 1 ? (lag_num / (n - 1.0)) / std::max(z_stats.variance(), 1e-300)
                   : 0.0;
  report.qv_paths = paths;
  report.qv_mean = paths > 0 ? qv_total / static_cast<double>(paths) : 0.0;
  return report;
}

}  // namespace coalflow
