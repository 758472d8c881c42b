#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/web.hpp"

namespace coalflow {

// Single-pass moments (Welford), mergeable with Chan's update.  Merging in a
// fixed order is bit-reproducible, which is how replica-parallel runs stay
// deterministic.
struct StreamStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void update(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  static StreamStats merged(const StreamStats& a, const StreamStats& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    StreamStats out;
    out.n = a.n + b.n;
    const double delta = b.mean - a.mean;
    const double nb_over_n =
        static_cast<double>(b.n) / static_cast<double>(out.n);
    out.mean = a.mean + delta * nb_over_n;
    out.m2 = a.m2 + b.m2 +
             delta * delta * static_cast<double>(a.n) * nb_over_n;
    return out;
  }

  double variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
  double stderr_of_mean() const;
};

// A Monte Carlo point estimate with provenance.
struct EstimateResult {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
};

struct KsResult {
  bool d_defined = false;
  double d = 0.0;
  std::size_t n_met = 0;
  double emp_meet_fraction = 0.0;
  double oracle_meet_prob = 0.0;
  double atom_z = 0.0;  // binomial z of the meet fraction vs the oracle atom
};

// Splits the mixed law: the atom (never met by the horizon) is compared by
// binomial z-score; the met-conditioned times get a one-sample KS statistic
// against cdf(t)/cdf(horizon).  D is evaluated at the sample points
// (right-continuous convention), so a sample sitting exactly at the oracle's
// rank quantiles scores D = 0.
KsResult ks_against_cdf(const std::vector<MeetingSample>& samples,
                        const std::function<double(double)>& cdf,
                        double horizon);

// Two-sample KS statistic; inputs are copied and sorted.
double two_sample_ks(std::vector<double> a, std::vector<double> b);

struct BmIncrement {
  double value = 0.0;
  double span = 0.0;
};

struct BmReport {
  std::size_t n = 0;
  double mean_z = 0.0;          // sqrt(n) * mean of value/sqrt(span)
  double variance_ratio = 0.0;  // sample variance of value/sqrt(span)
  double lag1_corr = 0.0;
  double qv_mean = 0.0;  // mean total quadratic variation per unit path
  std::size_t qv_paths = 0;
};

// Brownian-increment diagnostics on non-overlapping (value, span) pairs.
// Consecutive increments are grouped into unit-length paths (spans
// accumulating to 1) for the quadratic-variation summary.
BmReport bm_diagnostics(const std::vector<BmIncrement>& increments);

}  // namespace coalflow
