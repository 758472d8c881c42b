#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/oracles.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

using namespace coalflow;

namespace {

StreamStats stats_of(std::initializer_list<double> xs) {
  StreamStats s;
  for (double x : xs) s.update(x);
  return s;
}

}  // namespace

TEST_CASE("stream stats: examples") {
  StreamStats s;
  s.update(2.0);
  CHECK(s.n == 1);
  CHECK(s.mean == 2.0);

  const StreamStats a = stats_of({1.0, 2.0});
  const StreamStats b = stats_of({3.0, 4.0});
  const StreamStats m = StreamStats::merged(a, b);
  const StreamStats direct = stats_of({1.0, 2.0, 3.0, 4.0});
  CHECK(m.n == direct.n);
  CHECK(m.mean == direct.mean);  // exact for these values
  CHECK(m.m2 == direct.m2);
}

TEST_CASE("stream stats: merge equals concatenation (property)") {
  RngStream rng({5}, 0, StreamPurpose::generic);
  for (int trial = 0; trial < 100; ++trial) {
    StreamStats left, right, all;
    const int nl = 1 + static_cast<int>(rng.next_uniform() * 40);
    const int nr = 1 + static_cast<int>(rng.next_uniform() * 40);
    for (int i = 0; i < nl + nr; ++i) {
      const double x = rng.next_gaussian() * 3.0 + 1.0;
      (i < nl ? left : right).update(x);
      all.update(x);
    }
    const StreamStats m = StreamStats::merged(left, right);
    CHECK(m.n == all.n);
    CHECK(m.mean == doctest::Approx(all.mean).epsilon(1e-12));
    CHECK(m.m2 == doctest::Approx(all.m2).epsilon(1e-10));
  }
}

TEST_CASE("stream stats: merge is deterministic in fixed order") {
  RngStream rng({6}, 0, StreamPurpose::generic);
  std::vector<StreamStats> chunks(8);
  for (int i = 0; i < 512; ++i) chunks[i / 64].update(rng.next_gaussian());
  StreamStats once, twice;
  for (const auto& c : chunks) once = StreamStats::merged(once, c);
  for (const auto& c : chunks) twice = StreamStats::merged(twice, c);
  CHECK(once.mean == twice.mean);
  CHECK(once.m2 == twice.m2);
}

TEST_CASE("stream stats: variance of 1e6 normals within 1%") {
  RngStream rng({7}, 0, StreamPurpose::generic);
  StreamStats s;
  for (int i = 0; i < 1000000; ++i) s.update(rng.next_gaussian());
  CHECK(s.variance() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("ks: null case via inverse transform") {
  // sample from the oracle CDF itself: tau with P{tau<=t} = erfc(0.25/sqrt(t))
  const auto cdf = [](double t) { return oracles::reflection_meet_cdf(0.5, t); };
  const double horizon = 1.0;
  const double p_meet = cdf(horizon);
  RngStream rng({8}, 0, StreamPurpose::generic);
  std::vector<MeetingSample> samples;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    if (rng.next_uniform() < p_meet) {
      // invert the conditioned CDF by bisection
      const double target = rng.next_uniform() * p_meet;
      double lo = 1e-12, hi = horizon;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < target ? lo : hi) = mid;
      }
      samples.push_back({true, 0.5 * (lo + hi)});
    } else {
      samples.push_back({});
    }
  }
  const KsResult ks = ks_against_cdf(samples, cdf, horizon);
  CHECK(ks.d_defined);
  CHECK(ks.d <= 1.63 / std::sqrt(static_cast<double>(ks.n_met)));
  CHECK(std::abs(ks.atom_z) <= 4.0);
}

TEST_CASE("ks: designed failure when all samples miss") {
  std::vector<MeetingSample> samples(1000);
  const auto cdf = [](double t) { return 0.7 * std::min(t, 1.0); };
  const KsResult ks = ks_against_cdf(samples, cdf, 1.0);
  CHECK_FALSE(ks.d_defined);
  CHECK(ks.emp_meet_fraction == 0.0);
  CHECK(std::abs(ks.atom_z) > 10.0);
}

TEST_CASE("ks: exact rank quantiles give D = 0") {
  const auto cdf = [](double t) { return t; };  // uniform on [0,1]
  const int n = 100;
  std::vector<MeetingSample> samples;
  for (int i = 1; i <= n; ++i) {
    samples.push_back({true, static_cast<double>(i) / n});
  }
  const KsResult ks = ks_against_cdf(samples, cdf, 1.0);
  CHECK(ks.d == 0.0);
}

TEST_CASE("two-sample ks: identical samples score 0") {
  std::vector<double> a{0.1, 0.7, 0.3, 0.9};
  CHECK(two_sample_ks(a, a) == 0.0);
  std::vector<double> b{10.0, 11.0, 12.0};
  CHECK(two_sample_ks(a, b) == 1.0);
}

TEST_CASE("bm diagnostics: synthetic BM passes, drifted fails") {
  RngStream rng({9}, 0, StreamPurpose::generic);
  std::vector<BmIncrement> good, bad;
  const double span = 1.0 / 16.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = std::sqrt(span) * rng.next_gaussian();
    good.push_back({v, span});
    bad.push_back({v + 1.0 * span, span});
  }
  const BmReport ok = bm_diagnostics(good);
  CHECK(std::abs(ok.mean_z) <= 3.0);
  CHECK(ok.variance_ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(ok.lag1_corr) <=
        3.0 / std::sqrt(static_cast<double>(ok.n)));
  CHECK(ok.qv_mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(ok.qv_paths == 100000 / 16);

  const BmReport drifted = bm_diagnostics(bad);
  CHECK(std::abs(drifted.mean_z) > 10.0);

  CHECK_THROWS_AS(bm_diagnostics({}), std::invalid_argument);
}
