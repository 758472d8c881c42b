#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "core/oracles.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

using namespace coalflow;

TEST_CASE("philox4x32-10 known-answer vectors (Random123)") {
  std::uint32_t out[4];

  const std::uint32_t zeros[4] = {0, 0, 0, 0};
  const std::uint32_t zero_key[2] = {0, 0};
  detail::philox4x32_10(zeros, zero_key, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  const std::uint32_t ones[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu,
                                 0xffffffffu};
  const std::uint32_t ones_key[2] = {0xffffffffu, 0xffffffffu};
  detail::philox4x32_10(ones, ones_key, out);
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  const std::uint32_t pi_ctr[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                   0x03707344u};
  const std::uint32_t pi_key[2] = {0xa4093822u, 0x299f31d0u};
  detail::philox4x32_10(pi_ctr, pi_key, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("stream determinism and label separation") {
  const RngSpec spec{0xDEADBEEFCAFEF00DULL};
  RngStream a(spec, 7, StreamPurpose::gaussian_increments);
  RngStream b(spec, 7, StreamPurpose::gaussian_increments);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }

  RngStream c(spec, 8, StreamPurpose::gaussian_increments);
  RngStream d(spec, 7, StreamPurpose::bridge_tests);
  RngStream e(spec, 7, StreamPurpose::gaussian_increments);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t ref = e.next_u64();
    same_c += (c.next_u64() == ref);
    same_d += (d.next_u64() == ref);
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("normal inverse CDF round-trips against the normal CDF") {
  // Independent routes: AS241 rational approximation vs erfc-based CDF.
  for (double p = 1e-12; p < 1.0; p = p * 1.31 + 1e-3) {
    const double z = detail::normal_ppf(p);
    const double back = oracles::normal_cdf(z);
    CHECK(std::abs(back - p) <= 2e-13 + 1e-12 * p);
  }
  CHECK(detail::normal_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(detail::normal_ppf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("gaussian_stream: determinism and moments at 1e6 draws") {
  const RngSpec spec{12345};
  const auto xs = gaussian_stream(spec, 0, StreamPurpose::generic, 1u << 20);
  const auto ys = gaussian_stream(spec, 0, StreamPurpose::generic, 1u << 20);
  CHECK(xs == ys);

  StreamStats stats;
  for (double x : xs) stats.update(x);
  const double n = static_cast<double>(stats.n);
  CHECK(std::abs(stats.mean) <= 4.0 / std::sqrt(n));
  // Chi-square concentration: sd of the sample variance is sqrt(2/n) ~ 0.0014,
  // so a 1% window is ~7 sigma.
  CHECK(stats.variance() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniforms live in [0,1) and gaussians are symmetric-ish") {
  RngStream s({99}, 3, StreamPurpose::generic);
  int neg = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = s.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    neg += (s.next_gaussian() < 0.0);
  }
  CHECK(neg > 9500);
  CHECK(neg < 10500);
}
