#include "core/rng.hpp"

#include <cmath>

namespace coalflow {
namespace detail {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::uint32_t x[4], const std::uint32_t key[2]) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mul_hi_lo(kPhiloxM0, x[0], hi0, lo0);
  mul_hi_lo(kPhiloxM1, x[2], hi1, lo1);
  const std::uint32_t y0 = hi1 ^ x[1] ^ key[0];
  const std::uint32_t y1 = lo1;
  const std::uint32_t y2 = hi0 ^ x[3] ^ key[1];
  const std::uint32_t y3 = lo0;
  x[0] = y0;
  x[1] = y1;
  x[2] = y2;
  x[3] = y3;
}

}  // namespace

void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2],
                   std::uint32_t out[4]) {
  std::uint32_t x[4] = {counter[0], counter[1], counter[2], counter[3]};
  std::uint32_t k[2] = {key[0], key[1]};
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    philox_round(x, k);
  }
  out[0] = x[0];
  out[1] = x[1];
  out[2] = x[2];
  out[3] = x[3];
}

namespace {

// ascending-degree coefficients
template <std::size_t N>
double horner(const double (&coef)[N], double x) {
  double acc = coef[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + coef[i];
  return acc;
}

}  // namespace

double normal_ppf(double p) {
  // Wichura's algorithm AS 241, PPND16.  Relative error below 1e-15 on
  // (0, 1); the round trip against normal_cdf is checked in the tests.
  static constexpr double kA[8] = {
      3.3871328727963666080e+0, 1.3314166789178437745e+2,
      1.9715909503065514427e+3, 1.3731693765509461125e+4,
      4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double kB[8] = {
      1.0,                      4.2313330701600911252e+1,
      6.8718700749205790830e+2, 5.3941960214247511077e+3,
      2.1213794301586595867e+4, 3.9307895800092710610e+4,
      2.8729085735721942674e+4, 5.2264952788528545610e+3};
  static constexpr double kC[8] = {
      1.42343711074968357734e+0, 4.63033784615654529590e+0,
      5.76949722146069140550e+0, 3.64784832476320460504e+0,
      1.27045825245236838258e+0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double kD[8] = {
      1.0,                       2.05319162663775882187e+0,
      1.67638483018380384940e+0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static constexpr double kE[8] = {
      6.65790464350110377720e+0, 5.46378491116411436990e+0,
      1.78482653991729133580e+0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double kF[7] = {
      1.0,                       5.99832206555887937690e-1,
      1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-6,
      1.42151175831644588870e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, r) / horner(kB, r);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(kC, r) / horner(kD, r);
  } else {
    r -= 5.0;
    x = horner(kE, r) / horner(kF, r);
  }
  return (q < 0.0) ? -x : x;
}

}  // namespace detail

RngStream::RngStream(RngSpec spec, std::uint64_t replica,
                     StreamPurpose purpose) {
  const std::uint64_t key = detail::mix64(
      spec.master_seed ^
      (0x9E3779B97F4A7C15ULL *
       (static_cast<std::uint64_t>(purpose) + 1)));
  key_[0] = static_cast<std::uint32_t>(key);
  key_[1] = static_cast<std::uint32_t>(key >> 32);
  replica_lo_ = static_cast<std::uint32_t>(replica);
  replica_hi_ = static_cast<std::uint32_t>(replica >> 32);
}

void RngStream::refill() {
  const std::uint32_t counter[4] = {static_cast<std::uint32_t>(block_),
                                    static_cast<std::uint32_t>(block_ >> 32),
                                    replica_lo_, replica_hi_};
  detail::philox4x32_10(counter, key_, buf_);
  ++block_;
  left_ = 4;
}

std::uint32_t RngStream::next_u32() {
  if (left_ == 0) refill();
  return buf_[4 - left_--];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  // (0,1)-open uniform keeps the inverse CDF finite; the extreme tails are
  // cut at |z| ~ 8.2, far below Monte Carlo resolution at any scale used.
  const double u =
      (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  return detail::normal_ppf(u);
}

std::vector<double> gaussian_stream(RngSpec spec, std::uint64_t replica,
                                    StreamPurpose purpose, std::size_t count) {
  RngStream stream(spec, replica, purpose);
  std::vector<double> out(count);
  for (auto& v : out) v = stream.next_gaussian();
  return out;
}

}  // namespace coalflow
