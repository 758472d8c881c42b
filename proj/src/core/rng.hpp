#pragma once

#include <cstdint>
#include <vector>

namespace coalflow {

// Every random draw in the project is a pure function of
// (master_seed, replica, purpose, draw counter).  Streams with distinct
// labels are statistically independent, so replicas can run on any thread
// schedule and still reproduce bit-identically.
struct RngSpec {
  std::uint64_t master_seed = 0;
};

// Purpose tags keep logically distinct draw sequences on disjoint streams.
// Keeping bridge-test uniforms away from the gaussian increments means the
// increment sequence of a replica does not shift when the number of live
// pairs changes.
enum class StreamPurpose : std::uint32_t {
  gaussian_increments = 1,
  bridge_tests = 2,
  direct_increments = 3,
  direct_bridge = 4,
  sandwich = 5,
  generic = 6,
};

namespace detail {

// Stateless splitmix64 finalizer, used to derive Philox keys from labels.
std::uint64_t mix64(std::uint64_t z);

// Philox4x32-10 block function (Salmon et al., SC'11).
void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);

// AS 241 (Wichura): inverse of the standard normal CDF, double precision.
double normal_ppf(double p);

}  // namespace detail

// One counter-based stream.  The key encodes (master_seed, purpose); the
// 128-bit counter encodes (block index, replica), so a stream can emit
// 2^64 blocks of four 32-bit words without label collisions.
class RngStream {
 public:
  RngStream(RngSpec spec, std::uint64_t replica, StreamPurpose purpose);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1), 53-bit resolution.
  double next_uniform();
  // Standard normal via the inverse CDF; platform-independent.
  double next_gaussian();

 private:
  void refill();

  std::uint32_t key_[2];
  std::uint32_t replica_lo_;
  std::uint32_t replica_hi_;
  std::uint64_t block_ = 0;
  std::uint32_t buf_[4];
  int left_ = 0;
};

// `count` standard normals from the labeled stream, counter starting at 0.
std::vector<double> gaussian_stream(RngSpec spec, std::uint64_t replica,
                                    StreamPurpose purpose, std::size_t count);

}  // namespace coalflow
