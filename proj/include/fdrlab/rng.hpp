#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fdrlab {

namespace detail {

// Philox 4x64, 10 rounds. Counter-based: the block at a given counter/key is
// a pure function, so streams never share mutable state.
inline std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                               std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
    const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
    const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace detail

/// Deterministic pseudo-random stream keyed by (seed, stream_id).
///
/// Same key always yields the identical sequence; distinct keys yield
/// statistically independent streams. split() derives a child stream whose
/// key is a Philox hash of (parent key, child id), so hierarchies of streams
/// (replication -> variable) need no coordination.
class RandomStream {
 public:
  RandomStream(std::uint64_t key0, std::uint64_t key1)
      : key_{key0, key1} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe to pass to log().
  double uniform_oc() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer on [0, bound) via multiply-shift.
  std::uint64_t uniform_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Standard normal via Box-Muller (second variate cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_oc()));
    const double a = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard exponential.
  double exponential() { return -std::log(uniform_oc()); }

  /// Child stream for the given id; independent of this stream and of all
  /// siblings. Does not consume from the parent.
  RandomStream split(std::uint64_t child_id) const {
    // Lane 3 tags split derivations; generation counters keep lane 3 == 0,
    // so the two uses of the key never overlap.
    const auto block = detail::philox4x64({child_id, 0, 0, kSplitTag}, key_);
    return RandomStream(block[0], block[1]);
  }

 private:
  static constexpr std::uint64_t kSplitTag = 0x73706c6974ull;  // "split"

  void refill() {
    // Increment-then-generate with carry, matching the reference stream the
    // known-answer tests were generated from.
    if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0) {
      ++counter_[3];
    }
    buffer_ = detail::philox4x64(counter_, key_);
    pos_ = 0;
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> buffer_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline RandomStream make_rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RandomStream(seed, stream_id);
}

}  // namespace fdrlab
