#pragma once

#include <cstdint>
#include <limits>

namespace gwbridge {

/// Counter-based generator: the i-th output is a pure function of (key, i).
///
/// Streams for replicas and sub-tasks are derived by hashing a parent key with
/// an index, so any (master seed, replica, purpose) triple names a reproducible
/// sequence independent of scheduling order. Distribution helpers are written
/// out here rather than taken from <random> so outputs match across standard
/// libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Child stream keyed by this stream's key and `index`; the counter restarts at 0.
  [[nodiscard]] CounterRng split(std::uint64_t index) const {
    CounterRng child;
    child.key_ = mix(key_ + mix(index + 0xbb67ae8584caa73bULL));
    return child;
  }

  /// Output at an absolute counter position; does not advance.
  [[nodiscard]] result_type at(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  result_type operator()() { return at(counter_++); }

  [[nodiscard]] std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }
  [[nodiscard]] std::uint64_t key() const { return key_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  /// Fair +1/-1.
  int sign() { return ((*this)() >> 63) ? 1 : -1; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Stream for replica `replica` of an experiment seeded with `master_seed`.
inline CounterRng replica_stream(std::uint64_t master_seed, std::uint64_t replica) {
  return CounterRng(master_seed).split(replica);
}

}  // namespace gwbridge
