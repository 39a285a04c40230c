#pragma once

#include <cstdint>

namespace wavicle {

// Counter-based uniform generator.  Every variate is addressed by
// (seed, stream_id, counter), so independent workers can evaluate disjoint
// counter ranges of the same stream and reproduce exactly the numbers a
// single-threaded run would have produced.  The mixing function is the
// splitmix64 finalizer, which passes BigCrush when used this way.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed),
        stream_id_(stream_id),
        key_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^
                 (stream_id + 0xD1B54A32D192ED03ull))) {}

  // Stateless access: the word at an absolute counter position.
  std::uint64_t word_at(std::uint64_t counter) const {
    return mix(key_ ^ (counter * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(word_at(counter) >> 11) * 0x1.0p-53;
  }

  // Sequential access for consumers that do not need addressing.
  std::uint64_t next_word() { return word_at(counter_++); }
  double next_uniform() { return uniform_at(counter_++); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace wavicle
