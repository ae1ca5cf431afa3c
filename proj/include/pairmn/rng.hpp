#pragma once

#include <cstdint>
#include <string>

namespace pairmn {

// Seedable xoshiro256++ stream with substreams derived by seed/stream-id
// hashing. Same seed and stream id give the same sample sequence on every
// platform; substreams are statistically independent, so concurrent tasks
// each take their own derived stream instead of sharing one.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  // Derives an independent stream; (seed, id-path) determines the sequence.
  RngStream substream(std::uint64_t id) const;

  static constexpr const char* algorithm() { return "xoshiro256++"; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos();
  // Standard normal (Box-Muller, no state carried between calls).
  double normal();

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

}  // namespace pairmn
