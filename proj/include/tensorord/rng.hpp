#pragma once

// Counter-based random streams (Philox4x32-10).
//
// A stream is addressed by (seed, stream_id); its i-th 128-bit block is a pure
// function of (seed, stream_id, i), so replicate j of a computation draws the
// same variates regardless of how replicates are scheduled.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace tensorord {

// Philox4x32 with 10 rounds applied to one counter block.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// Mixes a tag into a seed (splitmix64 finalizer); used to give each mode or
// purpose its own family of streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on the open interval (0, 1).
  double uniform();
  // Standard normal (ziggurat).
  double normal();
  // Gamma(shape, 1).
  double gamma(double shape);
  double chi_square(double dof);
  double beta(double a, double b);
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint32_t next_word();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned buffered_ = 0;
};

}  // namespace tensorord
