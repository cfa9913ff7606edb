#pragma once

#include <array>
#include <cstdint>

namespace swelab::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
Block philox4x32(Block counter, Key key);

/// Standard normal variates addressed by (seed, stream, index).
///
/// Every value is a pure function of its address, so replicates can be
/// generated in any order, on any thread, with identical results.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  /// The index-th N(0, 1) variate of this stream.
  [[nodiscard]] double operator()(std::uint64_t index) const;

  /// Fills out[0..n) with variates 0..n-1 (two per Philox block).
  void fill(double* out, std::uint64_t n) const;

 private:
  std::array<double, 2> pair(std::uint64_t block) const;

  Key key_;
  std::uint64_t stream_;
};

/// Independent child seed for sub-experiment `tag` (SplitMix64 finalizer of
/// the pair), so cells sharing a user seed do not share variates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Maps 64 random bits to a double in the open interval (0, 1).
double to_open_unit(std::uint64_t bits);

}  // namespace swelab::rng
