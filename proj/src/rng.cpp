#include "swelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace swelab::rng {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Block philox4x32(Block c, Key k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed ^ (tag * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double to_open_unit(std::uint64_t bits) {
  // 52 random bits, offset by half a step so neither 0 nor 1 can occur.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::array<double, 2> NormalStream::pair(std::uint64_t block) const {
  const Block ctr = {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const Block r = philox4x32(ctr, key_);
  const double u1 = to_open_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
  const double u2 = to_open_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
  // Box-Muller
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double NormalStream::operator()(std::uint64_t index) const { return pair(index / 2)[index % 2]; }

void NormalStream::fill(double* out, std::uint64_t n) const {
  for (std::uint64_t b = 0; 2 * b < n; ++b) {
    const auto p = pair(b);
    out[2 * b] = p[0];
    if (2 * b + 1 < n) out[2 * b + 1] = p[1];
  }
}

}  // namespace swelab::rng
