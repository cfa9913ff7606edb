#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swelab {

/// Hurst exponents of the driving noise: temporal h0 and one spatial
/// exponent per dimension.
class HurstParams {
 public:
  /// Validates 1/2 <= h0 <= 1 and 0 < h_i < 1; throws PreconditionError.
  HurstParams(double h0, std::vector<double> h);

  /// d spatial exponents all equal to habs / d.
  static HurstParams uniform(std::size_t d, double h0, double habs);

  [[nodiscard]] std::size_t dimension() const noexcept { return h_.size(); }
  [[nodiscard]] double h0() const noexcept { return h0_; }
  [[nodiscard]] std::span<const double> h() const noexcept { return h_; }
  [[nodiscard]] double h_sum() const noexcept { return h_sum_; }

  /// True for d = 1 with time-white noise, the only case the field
  /// kernels are written for.
  [[nodiscard]] bool is_time_white_1d() const noexcept;

 private:
  double h0_;
  std::vector<double> h_;
  double h_sum_;
};

/// Throws PreconditionError unless 0 < h < 1.
void require_spatial_hurst(double h);

}  // namespace swelab
