#include "swelab/params.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "swelab/errors.hpp"

namespace swelab {

void require_spatial_hurst(double h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw PreconditionError("spatial Hurst parameter must lie in (0, 1), got " + std::to_string(h));
  }
}

HurstParams::HurstParams(double h0, std::vector<double> h) : h0_(h0), h_(std::move(h)) {
  if (!(h0_ >= 0.5 && h0_ <= 1.0)) {
    throw PreconditionError("temporal Hurst parameter must lie in [1/2, 1], got " + std::to_string(h0_));
  }
  if (h_.empty()) throw PreconditionError("at least one spatial dimension is required");
  for (double hi : h_) require_spatial_hurst(hi);
  h_sum_ = std::accumulate(h_.begin(), h_.end(), 0.0);
}

HurstParams HurstParams::uniform(std::size_t d, double h0, double habs) {
  if (d == 0) throw PreconditionError("dimension must be positive");
  return HurstParams(h0, std::vector<double>(d, habs / static_cast<double>(d)));
}

bool HurstParams::is_time_white_1d() const noexcept { return h_.size() == 1 && h0_ == 0.5; }

}  // namespace swelab
