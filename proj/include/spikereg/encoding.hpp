#pragma once

#include <cmath>

#include "spikereg/error.hpp"
#include "spikereg/types.hpp"

namespace spikereg {

enum class AerMode {
  // -1 below mean - factor*std, +1 above mean + factor*std.
  Symmetric,
  // One threshold mean + factor*std for both signs: every step that is not
  // an excitatory event and lies strictly below it becomes inhibitory.
  Literal,
};

inline constexpr double kDefaultAerFactor = 0.5;

/// Address-event encoding of one channel. `diff` is scratch space of the
/// channel length.
template <typename Derived, typename OutDerived>
void aer_encode_channel(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar factor,
                        AerMode mode, Eigen::MatrixBase<OutDerived> const& out_) {
  using Scalar = typename Derived::Scalar;
  auto& out = const_cast<Eigen::MatrixBase<OutDerived>&>(out_);
  const Eigen::Index n = x.size();

  Vector<Scalar> diff(n);
  for (Eigen::Index t = 0; t + 1 < n; ++t) diff[t] = x[t + 1] - x[t];
  diff[n - 1] = diff[n - 2];

  Scalar sum = 0;
  for (Eigen::Index t = 0; t < n; ++t) sum += diff[t];
  const Scalar mean = sum / static_cast<Scalar>(n);
  Scalar ss = 0;
  for (Eigen::Index t = 0; t < n; ++t) ss += (diff[t] - mean) * (diff[t] - mean);
  const Scalar sd = std::sqrt(ss / static_cast<Scalar>(n - 1));

  const Scalar upper = mean + factor * sd;
  const Scalar lower = mode == AerMode::Symmetric ? mean - factor * sd : upper;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (diff[t] > upper)
      out[t] = 1;
    else if (diff[t] < lower)
      out[t] = -1;
    else
      out[t] = 0;
  }
}

/// Converts every channel (row) of `sample` into a ternary spike train by
/// thresholding its first differences at mean +/- factor * sample-std.
template <typename Derived>
SpikeTrain aer_encode(const Eigen::MatrixBase<Derived>& sample, typename Derived::Scalar factor,
                      AerMode mode = AerMode::Symmetric) {
  if (sample.cols() < 2 || sample.rows() < 1)
    throw Error(ErrorCode::EmptyChannel, "AER needs at least 2 timepoints per channel");
  if (!sample.allFinite()) throw Error(ErrorCode::NonFiniteInput, "sample contains NaN/Inf");
  if (!std::isfinite(factor)) throw Error(ErrorCode::NonFiniteInput, "factor is not finite");

  SpikeTrain events(sample.rows(), sample.cols());
  for (Eigen::Index c = 0; c < sample.rows(); ++c)
    aer_encode_channel(sample.row(c).transpose(), factor, mode, events.row(c).transpose());
  return events;
}

}  // namespace spikereg
