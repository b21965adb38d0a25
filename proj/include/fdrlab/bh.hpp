#pragma once

#include "fdrlab/calibrate.hpp"
#include "fdrlab/core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace fdrlab {

struct BHResult {
  std::vector<Index> rejected;  // ascending hypothesis indices
  Index k_hat = 0;              // step-up index, 0 when nothing clears
  double p_threshold = 0.0;     // p_(k_hat), 0 when k_hat == 0
  Index R = 0;                  // |rejected|
  Index m = 0;                  // hypothesis count
};

struct ErrorMetrics {
  Index V = 0;         // false rejections
  Index R = 0;         // total rejections
  double FDP = 0.0;    // V / max(R, 1)
  double power = 0.0;  // correct rejections / m1, 0 when m1 == 0
};

/// Step-up rule: k_hat = max{i : p_(i) <= alpha*i/m}; rejects every
/// hypothesis with p_i <= p_(k_hat) (closure under ties).
BHResult bh_stepup(std::span<const double> p, double alpha);
BHResult bh_stepup(const PValueVector& p, double alpha);

/// Threshold form: smallest t with sf2(t) <= alpha*max(#{|T_i| >= t}, 1)/m.
/// t_abs must be sorted ascending; sf2 continuous and strictly decreasing.
/// For distinct statistics, {i : |T_i| >= t_hat} equals the step-up
/// rejections under p_i = sf2(|T_i|).
double bh_threshold_form(std::span<const double> t_abs,
                         const std::function<double(double)>& sf2,
                         double alpha);

ErrorMetrics score(const BHResult& result, const GroundTruth& truth);

}  // namespace fdrlab
