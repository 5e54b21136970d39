/*
 * Copyright 2026 The GraphReview Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "graphreview/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphreview/error.hpp"

namespace graphreview {

AnchorScale::AnchorScale(std::vector<double> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.size() < 2) {
    throw Error(ErrorCode::kInvalidParam, "anchor scale needs at least two anchors");
  }
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    if (!std::isfinite(anchors_[k]) || (k > 0 && !(anchors_[k] > anchors_[k - 1]))) {
      throw Error(ErrorCode::kInvalidParam, "anchors must be finite and strictly increasing");
    }
  }
}

AnchorScale AnchorScale::iclr() { return AnchorScale({1.0, 3.0, 5.0, 6.0, 8.0, 10.0}); }

std::size_t AnchorScale::nearest(double score) const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < anchors_.size(); ++k) {
    if (std::abs(score - anchors_[k]) < std::abs(score - anchors_[best])) best = k;
  }
  return best;
}

double anchor_expectation(std::span<const double> distribution, const AnchorScale& scale) {
  if (distribution.size() != scale.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "distribution has " + std::to_string(distribution.size()) + " entries for " +
                    std::to_string(scale.size()) + " anchors");
  }
  double e = 0.0;
  for (std::size_t k = 0; k < scale.size(); ++k) e += distribution[k] * scale[k];
  return e;
}

std::vector<double> interpolate_on_anchors(double score, const AnchorScale& scale) {
  std::vector<double> dist(scale.size(), 0.0);
  if (!(score > scale.min())) {
    dist.front() = 1.0;
    return dist;
  }
  if (!(score < scale.max())) {
    dist.back() = 1.0;
    return dist;
  }
  const auto& a = scale.values();
  const std::size_t hi = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), score) - a.begin());
  const std::size_t lo = hi - 1;
  if (score == a[lo]) {
    dist[lo] = 1.0;
    return dist;
  }
  const double t = (score - a[lo]) / (a[hi] - a[lo]);
  dist[lo] = 1.0 - t;
  dist[hi] = t;
  return dist;
}

}  // namespace graphreview
