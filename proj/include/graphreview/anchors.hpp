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
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace graphreview {

// Strictly increasing discrete score anchors a_1 < ... < a_K, K >= 2.
class AnchorScale {
 public:
  // Throws InvalidParam unless strictly increasing with at least two entries.
  explicit AnchorScale(std::vector<double> anchors);

  // The ICLR 2025 rating levels {1, 3, 5, 6, 8, 10}.
  static AnchorScale iclr();

  std::size_t size() const { return anchors_.size(); }
  double operator[](std::size_t k) const { return anchors_[k]; }
  const std::vector<double>& values() const { return anchors_; }
  double min() const { return anchors_.front(); }
  double max() const { return anchors_.back(); }

  // Index of the nearest anchor; the lower one wins at exact midpoints.
  std::size_t nearest(double score) const;

 private:
  std::vector<double> anchors_;
};

// Expected anchor value sum_k p_k a_k. Throws SizeMismatch on length mismatch.
double anchor_expectation(std::span<const double> distribution, const AnchorScale& scale);

// Splits unit mass between the two anchors bracketing `score` so that the
// expectation equals `score` exactly; scores outside the scale are clamped to
// the end anchors. An on-anchor score yields a point mass.
std::vector<double> interpolate_on_anchors(double score, const AnchorScale& scale);

}  // namespace graphreview
