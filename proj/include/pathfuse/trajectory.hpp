// Copyright 2026 The pathfuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "pathfuse/quaternion.hpp"

namespace pathfuse {

struct TrajectorySample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  std::optional<Quaternion> orientation;
  std::optional<Mat3> position_cov;
};

/// Time-indexed sequence of poses; used both for ground truth and estimates.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  void validate() const {
    if (samples.size() < 2) {
      throw std::invalid_argument("Trajectory: needs at least 2 samples");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (!(samples[i].t > samples[i - 1].t)) {
        throw std::invalid_argument(
            "Trajectory: timestamps must be strictly increasing");
      }
    }
  }

  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  double duration() const { return end_time() - start_time(); }
};

}  // namespace pathfuse
