// Copyright 2026 The localeq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "localeq/encoder.hpp"

namespace localeq {

struct GradCheckOptions {
  EncoderConfig config{.d_model = 8, .n_layers = 1, .n_heads = 2, .d_ff = 16, .max_len = 8,
                       .n_buckets = 45, .n_locales = 1, .dropout_rate = 0.0};
  std::size_t n_pts = 5;
  std::size_t batch = 4;
  double step = 1e-5;
  double init_scale = 0.3;  // std of random parameter values
  bool zero_params = false;
  // Relative error is |a - n| / max(|a|, |n|, denominator_floor).
  double denominator_floor = 1e-6;
};

struct GradCheckGroup {
  std::string name;
  std::size_t n_values = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;  // one per parameter tensor, head last
  double max_rel_error = 0.0;
  double loss = 0.0;
};

// Compares the analytic gradient of a mean multi-label BCE loss on a random
// tiny encoder + linear head against central finite differences over every
// parameter value.
GradCheckReport grad_check(const GradCheckOptions& options, std::uint64_t seed);

}  // namespace localeq
