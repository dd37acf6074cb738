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

#include <cstddef>
#include <functional>
#include <optional>

namespace localeq {

// Runs fn(i) for every i in [0, n) on up to `threads` workers. Items are
// handed out in contiguous blocks; callers keep results independent of the
// assignment. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// --threads value if given, else LOCALEQ_THREADS, else 1.
std::size_t resolve_threads(std::optional<std::size_t> flag);

}  // namespace localeq
