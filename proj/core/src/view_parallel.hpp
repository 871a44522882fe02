// Copyright 2026 The MagSpec Authors.
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

#include <thread>
#include <vector>

namespace magspec::internal {

// Views are independent; run one task per view on its own thread. Each task
// must write only its own pre-assigned slots, which keeps results
// deterministic regardless of scheduling.
template <typename Task>
void for_each_view(int num_views, Task&& task) {
  if (num_views <= 1) {
    if (num_views == 1) task(0);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(num_views) - 1);
  for (int v = 1; v < num_views; ++v) workers.emplace_back(task, v);
  task(0);
  for (std::thread& worker : workers) worker.join();
}

}  // namespace magspec::internal
