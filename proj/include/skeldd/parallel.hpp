// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace skeldd {

// Runs body(i) for i in [0, n). With threads <= 1 the loop is serial, which is
// the deterministic baseline; callers must write only to index-disjoint slots
// so that results never depend on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace skeldd
