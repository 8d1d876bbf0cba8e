// SPDX-License-Identifier: Apache-2.0
// spectra: slot-deterministic parallel loop. Workers write to disjoint
// indices only, so results are independent of scheduling and thread count.
// SPECTRA_THREADS caps the worker count (0 or 1 disables threading).

#pragma once

#include <cstddef>
#include <functional>

namespace spectra {

/// Number of workers after applying the SPECTRA_THREADS cap.
int worker_count();

/// Runs fn(i) for i in [0, n). fn must only touch state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace spectra
