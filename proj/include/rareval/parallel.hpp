#pragma once

namespace rareval {

// Number of OpenMP threads to use for a requested count: a positive request
// wins, otherwise RAREVAL_THREADS if set, otherwise the OpenMP default.
int resolve_threads(int requested);

}  // namespace rareval
