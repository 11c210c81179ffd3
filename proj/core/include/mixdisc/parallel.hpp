#pragma once

#include <cstddef>
#include <functional>

namespace mixdisc {

/// Environment variable that caps the worker pool size.
inline constexpr const char* kWorkersEnv = "MIXDISC_WORKERS";

/// Worker count from MIXDISC_WORKERS, else hardware concurrency (at least 1).
int default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads, indices handed out one at a time.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace mixdisc
