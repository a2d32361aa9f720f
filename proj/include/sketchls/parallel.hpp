#pragma once

#include <cstdint>
#include <functional>

namespace sketchls {

// Worker cap from the SKETCHLS_THREADS environment variable, read at each
// call; 0, unset, or unparsable means automatic (hardware concurrency).
int worker_count();

// Runs fn(0), ..., fn(count - 1) on up to worker_count() threads. Work units
// must key any output by index so that results never depend on the schedule.
// Nested calls run serially on the calling worker. The first exception
// raised by any unit is rethrown on the caller after all workers finish.
void parallel_for(int64_t count, const std::function<void(int64_t)>& fn);

}  // namespace sketchls
