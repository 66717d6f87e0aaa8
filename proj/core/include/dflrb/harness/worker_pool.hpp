#pragma once

#include <functional>

namespace dflrb::harness {

// Resolves a thread-count request: positive values pass through, zero falls
// back to the DFLRB_THREADS environment variable and then to the hardware
// concurrency (at least 1).
int resolve_threads(int requested);

// Runs task(0) .. task(task_count - 1) on up to `threads` workers and blocks
// until all finish. Tasks must write only to their own slots. If any task
// throws, the exception from the lowest task index is rethrown after all
// workers stop, so failure behaviour does not depend on scheduling.
void run_parallel(int task_count, int threads,
                  const std::function<void(int)>& task);

}  // namespace dflrb::harness
