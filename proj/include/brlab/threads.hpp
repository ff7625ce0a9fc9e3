#pragma once

namespace brlab {

/// Worker cap for embarrassingly parallel loops (multi-start optimizers).
/// Reads BRLAB_THREADS once; defaults to 1. Results never depend on the
/// thread count: every work item owns a counter-based RNG stream and the
/// reduction order is fixed by item index.
int worker_threads();

}  // namespace brlab
