#pragma once

namespace binreg {

/// Caps OpenMP parallelism from the BINREG_THREADS environment variable when
/// it holds a positive integer; otherwise leaves the runtime default. Returns
/// the thread count in effect.
int configure_threads_from_env();

int max_threads();

}  // namespace binreg
