#pragma once

namespace bdbc {

/// Worker count for parallel kernels: OpenMP's max, optionally capped by
/// the BDBC_THREADS environment variable (values < 1 are ignored).
int worker_threads();

}  // namespace bdbc
