#pragma once

namespace estr {

// Selects the serial reference path or the OpenMP path of a kernel. Both
// paths produce bit-identical results; the serial one is the contract.
enum class Execution { serial, parallel };

// Number of worker threads the parallel path would use (1 without OpenMP).
int parallel_threads();

}  // namespace estr
