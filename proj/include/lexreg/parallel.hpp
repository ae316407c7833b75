#pragma once

#include <cstddef>
#include <functional>

namespace lexreg {

// Worker count used by the parallel stages. 0 means hardware concurrency.
// LEXREG_THREADS in the environment sets the initial value.
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [0, n) into contiguous chunks, one per worker, and calls
// body(begin, end) for each. Chunk boundaries depend only on n and the worker
// count; callers keep per-item work independent so results never depend on it.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace lexreg
