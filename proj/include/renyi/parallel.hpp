#pragma once

#include <cstddef>
#include <functional>

namespace renyi {

/// Rows per work unit for sampling and estimation. Substreams are keyed by
/// chunk index, so results do not depend on the number of threads.
inline constexpr std::size_t kChunkRows = 4096;

/// Upper bound on worker threads (0 = hardware concurrency).
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(chunk, begin, end) over [0, count) split into chunks of
/// `chunk_rows`. Chunks are claimed dynamically; body must only write
/// state owned by its chunk.
void for_each_chunk(std::size_t count, std::size_t chunk_rows,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace renyi
