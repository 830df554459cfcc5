#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace geotax {

// Worker count used by parallel_for; 0 or 1 runs inline.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Runs body(i) for i in [0, n). Work items must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Sum reduction over [0, n) split into fixed-size chunks. Chunk partials are
// combined by a fixed pairwise tree, so the result does not depend on the
// worker count.
double chunked_sum(std::size_t n, std::size_t chunk,
                   const std::function<double(std::size_t begin, std::size_t end)>& partial);

// Pairwise tree reduction over a fixed sequence of partials.
double tree_sum(std::vector<double> partials);

}  // namespace geotax
