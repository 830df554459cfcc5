#include "geotax/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace geotax {

namespace {
std::atomic<std::size_t> g_threads{1};
}

void set_thread_count(std::size_t n) { g_threads = std::max<std::size_t>(1, n); }

std::size_t thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double tree_sum(std::vector<double> partials) {
  if (partials.empty()) return 0.0;
  while (partials.size() > 1) {
    std::vector<double> next((partials.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = partials[2 * i] + (2 * i + 1 < partials.size() ? partials[2 * i + 1] : 0.0);
    }
    partials = std::move(next);
  }
  return partials.front();
}

double chunked_sum(std::size_t n, std::size_t chunk,
                   const std::function<double(std::size_t, std::size_t)>& partial) {
  chunk = std::max<std::size_t>(1, chunk);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<double> partials(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    partials[c] = partial(c * chunk, std::min(n, (c + 1) * chunk));
  });
  return tree_sum(std::move(partials));
}

}  // namespace geotax
