#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geotax {

inline constexpr std::uint64_t kDefaultSeed = 320;

// A seed plus a purpose tag. Equal specs produce identical streams.
struct SeedSpec {
  std::uint64_t seed = kDefaultSeed;
  std::string stream = "default";

  bool operator==(const SeedSpec&) const = default;
};

// Counter-based generator: draw i is mix(key + (i + 1) * golden), so any
// draw is addressable and the stream is identical on every platform.
// Distributions are implemented here rather than taken from <random>, whose
// distribution algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(const SeedSpec& spec);
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64();
  double uniform();                       // [0, 1), 53-bit resolution
  double uniform(double lo, double hi);   // [lo, hi)
  std::uint64_t below(std::uint64_t n);   // [0, n), unbiased
  double normal();                        // standard normal
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Independent child streams. The parent is not advanced.
  Rng split(std::string_view tag) const;
  Rng split(std::uint64_t index) const;

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <class T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  std::vector<std::size_t> permutation(std::size_t n);
  // k distinct indices from [0, n) in selection order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  Rng(std::uint64_t key, int);

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace geotax
