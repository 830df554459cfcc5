#include "geotax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "geotax/error.hpp"

namespace geotax {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 share the average of 1-based ranks i+1..j.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double population_std(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Correlation pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch,
          "correlation inputs have lengths " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()));
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return {0.0, true};
  const double r = sab / std::sqrt(saa * sbb);
  return {std::clamp(r, -1.0, 1.0), false};
}

Correlation spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch,
          "spearman inputs have lengths " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()));
  require(a.size() >= 3, ErrorCode::InvalidArgument, "spearman needs at least 3 values");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(std::isfinite(a[i]) && std::isfinite(b[i]), ErrorCode::DegenerateInput,
            "spearman input is not finite");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

}  // namespace geotax
