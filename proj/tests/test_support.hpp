#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "geotax/error.hpp"
#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"

namespace geotax::testing {

inline Matrix gaussian(std::size_t n, std::size_t d, std::uint64_t seed, const char* stream = "test") {
  Rng rng(seed, stream);
  Matrix m(n, d);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

inline Matrix random_orthogonal(std::size_t d, std::uint64_t seed) {
  Rng rng(seed, "orthogonal");
  Eigen::MatrixXd a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = q(i, j);
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("geotax-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(GEOTAX_TEST_DATA) / rel;
}

}  // namespace geotax::testing

#define EXPECT_GEOTAX_ERROR(stmt, expected_code)                                   \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << ::geotax::to_string(expected_code);         \
    } catch (const ::geotax::Error& e) {                                          \
      EXPECT_EQ(e.code(), expected_code) << e.what();                             \
    }                                                                             \
  } while (0)
