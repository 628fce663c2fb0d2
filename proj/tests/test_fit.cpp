#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "modspace/fit.hpp"
#include "modspace/parallel.hpp"

using namespace modspace;

TEST(Fit, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {2.0, 4.0, 8.0, 16.0, 32.0}) pts.emplace_back(x, 7 * std::pow(x, -2.5));
  const SlopeFit f = fit_slope(pts);
  EXPECT_NEAR(f.slope, -2.5, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(7.0), 1e-12);
  EXPECT_NEAR(f.std_error, 0.0, 1e-12);
}

TEST(Fit, PerturbedPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double x = 1; x <= 100; x *= 1.2) pts.emplace_back(x, (1 + 0.01 * std::sin(x)) / x);
  const SlopeFit f = fit_slope(pts);
  EXPECT_NEAR(f.slope, -1.0, 0.02);
  EXPECT_GT(f.std_error, 0.0);
}

TEST(Fit, LinearMode) {
  std::vector<std::pair<double, double>> pts{{0, 1}, {1, 3}, {2, 5}, {-1, -1}};
  EXPECT_NEAR(fit_slope(pts, false).slope, 2.0, 1e-14);
}

TEST(Fit, Preconditions) {
  std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  EXPECT_THROW(fit_slope(two), Error);
  std::vector<std::pair<double, double>> neg{{1, 1}, {2, -2}, {3, 3}};
  EXPECT_THROW(fit_slope(neg), Error);
  std::vector<std::pair<double, double>> flat{{2, 1}, {2, 2}, {2, 3}};
  EXPECT_THROW(fit_slope(flat), Error);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(64, 3, [](std::size_t i) {
                 if (i == 17) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}
