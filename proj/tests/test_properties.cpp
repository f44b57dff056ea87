#include "dirac/checks.hpp"

#include <gtest/gtest.h>

using namespace dirac;

class Battery : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(Battery, EverySuitePasses) {
  checks::CheckConfig cfg;
  cfg.seed = GetParam();
  const auto results = checks::run_battery(cfg);
  EXPECT_EQ(results.size(), checks::suites().size());
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed()) << r.name << ": " << r.first_failure;
    EXPECT_EQ(r.instances, cfg.instances) << r.name;
    EXPECT_LE(r.worst, r.tol) << r.name;
    // Ill-posed draws are rare with the well-conditioned ensembles.
    EXPECT_LE(r.redrawn, cfg.instances / 10) << r.name;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, Battery, ::testing::Values(1, 7, 42, 2026, 987654321));

TEST(Battery, IsDeterministicPerSeed) {
  checks::CheckConfig cfg;
  cfg.seed = 5;
  cfg.instances = 20;
  const auto a = checks::run_battery(cfg), b = checks::run_battery(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].worst, b[i].worst);
    EXPECT_EQ(a[i].redrawn, b[i].redrawn);
  }
}

// A tolerance below rounding level must make the equality checks fail.
TEST(Battery, ImpossibleToleranceIsReported) {
  checks::CheckConfig cfg;
  cfg.tol = 1e-30;
  cfg.instances = 10;
  int failed = 0;
  for (const auto& r : checks::run_battery(cfg)) failed += r.passed() ? 0 : 1;
  EXPECT_GT(failed, 0);
}
