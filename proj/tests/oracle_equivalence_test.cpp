#include <gtest/gtest.h>

#include "oracle_suite.hpp"

using namespace sketchrec;

TEST(OracleEquivalence, ExhaustiveSmallUniverses) {
  for (const auto& o : oracle_suite::run_all(2)) {
    EXPECT_GT(o.checked, 0u) << o.name;
    EXPECT_EQ(o.violations, 0u) << o.name << " (" << o.checked << " checked)";
  }
}
