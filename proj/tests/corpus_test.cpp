#include <doctest.h>

#include "support.hpp"

using namespace facet;

TEST_SUITE("corpus") {
  TEST_CASE("labeled corpus is complete") {
    const auto r = test::evaluate_corpus();
    CHECK(r.components >= 10);
    CHECK(r.properties >= 50);
    CHECK_MESSAGE(r.problems.empty(), (r.problems.empty() ? "" : r.problems.front()));
  }

  TEST_CASE("accuracy does not regress") {
    // Measured when the labels were frozen: 29/68 with 8 extreme misses.
    const auto r = test::evaluate_corpus();
    for (const auto& m : r.misses) MESSAGE(m.component << "." << m.property << ": labeled " << m.label << ", scored " << m.predicted);
    CHECK(r.matches >= 29);
    CHECK(r.extremes <= 8);
  }
}
