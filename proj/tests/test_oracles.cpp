#include <cmath>

#include "doctest.h"
#include "qdyn/oracles.hpp"

using namespace qdyn;

TEST_CASE("escape membership basics") {
  EscapeResult a = julia_escape_membership(0.0, cplx(2, 0), 100, 3.0);
  CHECK(a.escapes);
  CHECK(a.step == 1);  // |f(2)| = 4 > 3

  EscapeResult b = julia_escape_membership(2.0, cplx(1, 0), 200, 4.0);
  CHECK(!b.escapes);  // alpha fixed point

  EscapeResult c = julia_escape_membership(2.0, cplx(3, 0), 200, 4.0);
  CHECK(c.escapes);

  CHECK_THROWS_AS(julia_escape_membership(2.0, cplx(0, 0), 10, 1.0), error);
}

TEST_CASE("box counting: circle and segment") {
  DimensionEstimate circle = box_counting_dimension(0.0, {64, 128, 256, 512, 1024}, 120);
  CHECK(circle.value > 0.95);
  CHECK(circle.value < 1.10);
  // counts nonincreasing in box size (ladder ascends in resolution)
  for (std::size_t i = 1; i < circle.ladder.size(); ++i)
    CHECK(circle.ladder[i].second >= circle.ladder[i - 1].second);

  DimensionEstimate segment = box_counting_dimension(2.0, {64, 128, 256, 512, 1024}, 120);
  CHECK(segment.value > 0.90);
  CHECK(segment.value < 1.10);
}

TEST_CASE("box counting argument validation") {
  CHECK_THROWS_AS(box_counting_dimension(0.0, {}, 100), error);
  CHECK_THROWS_AS(box_counting_dimension(0.0, {512, 256}, 100), error);
  CHECK_THROWS_AS(box_counting_dimension(0.0, {100, 8192}, 100), error);
}

TEST_CASE("cascade oracle converges to the doubling constant") {
  CascadeOracle o = cascade_lambda_oracle(8);
  REQUIRE(o.parameters.size() == 8);
  CHECK(o.parameters[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(o.parameters[1] == doctest::Approx(1.3107).epsilon(1e-3));
  // ratios are consistently negative (lambda < 0)
  for (double r : o.ratios) CHECK(r < 0);
  CHECK(std::abs(o.lambda + 0.3995) < 1e-3);
  CHECK(o.error_bar < 1e-3);

  CascadeOracle coarse = cascade_lambda_oracle(2);
  CHECK(coarse.error_bar > 1e-2);  // short ladder, honest bar
}

TEST_CASE("escape fraction: deterministic, monotone in budget, region-disciplined") {
  double c = find_superattracting_parameter(CombinatoricsSpec{8}, 1e-8);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, 8, 0.05);
  EscapeFraction a = escape_fraction_mc(f, ds, 1, 4000, 400, 99, 4);
  EscapeFraction b = escape_fraction_mc(f, ds, 1, 4000, 400, 99, 1);
  CHECK(a.fraction == b.fraction);  // bit-identical across thread counts
  EscapeFraction c2 = escape_fraction_mc(f, ds, 1, 4000, 1200, 99, 4);
  CHECK(c2.fraction >= a.fraction);  // monotone in iteration budget
  CHECK(a.ci_low <= a.fraction);
  CHECK(a.ci_high >= a.fraction);
}
