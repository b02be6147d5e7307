#include <cmath>

#include "doctest.h"
#include "qdyn/cvitanovic.hpp"
#include "qdyn/oracles.hpp"
#include "qdyn/renorm.hpp"

using namespace qdyn;

TEST_CASE("period-2 fixed point: lambda matches the cascade oracle") {
  double c2 = find_superattracting_parameter(CombinatoricsSpec{2}, 1e-10);
  CvitanovicReport rep = cvitanovic_solve_auto(2, 20, c2);
  REQUIRE(rep.status == solve_status::converged);
  CHECK(rep.approx.residual < 1e-8);
  CHECK(rep.approx.beta_residual() < 1e-10);
  CHECK(rep.approx.lambda < 0);

  CascadeOracle oracle = cascade_lambda_oracle(8);
  CHECK(std::abs(rep.approx.lambda - oracle.lambda) < 1e-3);
  CHECK(1.0 / std::abs(rep.approx.lambda) == doctest::Approx(2.5029).epsilon(2e-3));
}

TEST_CASE("re-solving from the solution converges immediately") {
  double c2 = find_superattracting_parameter(CombinatoricsSpec{2}, 1e-10);
  CvitanovicReport rep = cvitanovic_solve_auto(2, 16, c2);
  REQUIRE(rep.status == solve_status::converged);
  CvitanovicReport again = cvitanovic_solve(2, 16, rep.approx);
  CHECK(again.status == solve_status::converged);
  CHECK(again.iterations <= 2);
  CHECK(again.approx.residual <= rep.approx.residual * 4 + 1e-12);
}

TEST_CASE("period-3 solve: smaller scaling factor than period 2") {
  double c2 = find_superattracting_parameter(CombinatoricsSpec{2}, 1e-10);
  double c3 = find_superattracting_parameter(CombinatoricsSpec{3}, 1e-10);
  CvitanovicReport r2 = cvitanovic_solve_auto(2, 20, c2);
  CvitanovicReport r3 = cvitanovic_solve_auto(3, 24, c3);
  REQUIRE(r2.status == solve_status::converged);
  REQUIRE(r3.status == solve_status::converged);
  CHECK(r3.approx.residual < 1e-8);
  CHECK(std::abs(r3.approx.lambda) < std::abs(r2.approx.lambda));
}

TEST_CASE("collocation residual decreases with degree") {
  double c2 = find_superattracting_parameter(CombinatoricsSpec{2}, 1e-10);
  double prev = 1e300;
  int improved = 0, steps = 0;
  for (int n : {8, 12, 16, 20, 24}) {
    CvitanovicReport rep = cvitanovic_solve_auto(2, n, c2);
    REQUIRE(rep.status == solve_status::converged);
    double res = std::max(rep.approx.residual, 1e-13);  // rounding floor
    if (steps > 0 && (res <= 0.5 * prev || res <= 1e-12)) ++improved;
    prev = res;
    ++steps;
  }
  CHECK(improved >= 3);  // at least geometric until the floor
}

TEST_CASE("degenerate arguments are rejected") {
  RenormFixedPointApprox seed;
  seed.coeffs = {-1.0};
  seed.lambda = -0.4;
  CHECK_THROWS_AS(cvitanovic_solve(1, 20, seed), error);
  CHECK_THROWS_AS(cvitanovic_solve(2, 4, seed), error);
}
