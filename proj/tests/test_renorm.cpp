#include <cmath>

#include "doctest.h"
#include "qdyn/renorm.hpp"

using namespace qdyn;

namespace {
// independent cubic oracle for p = 3: c^3 - 2c^2 + c - 1 = 0
double cubic_root_oracle() {
  auto poly = [](double c) { return ((c - 2) * c + 1) * c - 1; };
  double lo = 1.5, hi = 1.9;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (poly(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("superattracting parameters: closed forms and oracles") {
  // p = 2: c - c^2 = 0, nonzero root
  CHECK(find_superattracting_parameter(CombinatoricsSpec{2}, 1e-10) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // p = 3 against the independent cubic bisection oracle
  double c3 = find_superattracting_parameter(CombinatoricsSpec{3}, 1e-10);
  CHECK(c3 == doctest::Approx(cubic_root_oracle()).epsilon(1e-12));
  CHECK(std::abs(((c3 - 2) * c3 + 1) * c3 - 1) < 1e-10);

  // p = 4: itinerary (+,-,-) and a small critical value
  double c4 = find_superattracting_parameter(CombinatoricsSpec{4}, 1e-10);
  CHECK(c4 > 1.9);
  CHECK(c4 < 1.95);
  UnimodalQuadratic f(c4);
  double x = c4;
  CHECK(x > 0);
  x = c4 - x * x;
  CHECK(x < 0);
  x = c4 - x * x;
  CHECK(x < 0);
  x = c4 - x * x;
  CHECK(std::abs(x) < 1e-10);
}

TEST_CASE("itinerary invariance for p = 2..12") {
  for (int p = 2; p <= 12; ++p) {
    double tol = std::max(1e-12, 2e-15 * std::pow(4.0, p));
    double c = find_superattracting_parameter(CombinatoricsSpec{p}, tol);
    CHECK(CombinatoricsSpec{p}.matches(UnimodalQuadratic(c)));
    double x = 0;
    for (int i = 0; i < p; ++i) x = c - x * x;
    CHECK(std::abs(x) < tol);
  }
}

TEST_CASE("parameters approach 2 at rate ~1/4") {
  double prev = std::abs(find_superattracting_parameter(CombinatoricsSpec{5}, 1e-8) - 2);
  for (int p = 6; p <= 11; ++p) {
    double cur = std::abs(find_superattracting_parameter(CombinatoricsSpec{p}, 1e-8) - 2);
    double ratio = cur / prev;
    CHECK(ratio > 0.15);
    CHECK(ratio < 0.4);
    prev = cur;
  }
}

TEST_CASE("scaling factor: closed form at (c=1, p=2)") {
  // x* = (sqrt(5)-1)/2 solves x^3 - 2x + 1 = 0 with multiplier > 1
  double lam = scaling_factor_estimate(UnimodalQuadratic(1.0), 2);
  CHECK(lam == doctest::Approx(-(std::sqrt(5.0) - 1) / 4).epsilon(1e-10));
}

TEST_CASE("scaling factor rejects degenerate period") {
  CHECK_THROWS_AS(scaling_factor_estimate(UnimodalQuadratic(2.0), 1), error);
}

TEST_CASE("scaling factor solves the fixed point equation") {
  for (int p : {3, 4, 6, 8, 10}) {
    double c = find_superattracting_parameter(CombinatoricsSpec{p}, 1e-8);
    UnimodalQuadratic f(c);
    double lam = scaling_factor_estimate(f, p);
    CHECK(lam < 0);
    CHECK(lam > -1);
    double xstar = -2 * lam;
    double w = xstar;
    for (int i = 0; i < p; ++i) w = c - w * w;
    CHECK(std::abs(w - xstar) < 1e-9 * std::max(1.0, xstar));
  }
}

TEST_CASE("domain system at (p=10, rho=0.05)") {
  double c = find_superattracting_parameter(CombinatoricsSpec{10}, 1e-8);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, 10, 0.05);
  CHECK(ds.first_return_ok);
  CHECK(ds.postcritical_clear);
  CHECK(ds.postcritical_margin > 0);
  CHECK(ds.min_return_time >= 2);
  CHECK(ds.diam_uprime > 0);
  CHECK(ds.diam_uprime < 0.05);
  // V' inside U with a healthy margin
  CHECK(ds.nesting_margin > 10 * ds.diam_uprime);
  // scaled-copy consistency: z in U^k iff lambda^-k z in U
  cplx z(0.01, 0.003);
  CHECK(ds.U_k(2).contains(z) == ds.U.contains(z / (ds.lambda * ds.lambda)));
}

TEST_CASE("rho out of the documented range is rejected") {
  double c = find_superattracting_parameter(CombinatoricsSpec{3}, 1e-10);
  CHECK_THROWS_AS(build_domain_system(UnimodalQuadratic(c), 3, 0.5), error);
}

TEST_CASE("lemma class report columns are finite and trend correctly") {
  auto rows = lemma_class_report(5, 8, 0.05);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::isfinite(rows[i].diam_uprime));
    CHECK(std::isfinite(rows[i].s1_length));
    CHECK(std::isfinite(rows[i].modulus_proxy));
    CHECK(rows[i].lambda_abs > 0);
    double g = std::pow(rows[i].diam_uprime, -1.0 / rows[i].p);
    CHECK(g > 1.7);
    CHECK(g < 2.3);
    if (i > 0) {
      CHECK(rows[i].alpha > rows[i - 1].alpha);  // alpha_p increasing toward 1
      CHECK(rows[i].eta > rows[i - 1].eta);      // eta_p increasing toward 4
    }
    CHECK(rows[i].alpha < 1.0);
    CHECK(rows[i].eta < 4.0);
  }
}
