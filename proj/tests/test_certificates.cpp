#include <cmath>

#include "doctest.h"
#include "qdyn/certificates.hpp"
#include "qdyn/renorm.hpp"

using namespace qdyn;

TEST_CASE("coefficient formulas") {
  QuadraticRecursion rec;
  rec.a1 = rec.a2 = rec.a3 = 0.1;
  rec.b1 = rec.b2 = rec.b3 = 0.05;
  rec.recompute_coefficients();
  CHECK(rec.alpha == doctest::Approx(1.21).epsilon(1e-14));
  CHECK(rec.beta == doctest::Approx(0.11).epsilon(1e-14));
  CHECK(rec.gamma == doctest::Approx(0.0025).epsilon(1e-14));

  QuadraticRecursion zero;
  zero.recompute_coefficients();
  CHECK(zero.alpha == 1.0);
  CHECK(zero.beta == 0.0);
  CHECK(zero.gamma == 0.0);
}

TEST_CASE("coefficient monotonicity under upward perturbation") {
  QuadraticRecursion base;
  base.a1 = 0.3;
  base.a2 = 0.2;
  base.a3 = 0.4;
  base.b1 = 0.02;
  base.b2 = 0.03;
  base.b3 = 0.01;
  base.recompute_coefficients();
  auto s_base = solve_quadratic_fixed_point(base.alpha, base.beta, base.gamma);
  REQUIRE(s_base.s.has_value());
  double* fields[] = {&base.a1, &base.a2, &base.a3, &base.b1, &base.b2, &base.b3};
  for (double* f : fields) {
    QuadraticRecursion up = base;
    std::ptrdiff_t off = f - &base.a1;
    (&up.a1)[off] += 0.05;
    up.recompute_coefficients();
    CHECK(up.alpha >= base.alpha);
    CHECK(up.beta >= base.beta);
    CHECK(up.gamma >= base.gamma);
    auto s_up = solve_quadratic_fixed_point(up.alpha, up.beta, up.gamma);
    if (s_up.s) CHECK(*s_up.s >= *s_base.s - 1e-12);
  }
}

TEST_CASE("quadratic fixed point: closed forms and the iterate oracle") {
  auto linear = solve_quadratic_fixed_point(1.0, 0.5, 0.0);
  REQUIRE(linear.s.has_value());
  CHECK(*linear.s == doctest::Approx(2.0).epsilon(1e-14));

  auto mid = solve_quadratic_fixed_point(1.0, 1.0 / 3.0, 1.0 / 36.0);
  REQUIRE(mid.s.has_value());
  // independent oracle: iterate P from 0
  double x = 0;
  for (int i = 0; i < 400; ++i) x = 1.0 + x / 3.0 + x * x / 36.0;
  CHECK(*mid.s == doctest::Approx(x).epsilon(1e-10));
  CHECK(*mid.s == doctest::Approx(1.6077).epsilon(1e-4));
  // trace approaches s from below
  for (double t : mid.iterate_trace) CHECK(t <= *mid.s + 1e-12);

  auto none = solve_quadratic_fixed_point(1.0, 0.5, 1.0);
  CHECK(!none.s.has_value());
}

TEST_CASE("fixed point satisfies P(s) = s to near machine precision") {
  auto fp = solve_quadratic_fixed_point(2.3, 0.21, 0.013);
  REQUIRE(fp.s.has_value());
  double s = *fp.s;
  double ps = 2.3 + 0.21 * s + 0.013 * s * s;
  CHECK(std::abs(ps - s) <= 1e-12 * std::max(1.0, s));
}

TEST_CASE("uv recursion step: the proof's arithmetic") {
  UvSups s{1.0 / 100, 1.0 / 15, 4.0, 1.0 / 100};
  UvStep st = uv_recursion_step(0.1, s);
  CHECK(st.v_limit == doctest::Approx(0.101 / 0.899).epsilon(1e-12));
  CHECK(st.u_next == doctest::Approx(0.01 + 0.1 * (1 + st.v_limit) * (1.0 / 15) * 5).epsilon(1e-12));
  CHECK(st.u_next <= 0.1);

  UvStep zero = uv_recursion_step(0.0, s);
  CHECK(zero.v_limit == 0.0);
  CHECK(zero.u_next == doctest::Approx(s.sV).epsilon(1e-14));

  UvSups tight{0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(uv_recursion_step(1.0, tight), error);  // u (1 + sN) = 1
}

TEST_CASE("paper-threshold induction closes for any K > 0") {
  for (double K : {0.01, 0.5, 1.0, 2.0, 10.0, 100.0}) {
    auto u = paper_threshold_induction(K, 100);
    REQUIRE(u.size() == 101);
    CHECK(u[0] == 0.0);
    for (double uk : u) CHECK(uk <= 0.1 + 1e-15);
    // v stays below 1/4 along the whole truncated iteration as well
    UvSups s{0.01, 1.0 / (5 * K + 5), 2 * K, 0.01};
    for (double uk : u) {
      auto vt = uv_v_trace(uk, s, 100);
      for (double v : vt) CHECK(v <= 0.25 + 1e-15);
    }
  }
}

TEST_CASE("delta certificate at a small period") {
  double c = find_superattracting_parameter(CombinatoricsSpec{8}, 1e-8);
  CertBudgets bud;
  bud.truncation = 26;
  bud.grid = GridSpec{3, 10};
  bud.threads = 2;
  DeltaCertificate cert = certify_delta(UnimodalQuadratic(c), 8, 0.05, 1.9, bud);
  CHECK(cert.status == cert_status::certified);
  REQUIRE(cert.fixed_point.has_value());
  double s = *cert.fixed_point;
  double ps = cert.recursion.eval(s);
  CHECK(std::abs(ps - s) <= 1e-12 * std::max(1.0, s));
  CHECK(std::isfinite(cert.self_similarity_residual));
  // direct coefficients never exceed the paper-inequality ones
  CertBudgets paper = bud;
  paper.paper_inequality_mode = true;
  DeltaCertificate cert2 = certify_delta(UnimodalQuadratic(c), 8, 0.05, 1.9, paper);
  CHECK(cert.recursion.alpha <= cert2.recursion.alpha + 1e-9);
  CHECK(cert.recursion.beta <= cert2.recursion.beta + 1e-9);
  CHECK(cert.recursion.gamma <= cert2.recursion.gamma + 1e-9);
}

TEST_CASE("delta = 1 is divergent (length barrier)") {
  double c = find_superattracting_parameter(CombinatoricsSpec{8}, 1e-8);
  CertBudgets bud;
  bud.truncation = 20;
  bud.grid = GridSpec{2, 8};
  DeltaCertificate cert = certify_delta(UnimodalQuadratic(c), 8, 0.05, 1.0, bud);
  CHECK(cert.status == cert_status::input_divergent);
}

TEST_CASE("bisect rejects an uncertifiable range") {
  double c = find_superattracting_parameter(CombinatoricsSpec{6}, 1e-9);
  CertBudgets bud;
  bud.truncation = 16;
  bud.grid = GridSpec{2, 6};
  CHECK_THROWS_AS(bisect_delta(UnimodalQuadratic(c), 6, 0.05, 1.0, 1.01, 0.005, bud), error);
}

TEST_CASE("area certificate: direct mode and a forced threshold failure") {
  double c = find_superattracting_parameter(CombinatoricsSpec{8}, 1e-8);
  CertBudgets bud;
  bud.truncation = 26;
  bud.grid = GridSpec{3, 10};
  bud.threads = 2;
  AreaCertificate cert = certify_area(UnimodalQuadratic(c), 8, 0.05, 30, false, bud);
  CHECK(cert.status == cert_status::certified);
  CHECK(cert.u_trace.size() == 31);
  for (double u : cert.u_trace) CHECK(u <= cert.u_cap + 1e-15);
  CHECK(cert.K == cert.q3);  // recorded convention, q3 < 2K by construction

  // violated paper threshold
  AreaCertificate forced = cert;
  forced.q1 = 0.5;
  forced.thresholds_ok = forced.q1 < 0.01 && forced.q2 < 1.0 / (5 * forced.K + 5) &&
                         forced.q4 < 0.01;
  CHECK(!forced.thresholds_ok);
}
