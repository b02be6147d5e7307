#include "doctest.h"
#include "qdyn/region.hpp"
#include "qdyn/renorm.hpp"
#include "qdyn/rng.hpp"

using namespace qdyn;

TEST_CASE("disk membership tri-state") {
  Region d = Region::disk(0.0, 1.0);
  CHECK(d.contains(cplx(0.5, 0)) == membership::inside);
  CHECK(d.contains(cplx(2, 0)) == membership::outside);
  CHECK(d.contains(cplx(1.0, 0)) == membership::uncertain);  // on the boundary
}

TEST_CASE("difference of disks") {
  Region ann = Region::difference(Region::disk(0.0, 2.0), Region::disk(0.0, 1.0));
  CHECK(ann.contains(cplx(0.5, 0)) == membership::outside);
  CHECK(ann.contains(cplx(1.5, 0)) == membership::inside);
  CHECK(ann.contains(cplx(3, 0)) == membership::outside);
}

TEST_CASE("scaled copy with negative factor") {
  Region r = Region::scaled(-0.5, Region::disk(0.0, 1.0));
  CHECK(r.contains(cplx(0.4, 0)) == membership::inside);  // |0.4 / -0.5| = 0.8 < 1
  CHECK(r.contains(cplx(0.6, 0)) == membership::outside);
}

TEST_CASE("scaling rule is exact") {
  CounterRng rng{3};
  Region base = Region::disk(cplx(0.3, -0.2), 0.7);
  for (int i = 0; i < 200; ++i) {
    double lam = rng.uniform(-2.0, 2.0, i, 0);
    if (std::abs(lam) < 1e-3) continue;
    Region sc = Region::scaled(lam, base);
    cplx z(rng.uniform(-2, 2, i, 1), rng.uniform(-2, 2, i, 2));
    CHECK(sc.contains(z) == base.contains(z / lam));
  }
}

TEST_CASE("region algebra agrees with three-valued logic") {
  CounterRng rng{11};
  Region a = Region::disk(cplx(0.2, 0.1), 1.1);
  Region b = Region::disk(cplx(-0.4, 0.3), 0.8);
  Region diff = Region::difference(a, b);
  for (int i = 0; i < 500; ++i) {
    cplx z(rng.uniform(-2, 2, i, 0), rng.uniform(-2, 2, i, 1));
    membership ma = a.contains(z), mb = b.contains(z);
    if (!decided(ma) || !decided(mb)) continue;
    bool expect = ma == membership::inside && mb == membership::outside;
    CHECK(diff.contains(z) == (expect ? membership::inside : membership::outside));
  }
}

TEST_CASE("malformed regions are rejected") {
  CHECK_THROWS_AS(Region::disk(0.0, -1.0), error);
  CHECK_THROWS_AS(Region::scaled(0.0, Region::disk(0.0, 1.0)), error);
  CHECK_THROWS_AS(Region::disk(cplx(1.0 / 0.0, 0), 1.0), error);
}

TEST_CASE("tracked pullback contains 0 and respects the landing constraint") {
  double c = find_superattracting_parameter(CombinatoricsSpec{6}, 1e-9);
  UnimodalQuadratic f(c);
  Region up = Region::tracked_pullback(f, 6, 0.05);
  CHECK(up.contains(0.0) == membership::inside);
  // far points are excluded
  CHECK(up.contains(cplx(0.5, 0)) == membership::outside);
  CHECK(up.contains(cplx(0, 0.5)) == membership::outside);
  // points inside map into V' after p steps
  cplx z(1e-4, 5e-5);
  if (up.contains(z) == membership::inside) {
    cplx w = z;
    for (int i = 0; i < 6; ++i) w = f(w);
    CHECK(std::abs(w) < 0.05);
  }
}

TEST_CASE("complement and union") {
  Region d = Region::disk(0.0, 1.0);
  Region comp = Region::complement(d);
  CHECK(comp.contains(cplx(2, 0)) == membership::inside);
  CHECK(comp.contains(cplx(0.1, 0)) == membership::outside);
  Region u = Region::unite(d, Region::disk(cplx(3, 0), 1.0));
  CHECK(u.contains(cplx(3.2, 0)) == membership::inside);
  CHECK(u.contains(cplx(0.2, 0)) == membership::inside);
  CHECK(u.contains(cplx(-3, 0)) == membership::outside);
}
