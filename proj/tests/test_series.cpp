#include <cmath>

#include "doctest.h"
#include "qdyn/series.hpp"

using namespace qdyn;

namespace {

OrbitFamily plane_family(bool nontrivial = false) {
  return OrbitFamily{Region::whole_plane(), Region::whole_plane(), Region::whole_plane(),
                     nontrivial};
}

// Brute-force reference: plain recursion with the same membership rules,
// independent of the DFS engine's stack/pruning machinery.
void brute_walk(const UnimodalQuadratic& f, const OrbitFamily& fam, cplx u, double df, int depth,
                double delta, int j, double& total) {
  PreimagePair pr = preimages(f, u);
  for (cplx w : {pr.principal, pr.mirror}) {
    int d = depth + 1;
    double nd = df * 2.0 * std::abs(w);
    if (fam.source.contains(w) != membership::outside) total += std::pow(nd, -delta);
    if (d < j && fam.via.contains(w) != membership::outside)
      brute_walk(f, fam, w, nd, d, delta, j, total);
    if (pr.critical) break;
  }
}

double brute_force_sum(const UnimodalQuadratic& f, const OrbitFamily& fam, cplx z, double delta,
                       int j) {
  double total = 0;
  if (!fam.nontrivial && fam.source.contains(z) != membership::outside) total += 1.0;
  if (j >= 1) brute_walk(f, fam, z, 1.0, 0, delta, j, total);
  return total;
}

}  // namespace

TEST_CASE("level-1 truncation at the Chebyshev critical point") {
  UnimodalQuadratic f(2.0);
  EnumerationResult r = enumerate_family(f, plane_family(), 0.0, 2.0, 1);
  // 1 + 2 (2 sqrt 2)^-2 = 1.25
  CHECK(r.sum == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("nontrivial family at depth 0 is empty") {
  UnimodalQuadratic f(1.6);
  EnumerationResult r = enumerate_family(f, plane_family(true), 0.3, 1.5, 0);
  CHECK(r.sum == 0.0);
}

TEST_CASE("hand-enumerated two levels at c = 0") {
  UnimodalQuadratic f(0.0);
  EnumerationResult r = enumerate_family(f, plane_family(), 4.0, 1.0, 2);
  double expect = 1.0 + 0.5 + 4.0 / (8.0 * std::sqrt(2.0));
  CHECK(r.sum == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("tree completeness: 2^k orbits per level") {
  UnimodalQuadratic f(1.77);
  EnumerationResult r = enumerate_family(f, plane_family(), cplx(0.31, 0.27), 1.5, 12);
  for (int k = 0; k <= 12; ++k)
    CHECK(r.levels.count[static_cast<std::size_t>(k)] == (1ull << k));
}

TEST_CASE("engine agrees with an independent recursive oracle") {
  UnimodalQuadratic f(1.9);
  Region src = Region::disk(cplx(0.0, 0.0), 1.4).labeled("E");
  Region via = Region::complement(Region::disk(0.0, 0.05)).labeled("S");
  OrbitFamily fam{Region::whole_plane(), via, src, false};
  cplx z(0.4, 0.2);
  for (int j : {0, 1, 3, 6}) {
    EnumerationResult r = enumerate_family(f, fam, z, 1.7, j);
    CHECK(r.sum == doctest::Approx(brute_force_sum(f, fam, z, 1.7, j)).epsilon(1e-12));
  }
}

TEST_CASE("conservation under source splitting") {
  UnimodalQuadratic f(1.85);
  Region e1 = Region::disk(cplx(0.8, 0), 0.6);
  Region e2 = Region::difference(Region::disk(0.0, 2.2), Region::disk(cplx(0.8, 0), 0.6));
  Region all = Region::disk(0.0, 2.2);
  cplx z(0.1, 0.05);
  OrbitFamily whole{Region::whole_plane(), Region::whole_plane(), all, false};
  OrbitFamily left{Region::whole_plane(), Region::whole_plane(), e1, false};
  OrbitFamily right{Region::whole_plane(), Region::whole_plane(), e2, false};
  double s = enumerate_family(f, whole, z, 1.6, 10).sum;
  double s1 = enumerate_family(f, left, z, 1.6, 10).sum;
  double s2 = enumerate_family(f, right, z, 1.6, 10).sum;
  CHECK(std::abs(s - (s1 + s2)) < 1e-12 * std::max(1.0, s));
}

TEST_CASE("monotonicity in the truncation level and the regions") {
  UnimodalQuadratic f(1.9);
  Region small_via = Region::difference(Region::disk(0.0, 2.0), Region::disk(0.0, 0.1));
  Region big_via = Region::difference(Region::disk(0.0, 2.4), Region::disk(0.0, 0.05));
  Region src = Region::disk(0.0, 2.4);
  cplx z(0.3, 0.1);
  OrbitFamily fam_small{Region::whole_plane(), small_via, src, false};
  OrbitFamily fam_big{Region::whole_plane(), big_via, src, false};
  double prev = -1;
  for (int j : {2, 4, 6, 8}) {
    double s = enumerate_family(f, fam_small, z, 1.7, j).sum;
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(enumerate_family(f, fam_big, z, 1.7, 8).sum >=
        enumerate_family(f, fam_small, z, 1.7, 8).sum);
}

TEST_CASE("prune soundness on an exhaustively enumerable instance") {
  double c = find_superattracting_parameter(CombinatoricsSpec{6}, 1e-9);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, 6, 0.05);
  Region UmV = ds.U_minus_Vprime();
  std::vector<cplx> terms = sample_region_grid(ds, ds.Aprime, GridSpec{3, 8});
  REQUIRE(!terms.empty());
  ExpansionProfile prof = measure_expansion_profile(f, &ds, UmV, terms, 10);
  OrbitFamily fam{ds.Aprime, UmV, UmV, false};
  cplx z = terms.front();
  EnumerationResult exact = enumerate_family(f, fam, z, 1.8, 12);
  EnumerationResult pruned = enumerate_family(f, fam, z, 1.8, 12, 1e-4, &prof);
  CHECK(pruned.nodes <= exact.nodes);
  CHECK(exact.sum <= pruned.sum + pruned.pruned_mass + 1e-12);
}

TEST_CASE("family sup: empty source yields the zero bound") {
  double c = find_superattracting_parameter(CombinatoricsSpec{6}, 1e-9);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, 6, 0.05);
  OrbitFamily fam{ds.Aprime, ds.U_minus_Vprime(), Region::empty(), false};
  SeriesBound sb = family_sup(f, &ds, fam, 1.8, GridSpec{2, 8}, 10);
  CHECK(sb.point_estimate == 0.0);
  CHECK(sb.upper_bound == 0.0);
}

TEST_CASE("family sup on the c = 0 circle grid: closed-form level decay") {
  UnimodalQuadratic f(0.0);
  GridSpec grid;
  for (int i = 0; i < 16; ++i)
    grid.explicit_terminals.push_back(std::polar(4.0, 2.0 * M_PI * i / 16));
  for (double delta : {1.5, 2.0}) {
    SeriesBound sb = family_sup(f, nullptr, plane_family(), delta, grid, 15);
    double want = std::pow(2.0, 1.0 - delta);
    for (int k = 10; k < 15; ++k) {
      double ratio = sb.argmax_levels.sum[static_cast<std::size_t>(k + 1)] /
                     sb.argmax_levels.sum[static_cast<std::size_t>(k)];
      CHECK(std::abs(ratio - want) / want < 0.01);
    }
  }
}

TEST_CASE("grid refinement stays within the margin factor") {
  double c = find_superattracting_parameter(CombinatoricsSpec{8}, 1e-8);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, 8, 0.05);
  Region UmV = ds.U_minus_Vprime();
  OrbitFamily fam{ds.Aprime, UmV, UmV, false};
  SeriesBound coarse = family_sup(f, &ds, fam, 1.8, GridSpec{2, 6}, 14);
  SeriesBound fine = family_sup(f, &ds, fam, 1.8, GridSpec{4, 12}, 14);
  CHECK(fine.point_estimate <= coarse.upper_bound);
  CHECK(coarse.point_estimate <= fine.upper_bound);
}

TEST_CASE("geometric tail bound arithmetic") {
  ExpansionProfile prof;
  prof.K_est = 10.0;
  prof.eps_est = 0.1;
  double r = 2.0 / std::pow(1.9, 2.0);
  double expect = 0.01 * r / (1 - r);
  CHECK(geometric_tail_bound(prof, 2.0, 0) == doctest::Approx(expect).epsilon(1e-12));
  // one more level shrinks the bound by exactly r
  CHECK(geometric_tail_bound(prof, 2.0, 1) ==
        doctest::Approx(expect * r).epsilon(1e-12));
  // divergent below the barrier
  CHECK_THROWS_AS(geometric_tail_bound(prof, 1.0, 0), error);
}

TEST_CASE("expansion profile rejects an unconstrained region") {
  double c = find_superattracting_parameter(CombinatoricsSpec{6}, 1e-9);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, 6, 0.05);
  std::vector<cplx> terms{cplx(0.02, 0.01)};
  CHECK_THROWS_AS(measure_expansion_profile(f, &ds, Region::whole_plane(), terms, 8), error);
}

TEST_CASE("chebyshev expansion profile is depth-stable") {
  UnimodalQuadratic f(2.0);
  Region S = Region::complement(Region::disk(0.0, 0.3)).labeled("plane\\D(0,0.3)");
  std::vector<cplx> terms;
  for (int i = 0; i < 24; ++i) terms.push_back(std::polar(1.0, 2.0 * M_PI * i / 24));
  double k_first = 0;
  for (int depth : {6, 9, 12}) {
    ExpansionProfile prof = measure_expansion_profile(f, nullptr, S, terms, depth);
    CHECK(prof.eps_est <= 0.1);
    CHECK(prof.K_est > 0);
    if (depth == 6)
      k_first = prof.K_est;
    else
      CHECK(std::abs(prof.K_est - k_first) / k_first < 0.2);
  }
}

TEST_CASE("minimal return time: shrinking V' cannot shorten returns") {
  double c = find_superattracting_parameter(CombinatoricsSpec{10}, 1e-8);
  UnimodalQuadratic f(c);
  DomainSystem big = build_domain_system(f, 10, 0.05);
  DomainSystem small = build_domain_system(f, 10, 0.025);
  int m_big = minimal_return_time(big, 600);
  int m_small = minimal_return_time(small, 600);
  CHECK(m_big >= 2);
  CHECK(m_small >= m_big);
  CHECK_THROWS_AS(minimal_return_time(big, 0), error);
}

TEST_CASE("pressure estimator: closed form at c = 0 and the segment at c = 2") {
  PressureEstimate p0 = pressure_critical_exponent(UnimodalQuadratic(0.0), cplx(4.0, 0.0), 20,
                                                   0.5, 2.0);
  CHECK(std::abs(p0.delta_cr - 1.0) <= 0.02);
  PressureEstimate p2 = pressure_critical_exponent(UnimodalQuadratic(2.0), cplx(0.5, 0.8), 20,
                                                   0.5, 2.0);
  CHECK(std::abs(p2.delta_cr - 1.0) <= 0.05);
  // estimates stay inside [1, 2] (clamped with a warning otherwise)
  PressureEstimate pm = pressure_critical_exponent(UnimodalQuadratic(1.5), cplx(0.4, 0.5), 16,
                                                   1.0, 2.0);
  CHECK(pm.delta_cr >= 1.0);
  CHECK(pm.delta_cr <= 2.0);
}

TEST_CASE("expansion lemma sweep: lemma 4.3 margins and argument validation") {
  CHECK_THROWS_AS(expansion_lemma_sweep(12, 0.0, 0.3), error);
  ExpansionSweepReport rep = expansion_lemma_sweep(12, 0.3, 0.3);
  CHECK(rep.lemma43_pass);
  for (const auto& circ : rep.circles) CHECK(circ.min_margin > 1.0);
  CHECK(!rep.samples.empty());
  CHECK(rep.lemma44_min_margin > 0);
}
