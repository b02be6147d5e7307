#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdyn/region.hpp"
#include "qdyn/renorm.hpp"

namespace qdyn {

// Arrow family D <-[S]- E (optionally "+"): finite orbits (x_0..x_k) with
// x_0 in E, x_k in D, intermediate points in S; "+" excludes the trivial
// orbit.  The trivial orbit belongs iff nontrivial is false and z in D n E.
struct OrbitFamily {
  Region target;  // D
  Region via;     // S
  Region source;  // E
  bool nontrivial = false;

  std::string descriptor() const;  // "D<-[S]-E" with "+" before E when nontrivial
};

// Measured substitute for the expansion constants: every sampled constrained
// orbit satisfies |Df^k(x_0)| >= K_est (2 - eps_est)^k.  Sample-based, not a
// proven bound; certificates carry the sample counts.
struct ExpansionProfile {
  double K_est = 0;
  double eps_est = 0;  // in (0, 2)
  // Envelope over orbit segments (node to interior ancestor).  Segments may
  // pass close to the critical value where one-step factors dip to ~2 rho, so
  // K_segment <= K_est; subtree prune charges must use it.
  double K_segment = 0;
  int sample_count = 0;
  std::uint64_t orbits_seen = 0;
  double min_ratio = 0;  // min |Df^k| (2-eps)^-k / K_est over samples
  std::vector<double> depth_floor;    // min |Df^k| per depth, 1-based
  std::vector<double> segment_floor;  // min cocycle over length-i segments
  std::vector<cplx> witness_orbit;    // orbit attaining the binding minimum
  int witness_depth = 0;
  std::string constraint_label;
};

struct EnumerationBudget {
  std::uint64_t node_cap = 50'000'000;  // per terminal
};

struct LevelSums {
  std::vector<double> sum;        // per depth 0..j
  std::vector<std::uint64_t> count;
  double total() const;
};

struct EnumerationResult {
  double sum = 0;          // truncated Poincare sum at the terminal
  double pruned_mass = 0;  // geometric bound charged for cut subtrees
  std::uint64_t nodes = 0;
  bool budget_exceeded = false;
  LevelSums levels;
};

// Depth-first backward enumeration of the family ending at z, truncated at
// level j.  Weights |Df^k(x_0)|^-delta.  Subtrees whose best-case remaining
// mass falls below prune_threshold are cut and charged to pruned_mass; this
// requires a profile for the via region, otherwise pruning is disabled.
// UNCERTAIN memberships count toward the sum (conservative for upper bounds).
EnumerationResult enumerate_family(const UnimodalQuadratic& f, const OrbitFamily& fam, cplx z,
                                   double delta, int j, double prune_threshold = 0,
                                   const ExpansionProfile* profile = nullptr,
                                   const EnumerationBudget& budget = {});

// Truncated-series evaluation with explicit approximation ledger.
struct SeriesBound {
  std::string family;
  double delta = 0;
  int truncation = 0;            // j
  double point_estimate = 0;     // max over grid terminals of the truncated sum
  double upper_bound = 0;        // point * margin^delta + tail + pruned mass
  double tail_bound = 0;
  double pruned_mass = 0;
  int terminals = 0;
  std::uint64_t nodes = 0;
  bool budget_exceeded = false;
  bool divergent = false;
  LevelSums argmax_levels;       // per-depth sums at the maximizing terminal
  cplx argmax_terminal{0, 0};
};

struct GridSpec {
  int radial = 4;
  int angular = 12;
  // optional explicit terminals (e.g. a circle grid); bypasses region sampling
  std::vector<cplx> explicit_terminals;
};

// Terminal grids per region label, built from the domain system's U' profile.
// Radial spacing is logarithmic so the sup-margin stays bounded near the
// postcritical point at 0.
std::vector<cplx> sample_region_grid(const DomainSystem& ds, const Region& target,
                                     const GridSpec& grid);

// Sup over the target region via grid + distortion margin M(h) = (1 + h/d)^2,
// h the local grid spacing and d the distance of the cell to the postcritical
// set; applied as M^delta.  A heuristic stand-in for the comparability
// constant, recorded in the bound, not a proof-grade enclosure.
SeriesBound family_sup(const UnimodalQuadratic& f, const DomainSystem* ds, const OrbitFamily& fam,
                       double delta, const GridSpec& grid, int j, double prune_threshold = 0,
                       const ExpansionProfile* profile = nullptr,
                       const EnumerationBudget& budget = {}, int threads = 1);

// Measures K_est and eps_est on backward orbits constrained to S from
// terminals sampled in the target regions.  Rejects S that reaches into a
// neighborhood of 0 (working check: samples of V' must be outside S) and
// refuses profiles containing a contracting sampled orbit (NO_EXPANSION).
ExpansionProfile measure_expansion_profile(const UnimodalQuadratic& f, const DomainSystem* ds,
                                           const Region& S, const std::vector<cplx>& terminals,
                                           int depth, const EnumerationBudget& budget = {});

// K^-delta sum_{k>j} r^k with r = 2 (2-eps)^-delta; DIVERGENT_TAIL if r >= 1.
double geometric_tail_bound(const ExpansionProfile& profile, double delta, int j);

// Minimum over sampled x in A' of the first k >= 1 with f^k(x) in V'.
int minimal_return_time(const DomainSystem& ds, int samples, int budget = 4000);

struct PressureEstimate {
  double delta_cr = 0;
  bool clamped = false;
  std::string warning;
  double fit_residual = 0;   // rms of the growth-rate regression
  int depth = 0;
};

// Regression-based critical exponent: fits the exponential growth rate P(delta)
// of the level sums over the last depth/2 levels and bisects for the root.
// Estimates outside [1, 2] are clamped with a warning.
PressureEstimate pressure_critical_exponent(const UnimodalQuadratic& f, cplx z, int depth,
                                            double delta_lo, double delta_hi);

struct Lemma43Circle {
  double radius = 0;
  double min_margin = 0;  // min over the circle of |y|^(2-kappa) / |f(y)-2|
};

struct Lemma44Sample {
  cplx y;
  int m = 0;          // minimal m >= 2 with |f^m(y)+2| > 1/10
  double dfm = 0;     // |Df^m(y)|
  double margin = 0;  // dfm / (2-eps)^m
};

struct ExpansionSweepReport {
  int p = 0;
  double kappa = 0, epsilon = 0, rho = 0;
  std::vector<Lemma43Circle> circles;       // inequality |f(y)-2| <= |y|^(2-kappa)
  bool lemma43_pass = false;
  std::vector<Lemma44Sample> samples;       // escape-expansion check on A'
  double lemma44_min_margin = 0;
  bool lemma44_pass = false;
};

struct SweepOptions {
  double rho = 0.05;
  double inner_factor = 1.5;   // first circle at inner_factor * diam U'
  double outer_radius = 0.02;
  int circle_count = 6;
  int circle_samples = 64;
  int annulus_samples = 100;
};

// Desk-scale checks of the two expansion inequalities for orbits near 0:
// (a) |f(y)-2| <= |y|^(2-kappa) on circles between diam U' and the outer
// radius; (b) for y in A', |Df^m(y)| >= (2-eps)^m at the first escape
// moment m >= 2 from the 1/10-neighborhood of -2.  Margins are reported
// per circle and per sample whether or not they clear 1.
ExpansionSweepReport expansion_lemma_sweep(int p, double kappa, double epsilon,
                                           const SweepOptions& opt = {});

}  // namespace qdyn
