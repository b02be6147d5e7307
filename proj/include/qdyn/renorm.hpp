#pragma once

#include <optional>
#include <vector>

#include "qdyn/dynamics.hpp"
#include "qdyn/region.hpp"

namespace qdyn {

// Real combinatorics closest to Chebyshev at period p: the critical orbit
// satisfies f(0) > 0 and f^i(0) < 0 for 1 < i < p.
struct CombinatoricsSpec {
  int period;

  static CombinatoricsSpec closest_to_chebyshev(int p) { return {p}; }

  // True iff the first period-1 critical orbit points carry the required
  // sign pattern under f.
  bool matches(const UnimodalQuadratic& f) const;
};

// Largest parameter c in (0, 2) with f_c^p(0) = 0 and the spec's sign
// pattern.  Bracket found by a geometric scan in 2 - c (the superattracting
// parameters accumulate at 2 like 4^-p, so a fixed-step scan cannot resolve
// large p), then bisection to double resolution.  |f^p(0)| < tol is verified
// on the result; the achievable floor grows like 4^p * ulp.
double find_superattracting_parameter(const CombinatoricsSpec& spec, double tol);

// Scaling factor of the pre-renormalization under the polynomial proxy:
// lambda = -x*/2 where x* > 0 is the fixed point of f^p nearest 0 on the
// positive real axis with Df^p(x*) > 1 (the beta fixed point of f^p: U'->V',
// which rescales to -2).
double scaling_factor_estimate(const UnimodalQuadratic& f, int p);

struct DomainOptions {
  int profile_angles = 128;      // radial-profile resolution of U'
  int return_samples = 512;      // A' samples for the minimal return time
  int return_budget = 4000;      // forward-iteration cap per sample
  double track_factor = 0.5;     // branch-tracking constant of the pullback
  std::optional<double> lambda_override;  // tests only
};

// The nested system U' c V' c U c V for (p, rho, lambda) plus scaled copies.
// U' is the tracked pullback of V' = D_rho; U = lambda^-1 U', V = D_{rho/|lambda|}.
struct DomainSystem {
  UnimodalQuadratic f{2.0};
  int p = 0;
  double rho = 0;
  double lambda = 0;

  Region Uprime, Vprime, U, V, A, Aprime;

  // Radial profile of U': boundary radius per angle 2*pi*k/n.
  std::vector<double> uprime_profile;
  double diam_uprime = 0;
  double nesting_margin = 0;  // min distance from dV' to dU

  int min_return_time = 0;       // sampled A' -> V' return time
  bool return_time_capped = false;
  bool first_return_ok = false;
  bool postcritical_clear = false;
  double postcritical_margin = 0;

  Region U_k(int k) const;  // lambda^k U
  Region V_k(int k) const;  // disk of radius rho * |lambda|^{k-1}
  Region A_k(int k) const;  // V^k \ U^k
  Region B_k(int k) const;  // U \ (A^k u V^{k+1})
  double v_k_radius(int k) const;

  // Frequently used composite, labeled "U\V'".
  Region U_minus_Vprime() const;

  double uprime_radius(double angle) const;  // interpolated profile
  Region region_by_name(const std::string& token) const;
};

// Constructs and verifies the system; throws NESTING_VIOLATION,
// FIRST_RETURN_VIOLATION or POSTCRITICAL_COLLISION naming an offending
// sample.  Working range 0 < rho <= 1/10, p >= 3.
DomainSystem build_domain_system(const UnimodalQuadratic& f, int p, double rho,
                                 const DomainOptions& opt = {});

struct LemmaClassRow {
  int p;
  double c_p;
  double f0;             // f(0) = c_p
  double alpha;          // orientation reversing fixed point
  double eta;            // Df at beta
  double lambda_abs;     // |lambda| from scaling_factor_estimate
  double diam_uprime;
  double s1_length;      // real pullback interval through f(0)
  double modulus_proxy;  // log(rho / (|lambda| diam U'))
  int return_time;
};

// Per-period geometry table backing the asymptotic trend checks.
// Columns in the order of LemmaClassRow; CSV export lives in report.hpp.
std::vector<LemmaClassRow> lemma_class_report(int p_lo, int p_hi, double rho,
                                              const DomainOptions& opt = {});

}  // namespace qdyn
