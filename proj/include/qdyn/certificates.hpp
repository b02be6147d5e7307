#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qdyn/series.hpp"

namespace qdyn {

// The quadratic majorant P(x) = alpha + beta x + gamma x^2 assembled from the
// six base family sups:
//   alpha = 1 + a1 + a2 (1 + a3)
//   beta  = b1 + b2 (1 + a3) + a2 b3
//   gamma = b2 b3
struct QuadraticRecursion {
  double delta = 0;
  double a1 = 0, a2 = 0, a3 = 0;  // sources U\V'
  double b1 = 0, b2 = 0, b3 = 0;  // sources A'
  double alpha = 1, beta = 0, gamma = 0;
  bool paper_inequality_mode = false;
  std::array<SeriesBound, 6> inputs;  // a1 a2 a3 b1 b2 b3 provenance

  void recompute_coefficients();
  double eval(double x) const { return alpha + beta * x + gamma * x * x; }
};

struct QuadraticFixedPoint {
  std::optional<double> s;            // smallest positive fixed point
  std::vector<double> iterate_trace;  // P^j(0), converges to s from below
};

// Smallest positive solution of P(s) = s in the numerically stable form
// s = 2 alpha / ((1-beta) + sqrt((1-beta)^2 - 4 alpha gamma)); NONE when
// beta >= 1 or the discriminant is negative.
QuadraticFixedPoint solve_quadratic_fixed_point(double alpha, double beta, double gamma);

enum class cert_status { certified, no_fixed_point, input_divergent, failed };
const char* cert_status_name(cert_status s);

struct CertBudgets {
  int truncation = 34;
  double prune_threshold = 1e-9;
  GridSpec grid{4, 12};
  int profile_depth = 12;
  EnumerationBudget enumeration{};
  int threads = 1;
  bool paper_inequality_mode = false;
  double bijection_truncation = 5;  // g-steps for the rescaling residual
};

struct DeltaCertificate {
  int p = 0;
  double rho = 0, delta = 0;
  double c_p = 0, lambda = 0;
  QuadraticRecursion recursion;
  std::optional<double> fixed_point;
  cert_status status = cert_status::failed;
  std::string failure_reason;
  double self_similarity_residual = 0;  // rescaling-bijection defect, reported not gated
  bool theorem_a_shape = false;         // beta < 1/3 and P([0, 2P(0)]) inside itself
  double profile_K = 0, profile_eps = 0;
  CertBudgets budgets;
};

// Evaluates the six family sups at delta over the domain system and forms the
// coefficients.  In paper-inequality mode the six sups are replaced by the
// three dominating families evaluated on the union grids, so the direct-mode
// coefficients never exceed the paper-mode ones.
QuadraticRecursion assemble_recursion(const UnimodalQuadratic& f, const DomainSystem& ds,
                                      double delta, const ExpansionProfile& profile,
                                      const CertBudgets& budgets);

// End-to-end certificate: domain system, profile, recursion, fixed point,
// self-similarity residual.  Never aborts silently; constituent errors
// downgrade the status.
DeltaCertificate certify_delta(const UnimodalQuadratic& f, int p, double rho, double delta,
                               const CertBudgets& budgets = {});

struct BisectDeltaResult {
  double delta_star = 0;
  DeltaCertificate certificate;          // at delta_star
  std::vector<double> tested;            // probed deltas
  std::vector<bool> certified;
};

// Smallest certified delta in the range at the given tolerance.  Reuses one
// domain system and expansion profile so monotonicity in delta is structural.
BisectDeltaResult bisect_delta(const UnimodalQuadratic& f, int p, double rho, double delta_lo,
                               double delta_hi, double tol, const CertBudgets& budgets = {});

struct UvSups {
  double sV = 0;  // sup X(V' <-+[U\V'] A')
  double sA = 0;  // sup X(A  <-[U\V'] A')
  double sQ = 0;  // sup X(V' <-[U\V'] U\V')
  double sN = 0;  // sup X(A  <-[U\V'] U\V')
};

struct UvStep {
  double v_limit = 0;  // fixed point of v -> (1+v) u (1+sN)
  double u_next = 0;   // sV + u (1+v) sA (1+sQ)
};

// One step of the u/v recursion; NONCONTRACTIVE when u (1 + sN) >= 1.
UvStep uv_recursion_step(double u_k, const UvSups& sups);

// Truncated v-iteration v_{j+1} = (1+v_j) u (1+sN) from v_{-1} = 0.
std::vector<double> uv_v_trace(double u_k, const UvSups& sups, int j_max);

struct AreaCertificate {
  int p = 0;
  double rho = 0;
  double c_p = 0, lambda = 0;
  double q1 = 0, q2 = 0, q3 = 0, q4 = 0;  // the four delta = 2 sups
  double K = 0;                            // := q3 (measured)
  bool paper_threshold_mode = false;
  bool thresholds_ok = false;              // q1 < 1/100, q2 < 1/(5K+5), q4 < 1/100
  std::vector<double> u_trace, v_trace;
  double u_cap = 0;
  double area_ratio_bound = 0;             // (diam U' / (2 rho))^2
  cert_status status = cert_status::failed;
  std::string failure_reason;
  std::array<SeriesBound, 4> inputs;
};

// Area-zero induction at delta = 2.  In paper-threshold mode the measured
// sups must clear the proof's constants; direct mode runs the recursion with
// the measured sups and certifies a bounded u-trace plus the area-ratio check.
AreaCertificate certify_area(const UnimodalQuadratic& f, int p, double rho, int k_max,
                             bool paper_threshold_mode = false, const CertBudgets& budgets = {});

// Pure arithmetic of the proof's induction with the exact constants
// (1/100, 1/(5K+5), 2K, 1/100); returns the u-trace for k <= k_max.
std::vector<double> paper_threshold_induction(double K, int k_max);

}  // namespace qdyn
