#pragma once

#include <string>
#include <vector>

#include "qdyn/dynamics.hpp"

namespace qdyn {

// Even-polynomial representative of the period-p renormalization fixed point,
// normalized by g(-2) = -2:
//   g(x) = g0 + sum_{i=1..N} a_i x^{2i},  g0 = -2 - sum a_i 4^i,
//   g^p(lambda x) = lambda g(x) on [-2, 2].
struct RenormFixedPointApprox {
  int period = 0;
  int degree = 0;                 // N
  double lambda = 0;              // in (-1, 0)
  std::vector<double> coeffs;     // a_1..a_N
  double residual = 0;            // sup |g^p(lambda x) - lambda g(x)| on a dense grid
  double validity_radius = 2.0;

  double g0() const;
  double eval(double x) const;
  double eval_iterated(double x, int times) const;
  double beta_residual() const { return std::abs(eval(-2.0) + 2.0); }
};

enum class solve_status { converged, nonconverged };

struct CvitanovicReport {
  RenormFixedPointApprox approx;
  solve_status status = solve_status::nonconverged;
  int iterations = 0;
  std::vector<double> residual_history;  // sup-norm at collocation nodes per iteration
  bool combinatorics_ok = false;         // solved g reproduces the sign pattern
};

struct CvitanovicOptions {
  int max_iterations = 100;
  double node_tolerance = 1e-11;   // Newton stop on collocation nodes
  double fd_step = 1e-7;           // finite-difference Jacobian step
  double target_residual = 1e-8;   // dense-grid residual for "converged"
  bool extended_precision = false; // long-double internals
};

// Newton on the unknowns (g0, a_1..a_N, lambda): N+1 collocation equations at
// positive Chebyshev nodes (even symmetry makes +-x redundant) plus the
// normalization g(-2) = -2.  Seeded from a RenormFixedPointApprox.
CvitanovicReport cvitanovic_solve(int p, int degree, const RenormFixedPointApprox& seed,
                                  const CvitanovicOptions& opt = {});

// Seed from the superattracting polynomial proxy at parameter c_p: least-squares
// even-polynomial fit of lambda^-1 f^p(lambda x) on [-2, 2] with the beta-rescale
// lambda, re-normalized to g(-2) = -2.  Falls back to a near-Chebyshev shape
// ladder internally if Newton stalls (see cvitanovic_solve_auto).
RenormFixedPointApprox proxy_seed(int p, int degree, double c_p);

// proxy seed first, then a small documented ladder of scale/lambda seeds.
CvitanovicReport cvitanovic_solve_auto(int p, int degree, double c_p,
                                       const CvitanovicOptions& opt = {});

}  // namespace qdyn
