#pragma once

#include <complex>
#include <utility>

#include "qdyn/error.hpp"

namespace qdyn {

using cplx = std::complex<double>;

// The real quadratic family f_c(x) = c - x^2, acting on the complex plane.
// Chebyshev normalization: at c = 2 the orientation-preserving fixed point is
// -2 with multiplier 4 and alpha = 1.  Affinely conjugate to z^2 - c via
// x = -z (see to_standard_form).
class UnimodalQuadratic {
 public:
  explicit UnimodalQuadratic(double c) : c_(c) {}

  double c() const { return c_; }
  cplx operator()(cplx z) const { return c_ - z * z; }
  cplx deriv(cplx z) const { return -2.0 * z; }

  // Parameter of the affinely conjugate map z -> z^2 + c_std.
  double to_standard_form() const { return -c_; }

  bool operator==(const UnimodalQuadratic& o) const { return c_ == o.c_; }

 private:
  double c_;
};

struct CocycleResult {
  cplx value;       // f^k(z)
  cplx derivative;  // Df^k(z)
  int steps = 0;
};

// f^k(z) together with the derivative cocycle prod f'(f^i(z)).
// Throws errc::overflow naming the step index on a non-finite intermediate.
CocycleResult iterate_with_derivative(const UnimodalQuadratic& f, cplx z, int k);

struct PreimagePair {
  cplx principal;  // +sqrt(c - z), principal branch
  cplx mirror;     // the negative
  bool critical = false;  // z = c: double root at 0
};

// Both solutions of f(w) = z.  Deterministic ordering, principal root first.
PreimagePair preimages(const UnimodalQuadratic& f, cplx z);

struct FixedPoint {
  double location;
  double multiplier;  // signed Df at the fixed point
};

struct FixedPointPair {
  FixedPoint alpha;  // orientation reversing, alpha > 0
  FixedPoint beta;   // orientation preserving, beta < 0, Df(beta) > 1
};

// The two fixed points of f_c for c > -1/4, by the quadratic formula.
FixedPointPair fixed_points(const UnimodalQuadratic& f);

struct SemiconjugacyReport {
  double max_residual = 0;  // max |T(z^2) - Ch(T(z))| over samples
  double min_abs_dt = 0;    // min |DT| over samples
  double max_abs_dt = 0;    // max |DT|, supports |DT| <= 2 on |z| > 1
  int samples = 0;
};

// Samples T(z) = -(z + 1/z) on r_in < |z| < r_out and measures the defect of
// the identity T(z^2) = Ch(T(z)) with Ch(x) = 2 - x^2.  Exact up to rounding.
SemiconjugacyReport chebyshev_semiconjugacy_check(int sample_count, double r_in, double r_out,
                                                  std::uint64_t seed = 1);

}  // namespace qdyn
