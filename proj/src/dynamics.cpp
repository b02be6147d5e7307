#include "qdyn/dynamics.hpp"

#include <cmath>
#include <string>

#include "qdyn/rng.hpp"

namespace qdyn {

CocycleResult iterate_with_derivative(const UnimodalQuadratic& f, cplx z, int k) {
  if (k < 0) fail(errc::range, "iterate_with_derivative: k must be >= 0");
  cplx v = z;
  cplx d = 1.0;
  for (int i = 0; i < k; ++i) {
    d *= f.deriv(v);
    v = f(v);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || !std::isfinite(d.real()) ||
        !std::isfinite(d.imag())) {
      fail(errc::overflow, "non-finite value at step " + std::to_string(i + 1) + " of " +
                               std::to_string(k));
    }
  }
  return {v, d, k};
}

PreimagePair preimages(const UnimodalQuadratic& f, cplx z) {
  cplx radicand = cplx(f.c()) - z;
  cplx w = std::sqrt(radicand);
  return {w, -w, radicand == cplx(0.0)};
}

FixedPointPair fixed_points(const UnimodalQuadratic& f) {
  double disc = 1.0 + 4.0 * f.c();
  if (disc <= 0) fail(errc::range, "fixed_points: no real fixed points for c <= -1/4");
  double s = std::sqrt(disc);
  double alpha = (-1.0 + s) / 2.0;
  double beta = (-1.0 - s) / 2.0;
  return {{alpha, -2.0 * alpha}, {beta, -2.0 * beta}};
}

namespace {
inline cplx tee(cplx z) { return -(z + 1.0 / z); }
inline cplx dtee(cplx z) { return -(1.0 - 1.0 / (z * z)); }
}  // namespace

SemiconjugacyReport chebyshev_semiconjugacy_check(int sample_count, double r_in, double r_out,
                                                  std::uint64_t seed) {
  if (!(1.0 < r_in && r_in < r_out)) fail(errc::range, "semiconjugacy: need 1 < r_in < r_out");
  CounterRng rng{seed};
  SemiconjugacyReport rep;
  rep.min_abs_dt = 1e300;
  double log_in = std::log(r_in), log_out = std::log(r_out);
  for (int i = 0; i < sample_count; ++i) {
    double r = std::exp(rng.uniform(log_in, log_out, static_cast<std::uint64_t>(i), 0));
    double th = rng.uniform(0.0, 2.0 * M_PI, static_cast<std::uint64_t>(i), 1);
    cplx z = std::polar(r, th);
    cplx lhs = tee(z * z);
    cplx t = tee(z);
    cplx rhs = 2.0 - t * t;
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
    double adt = std::abs(dtee(z));
    rep.min_abs_dt = std::min(rep.min_abs_dt, adt);
    rep.max_abs_dt = std::max(rep.max_abs_dt, adt);
  }
  rep.samples = sample_count;
  return rep;
}

}  // namespace qdyn
