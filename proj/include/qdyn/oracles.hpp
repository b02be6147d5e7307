#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdyn/renorm.hpp"

namespace qdyn {

struct EscapeResult {
  bool escapes = false;
  int step = 0;  // first step with |f^k(z)| > radius, when escaping
};

// Standard escape-time membership test for f_c(x) = c - x^2.
EscapeResult julia_escape_membership(double c, cplx z, int max_iter, double escape_radius);

struct DimensionEstimate {
  double value = 0;
  std::vector<std::pair<double, std::uint64_t>> ladder;  // (box size, count)
  double fit_residual = 0;
  double c = 0;
};

// Boundary-detecting box count: a box counts when it contains both escaping
// and retained corner samples (J = boundary of the filled set, so filled-set
// counting would measure the wrong object).  Value is the least-squares slope
// of log count against log(1/size) over the top half of the ladder.
DimensionEstimate box_counting_dimension(double c, const std::vector<int>& grid_resolutions,
                                         int max_iter);

struct CascadeOracle {
  double lambda = 0;       // Richardson/Aitken-extrapolated limit of d_{n+1}/d_n
  double error_bar = 0;
  std::vector<double> parameters;  // superattracting c of period 2^n
  std::vector<double> closest_returns;  // d_n = f^{2^{n-1}}(0)
  std::vector<double> ratios;
};

// Independent scaling-factor oracle from the period-doubling cascade; agrees
// with the period-2 collocation solver to ~1e-4 at n_max = 8.
CascadeOracle cascade_lambda_oracle(int n_max);

struct EscapeFraction {
  double fraction = 0;      // lower estimate: budget-truncated
  double ci_low = 0, ci_high = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  int budget = 0;
};

// Monte Carlo fraction of A^k whose forward orbit enters V^k within the
// budget.  Counter-based sampling keyed by (seed, index): bit-identical for a
// fixed seed regardless of thread count.
EscapeFraction escape_fraction_mc(const UnimodalQuadratic& f, const DomainSystem& ds, int k,
                                  int samples, int budget, std::uint64_t seed, int threads = 1);

// Escape-time render to a binary PPM (P6).  Flag-gated by the CLI.
void render_escape_ppm(double c, const std::string& path, int width, int height, int max_iter,
                       double half_width = 2.2);

}  // namespace qdyn
