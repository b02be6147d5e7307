#include "qdyn/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "qdyn/parallel.hpp"
#include "qdyn/rng.hpp"

namespace qdyn {

EscapeResult julia_escape_membership(double c, cplx z, int max_iter, double escape_radius) {
  if (!(escape_radius >= 2.0 + std::abs(c)))
    fail(errc::range, "escape membership: radius must be >= 2 + |c|");
  UnimodalQuadratic f(c);
  for (int k = 1; k <= max_iter; ++k) {
    z = f(z);
    if (std::norm(z) > escape_radius * escape_radius) return {true, k};
  }
  return {false, 0};
}

DimensionEstimate box_counting_dimension(double c, const std::vector<int>& grid_resolutions,
                                         int max_iter) {
  if (grid_resolutions.empty()) fail(errc::range, "box counting: empty resolution ladder");
  for (std::size_t i = 1; i < grid_resolutions.size(); ++i)
    if (grid_resolutions[i] <= grid_resolutions[i - 1])
      fail(errc::range, "box counting: resolutions must ascend");
  int n_max = grid_resolutions.back();
  if (n_max > 4096) fail(errc::range, "box counting: resolution cap is 4096");
  for (int r : grid_resolutions)
    if (n_max % r != 0) fail(errc::range, "box counting: resolutions must divide the finest one");

  const double half = 2.2;  // J(f_c) sits inside D(0, 2) for c in (0, 2]
  const double radius = std::max(2.0 + std::abs(c), 3.0);
  const int side = n_max + 1;  // corner samples

  std::vector<std::uint8_t> esc(static_cast<std::size_t>(side) * side);
  UnimodalQuadratic f(c);
  parallel_for(static_cast<std::size_t>(side), default_thread_count(), [&](std::size_t row) {
    double y = -half + 2.0 * half * static_cast<double>(row) / n_max;
    for (int col = 0; col < side; ++col) {
      double x = -half + 2.0 * half * col / n_max;
      cplx z(x, y);
      bool e = false;
      for (int k = 0; k < max_iter; ++k) {
        z = f(z);
        if (std::norm(z) > radius * radius) {
          e = true;
          break;
        }
      }
      esc[row * static_cast<std::size_t>(side) + col] = e ? 1 : 0;
    }
  });

  DimensionEstimate est;
  est.c = c;
  for (int res : grid_resolutions) {
    int stride = n_max / res;
    std::uint64_t count = 0;
    for (int by = 0; by < res; ++by) {
      for (int bx = 0; bx < res; ++bx) {
        bool any_esc = false, any_ret = false;
        for (int sy = 0; sy <= stride && !(any_esc && any_ret); sy += stride) {
          for (int sx = 0; sx <= stride; sx += stride) {
            bool e = esc[static_cast<std::size_t>(by * stride + sy) * side + bx * stride + sx];
            any_esc = any_esc || e;
            any_ret = any_ret || !e;
          }
        }
        // corner decimation can miss thin boundary crossings; refine with the
        // full corner set of the box when undecided
        if (!(any_esc && any_ret) && stride > 1) {
          for (int sy = 0; sy <= stride && !(any_esc && any_ret); ++sy) {
            for (int sx = 0; sx <= stride; ++sx) {
              bool e = esc[static_cast<std::size_t>(by * stride + sy) * side + bx * stride + sx];
              any_esc = any_esc || e;
              any_ret = any_ret || !e;
              if (any_esc && any_ret) break;
            }
          }
        }
        if (any_esc && any_ret) ++count;
      }
    }
    est.ladder.emplace_back(2.0 * half / res, count);
  }

  // least-squares slope over the top half of the ladder
  std::size_t lo = est.ladder.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = lo; i < est.ladder.size(); ++i) {
    if (est.ladder[i].second == 0) fail(errc::degenerate_fit, "box counting: empty boundary count");
    double x = std::log(1.0 / est.ladder[i].first);
    double y = std::log(static_cast<double>(est.ladder[i].second));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) fail(errc::degenerate_fit, "box counting: ladder too short");
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) fail(errc::degenerate_fit, "box counting: degenerate abscissae");
  double slope = (n * sxy - sx * sy) / denom;
  double icept = (sy - slope * sx) / n;
  double rms = 0;
  for (std::size_t i = lo; i < est.ladder.size(); ++i) {
    double x = std::log(1.0 / est.ladder[i].first);
    double y = std::log(static_cast<double>(est.ladder[i].second));
    double e = y - (icept + slope * x);
    rms += e * e;
  }
  est.fit_residual = std::sqrt(rms / n);
  est.value = slope;
  if (!(est.value >= 0.0 && est.value <= 2.0)) {
    // keep the raw slope but flag pathology through the error path
    fail(errc::degenerate_fit, "box counting: slope outside [0, 2]");
  }
  return est;
}

namespace {

// f^n(0) for the cascade search
double cascade_g(double c, int n) {
  double x = 0;
  for (int i = 0; i < n; ++i) {
    x = c - x * x;
    if (!std::isfinite(x) || std::abs(x) > 1e150) return x > 0 ? 1e300 : -1e300;
  }
  return x;
}

}  // namespace

CascadeOracle cascade_lambda_oracle(int n_max) {
  if (n_max < 1 || n_max > 10) fail(errc::range, "cascade oracle: n_max must lie in [1, 10]");
  const double accumulation = 1.40116;
  CascadeOracle out;
  double c_prev = 0.0;  // period 1: f(0) = 0 at c = 0
  for (int n = 1; n <= n_max; ++n) {
    int period = 1 << n;
    double gap = accumulation - c_prev;
    double lo = c_prev + 0.30 * gap, hi = c_prev + 0.97 * gap;
    const int steps = 4000;
    double prev_c = lo, prev_g = cascade_g(lo, period);
    double blo = 0, bhi = 0;
    bool found = false;
    for (int i = 1; i <= steps; ++i) {
      double cc = lo + (hi - lo) * i / steps;
      double g = cascade_g(cc, period);
      if (g * prev_g < 0) {
        blo = prev_c;
        bhi = cc;
        found = true;
        break;
      }
      prev_c = cc;
      prev_g = g;
    }
    if (!found)
      fail(errc::no_bracket, "cascade oracle: no bracket for period " + std::to_string(period));
    double ga = cascade_g(blo, period);
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (blo + bhi);
      double gm = cascade_g(mid, period);
      if ((gm < 0) == (ga < 0)) {
        blo = mid;
        ga = gm;
      } else {
        bhi = mid;
      }
    }
    double c_n = 0.5 * (blo + bhi);
    // reject period-dividing roots
    if (n >= 2 && std::abs(cascade_g(c_n, period / 2)) < 1e-8)
      fail(errc::no_bracket, "cascade oracle: landed on a lower-period root");
    out.parameters.push_back(c_n);
    out.closest_returns.push_back(cascade_g(c_n, period / 2));
    c_prev = c_n;
  }
  for (std::size_t i = 1; i < out.closest_returns.size(); ++i)
    out.ratios.push_back(out.closest_returns[i] / out.closest_returns[i - 1]);

  if (out.ratios.empty()) {
    out.lambda = 0;
    out.error_bar = 1;
    return out;
  }
  if (out.ratios.size() < 3) {
    out.lambda = out.ratios.back();
    out.error_bar = std::max(0.05 * std::abs(out.lambda), 2e-2);
    return out;
  }
  // Aitken extrapolation on the ratio sequence
  auto aitken = [](double a, double b, double c) {
    double denom = c - 2 * b + a;
    if (denom == 0) return c;
    return c - (c - b) * (c - b) / denom;
  };
  std::size_t m = out.ratios.size();
  double ext1 = aitken(out.ratios[m - 3], out.ratios[m - 2], out.ratios[m - 1]);
  double ext0 = m >= 4 ? aitken(out.ratios[m - 4], out.ratios[m - 3], out.ratios[m - 2]) : ext1;
  out.lambda = ext1;
  out.error_bar = std::max(std::abs(ext1 - ext0), std::abs(ext1 - out.ratios[m - 1]) * 0.05);
  return out;
}

EscapeFraction escape_fraction_mc(const UnimodalQuadratic& f, const DomainSystem& ds, int k,
                                  int samples, int budget, std::uint64_t seed, int threads) {
  if (k < 1) fail(errc::range, "escape_fraction_mc: k must be >= 1");
  if (samples <= 0) fail(errc::range, "escape_fraction_mc: samples must be positive");
  Region Ak = ds.A_k(k);
  double R = ds.v_k_radius(k);
  double escape_r = 2.0 + std::abs(f.c()) + R;

  CounterRng rng{seed};
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(samples), 0);
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    // rejection sample A^k inside its bounding disk V^k, counters keyed by
    // (i, attempt) so order never matters
    cplx z;
    for (std::uint64_t attempt = 0;; ++attempt) {
      double r = R * std::sqrt(rng.uniform(i, 2 * attempt));
      double th = rng.uniform(0.0, 2.0 * M_PI, i, 2 * attempt + 1);
      z = std::polar(r, th);
      if (Ak.contains(z) == membership::inside) break;
      if (attempt > 10000)
        fail(errc::empty_grid, "escape_fraction_mc: rejection sampling starved in A^k");
    }
    cplx w = z;
    for (int it = 1; it <= budget; ++it) {
      w = f(w);
      if (std::abs(w) < R) {
        hit[i] = 1;
        break;
      }
      if (std::abs(w) > escape_r) break;  // permanent escape
    }
  });

  std::uint64_t hits = 0;
  for (std::uint8_t h : hit) hits += h;
  EscapeFraction out;
  out.samples = samples;
  out.seed = seed;
  out.budget = budget;
  out.fraction = static_cast<double>(hits) / samples;
  double se = std::sqrt(std::max(out.fraction * (1 - out.fraction), 1e-12) / samples);
  out.ci_low = std::max(0.0, out.fraction - 1.96 * se);
  out.ci_high = std::min(1.0, out.fraction + 1.96 * se);
  return out;
}

void render_escape_ppm(double c, const std::string& path, int width, int height, int max_iter,
                       double half_width) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io, "cannot open " + path);
  os << "P6\n" << width << " " << height << "\n255\n";
  double radius = std::max(2.0 + std::abs(c), 3.0);
  UnimodalQuadratic f(c);
  std::vector<unsigned char> row(static_cast<std::size_t>(width) * 3);
  for (int y = 0; y < height; ++y) {
    double im = -half_width + 2.0 * half_width * y / (height - 1);
    for (int x = 0; x < width; ++x) {
      double re = -half_width + 2.0 * half_width * x / (width - 1);
      cplx z(re, im);
      int steps = 0;
      bool esc = false;
      for (int k = 1; k <= max_iter; ++k) {
        z = f(z);
        if (std::norm(z) > radius * radius) {
          esc = true;
          steps = k;
          break;
        }
      }
      unsigned char r, g, b;
      if (!esc) {
        r = g = b = 0;
      } else {
        double t = std::log1p(steps) / std::log1p(max_iter);
        r = static_cast<unsigned char>(30 + 225 * t);
        g = static_cast<unsigned char>(20 + 160 * t);
        b = static_cast<unsigned char>(60 + 195 * (1 - t));
      }
      row[static_cast<std::size_t>(x) * 3] = r;
      row[static_cast<std::size_t>(x) * 3 + 1] = g;
      row[static_cast<std::size_t>(x) * 3 + 2] = b;
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!os) fail(errc::io, "short write to " + path);
}

}  // namespace qdyn
