#include "qdyn/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qdyn {

namespace {

// f^p(0) without derivative bookkeeping; +-inf on blowup keeps sign scans sane.
double critical_value_at(double c, int p) {
  double x = 0.0;
  for (int i = 0; i < p; ++i) {
    x = c - x * x;
    if (!std::isfinite(x)) return x > 0 ? 1e300 : -1e300;
    if (std::abs(x) > 1e150) return x > 0 ? 1e300 : -1e300;
  }
  return x;
}

bool itinerary_ok(double c, int p) {
  double x = c;  // f(0)
  if (!(x > 0)) return false;
  for (int i = 2; i < p; ++i) {
    x = c - x * x;
    if (!(x < 0)) return false;
  }
  return true;
}

double fp_real(const UnimodalQuadratic& f, double x, int p) {
  for (int i = 0; i < p; ++i) {
    x = f.c() - x * x;
    if (!std::isfinite(x) || std::abs(x) > 1e150) return x > 0 ? 1e300 : -1e300;
  }
  return x;
}

double dfp_real(const UnimodalQuadratic& f, double x, int p) {
  double d = 1.0;
  for (int i = 0; i < p; ++i) {
    d *= -2.0 * x;
    x = f.c() - x * x;
    if (!std::isfinite(x) || !std::isfinite(d)) return 0.0;
  }
  return d;
}

}  // namespace

bool CombinatoricsSpec::matches(const UnimodalQuadratic& f) const {
  return itinerary_ok(f.c(), period);
}

double find_superattracting_parameter(const CombinatoricsSpec& spec, double tol) {
  const int p = spec.period;
  if (p < 2) fail(errc::range, "find_superattracting_parameter: period must be >= 2");
  if (!(tol > 0)) fail(errc::range, "find_superattracting_parameter: tol must be positive");

  // Scan c downward from 2 geometrically in t = 2 - c.  The first bracket hit
  // is the root closest to 2.
  const double t_min = 1e-11, t_max = 1.3, ratio = 1.0 / 0.9955;
  double t_prev = t_min;
  double g_prev = critical_value_at(2.0 - t_prev, p);
  bool ok_prev = itinerary_ok(2.0 - t_prev, p);
  double lo = 0, hi = 0;
  bool found = false;
  for (double t = t_min * ratio; t <= t_max; t *= ratio) {
    double c = 2.0 - t;
    bool ok = itinerary_ok(c, p);
    double g = ok ? critical_value_at(c, p) : 0.0;
    if (ok && ok_prev && g * g_prev < 0) {
      lo = c;            // smaller parameter
      hi = 2.0 - t_prev;  // larger parameter
      found = true;
      break;
    }
    if (ok) {
      t_prev = t;
      g_prev = g;
      ok_prev = true;
    } else {
      ok_prev = false;
    }
  }
  if (!found)
    fail(errc::no_bracket,
         "no itinerary-consistent sign change of f^p(0) in (0.7, 2) for p = " + std::to_string(p));

  double glo = critical_value_at(lo, p);
  for (int it = 0; it < 100 && hi - lo > 0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double gm = critical_value_at(mid, p);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  double c = 0.5 * (lo + hi);
  double resid = std::abs(critical_value_at(c, p));
  if (!itinerary_ok(c, p))
    fail(errc::no_bracket, "itinerary broke at the bisection limit, p = " + std::to_string(p));
  if (resid >= tol) {
    std::ostringstream os;
    os << "p = " << p << ": |f^p(0)| = " << resid << " did not reach tol = " << tol
       << " (double-precision floor grows like 4^p * ulp)";
    fail(errc::no_bracket, os.str());
  }
  return c;
}

double scaling_factor_estimate(const UnimodalQuadratic& f, int p) {
  if (p < 2) fail(errc::no_fixed_point, "scaling_factor_estimate: degenerate period p < 2");
  if (!CombinatoricsSpec{p}.matches(f))
    fail(errc::no_fixed_point, "scaling_factor_estimate: itinerary check failed at c = " +
                                   std::to_string(f.c()));

  // March x geometrically along the positive axis; bisect each sign change of
  // f^p(x) - x and keep the first root with multiplier > 1.
  const double x_lo = 1e-10, x_hi = 2.2, ratio = 1.012;
  double xp = x_lo, gp = fp_real(f, xp, p) - xp;
  for (double x = x_lo * ratio; x <= x_hi; x *= ratio) {
    double g = fp_real(f, x, p) - x;
    if (std::isfinite(g) && std::isfinite(gp) && g * gp < 0) {
      double a = xp, b = x, ga = gp;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        double gm = fp_real(f, m, p) - m;
        if (gm == 0.0) {
          a = b = m;
          break;
        }
        if ((gm < 0) == (ga < 0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      double root = 0.5 * (a + b);
      if (dfp_real(f, root, p) > 1.0) {
        double lambda = -root / 2.0;
        if (!(lambda > -1.0 && lambda < 0.0))
          fail(errc::no_fixed_point, "scaling factor outside (-1, 0)");
        return lambda;
      }
    }
    xp = x;
    gp = g;
  }
  fail(errc::no_fixed_point,
       "no expanding fixed point of f^p on the positive axis, p = " + std::to_string(p));
}

Region DomainSystem::U_k(int k) const {
  if (k == 0) return U;
  return Region::scaled(std::pow(lambda, k), U).labeled("U^" + std::to_string(k));
}

double DomainSystem::v_k_radius(int k) const { return rho * std::pow(std::abs(lambda), k - 1); }

Region DomainSystem::V_k(int k) const {
  if (k == 0) return V;
  if (k == 1) return Vprime;
  return Region::disk(0.0, v_k_radius(k)).labeled("V^" + std::to_string(k));
}

Region DomainSystem::A_k(int k) const {
  if (k == 0) return A;
  if (k == 1) return Aprime;
  return Region::difference(V_k(k), U_k(k)).labeled("A^" + std::to_string(k));
}

Region DomainSystem::B_k(int k) const {
  return Region::difference(U, Region::unite(A_k(k), V_k(k + 1)))
      .labeled("B^" + std::to_string(k));
}

Region DomainSystem::U_minus_Vprime() const {
  return Region::difference(U, Vprime).labeled("U\\V'");
}

double DomainSystem::uprime_radius(double angle) const {
  if (uprime_profile.empty()) return 0;
  double tau = 2.0 * M_PI;
  double a = std::fmod(angle, tau);
  if (a < 0) a += tau;
  double pos = a / tau * static_cast<double>(uprime_profile.size());
  std::size_t i = static_cast<std::size_t>(pos) % uprime_profile.size();
  std::size_t j = (i + 1) % uprime_profile.size();
  double frac = pos - std::floor(pos);
  return uprime_profile[i] * (1 - frac) + uprime_profile[j] * frac;
}

Region DomainSystem::region_by_name(const std::string& token) const {
  std::string t;
  for (char ch : token)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  auto base = [&](const std::string& s) -> Region {
    if (s == "plane") return Region::whole_plane();
    if (s == "U") return U;
    if (s == "V") return V;
    if (s == "U'") return Uprime;
    if (s == "V'") return Vprime;
    if (s == "A") return A;
    if (s == "A'") return Aprime;
    fail(errc::parse, "unknown region token '" + s + "'");
  };
  auto slash = t.find('\\');
  if (slash == std::string::npos) return base(t);
  Region r = base(t.substr(0, slash));
  std::string rest = t.substr(slash + 1);
  std::string lbl = t;
  while (!rest.empty()) {
    auto next = rest.find('\\');
    std::string piece = next == std::string::npos ? rest : rest.substr(0, next);
    r = Region::difference(r, base(piece));
    rest = next == std::string::npos ? "" : rest.substr(next + 1);
  }
  return r.labeled(lbl);
}

namespace {

// Boundary radius of U' along one ray: geometric march until the membership
// flips, then bisection.
double profile_radius(const Region& uprime, double rho, double angle) {
  cplx dir = std::polar(1.0, angle);
  double r_in = 0.0, r_out = -1.0;
  for (double r = rho * 1e-8; r <= rho * 1.5; r *= 1.12) {
    membership m = uprime.contains(r * dir);
    if (m == membership::inside) {
      r_in = r;
    } else {
      if (r_in > 0) r_out = r;
      break;
    }
  }
  if (r_in == 0.0) return 0.0;   // center ray never entered: degenerate
  if (r_out < 0) return rho * 1.5;  // never exited within range
  for (int it = 0; it < 60; ++it) {
    double m = 0.5 * (r_in + r_out);
    if (uprime.contains(m * dir) == membership::inside)
      r_in = m;
    else
      r_out = m;
  }
  return 0.5 * (r_in + r_out);
}

}  // namespace

DomainSystem build_domain_system(const UnimodalQuadratic& f, int p, double rho,
                                 const DomainOptions& opt) {
  if (!(rho > 0 && rho <= 0.1))
    fail(errc::range, "build_domain_system: rho must lie in (0, 1/10]");
  if (p < 3) fail(errc::range, "build_domain_system: p must be >= 3");

  DomainSystem ds;
  ds.f = f;
  ds.p = p;
  ds.rho = rho;
  ds.lambda = opt.lambda_override ? *opt.lambda_override : scaling_factor_estimate(f, p);

  ds.Vprime = Region::disk(0.0, rho).labeled("V'");
  ds.Uprime = Region::tracked_pullback(f, p, rho, opt.track_factor).labeled("U'");
  ds.U = Region::scaled(1.0 / ds.lambda, ds.Uprime).labeled("U");
  ds.V = Region::disk(0.0, rho / std::abs(ds.lambda)).labeled("V");
  ds.A = Region::difference(ds.V, ds.U).labeled("A");
  ds.Aprime = Region::difference(ds.Vprime, ds.Uprime).labeled("A'");

  if (ds.Uprime.contains(0.0) != membership::inside)
    fail(errc::nesting_violation, "0 is not interior to U' (pullback collapsed)");

  // Radial profile of U'; doubles as the sampler for A' and the U' diameter.
  const int n = std::max(16, opt.profile_angles);
  ds.uprime_profile.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    ds.uprime_profile[static_cast<std::size_t>(k)] =
        profile_radius(ds.Uprime, rho, 2.0 * M_PI * k / n);

  double rmax = 0, rmin = 1e300;
  for (int k = 0; k < n; ++k) {
    double rk = ds.uprime_profile[static_cast<std::size_t>(k)];
    double ropp = ds.uprime_profile[static_cast<std::size_t>((k + n / 2) % n)];
    rmax = std::max(rmax, rk);
    rmin = std::min(rmin, rk);
    ds.diam_uprime = std::max(ds.diam_uprime, rk + ropp);
  }
  if (rmin <= 0)
    fail(errc::nesting_violation, "U' radial profile degenerate (empty ray)");

  // U' inside V' (equivalently U inside V after scaling by 1/lambda).
  if (!(rmax < rho)) {
    std::ostringstream os;
    os << "U' is not contained in V': profile radius " << rmax << " >= rho = " << rho;
    fail(errc::nesting_violation, os.str());
  }
  // V' inside U: |lambda| rho must clear the opposite-angle U' profile.
  ds.nesting_margin = rmin / std::abs(ds.lambda) - rho;
  if (!(ds.nesting_margin > 0)) {
    std::ostringstream os;
    os << "V' is not contained in U: margin " << ds.nesting_margin;
    fail(errc::nesting_violation, os.str());
  }

  // First-return check: points of U' must avoid V' until step p exactly.
  {
    const double fractions[] = {0.0, 0.35, 0.65, 0.9};
    const int nang = 16;
    for (int a = 0; a < nang; ++a) {
      double ang = 2.0 * M_PI * a / nang;
      double rb = ds.uprime_radius(ang);
      for (double frac : fractions) {
        cplx z = std::polar(rb * frac, ang);
        if (frac == 0.0 && a > 0) continue;
        if (ds.Uprime.contains(z) != membership::inside) continue;
        cplx w = z;
        for (int k = 1; k < p; ++k) {
          w = f(w);
          if (std::abs(w) < rho) {
            std::ostringstream os;
            os << "U' sample " << z << " re-enters V' at step " << k << " < p";
            ds.first_return_ok = false;
            fail(errc::first_return_violation, os.str());
          }
        }
        w = f(w);
        if (!(std::abs(w) < rho)) {
          std::ostringstream os;
          os << "U' sample " << z << " fails to land in V' at step p";
          fail(errc::first_return_violation, os.str());
        }
      }
    }
    ds.first_return_ok = true;
  }

  // Postcritical clearance: the forward critical orbit must avoid closure(A').
  {
    ds.postcritical_margin = 1e300;
    cplx o = 0.0;
    for (int k = 1; k <= 10 * p; ++k) {
      o = f(o);
      double dist;
      if (std::abs(o) >= rho) {
        dist = std::abs(o) - rho;
      } else {
        // inside V': must be inside U', clearance measured radially
        double rb = ds.uprime_radius(std::arg(o));
        dist = rb - std::abs(o);
        if (ds.Uprime.contains(o) != membership::inside) dist = -1;
      }
      if (!(dist > 0)) {
        std::ostringstream os;
        os << "critical orbit point f^" << k << "(0) = " << o << " meets closure(A')";
        ds.postcritical_clear = false;
        fail(errc::postcritical_collision, os.str());
      }
      ds.postcritical_margin = std::min(ds.postcritical_margin, dist);
    }
    ds.postcritical_clear = true;
  }

  // Minimal sampled return time from A' to V'.
  {
    int m_min = std::numeric_limits<int>::max();
    const int nrad = std::max(8, opt.return_samples / 16);
    const int nang = 16;
    for (int a = 0; a < nang; ++a) {
      double ang = 2.0 * M_PI * a / nang;
      double r_in = ds.uprime_radius(ang) * 1.03;
      double r_out = rho * 0.995;
      if (!(r_in < r_out)) continue;
      for (int j = 0; j < nrad; ++j) {
        double r = r_in * std::pow(r_out / r_in, (j + 0.5) / nrad);
        cplx z = std::polar(r, ang);
        if (ds.Aprime.contains(z) != membership::inside) continue;
        cplx w = z;
        for (int k = 1; k <= opt.return_budget; ++k) {
          w = f(w);
          if (std::abs(w) < rho) {
            m_min = std::min(m_min, k);
            break;
          }
          if (std::abs(w) > 1e8) break;  // escaped for good
        }
      }
    }
    if (m_min == std::numeric_limits<int>::max()) {
      ds.min_return_time = opt.return_budget;
      ds.return_time_capped = true;
    } else {
      ds.min_return_time = m_min;
    }
  }

  return ds;
}

namespace {

// Real pullback interval through f(0): the component of f^-(p-1)(T'),
// T' = (-alpha, alpha), containing the critical value.
double s1_interval_length(const UnimodalQuadratic& f, int p, double alpha) {
  auto phi = [&](double x) { return fp_real(f, x, p - 1); };
  double c = f.c();
  // walk outward from c until |f^{p-1}| leaves (-alpha, alpha), then bisect
  auto edge = [&](double dir) {
    double step = 1e-9 * std::max(1.0, std::abs(c));
    double prev = c;
    for (int it = 0; it < 400; ++it) {
      double x = c + dir * step;
      if (std::abs(phi(x)) >= alpha) {
        double a = prev, b = x;
        for (int k = 0; k < 80; ++k) {
          double m = 0.5 * (a + b);
          if (std::abs(phi(m)) < alpha)
            a = m;
          else
            b = m;
        }
        return 0.5 * (a + b);
      }
      prev = x;
      step *= 1.35;
    }
    return prev;
  };
  double hi = edge(+1.0), lo = edge(-1.0);
  return hi - lo;
}

}  // namespace

std::vector<LemmaClassRow> lemma_class_report(int p_lo, int p_hi, double rho,
                                              const DomainOptions& opt) {
  if (p_lo < 3 || p_hi > 16 || p_lo > p_hi)
    fail(errc::range, "lemma_class_report: p range must lie within [3, 16]");
  std::vector<LemmaClassRow> rows;
  for (int p = p_lo; p <= p_hi; ++p) {
    double c = find_superattracting_parameter(CombinatoricsSpec{p}, 1e-6);
    UnimodalQuadratic f(c);
    DomainSystem ds = build_domain_system(f, p, rho, opt);
    FixedPointPair fps = fixed_points(f);
    LemmaClassRow row;
    row.p = p;
    row.c_p = c;
    row.f0 = c;
    row.alpha = fps.alpha.location;
    row.eta = fps.beta.multiplier;
    row.lambda_abs = std::abs(ds.lambda);
    row.diam_uprime = ds.diam_uprime;
    row.s1_length = s1_interval_length(f, p, fps.alpha.location);
    row.modulus_proxy = std::log(rho / (row.lambda_abs * row.diam_uprime));
    row.return_time = ds.min_return_time;
    if (!std::isfinite(row.s1_length) || !std::isfinite(row.modulus_proxy))
      fail(errc::degenerate_fit, "non-finite column in lemma class report at p = " +
                                     std::to_string(p));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qdyn
