#include "qdyn/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdyn/parallel.hpp"

namespace qdyn {

std::string OrbitFamily::descriptor() const {
  std::string d = target.label().empty() ? "?" : target.label();
  std::string s = via.label().empty() ? "?" : via.label();
  std::string e = source.label().empty() ? "?" : source.label();
  return d + "<-[" + s + "]-" + (nontrivial ? "+" : "") + e;
}

double LevelSums::total() const {
  double t = 0;
  for (double v : sum) t += v;
  return t;
}

namespace {

struct StackEntry {
  cplx z;        // node value, f^depth(node) = terminal
  double logdf;  // log |Df^depth(node)|
  int depth;
};

bool counts_as(membership m) { return m != membership::outside; }

}  // namespace

EnumerationResult enumerate_family(const UnimodalQuadratic& f, const OrbitFamily& fam, cplx z,
                                   double delta, int j, double prune_threshold,
                                   const ExpansionProfile* profile,
                                   const EnumerationBudget& budget) {
  if (!(delta > 0)) fail(errc::range, "enumerate_family: delta must be positive");
  if (j < 0) fail(errc::range, "enumerate_family: truncation level must be >= 0");
  if (fam.target.contains(z) == membership::outside)
    fail(errc::range, "enumerate_family: terminal is outside the target region");

  EnumerationResult res;
  res.levels.sum.assign(static_cast<std::size_t>(j) + 1, 0.0);
  res.levels.count.assign(static_cast<std::size_t>(j) + 1, 0);

  // trivial orbit
  if (!fam.nontrivial && counts_as(fam.source.contains(z))) {
    res.levels.sum[0] += 1.0;
    res.levels.count[0] += 1;
  }

  // prune rule constants: cut node u when w(u) K^-d r/(1-r) < threshold,
  // with the segment envelope (subtrees hang off interior nodes)
  double prune_factor = 0;
  bool prune_enabled = false;
  if (prune_threshold > 0 && profile != nullptr && profile->K_est > 0) {
    double K = profile->K_segment > 0 ? profile->K_segment : profile->K_est;
    double r = 2.0 * std::pow(2.0 - profile->eps_est, -delta);
    if (r < 1.0) {
      prune_factor = std::pow(K, -delta) * r / (1.0 - r);
      prune_enabled = true;
    }
  }

  std::vector<StackEntry> stack;
  stack.reserve(1024);
  if (j >= 1) stack.push_back({z, 0.0, 0});

  while (!stack.empty()) {
    StackEntry e = stack.back();
    stack.pop_back();

    // children of e live at depth e.depth + 1
    PreimagePair pre = preimages(f, e.z);
    const cplx kids[2] = {pre.principal, pre.mirror};
    for (int t = 0; t < 2; ++t) {
      cplx u = kids[t];
      if (t == 1 && pre.critical) break;  // double root: one child only
      ++res.nodes;
      if (res.nodes > budget.node_cap) {
        res.budget_exceeded = true;
        stack.clear();
        break;
      }
      double step = 2.0 * std::abs(u);
      if (step == 0.0) {
        std::ostringstream os;
        os << "backward branch from terminal " << z << " lands exactly on the critical point at depth "
           << e.depth + 1;
        fail(errc::critical_hit, os.str());
      }
      double logdf = e.logdf + std::log(step);
      int d = e.depth + 1;
      double w = std::exp(-delta * logdf);

      if (counts_as(fam.source.contains(u))) {
        res.levels.sum[static_cast<std::size_t>(d)] += w;
        res.levels.count[static_cast<std::size_t>(d)] += 1;
      }
      if (d < j && counts_as(fam.via.contains(u))) {
        if (prune_enabled && w * prune_factor < prune_threshold) {
          res.pruned_mass += w * prune_factor;
        } else {
          stack.push_back({u, logdf, d});
        }
      }
    }
  }

  res.sum = res.levels.total();
  return res;
}

std::vector<cplx> sample_region_grid(const DomainSystem& ds, const Region& target,
                                     const GridSpec& grid) {
  if (!grid.explicit_terminals.empty()) return grid.explicit_terminals;

  // Radial window from the region's own geometry.  Inner radius rides just
  // above U' (or at a fraction of the disk), outer just inside the disk.
  const std::string& name = target.label();
  std::vector<cplx> out;
  int na = std::max(4, grid.angular);
  int nr = std::max(1, grid.radial);

  auto push_ring = [&](double r_in, double r_out, int rings) {
    for (int a = 0; a < na; ++a) {
      double ang = 2.0 * M_PI * (a + 0.5 * (a % 2)) / na;
      for (int k = 0; k < rings; ++k) {
        double r = r_in * std::pow(r_out / r_in, (k + 0.5) / rings);
        cplx zc = std::polar(r, ang);
        if (target.contains(zc) != membership::outside) out.push_back(zc);
      }
    }
  };

  if (name == "A'") {
    for (int a = 0; a < na; ++a) {
      double ang = 2.0 * M_PI * a / na;
      double r_in = ds.uprime_radius(ang) * 1.08;
      double r_out = ds.rho * 0.985;
      if (!(r_in < r_out)) continue;
      for (int k = 0; k < nr; ++k) {
        double r = r_in * std::pow(r_out / r_in, (k + 0.5) / nr);
        cplx zc = std::polar(r, ang);
        if (target.contains(zc) != membership::outside) out.push_back(zc);
      }
    }
  } else if (name == "A") {
    for (int a = 0; a < na; ++a) {
      double ang = 2.0 * M_PI * a / na;
      double r_in = ds.uprime_radius(ang + M_PI) / std::abs(ds.lambda) * 1.05;
      double r_out = ds.rho / std::abs(ds.lambda) * 0.985;
      if (!(r_in < r_out)) continue;
      for (int k = 0; k < nr; ++k) {
        double r = r_in * std::pow(r_out / r_in, (k + 0.5) / nr);
        cplx zc = std::polar(r, ang);
        if (target.contains(zc) != membership::outside) out.push_back(zc);
      }
    }
  } else if (name == "U'") {
    for (int a = 0; a < na; ++a) {
      double ang = 2.0 * M_PI * a / na;
      double rb = ds.uprime_radius(ang);
      for (int k = 0; k < nr; ++k) {
        double r = rb * (0.30 + 0.60 * (k + 0.5) / nr);
        cplx zc = std::polar(r, ang);
        if (target.contains(zc) != membership::outside) out.push_back(zc);
      }
    }
  } else if (name == "V'") {
    push_ring(ds.rho * 0.25, ds.rho * 0.985, nr);
  } else if (name == "V") {
    push_ring(ds.rho / std::abs(ds.lambda) * 0.25, ds.rho / std::abs(ds.lambda) * 0.985, nr);
  } else {
    // generic: ride the V window
    push_ring(ds.rho * 0.25, ds.rho / std::abs(ds.lambda) * 0.985, nr + 2);
  }
  return out;
}

namespace {

// distance to the postcritical set {f^k(0)} of the proxy (finite cycle)
double postcritical_distance(const UnimodalQuadratic& f, int p, cplx z) {
  double dmin = std::abs(z);  // 0 is postcritical for the superattracting proxy
  cplx o = 0.0;
  int n = std::max(p, 3) * 2;
  for (int k = 1; k <= n; ++k) {
    o = f(o);
    dmin = std::min(dmin, std::abs(z - o));
  }
  return dmin;
}

}  // namespace

SeriesBound family_sup(const UnimodalQuadratic& f, const DomainSystem* ds, const OrbitFamily& fam,
                       double delta, const GridSpec& grid, int j, double prune_threshold,
                       const ExpansionProfile* profile, const EnumerationBudget& budget,
                       int threads) {
  SeriesBound out;
  out.family = fam.descriptor();
  out.delta = delta;
  out.truncation = j;

  if (fam.source.is_empty_region()) return out;  // all-zero bound

  std::vector<cplx> terminals;
  if (!grid.explicit_terminals.empty())
    terminals = grid.explicit_terminals;
  else if (ds != nullptr)
    terminals = sample_region_grid(*ds, fam.target, grid);
  if (terminals.empty()) fail(errc::empty_grid, "family_sup: no admissible grid terminal for " +
                                                    out.family);
  // keep only terminals in the target (uncertain included)
  std::vector<cplx> kept;
  for (cplx z : terminals)
    if (fam.target.contains(z) != membership::outside) kept.push_back(z);
  if (kept.empty()) fail(errc::empty_grid, "family_sup: grid entirely outside target for " +
                                               out.family);

  double tail = 0;
  if (profile != nullptr && profile->K_est > 0) tail = geometric_tail_bound(*profile, delta, j);
  out.tail_bound = tail;

  int p_cycle = ds != nullptr ? ds->p : 3;
  std::vector<EnumerationResult> results(kept.size());
  parallel_for(kept.size(), threads, [&](std::size_t i) {
    results[i] = enumerate_family(f, fam, kept[i], delta, j, prune_threshold, profile, budget);
  });

  out.terminals = static_cast<int>(kept.size());
  double best_upper = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const EnumerationResult& r = results[i];
    out.nodes += r.nodes;
    out.budget_exceeded = out.budget_exceeded || r.budget_exceeded;
    // local spacing of the log-polar grid ~ |z| * (ring ratio - 1); use a
    // conservative per-cell h of 0.5 |z| capped by the absolute spread
    double h = 0.5 * std::abs(kept[i]);
    if (h == 0) h = 1e-12;
    double d = postcritical_distance(f, p_cycle, kept[i]);
    double d_eff = std::max(d - 0.5 * h, 0.1 * h);
    double margin = (1.0 + h / d_eff) * (1.0 + h / d_eff);
    double upper = r.sum * std::pow(margin, delta) + r.pruned_mass + tail;
    if (r.sum > out.point_estimate) {
      out.point_estimate = r.sum;
      out.argmax_levels = r.levels;
      out.argmax_terminal = kept[i];
    }
    if (upper > best_upper) best_upper = upper;
    out.pruned_mass = std::max(out.pruned_mass, r.pruned_mass);
  }
  out.upper_bound = best_upper;
  return out;
}

ExpansionProfile measure_expansion_profile(const UnimodalQuadratic& f, const DomainSystem* ds,
                                           const Region& S, const std::vector<cplx>& terminals,
                                           int depth, const EnumerationBudget& budget) {
  if (depth < 2) fail(errc::range, "measure_expansion_profile: depth must be >= 2");
  if (terminals.empty()) fail(errc::empty_grid, "measure_expansion_profile: no terminals");

  // working precondition: S must avoid a neighborhood of 0
  double guard = ds != nullptr ? ds->rho : 0.05;
  for (int a = 0; a < 32; ++a) {
    cplx z = std::polar(guard * 0.98, 2.0 * M_PI * a / 32.0);
    if (S.contains(z) != membership::outside)
      fail(errc::range, "expansion profile: constraint region reaches into D(0, " +
                            std::to_string(guard) + ")");
  }
  if (S.contains(0.0) != membership::outside)
    fail(errc::range, "expansion profile: constraint region contains 0");

  ExpansionProfile prof;
  prof.constraint_label = S.label();
  prof.sample_count = static_cast<int>(terminals.size());
  prof.depth_floor.assign(static_cast<std::size_t>(depth) + 1, 1e300);
  prof.segment_floor.assign(static_cast<std::size_t>(depth) + 1, 1e300);

  struct Entry {
    cplx z;
    double logdf;
    int depth;
  };
  double worst_logratio = 1e300;
  std::vector<cplx> worst_path;
  int worst_depth = 0;
  std::uint64_t nodes = 0;

  std::vector<Entry> stack;
  std::vector<cplx> path;      // path[d] = node at depth d along the current branch
  std::vector<double> pathdf;  // cumulative log |Df^d| along the branch
  for (cplx z0 : terminals) {
    stack.clear();
    stack.push_back({z0, 0.0, 0});
    path.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    pathdf.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    path[0] = z0;
    while (!stack.empty()) {
      Entry e = stack.back();
      stack.pop_back();
      path[static_cast<std::size_t>(e.depth)] = e.z;
      pathdf[static_cast<std::size_t>(e.depth)] = e.logdf;
      PreimagePair pre = preimages(f, e.z);
      const cplx kids[2] = {pre.principal, pre.mirror};
      for (int t = 0; t < 2; ++t) {
        if (t == 1 && pre.critical) break;
        cplx u = kids[t];
        if (S.contains(u) == membership::outside) continue;
        ++nodes;
        if (nodes > budget.node_cap) fail(errc::budget_exceeded, "expansion profile node cap");
        double logdf = e.logdf + std::log(2.0 * std::abs(u));
        int d = e.depth + 1;
        prof.orbits_seen++;
        double& floor = prof.depth_floor[static_cast<std::size_t>(d)];
        double v = std::exp(logdf);
        if (v < floor) floor = v;
        // segment cocycles from this node to every ancestor
        for (int i = 1; i <= d; ++i) {
          double seg = std::exp(logdf - pathdf[static_cast<std::size_t>(d - i)]);
          double& sf = prof.segment_floor[static_cast<std::size_t>(i)];
          if (seg < sf) sf = seg;
        }
        // track the global worst orbit relative to rate 2 (refined after fit)
        double lr = logdf - d * std::log(2.0);
        if (lr < worst_logratio) {
          worst_logratio = lr;
          worst_depth = d;
          worst_path.assign(path.begin(), path.begin() + d);
          worst_path.push_back(u);
        }
        if (d < depth) stack.push_back({u, logdf, d});
      }
    }
  }

  // fit the asymptotic rate on the deep half, then the envelope constant
  int k_lo = std::max(2, depth / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int npts = 0;
  for (int k = k_lo; k <= depth; ++k) {
    double fl = prof.depth_floor[static_cast<std::size_t>(k)];
    if (fl >= 1e300) continue;
    if (fl <= 0) fail(errc::no_expansion, "zero derivative floor in expansion profile");
    double x = k, y = std::log(fl);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++npts;
  }
  if (npts < 2) fail(errc::no_expansion, "expansion profile: too few populated depths");
  double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  double rate = std::exp(slope);
  rate = std::min(rate, 1.999);
  prof.eps_est = std::max(2.0 - rate, 1e-3);

  double K = 1e300;
  bool contraction = false;
  for (int k = 1; k <= depth; ++k) {
    double fl = prof.depth_floor[static_cast<std::size_t>(k)];
    if (fl >= 1e300) continue;
    if (fl <= 1.0) contraction = true;
    K = std::min(K, fl * std::pow(2.0 - prof.eps_est, -k));
  }
  if (contraction)
    fail(errc::no_expansion,
         "a sampled constrained orbit has |Df^k| <= 1; profile unusable for tail bounds");
  if (K >= 1e300) fail(errc::no_expansion, "expansion profile saw no orbits");
  prof.K_est = 0.95 * K;  // 5% slack
  prof.min_ratio = K > 0 ? 1.0 / 0.95 : 0;

  // segment envelope at the same rate; dips near the critical value keep it
  // below K_est, which the prune charge must respect
  double Kseg = K;
  for (int i = 1; i <= depth; ++i) {
    double sf = prof.segment_floor[static_cast<std::size_t>(i)];
    if (sf < 1e300) Kseg = std::min(Kseg, sf * std::pow(2.0 - prof.eps_est, -i));
  }
  prof.K_segment = 0.95 * Kseg;

  prof.witness_orbit = worst_path;
  prof.witness_depth = worst_depth;
  return prof;
}

double geometric_tail_bound(const ExpansionProfile& profile, double delta, int j) {
  if (!(profile.K_est > 0)) fail(errc::range, "geometric_tail_bound: invalid profile");
  double r = 2.0 * std::pow(2.0 - profile.eps_est, -delta);
  if (r >= 1.0) {
    std::ostringstream os;
    os << "tail ratio r = " << r << " >= 1 at delta = " << delta
       << " (delta too small for this profile)";
    fail(errc::divergent_tail, os.str());
  }
  return std::pow(profile.K_est, -delta) * std::pow(r, j + 1) / (1.0 - r);
}

int minimal_return_time(const DomainSystem& ds, int samples, int budget) {
  if (samples <= 0) fail(errc::range, "minimal_return_time: sample budget must be positive");
  int na = 16;
  int nr = std::max(1, samples / na);
  int m_min = std::numeric_limits<int>::max();
  for (int a = 0; a < na; ++a) {
    double ang = 2.0 * M_PI * a / na;
    double r_in = ds.uprime_radius(ang) * 1.03;
    double r_out = ds.rho * 0.995;
    if (!(r_in < r_out)) continue;
    for (int k = 0; k < nr; ++k) {
      double r = r_in * std::pow(r_out / r_in, (k + 0.5) / nr);
      cplx z = std::polar(r, ang);
      if (ds.Aprime.contains(z) != membership::inside) continue;
      cplx w = z;
      for (int it = 1; it <= budget; ++it) {
        w = ds.f(w);
        if (std::abs(w) < ds.rho) {
          m_min = std::min(m_min, it);
          break;
        }
        if (std::abs(w) > 1e8) break;
      }
    }
  }
  if (m_min == std::numeric_limits<int>::max())
    fail(errc::no_return, "no sampled A' point returned to V' within budget " +
                              std::to_string(budget) + " (lower bound)");
  return m_min;
}

PressureEstimate pressure_critical_exponent(const UnimodalQuadratic& f, cplx z, int depth,
                                            double delta_lo, double delta_hi) {
  if (depth < 6 || depth > 22) fail(errc::range, "pressure estimator: depth must lie in [6, 22]");
  if (!(delta_lo < delta_hi)) fail(errc::range, "pressure estimator: empty bracket");

  OrbitFamily plane{Region::whole_plane(), Region::whole_plane(), Region::whole_plane(), false};

  auto pressure = [&](double delta, double* resid) {
    EnumerationResult r = enumerate_family(f, plane, z, delta, depth);
    int k_lo = std::max(2, depth / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = k_lo; k <= depth; ++k) {
      double s = r.levels.sum[static_cast<std::size_t>(k)];
      if (!(s > 0)) continue;
      double x = k, y = std::log(s);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n < 3) fail(errc::bad_fit, "pressure estimator: too few populated levels");
    double denom = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / denom;
    double icept = (sy - slope * sx) / n;
    double rms = 0;
    for (int k = k_lo; k <= depth; ++k) {
      double s = r.levels.sum[static_cast<std::size_t>(k)];
      if (!(s > 0)) continue;
      double e = std::log(s) - (icept + slope * k);
      rms += e * e;
    }
    rms = std::sqrt(rms / n);
    if (resid) *resid = rms;
    return slope;
  };

  PressureEstimate est;
  est.depth = depth;
  double r_lo = 0, r_hi = 0;
  double p_lo = pressure(delta_lo, &r_lo);
  double p_hi = pressure(delta_hi, &r_hi);
  est.fit_residual = std::max(r_lo, r_hi);
  if (est.fit_residual > 0.25)
    fail(errc::bad_fit, "pressure estimator: growth-rate regression residual " +
                            std::to_string(est.fit_residual));

  double lo = delta_lo, hi = delta_hi;
  if (p_lo <= 0) {
    est.delta_cr = delta_lo;  // root below the bracket
  } else if (p_hi >= 0) {
    est.delta_cr = delta_hi;
  } else {
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (lo + hi);
      double pm = pressure(mid, nullptr);
      if (pm > 0)
        lo = mid;
      else
        hi = mid;
    }
    est.delta_cr = 0.5 * (lo + hi);
  }
  if (est.delta_cr < 1.0) {
    est.clamped = true;
    est.warning = "estimate below the geometric lower barrier 1; clamped";
    est.delta_cr = 1.0;
  } else if (est.delta_cr > 2.0) {
    est.clamped = true;
    est.warning = "estimate above the area upper barrier 2; clamped";
    est.delta_cr = 2.0;
  }
  return est;
}

ExpansionSweepReport expansion_lemma_sweep(int p, double kappa, double epsilon,
                                           const SweepOptions& opt) {
  if (!(kappa > 0 && kappa < 0.5)) fail(errc::range, "sweep: kappa must lie in (0, 1/2)");
  if (p > 14) fail(errc::range, "sweep: p > 14 exceeds the 64-bit feasibility range");
  if (p < 4) fail(errc::range, "sweep: p must be >= 4");

  double c = find_superattracting_parameter(CombinatoricsSpec{p}, 1e-6);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, p, opt.rho);

  ExpansionSweepReport rep;
  rep.p = p;
  rep.kappa = kappa;
  rep.epsilon = epsilon;
  rep.rho = opt.rho;

  // (a) |f(y) - 2| <= |y|^(2-kappa) on circles between diam U' and the outer radius
  double r_lo = ds.diam_uprime * opt.inner_factor;
  double r_hi = std::max(opt.outer_radius, r_lo * 2);
  rep.lemma43_pass = true;
  for (int ci = 0; ci < opt.circle_count; ++ci) {
    double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(ci) / (opt.circle_count - 1));
    Lemma43Circle circ;
    circ.radius = r;
    circ.min_margin = 1e300;
    for (int a = 0; a < opt.circle_samples; ++a) {
      cplx y = std::polar(r, 2.0 * M_PI * a / opt.circle_samples);
      if (ds.Uprime.contains(y) != membership::outside) continue;  // stay off U'
      double lhs = std::abs(f(y) - 2.0);
      double rhs = std::pow(std::abs(y), 2.0 - kappa);
      circ.min_margin = std::min(circ.min_margin, rhs / lhs);
    }
    rep.circles.push_back(circ);
    if (!(circ.min_margin > 1.0)) rep.lemma43_pass = false;
  }

  // (b) escape expansion from A'
  rep.lemma44_min_margin = 1e300;
  int na = 10;
  int nr = std::max(1, opt.annulus_samples / na);
  for (int a = 0; a < na; ++a) {
    double ang = 2.0 * M_PI * a / na;
    double rin = ds.uprime_radius(ang) * 1.05;
    double rout = ds.rho * 0.99;
    if (!(rin < rout)) continue;
    for (int k = 0; k < nr; ++k) {
      double r = rin * std::pow(rout / rin, (k + 0.5) / nr);
      cplx y = std::polar(r, ang);
      if (ds.Aprime.contains(y) != membership::inside) continue;
      Lemma44Sample smp;
      smp.y = y;
      cplx w = y;
      cplx dw = 1.0;
      int m = 0;
      for (int it = 1; it <= 200; ++it) {
        dw *= f.deriv(w);
        w = f(w);
        if (it >= 2 && std::abs(w + 2.0) > 0.1) {
          m = it;
          break;
        }
      }
      if (m == 0) continue;  // never escaped (should not happen)
      smp.m = m;
      smp.dfm = std::abs(dw);
      smp.margin = smp.dfm / std::pow(2.0 - epsilon, m);
      rep.samples.push_back(smp);
      rep.lemma44_min_margin = std::min(rep.lemma44_min_margin, smp.margin);
    }
  }
  rep.lemma44_pass = !rep.samples.empty() && rep.lemma44_min_margin >= 1.0;
  return rep;
}

}  // namespace qdyn
