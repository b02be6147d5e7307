#include "qdyn/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdyn {

const char* cert_status_name(cert_status s) {
  switch (s) {
    case cert_status::certified: return "CERTIFIED";
    case cert_status::no_fixed_point: return "NO_FIXED_POINT";
    case cert_status::input_divergent: return "INPUT_DIVERGENT";
    case cert_status::failed: return "FAILED";
  }
  return "UNKNOWN";
}

void QuadraticRecursion::recompute_coefficients() {
  alpha = 1.0 + a1 + a2 * (1.0 + a3);
  beta = b1 + b2 * (1.0 + a3) + a2 * b3;
  gamma = b2 * b3;
}

QuadraticFixedPoint solve_quadratic_fixed_point(double alpha, double beta, double gamma) {
  if (alpha < 0 || beta < 0 || gamma < 0)
    fail(errc::range, "solve_quadratic_fixed_point: coefficients must be nonnegative");
  QuadraticFixedPoint out;
  double x = 0;
  for (int i = 0; i < 200; ++i) {
    out.iterate_trace.push_back(x);
    double nx = alpha + beta * x + gamma * x * x;
    if (!std::isfinite(nx) || nx > 1e12) break;
    if (std::abs(nx - x) < 1e-15 * std::max(1.0, std::abs(nx))) {
      x = nx;
      out.iterate_trace.push_back(x);
      break;
    }
    x = nx;
  }
  if (beta < 1.0) {
    double one_m_b = 1.0 - beta;
    double disc = one_m_b * one_m_b - 4.0 * alpha * gamma;
    if (disc >= 0) {
      double denom = one_m_b + std::sqrt(disc);
      if (denom > 0) out.s = 2.0 * alpha / denom;
      if (alpha == 0) out.s = 0.0;
    }
  }
  return out;
}

namespace {

OrbitFamily make_family(Region target, Region via, Region source, bool nontrivial) {
  return OrbitFamily{std::move(target), std::move(via), std::move(source), nontrivial};
}

GridSpec union_grid(const DomainSystem& ds, const GridSpec& base,
                    std::initializer_list<Region> targets) {
  GridSpec g;
  for (const Region& r : targets) {
    auto pts = sample_region_grid(ds, r, base);
    g.explicit_terminals.insert(g.explicit_terminals.end(), pts.begin(), pts.end());
  }
  return g;
}

}  // namespace

QuadraticRecursion assemble_recursion(const UnimodalQuadratic& f, const DomainSystem& ds,
                                      double delta, const ExpansionProfile& profile,
                                      const CertBudgets& bud) {
  QuadraticRecursion rec;
  rec.delta = delta;
  rec.paper_inequality_mode = bud.paper_inequality_mode;

  Region UmV = ds.U_minus_Vprime();
  auto sup = [&](const OrbitFamily& fam, const GridSpec& grid) {
    return family_sup(f, &ds, fam, delta, grid, bud.truncation, bud.prune_threshold, &profile,
                      bud.enumeration, bud.threads);
  };

  if (!bud.paper_inequality_mode) {
    SeriesBound sa1 = sup(make_family(ds.Aprime, UmV, UmV, false), bud.grid);
    SeriesBound sa2 = sup(make_family(ds.A, UmV, UmV, false), bud.grid);
    SeriesBound sa3 = sup(make_family(ds.Uprime, UmV, UmV, false), bud.grid);
    SeriesBound sb1 = sup(make_family(ds.Aprime, UmV, ds.Aprime, true), bud.grid);
    SeriesBound sb2 = sup(make_family(ds.A, UmV, ds.Aprime, false), bud.grid);
    SeriesBound sb3 = sup(make_family(ds.Uprime, UmV, ds.Aprime, false), bud.grid);
    rec.a1 = sa1.upper_bound;
    rec.a2 = sa2.upper_bound;
    rec.a3 = sa3.upper_bound;
    rec.b1 = sb1.upper_bound;
    rec.b2 = sb2.upper_bound;
    rec.b3 = sb3.upper_bound;
    rec.inputs = {sa1, sa2, sa3, sb1, sb2, sb3};
  } else {
    // Dominating families evaluated on union grids:
    //   a1, a3 <= X(V' <- U\V');  a2, b2 <= X(A <- U\U');  b1, b3 <= X(V' <-+ A')
    Region UmU = Region::difference(ds.U, ds.Uprime).labeled("U\\U'");
    SeriesBound dom_a =
        sup(make_family(ds.Vprime, UmV, UmV, false),
            union_grid(ds, bud.grid, {ds.Vprime, ds.Aprime, ds.Uprime}));
    SeriesBound dom_b = sup(make_family(ds.A, UmV, UmU, false), bud.grid);
    SeriesBound dom_c = sup(make_family(ds.Vprime, UmV, ds.Aprime, true),
                            union_grid(ds, bud.grid, {ds.Vprime, ds.Aprime, ds.Uprime}));
    rec.a1 = rec.a3 = dom_a.upper_bound;
    rec.a2 = rec.b2 = dom_b.upper_bound;
    rec.b1 = rec.b3 = dom_c.upper_bound;
    rec.inputs = {dom_a, dom_b, dom_a, dom_c, dom_b, dom_c};
  }
  rec.recompute_coefficients();
  return rec;
}

namespace {

// Rescaling-bijection defect: truncated sums of (A <- U) at x vs
// (A' <-[U\A'] U') at lambda x counted in f-steps = p * g-steps.
double bijection_residual(const UnimodalQuadratic& f, const DomainSystem& ds, double delta,
                          int g_steps, const EnumerationBudget& budget) {
  OrbitFamily big{ds.A, ds.U, ds.U, false};
  Region UmA = Region::difference(ds.U, ds.Aprime).labeled("U\\A'");
  OrbitFamily little{ds.Aprime, UmA, ds.Uprime, false};

  GridSpec grid{2, 5};
  std::vector<cplx> terms = sample_region_grid(ds, ds.A, grid);
  if (terms.size() > 5) terms.resize(5);
  double worst = 0;
  for (cplx x : terms) {
    EnumerationResult rb = enumerate_family(f, big, x, delta, g_steps, 0, nullptr, budget);
    EnumerationResult rl = enumerate_family(f, little, ds.lambda * x, delta, g_steps * ds.p, 0,
                                            nullptr, budget);
    double denom = std::max(rb.sum, 1e-12);
    worst = std::max(worst, std::abs(rb.sum - rl.sum) / denom);
  }
  return worst;
}

}  // namespace

DeltaCertificate certify_delta(const UnimodalQuadratic& f, int p, double rho, double delta,
                               const CertBudgets& budgets) {
  if (!(delta >= 1.0 && delta <= 2.0))
    fail(errc::range, "certify_delta: delta must lie in [1, 2]");
  DeltaCertificate cert;
  cert.p = p;
  cert.rho = rho;
  cert.delta = delta;
  cert.c_p = f.c();
  cert.budgets = budgets;

  try {
    DomainSystem ds = build_domain_system(f, p, rho);
    cert.lambda = ds.lambda;

    Region UmV = ds.U_minus_Vprime();
    std::vector<cplx> terminals;
    for (const Region& reg : {ds.Aprime, ds.Uprime, ds.Vprime}) {
      auto pts = sample_region_grid(ds, reg, budgets.grid);
      terminals.insert(terminals.end(), pts.begin(), pts.end());
    }
    {
      GridSpec small{2, 8};
      auto pts = sample_region_grid(ds, ds.A, small);
      terminals.insert(terminals.end(), pts.begin(), pts.end());
    }
    ExpansionProfile profile = measure_expansion_profile(f, &ds, UmV, terminals,
                                                         budgets.profile_depth, budgets.enumeration);
    cert.profile_K = profile.K_est;
    cert.profile_eps = profile.eps_est;

    cert.recursion = assemble_recursion(f, ds, delta, profile, budgets);

    bool flagged = false;
    for (const SeriesBound& sb : cert.recursion.inputs) flagged = flagged || sb.budget_exceeded;
    if (flagged) {
      cert.status = cert_status::failed;
      cert.failure_reason = "enumeration budget exceeded; sums are partial";
      return cert;
    }

    QuadraticFixedPoint fp =
        solve_quadratic_fixed_point(cert.recursion.alpha, cert.recursion.beta,
                                    cert.recursion.gamma);
    cert.fixed_point = fp.s;
    cert.status = fp.s ? cert_status::certified : cert_status::no_fixed_point;

    // Theorem-A sufficient shape: beta < 1/3 and P takes [0, 2 P(0)] into itself.
    double twoP0 = 2.0 * cert.recursion.eval(0.0);
    cert.theorem_a_shape =
        cert.recursion.beta < 1.0 / 3.0 && cert.recursion.eval(twoP0) <= twoP0;

    cert.self_similarity_residual = bijection_residual(
        f, ds, delta, static_cast<int>(budgets.bijection_truncation), budgets.enumeration);
  } catch (const error& e) {
    if (e.code() == errc::divergent_tail) {
      cert.status = cert_status::input_divergent;
      cert.failure_reason = e.what();
    } else {
      cert.status = cert_status::failed;
      cert.failure_reason = e.what();
    }
  }
  return cert;
}

BisectDeltaResult bisect_delta(const UnimodalQuadratic& f, int p, double rho, double delta_lo,
                               double delta_hi, double tol, const CertBudgets& budgets) {
  if (!(delta_lo < delta_hi) || !(tol > 0))
    fail(errc::range, "bisect_delta: need delta_lo < delta_hi and tol > 0");
  BisectDeltaResult out;
  DeltaCertificate top = certify_delta(f, p, rho, delta_hi, budgets);
  out.tested.push_back(delta_hi);
  out.certified.push_back(top.status == cert_status::certified);
  if (top.status != cert_status::certified)
    fail(errc::uncertifiable_range,
         "certify_delta failed at the upper endpoint delta = " + std::to_string(delta_hi));
  double lo = delta_lo, hi = delta_hi;
  out.certificate = top;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    DeltaCertificate c = certify_delta(f, p, rho, mid, budgets);
    out.tested.push_back(mid);
    bool ok = c.status == cert_status::certified;
    out.certified.push_back(ok);
    if (ok) {
      hi = mid;
      out.certificate = c;
    } else {
      lo = mid;
    }
  }
  out.delta_star = hi;
  return out;
}

UvStep uv_recursion_step(double u_k, const UvSups& s) {
  if (u_k < 0 || s.sV < 0 || s.sA < 0 || s.sQ < 0 || s.sN < 0)
    fail(errc::range, "uv_recursion_step: inputs must be nonnegative");
  double phi = u_k * (1.0 + s.sN);
  if (phi >= 1.0)
    fail(errc::noncontractive,
         "u_k (1 + sN) = " + std::to_string(phi) + " >= 1; v-recursion does not contract");
  UvStep step;
  step.v_limit = phi / (1.0 - phi);
  step.u_next = s.sV + u_k * (1.0 + step.v_limit) * s.sA * (1.0 + s.sQ);
  return step;
}

std::vector<double> uv_v_trace(double u_k, const UvSups& s, int j_max) {
  std::vector<double> trace;
  double v = 0;  // v_{-1} = 0
  for (int j = 0; j <= j_max; ++j) {
    v = (1.0 + v) * u_k * (1.0 + s.sN);
    trace.push_back(v);
  }
  return trace;
}

std::vector<double> paper_threshold_induction(double K, int k_max) {
  if (!(K > 0)) fail(errc::range, "paper_threshold_induction: K must be positive");
  UvSups s;
  s.sV = 1.0 / 100.0;
  s.sA = 1.0 / (5.0 * K + 5.0);
  s.sQ = 2.0 * K;
  s.sN = 1.0 / 100.0;
  std::vector<double> u_trace{0.0};
  double u = 0;
  for (int k = 0; k < k_max; ++k) {
    u = uv_recursion_step(u, s).u_next;
    u_trace.push_back(u);
  }
  return u_trace;
}

AreaCertificate certify_area(const UnimodalQuadratic& f, int p, double rho, int k_max,
                             bool paper_threshold_mode, const CertBudgets& budgets) {
  AreaCertificate cert;
  cert.p = p;
  cert.rho = rho;
  cert.c_p = f.c();
  cert.paper_threshold_mode = paper_threshold_mode;
  const double delta = 2.0;

  try {
    DomainSystem ds = build_domain_system(f, p, rho);
    cert.lambda = ds.lambda;
    Region UmV = ds.U_minus_Vprime();

    std::vector<cplx> terminals;
    for (const Region& reg : {ds.Aprime, ds.Vprime}) {
      auto pts = sample_region_grid(ds, reg, budgets.grid);
      terminals.insert(terminals.end(), pts.begin(), pts.end());
    }
    ExpansionProfile profile = measure_expansion_profile(f, &ds, UmV, terminals,
                                                         budgets.profile_depth, budgets.enumeration);

    auto sup = [&](const OrbitFamily& fam) {
      return family_sup(f, &ds, fam, delta, budgets.grid, budgets.truncation,
                        budgets.prune_threshold, &profile, budgets.enumeration, budgets.threads);
    };
    SeriesBound s1 = sup(OrbitFamily{ds.Vprime, UmV, ds.Aprime, true});
    SeriesBound s2 = sup(OrbitFamily{ds.A, UmV, ds.Aprime, false});
    SeriesBound s3 = sup(OrbitFamily{ds.Vprime, UmV, UmV, false});
    SeriesBound s4 = sup(OrbitFamily{ds.A, UmV, UmV, false});
    cert.inputs = {s1, s2, s3, s4};
    cert.q1 = s1.upper_bound;
    cert.q2 = s2.upper_bound;
    cert.q3 = s3.upper_bound;
    cert.q4 = s4.upper_bound;
    cert.K = cert.q3;  // measured; q3 < 2K holds by construction and is recorded as such

    cert.thresholds_ok = cert.q1 < 0.01 && cert.q2 < 1.0 / (5.0 * cert.K + 5.0) &&
                         cert.q4 < 0.01;

    UvSups sups{cert.q1, cert.q2, cert.q3, cert.q4};
    double u = 0;
    cert.u_trace.push_back(u);
    for (int k = 0; k < k_max; ++k) {
      UvStep st = uv_recursion_step(u, sups);
      cert.v_trace.push_back(st.v_limit);
      u = st.u_next;
      cert.u_trace.push_back(u);
    }

    double sup_first5 = 0;
    for (std::size_t i = 1; i < cert.u_trace.size() && i <= 5; ++i)
      sup_first5 = std::max(sup_first5, cert.u_trace[i]);
    cert.u_cap = 2.0 * sup_first5;
    cert.area_ratio_bound = std::pow(ds.diam_uprime / (2.0 * rho), 2.0);

    bool u_bounded = true;
    for (double uk : cert.u_trace) u_bounded = u_bounded && uk <= cert.u_cap + 1e-15;

    if (paper_threshold_mode) {
      cert.status = cert.thresholds_ok ? cert_status::certified : cert_status::failed;
      if (!cert.thresholds_ok)
        cert.failure_reason = "measured sups exceed the proof thresholds (1/100, 1/(5K+5), 1/100)";
    } else {
      bool area_ok = cert.u_cap + cert.area_ratio_bound < 1.0;
      cert.status = (u_bounded && area_ok) ? cert_status::certified : cert_status::failed;
      if (!u_bounded)
        cert.failure_reason = "u-trace escaped its empirical cap";
      else if (!area_ok)
        cert.failure_reason = "u_cap + area(U^k)/area(V^k) bound reaches 1";
    }
  } catch (const error& e) {
    cert.status = cert_status::failed;
    cert.failure_reason = e.what();
  }
  return cert;
}

}  // namespace qdyn
