#include "qdyn/report.hpp"

#include <fstream>
#include <sstream>

namespace qdyn {

const char* kToolVersion = "0.1.0";

json to_json(const RunConfig& cfg) {
  return json{{"period", cfg.period},
              {"rho", cfg.rho},
              {"delta", cfg.delta},
              {"delta_lo", cfg.delta_lo},
              {"delta_hi", cfg.delta_hi},
              {"bisect_tol", cfg.bisect_tol},
              {"truncation", cfg.truncation},
              {"prune_threshold", cfg.prune_threshold},
              {"grid_radial", cfg.grid_radial},
              {"grid_angular", cfg.grid_angular},
              {"node_budget", cfg.node_budget},
              {"profile_depth", cfg.profile_depth},
              {"samples", cfg.samples},
              {"mc_budget", cfg.mc_budget},
              {"seed", cfg.seed},
              {"track_factor", cfg.track_factor},
              {"precision", cfg.precision},
              {"out_dir", cfg.out_dir},
              {"paper_inequality_mode", cfg.paper_inequality_mode},
              {"area_paper_mode", cfg.area_paper_mode},
              {"threads", cfg.threads},
              {"kappa", cfg.kappa},
              {"epsilon", cfg.epsilon},
              {"kmax", cfg.kmax},
              {"degree", cfg.degree}};
}

json to_json(const SeriesBound& sb) {
  return json{{"family", sb.family},
              {"delta", sb.delta},
              {"j", sb.truncation},
              {"point_estimate", sb.point_estimate},
              {"upper_bound", sb.upper_bound},
              {"tail_bound", sb.tail_bound},
              {"pruned_mass", sb.pruned_mass},
              {"terminals", sb.terminals},
              {"nodes", sb.nodes},
              {"budget_exceeded", sb.budget_exceeded},
              {"divergent", sb.divergent}};
}

json to_json(const RenormFixedPointApprox& a) {
  return json{{"period", a.period},
              {"degree", a.degree},
              {"lambda", a.lambda},
              {"coefficients", a.coeffs},
              {"residual", a.residual},
              {"validity_radius", a.validity_radius}};
}

RenormFixedPointApprox renorm_approx_from_json(const json& j) {
  RenormFixedPointApprox a;
  a.period = j.at("period").get<int>();
  a.degree = j.at("degree").get<int>();
  a.lambda = j.at("lambda").get<double>();
  a.coeffs = j.at("coefficients").get<std::vector<double>>();
  a.residual = j.at("residual").get<double>();
  a.validity_radius = j.at("validity_radius").get<double>();
  return a;
}

json to_json(const DeltaCertificate& cert) {
  json inputs = json::array();
  for (const SeriesBound& sb : cert.recursion.inputs) inputs.push_back(to_json(sb));
  json j{{"period", cert.p},
         {"rho", cert.rho},
         {"delta", cert.delta},
         {"c_p", cert.c_p},
         {"lambda", cert.lambda},
         {"alpha", cert.recursion.alpha},
         {"beta", cert.recursion.beta},
         {"gamma", cert.recursion.gamma},
         {"fixed_point", nullptr},
         {"status", cert_status_name(cert.status)},
         {"residual", cert.self_similarity_residual},
         {"theorem_a_shape", cert.theorem_a_shape},
         {"profile_K", cert.profile_K},
         {"profile_eps", cert.profile_eps},
         {"paper_inequality_mode", cert.recursion.paper_inequality_mode},
         {"inputs", inputs},
         {"failure_reason", cert.failure_reason},
         {"tool_version", kToolVersion}};
  if (cert.fixed_point) j["fixed_point"] = *cert.fixed_point;
  json cfg{{"truncation", cert.budgets.truncation},
           {"prune_threshold", cert.budgets.prune_threshold},
           {"grid_radial", cert.budgets.grid.radial},
           {"grid_angular", cert.budgets.grid.angular},
           {"profile_depth", cert.budgets.profile_depth},
           {"node_budget", cert.budgets.enumeration.node_cap}};
  j["config"] = cfg;
  return j;
}

json to_json(const AreaCertificate& cert) {
  json inputs = json::array();
  for (const SeriesBound& sb : cert.inputs) inputs.push_back(to_json(sb));
  return json{{"period", cert.p},
              {"rho", cert.rho},
              {"c_p", cert.c_p},
              {"lambda", cert.lambda},
              {"q1", cert.q1},
              {"q2", cert.q2},
              {"q3", cert.q3},
              {"q4", cert.q4},
              {"K", cert.K},
              {"paper_threshold_mode", cert.paper_threshold_mode},
              {"thresholds_ok", cert.thresholds_ok},
              {"u_trace", cert.u_trace},
              {"v_trace", cert.v_trace},
              {"u_cap", cert.u_cap},
              {"area_ratio_bound", cert.area_ratio_bound},
              {"status", cert_status_name(cert.status)},
              {"failure_reason", cert.failure_reason},
              {"inputs", inputs},
              {"tool_version", kToolVersion}};
}

json to_json(const DimensionEstimate& est) {
  json ladder = json::array();
  for (auto& [size, count] : est.ladder) ladder.push_back(json{{"box_size", size}, {"count", count}});
  return json{{"c", est.c},
              {"value", est.value},
              {"fit_residual", est.fit_residual},
              {"ladder", ladder}};
}

json to_json(const CascadeOracle& o) {
  return json{{"lambda", o.lambda},
              {"error_bar", o.error_bar},
              {"parameters", o.parameters},
              {"closest_returns", o.closest_returns},
              {"ratios", o.ratios}};
}

json to_json(const EscapeFraction& fr) {
  return json{{"fraction", fr.fraction}, {"ci_low", fr.ci_low},   {"ci_high", fr.ci_high},
              {"samples", fr.samples},   {"budget", fr.budget},   {"seed", fr.seed}};
}

json to_json(const ExpansionSweepReport& rep) {
  json circles = json::array();
  for (const auto& c : rep.circles)
    circles.push_back(json{{"radius", c.radius}, {"min_margin", c.min_margin}});
  json samples = json::array();
  for (const auto& s : rep.samples)
    samples.push_back(json{{"re", s.y.real()},
                           {"im", s.y.imag()},
                           {"m", s.m},
                           {"dfm", s.dfm},
                           {"margin", s.margin}});
  return json{{"p", rep.p},
              {"kappa", rep.kappa},
              {"epsilon", rep.epsilon},
              {"rho", rep.rho},
              {"lemma43_circles", circles},
              {"lemma43_pass", rep.lemma43_pass},
              {"lemma44_samples", samples},
              {"lemma44_min_margin", rep.lemma44_min_margin},
              {"lemma44_pass", rep.lemma44_pass}};
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io, "cannot open " + path + " for writing");
  os << body;
  if (!os) fail(errc::io, "short write to " + path);
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(errc::io, "cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    fail(errc::parse, std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

namespace {
std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

std::string lemma_class_csv(const std::vector<LemmaClassRow>& rows) {
  std::ostringstream os;
  os << "p,c_p,f0,alpha_p,eta_p,lambda_abs,diam_uprime,s1_length,modulus_proxy,return_time\n";
  for (const auto& r : rows) {
    os << r.p << ',' << num(r.c_p) << ',' << num(r.f0) << ',' << num(r.alpha) << ','
       << num(r.eta) << ',' << num(r.lambda_abs) << ',' << num(r.diam_uprime) << ','
       << num(r.s1_length) << ',' << num(r.modulus_proxy) << ',' << r.return_time << '\n';
  }
  return os.str();
}

std::string level_sums_csv(const LevelSums& levels) {
  std::ostringstream os;
  os << "depth,count,sum\n";
  for (std::size_t k = 0; k < levels.sum.size(); ++k)
    os << k << ',' << levels.count[k] << ',' << num(levels.sum[k]) << '\n';
  return os.str();
}

std::string summarize(const DeltaCertificate& cert) {
  std::ostringstream os;
  os << "delta certificate  p=" << cert.p << " rho=" << cert.rho << " delta=" << cert.delta
     << "\n  c_p = " << num(cert.c_p) << "  lambda = " << num(cert.lambda)
     << "\n  alpha=" << cert.recursion.alpha << " beta=" << cert.recursion.beta
     << " gamma=" << cert.recursion.gamma << "\n  status: " << cert_status_name(cert.status);
  if (cert.fixed_point) os << "  fixed point s = " << *cert.fixed_point;
  os << "\n  self-similarity residual = " << cert.self_similarity_residual
     << "  theorem-A shape: " << (cert.theorem_a_shape ? "yes" : "no");
  if (!cert.failure_reason.empty()) os << "\n  reason: " << cert.failure_reason;
  os << "\n";
  return os.str();
}

std::string summarize(const AreaCertificate& cert) {
  std::ostringstream os;
  os << "area certificate  p=" << cert.p << " rho=" << cert.rho
     << (cert.paper_threshold_mode ? "  (paper thresholds)" : "  (direct)")
     << "\n  q1=" << cert.q1 << " q2=" << cert.q2 << " q3=" << cert.q3 << " q4=" << cert.q4
     << "  K=" << cert.K << "\n  u_cap=" << cert.u_cap
     << " area_ratio=" << cert.area_ratio_bound << "\n  status: "
     << cert_status_name(cert.status);
  if (!cert.failure_reason.empty()) os << "\n  reason: " << cert.failure_reason;
  os << "\n";
  return os.str();
}

json make_manifest(const std::string& command, const RunConfig& cfg, double wall_seconds) {
  return json{{"command", command},
              {"config", to_json(cfg)},
              {"tool_version", kToolVersion},
              {"wall_time_s", wall_seconds}};
}

}  // namespace qdyn
