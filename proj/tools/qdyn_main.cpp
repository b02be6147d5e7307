// qdyn: Poincare-series certificates for the quadratic family c - x^2.
//
// Exit codes: 0 success, 1 internal error, 2 certificate not certified,
// 64 usage / validation errors.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qdyn/certificates.hpp"
#include "qdyn/config.hpp"
#include "qdyn/cvitanovic.hpp"
#include "qdyn/oracles.hpp"
#include "qdyn/parallel.hpp"
#include "qdyn/report.hpp"

namespace fs = std::filesystem;
using namespace qdyn;

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int effective_threads(const RunConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : default_thread_count();
}

fs::path prepare_outdir(const RunConfig& cfg) {
  fs::path dir = cfg.out_dir;
  if (const char* env = std::getenv("QDYN_OUTPUT_DIR")) dir = env;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(errc::io, "cannot create output directory " + dir.string());
  return dir;
}

void emit_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                   const Clock& clock) {
  write_json_file((dir / "manifest.json").string(),
                  make_manifest(command, cfg, clock.seconds()));
}

CertBudgets budgets_from(const RunConfig& cfg) {
  CertBudgets b;
  b.truncation = cfg.truncation;
  b.prune_threshold = cfg.prune_threshold;
  b.grid = GridSpec{cfg.grid_radial, cfg.grid_angular};
  b.profile_depth = cfg.profile_depth;
  b.enumeration.node_cap = cfg.node_budget;
  b.threads = effective_threads(cfg);
  b.paper_inequality_mode = cfg.paper_inequality_mode;
  return b;
}

struct FamilySpec {
  std::string target, via, source;
  bool nontrivial = false;
};

// "D<-[S]-E" with an optional '+' before E
FamilySpec parse_family_string(const std::string& s) {
  auto arrow = s.find("<-[");
  if (arrow == std::string::npos) fail(errc::parse, "family string: missing '<-['");
  auto close = s.find("]-", arrow + 3);
  if (close == std::string::npos) fail(errc::parse, "family string: missing ']-'");
  FamilySpec spec;
  spec.target = s.substr(0, arrow);
  spec.via = s.substr(arrow + 3, close - arrow - 3);
  std::string src = s.substr(close + 2);
  if (!src.empty() && src[0] == '+') {
    spec.nontrivial = true;
    src = src.substr(1);
  }
  spec.source = src;
  if (spec.target.empty() || spec.via.empty() || spec.source.empty())
    fail(errc::parse, "family string: empty region token");
  return spec;
}

int cmd_find_param(const RunConfig& cfg) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  double tol = std::max(1e-12, 2e-15 * std::pow(4.0, cfg.period));
  double c = find_superattracting_parameter(CombinatoricsSpec{cfg.period}, tol);
  double resid = std::abs(iterate_with_derivative(UnimodalQuadratic(c), 0.0, cfg.period).value);
  json j{{"period", cfg.period}, {"c", c}, {"critical_value_residual", resid}, {"tol", tol}};
  write_json_file((dir / "parameter.json").string(), j);
  std::cout << j.dump(2) << "\n";
  emit_manifest(dir, "find-param", cfg, clock);
  return 0;
}

int cmd_fixed_point(const RunConfig& cfg) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  double tol = std::max(1e-12, 2e-15 * std::pow(4.0, cfg.period));
  double c = find_superattracting_parameter(CombinatoricsSpec{cfg.period}, tol);
  CvitanovicOptions opt;
  opt.extended_precision = cfg.precision == "extended";
  CvitanovicReport rep = cvitanovic_solve_auto(cfg.period, cfg.degree, c, opt);
  json j = to_json(rep.approx);
  j["status"] = rep.status == solve_status::converged ? "CONVERGED" : "NONCONVERGED";
  j["iterations"] = rep.iterations;
  j["residual_history"] = rep.residual_history;
  j["combinatorics_ok"] = rep.combinatorics_ok;
  write_json_file((dir / "fixed_point.json").string(), j);
  std::cout << j.dump(2) << "\n";
  emit_manifest(dir, "fixed-point", cfg, clock);
  return rep.status == solve_status::converged ? 0 : 2;
}

int cmd_domains(const RunConfig& cfg) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  double tol = std::max(1e-12, 2e-15 * std::pow(4.0, cfg.period));
  double c = find_superattracting_parameter(CombinatoricsSpec{cfg.period}, tol);
  DomainOptions dopt;
  dopt.track_factor = cfg.track_factor;
  DomainSystem ds = build_domain_system(UnimodalQuadratic(c), cfg.period, cfg.rho, dopt);
  json j{{"period", ds.p},
         {"rho", ds.rho},
         {"c_p", c},
         {"lambda", ds.lambda},
         {"diam_uprime", ds.diam_uprime},
         {"nesting_margin", ds.nesting_margin},
         {"min_return_time", ds.min_return_time},
         {"return_time_capped", ds.return_time_capped},
         {"first_return_ok", ds.first_return_ok},
         {"postcritical_clear", ds.postcritical_clear},
         {"postcritical_margin", ds.postcritical_margin}};
  write_json_file((dir / "domains.json").string(), j);
  std::cout << j.dump(2) << "\n";
  emit_manifest(dir, "domains", cfg, clock);
  return 0;
}

int cmd_series(const RunConfig& cfg, const std::string& family) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  double tol = std::max(1e-12, 2e-15 * std::pow(4.0, cfg.period));
  double c = find_superattracting_parameter(CombinatoricsSpec{cfg.period}, tol);
  UnimodalQuadratic f(c);
  DomainSystem ds = build_domain_system(f, cfg.period, cfg.rho);
  FamilySpec spec = parse_family_string(family);
  OrbitFamily fam{ds.region_by_name(spec.target), ds.region_by_name(spec.via),
                  ds.region_by_name(spec.source), spec.nontrivial};

  Region UmV = ds.U_minus_Vprime();
  std::vector<cplx> terms;
  for (const Region& reg : {ds.Aprime, ds.Vprime}) {
    auto pts = sample_region_grid(ds, reg, GridSpec{cfg.grid_radial, cfg.grid_angular});
    terms.insert(terms.end(), pts.begin(), pts.end());
  }
  ExpansionProfile prof = measure_expansion_profile(f, &ds, UmV, terms, cfg.profile_depth,
                                                    EnumerationBudget{cfg.node_budget});
  SeriesBound sb = family_sup(f, &ds, fam, cfg.delta, GridSpec{cfg.grid_radial, cfg.grid_angular},
                              cfg.truncation, cfg.prune_threshold, &prof,
                              EnumerationBudget{cfg.node_budget}, effective_threads(cfg));
  write_json_file((dir / "series.json").string(), to_json(sb));
  write_text_file((dir / "levels.csv").string(), level_sums_csv(sb.argmax_levels));
  std::cout << to_json(sb).dump(2) << "\n";
  emit_manifest(dir, "series", cfg, clock);
  return 0;
}

int cmd_certify_delta(const RunConfig& cfg) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  double tol = std::max(1e-12, 2e-15 * std::pow(4.0, cfg.period));
  double c = find_superattracting_parameter(CombinatoricsSpec{cfg.period}, tol);
  DeltaCertificate cert = certify_delta(UnimodalQuadratic(c), cfg.period, cfg.rho, cfg.delta,
                                        budgets_from(cfg));
  write_json_file((dir / "delta_certificate.json").string(), to_json(cert));
  write_text_file((dir / "delta_certificate.txt").string(), summarize(cert));
  std::cout << summarize(cert);
  emit_manifest(dir, "certify-delta", cfg, clock);
  return cert.status == cert_status::certified ? 0 : 2;
}

int cmd_certify_area(const RunConfig& cfg) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  double tol = std::max(1e-12, 2e-15 * std::pow(4.0, cfg.period));
  double c = find_superattracting_parameter(CombinatoricsSpec{cfg.period}, tol);
  AreaCertificate cert = certify_area(UnimodalQuadratic(c), cfg.period, cfg.rho, cfg.kmax,
                                      cfg.area_paper_mode, budgets_from(cfg));
  write_json_file((dir / "area_certificate.json").string(), to_json(cert));
  write_text_file((dir / "area_certificate.txt").string(), summarize(cert));
  std::cout << summarize(cert);
  emit_manifest(dir, "certify-area", cfg, clock);
  return cert.status == cert_status::certified ? 0 : 2;
}

int cmd_dimension(const RunConfig& cfg, double c_value, std::vector<int> resolutions,
                  int max_iter) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  if (resolutions.empty()) resolutions = {256, 512, 1024, 2048, 4096};
  DimensionEstimate est = box_counting_dimension(c_value, resolutions, max_iter);
  write_json_file((dir / "dimension.json").string(), to_json(est));
  std::ostringstream csv;
  csv << "box_size,count\n";
  for (auto& [size, count] : est.ladder) csv << size << ',' << count << '\n';
  write_text_file((dir / "dimension_ladder.csv").string(), csv.str());
  std::cout << to_json(est).dump(2) << "\n";
  emit_manifest(dir, "dimension", cfg, clock);
  return 0;
}

int cmd_cascade(const RunConfig& cfg, int n_max) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  CascadeOracle o = cascade_lambda_oracle(n_max);
  write_json_file((dir / "cascade.json").string(), to_json(o));
  std::cout << to_json(o).dump(2) << "\n";
  emit_manifest(dir, "cascade", cfg, clock);
  return 0;
}

int cmd_lemma_checks(const RunConfig& cfg, int p_lo, int p_hi, bool sweep) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  auto rows = lemma_class_report(p_lo, p_hi, cfg.rho);
  write_text_file((dir / "lemma_class.csv").string(), lemma_class_csv(rows));
  std::cout << lemma_class_csv(rows);
  if (sweep) {
    SweepOptions opt;
    opt.rho = cfg.rho;
    ExpansionSweepReport rep = expansion_lemma_sweep(cfg.period, cfg.kappa, cfg.epsilon, opt);
    write_json_file((dir / "expansion_sweep.json").string(), to_json(rep));
    std::cout << "sweep p=" << rep.p << " lemma43_pass=" << rep.lemma43_pass
              << " lemma44_min_margin=" << rep.lemma44_min_margin << "\n";
  }
  emit_manifest(dir, "lemma-checks", cfg, clock);
  return 0;
}

int cmd_render(const RunConfig& cfg, double c_value, const std::string& out, int width, int height,
               int max_iter) {
  Clock clock;
  fs::path dir = prepare_outdir(cfg);
  fs::path target = out.empty() ? dir / "render.ppm" : fs::path(out);
  render_escape_ppm(c_value, target.string(), width, height, max_iter);
  std::cout << "wrote " << target.string() << "\n";
  emit_manifest(dir, "render", cfg, clock);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poincare-series certificates for quadratic dynamics near the Chebyshev map"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  RunConfig cfg;
  bool cfg_loaded = false;

  // flags shared by subcommands override file values later
  struct Overrides {
    std::map<std::string, std::string> kv;
  } ov;
  auto add_common = [&](CLI::App* sub) {
    auto opt = [&, sub](const char* name, const char* key, const char* help) {
      sub->add_option_function<std::string>(
          name, [&ov, key](const std::string& v) { ov.kv[key] = v; }, help);
    };
    opt("--period", "period", "renormalization period p");
    opt("--rho", "rho", "radius of V'");
    opt("--delta", "delta", "series exponent");
    opt("--depth", "truncation", "truncation level j");
    opt("--prune", "prune_threshold", "prune threshold");
    opt("--grid-radial", "grid_radial", "radial grid density");
    opt("--grid-angular", "grid_angular", "angular grid density");
    opt("--node-budget", "node_budget", "per-terminal node cap");
    opt("--profile-depth", "profile_depth", "expansion profile depth");
    opt("--samples", "samples", "Monte Carlo samples");
    opt("--mc-budget", "mc_budget", "Monte Carlo iteration budget");
    opt("--seed", "seed", "counter RNG seed");
    opt("--track-factor", "track_factor", "pullback branch-tracking constant");
    opt("--precision", "precision", "'double' or 'extended'");
    opt("--out", "out_dir", "output directory");
    opt("--threads", "threads", "thread cap (0 = auto)");
    opt("--kappa", "kappa", "sweep kappa");
    opt("--epsilon", "epsilon", "sweep epsilon");
    opt("--kmax", "kmax", "area induction steps");
    opt("--degree", "degree", "collocation degree N");
    opt("--mode", "paper_inequality_mode", "true: paper-inequality coefficient mode");
    opt("--area-mode-paper", "area_paper_mode", "true: paper-threshold area mode");
  };

  CLI::App* find_param = app.add_subcommand("find-param", "superattracting parameter search");
  CLI::App* fixed_point = app.add_subcommand("fixed-point", "collocation fixed-point solve");
  CLI::App* domains = app.add_subcommand("domains", "build and verify the domain system");
  CLI::App* series = app.add_subcommand("series", "truncated family sup");
  std::string family_string;
  series->add_option("--family", family_string, "arrow family, e.g. \"A'<-[U\\V']-+A'\"")
      ->required();
  CLI::App* certify_delta_cmd = app.add_subcommand("certify-delta", "quadratic-recursion certificate");
  CLI::App* certify_area_cmd = app.add_subcommand("certify-area", "area-zero induction certificate");
  CLI::App* dimension = app.add_subcommand("dimension", "box-counting dimension oracle");
  double dim_c = 2.0;
  std::vector<int> dim_res;
  int dim_iter = 300;
  dimension->add_option("--c", dim_c, "map parameter (f = c - x^2)");
  dimension->add_option("--resolutions", dim_res, "ascending dyadic ladder");
  dimension->add_option("--max-iter", dim_iter, "escape iteration cap");
  CLI::App* cascade = app.add_subcommand("cascade", "period-doubling lambda oracle");
  int n_max = 8;
  cascade->add_option("--nmax", n_max, "cascade depth (periods 2^n)");
  CLI::App* lemma_checks = app.add_subcommand("lemma-checks", "geometry table and expansion sweeps");
  int p_lo = 5, p_hi = 11;
  bool do_sweep = false;
  lemma_checks->add_option("--p-lo", p_lo, "first period");
  lemma_checks->add_option("--p-hi", p_hi, "last period");
  lemma_checks->add_flag("--sweep", do_sweep, "also run the expansion lemma sweep at --period");
  CLI::App* render = app.add_subcommand("render", "escape-time PPM image");
  std::string render_out;
  double render_c = 2.0;
  int render_w = 800, render_h = 800, render_iter = 200;
  render->add_option("--c", render_c, "map parameter");
  render->add_option("--image", render_out, "output path (.ppm)");
  render->add_option("--width", render_w, "pixels");
  render->add_option("--height", render_h, "pixels");
  render->add_option("--max-iter", render_iter, "escape iteration cap");

  for (CLI::App* sub : {find_param, fixed_point, domains, series, certify_delta_cmd,
                        certify_area_cmd, dimension, cascade, lemma_checks, render})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    if (!config_path.empty()) {
      cfg = load_config(config_path);
      cfg_loaded = true;
    }
    (void)cfg_loaded;
    for (const auto& [key, value] : ov.kv) apply_config_entry(cfg, key, value);
    cfg.validate();

    if (find_param->parsed()) return cmd_find_param(cfg);
    if (fixed_point->parsed()) return cmd_fixed_point(cfg);
    if (domains->parsed()) return cmd_domains(cfg);
    if (series->parsed()) return cmd_series(cfg, family_string);
    if (certify_delta_cmd->parsed()) return cmd_certify_delta(cfg);
    if (certify_area_cmd->parsed()) return cmd_certify_area(cfg);
    if (dimension->parsed()) return cmd_dimension(cfg, dim_c, dim_res, dim_iter);
    if (cascade->parsed()) return cmd_cascade(cfg, n_max);
    if (lemma_checks->parsed()) return cmd_lemma_checks(cfg, p_lo, p_hi, do_sweep);
    if (render->parsed()) return cmd_render(cfg, render_c, render_out, render_w, render_h,
                                            render_iter);
    std::cerr << "no subcommand\n";
    return 64;
  } catch (const error& e) {
    if (e.code() == errc::range || e.code() == errc::parse) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 64;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
