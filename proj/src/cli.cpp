#include "henon/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/experiments.hpp"
#include "henon/io.hpp"
#include "henon/selfcheck.hpp"
#include "henon/solver.hpp"
#include "henon/symmetry.hpp"

namespace henon {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// json numbers cannot hold NaN or inf
json num(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

json num_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

class Session {
 public:
  Session(const std::string& command, const RunConfig& cfg)
      : command_(command), cfg_(cfg), hash_(spec_hash(cfg.spec)), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir)) throw IoError("cannot create output directory " + cfg.out_dir);
  }

  // output file path; the name embeds the spec hash
  std::string path(const std::string& what, const std::string& ext) {
    const std::string name = command_ + "_" + hash_ + "_" + what + "." + ext;
    files_.push_back(name);
    return (fs::path(cfg_.out_dir) / name).string();
  }

  void write_json(const std::string& what, const json& j) { write_text(path(what, "json"), j.dump(2) + "\n"); }

  void finish(int status) {
    json m;
    m["command"] = command_;
    m["status"] = status;
    m["spec_hash"] = hash_;
    json c = json::object();
    for (const auto& [k, v] : cfg_.echo()) c[k] = v;
    m["config"] = c;
    m["versions"] = {{"henon", HENON_VERSION},
                     {"boost", BOOST_LIB_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
    m["threads"] = omp_get_max_threads();
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json files = json::array();
    for (const auto& f : files_) {
      const std::string p = (fs::path(cfg_.out_dir) / f).string();
      files.push_back({{"name", f}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    }
    m["files"] = files;
    write_text((fs::path(cfg_.out_dir) / (command_ + "_" + hash_ + "_manifest.json")).string(), m.dump(2) + "\n");
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::string hash_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> files_;
};

json to_json(const RegimeReport& r) {
  return {{"p_star_beta", num(r.p_star_beta)},
          {"p_star_beta_alpha", num(r.p_star_beta_alpha)},
          {"regime", to_string(r.regime)},
          {"alpha_boundedness_threshold", num(r.alpha_boundedness_threshold)},
          {"s_boundedness_bound", num(r.s_boundedness_bound)},
          {"embedding_r_bound", num(r.embedding_r_bound)}};
}

json to_json(const GroundState& g) {
  return {{"R", num(g.R)},
          {"Z", num(g.Z)},
          {"N", num(g.N)},
          {"residual", num(g.residual)},
          {"residual_scale", num(g.residual_scale)},
          {"rayleigh_residual", num(g.rayleigh_residual)},
          {"rayleigh_residual_lumped", num(g.rayleigh_residual_lumped)},
          {"iterations", g.iterations},
          {"converged", g.converged},
          {"t_scale", num(g.t_scale)}};
}

json to_json(const SymmetryReport& r) {
  return {{"alpha", num(r.alpha)},         {"R", num(r.R)},
          {"Z_additive", num(r.Z_additive)}, {"hardy", num(r.hardy)},
          {"lhs", num(r.lhs)},             {"rhs", num(r.rhs)},
          {"gap", num(r.gap)},             {"radial_stable", r.radial_stable},
          {"S_n_infimum", r.S_n_infimum},  {"hardy_ratio", num(r.hardy_ratio)},
          {"inner_fraction", num(r.inner_fraction)}};
}

void print_kv(std::ostream& out, const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; }

KernelPtr kernel_for(const ProblemSpec& spec, const MeshPtr& mesh) {
  if (spec.nonlocal_weight() == 0.0) return nullptr;
  return KernelTable::build_cached(spec, mesh);
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o = cfg.solver;
  o.override_critical = cfg.override_critical;
  o.record_trace = cfg.write_trace;
  return o;
}

// solve + rescale, writing the partial state before reporting non-convergence
GroundState solve_or_dump(Session& ses, const RunConfig& cfg, const ProblemSpec& spec, const KernelTable* kt,
                          const MeshPtr& mesh) {
  const SolverOptions o = solver_options(cfg);
  GroundState partial;
  try {
    GroundState gs = minimize_rayleigh(spec, kt, random_init(mesh, o.seed, o.noise), o, &partial);
    rescale_to_solution(gs, spec, kt);
    if (cfg.write_trace) write_trace_csv(ses.path("trace", "csv"), gs.trace);
    return gs;
  } catch (const NotConverged&) {
    if (partial.field.mesh) write_field_text(ses.path("partial_field", "csv"), partial.field);
    if (cfg.write_trace) write_trace_csv(ses.path("trace", "csv"), partial.trace);
    throw;
  }
}

int cmd_classify(Session& ses, const RunConfig& cfg, std::ostream& out) {
  const RegimeReport r = classify_regime(cfg.spec);
  const json j = to_json(r);
  for (auto it = j.begin(); it != j.end(); ++it)
    print_kv(out, it.key(), it->is_string() ? it->get<std::string>() : fmt(it->get<double>()));
  ses.write_json("report", j);
  return kExitOk;
}

int cmd_solve(Session& ses, const RunConfig& cfg, std::ostream& out) {
  const MeshPtr mesh = make_mesh(cfg.M, cfg.spec.n, cfg.grading);
  const KernelPtr kt = kernel_for(cfg.spec, mesh);
  GroundState gs = solve_or_dump(ses, cfg, cfg.spec, kt.get(), mesh);
  const DiscreteField sol = gs.field.scaled(gs.t_scale);
  CsvWriter w(ses.path("field", "csv"), {"r", "u_normalized", "u_solution"});
  for (int i = 0; i < sol.size(); ++i) w.row({mesh->r(i), gs.field[i], sol[i]});
  w.close();
  write_field_binary(ses.path("solution", "bin"), sol);
  const EnergyReport e = functional_J(sol, cfg.spec, kt.get());
  json j = to_json(gs);
  j["J"] = num(e.J);
  j["grad_energy"] = num(e.grad_energy);
  j["gagliardo"] = num(e.gagliardo);
  j["henon"] = num(e.henon);
  ses.write_json("report", j);
  for (auto it = j.begin(); it != j.end(); ++it)
    print_kv(out, it.key(), it->is_boolean() ? (it->get<bool>() ? "true" : "false") : it->dump());
  return kExitOk;
}

int cmd_symmetry(Session& ses, const RunConfig& cfg, std::ostream& out) {
  if (cfg.spec.form != OperatorForm::additive)
    throw ConfigError("symmetry needs [solver] mode = additive (ground states of the additive operator)");
  const MeshPtr mesh = make_mesh(cfg.M, cfg.spec.n, cfg.grading);
  ProblemSpec kspec = cfg.spec;
  // the kernel depends on (n, s, p, normalization) only; build it even at beta = 0 for the mesh
  const KernelTable kt(kspec, mesh);
  const AlphaSweep sw = find_alpha_star(cfg.spec, &kt, cfg.symmetry_alphas, cfg.symmetry_tol, solver_options(cfg));
  write_sweep_csv(ses.path("sweep", "csv"), sw);
  json pts = json::array();
  for (const auto& r : sw.points) pts.push_back(to_json(r));
  json j = {{"points", pts},
            {"alpha_star_gap", sw.alpha_star_gap ? num(*sw.alpha_star_gap) : json("NotFound")},
            {"hardy_ratio_decreasing", sw.hardy_ratio_decreasing},
            {"inner_fraction_decreasing", sw.inner_fraction_decreasing},
            {"sign_changes", sw.sign_changes}};
  ses.write_json("report", j);
  for (const auto& r : sw.points)
    out << "alpha = " << fmt(r.alpha) << "  gap = " << fmt(r.gap) << (r.radial_stable ? "  radial stable" : "  radial minimality contradicted") << "\n";
  print_kv(out, "alpha_star_gap", sw.alpha_star_gap ? fmt(*sw.alpha_star_gap) : "NotFound");
  if (sw.sign_changes > 1) out << "warning: the gap changes sign " << sw.sign_changes << " times along the grid\n";
  return kExitOk;
}

int cmd_stability(Session& ses, const RunConfig& cfg, std::ostream& out) {
  const MeshPtr mesh = make_mesh(cfg.M, cfg.spec.n, cfg.grading);
  const StabilityReport r = stability_sweep(cfg.spec, cfg.stability_s, mesh, solver_options(cfg));
  write_stability_csv(ses.path("sweep", "csv"), r);
  json j = {{"s_values", num_list(r.s_values)}, {"distances", num_list(r.distances)},
            {"norms", num_list(r.norms)},       {"R_values", num_list(r.R_values)},
            {"status", r.status},               {"local_R", num(r.local_R)},
            {"local_norm", num(r.local_norm)},  {"distances_decreasing", r.distances_decreasing},
            {"norm_max", num(r.norm_max)}};
  ses.write_json("report", j);
  for (std::size_t i = 0; i < r.s_values.size(); ++i)
    out << "s = " << fmt(r.s_values[i]) << "  distance = " << fmt(r.distances[i]) << "  norm = " << fmt(r.norms[i])
        << "  " << r.status[i] << "\n";
  if (!r.distances_decreasing) out << "note: distances are not monotone along the sweep\n";
  for (const auto& s : r.status)
    if (s != "ok") return kExitNotConverged;
  return kExitOk;
}

int cmd_scaling(Session& ses, const RunConfig& cfg, std::ostream& out) {
  const MeshPtr mesh = make_mesh(cfg.M, cfg.spec.n, cfg.grading);
  const KernelPtr kt = kernel_for(cfg.spec, mesh);
  DiscreteField u;
  if (cfg.scaling_profile == "ground_state") {
    const GroundState gs = solve_or_dump(ses, cfg, cfg.spec, kt.get(), mesh);
    u = gs.field;
  } else {
    u = DiscreteField::from_function(mesh, [](double r) { return 1.0 - r * r; });
  }
  const ScalingReport r = scaling_diagnostic(u, cfg.spec, kt.get(), cfg.scaling_lambdas);
  write_scaling_csv(ses.path("ratios", "csv"), r);
  json j = {{"lambdas", num_list(r.lambdas)},
            {"R_values", num_list(r.R_values)},
            {"fitted_slope", num(r.fitted_slope)},
            {"analytic_slope", num(r.analytic_slope)},
            {"local_exponent", num(r.local_exponent)},
            {"nonlocal_exponent", num(r.nonlocal_exponent)},
            {"supercritical", r.supercritical}};
  ses.write_json("report", j);
  for (std::size_t i = 0; i < r.lambdas.size(); ++i)
    out << "lambda = " << fmt(r.lambdas[i]) << "  R = " << fmt(r.R_values[i]) << "\n";
  print_kv(out, "fitted_slope", fmt(r.fitted_slope));
  print_kv(out, "analytic_slope", fmt(r.analytic_slope));
  print_kv(out, "supercritical", r.supercritical ? "true" : "false");
  return kExitOk;
}

int cmd_stampacchia(Session& ses, const RunConfig& cfg, std::ostream& out) {
  const MeshPtr mesh = make_mesh(cfg.M, cfg.spec.n, cfg.grading);
  const KernelPtr kt = kernel_for(cfg.spec, mesh);
  const GroundState gs = solve_or_dump(ses, cfg, cfg.spec, kt.get(), mesh);
  const DiscreteField u = gs.field.scaled(gs.t_scale);
  const DiscreteField f = henon_rhs(u, cfg.spec);
  const double delta = cfg.stampacchia_delta > 0.0
                           ? cfg.stampacchia_delta
                           : stampacchia_auto_delta(u, f, cfg.spec, cfg.stampacchia_r, cfg.stampacchia_K);
  const StampacchiaReport r = stampacchia_diagnostic(u, f, cfg.spec, cfg.stampacchia_r, delta, cfg.stampacchia_K);
  write_stampacchia_csv(ses.path("levels", "csv"), r);
  json j = {{"C_k", num_list(r.C_k)},
            {"U_k", num_list(r.U_k)},
            {"p_star", num(r.p_star)},
            {"tau", num(r.tau)},
            {"gamma_fit", num(r.gamma_fit)},
            {"gamma_theory", num(r.gamma_theory)},
            {"C_hat_fit", num(r.C_hat_fit)},
            {"fit_pairs", r.fit_pairs},
            {"A", num(r.A)},
            {"delta", num(r.delta)},
            {"bound", num(r.bound)},
            {"u_max", num(r.u_max)},
            {"U_nonincreasing", r.U_nonincreasing},
            {"U_to_zero", r.U_to_zero},
            {"bound_holds", r.bound_holds}};
  ses.write_json("report", j);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!it->is_array()) print_kv(out, it.key(), it->dump());
  return kExitOk;
}

int cmd_check(Session& ses, const RunConfig& cfg, std::ostream& out) {
  const auto results = run_self_checks(cfg);
  CsvWriter w(ses.path("checks", "csv"), {"check", "pass", "value", "tolerance"});
  bool ok = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << "  (" << fmt(r.value) << " vs " << fmt(r.tolerance) << ")\n";
    w.row_mixed({"\"" + r.name + "\"", r.pass ? "1" : "0", fmt(r.value), fmt(r.tolerance)});
    ok = ok && r.pass;
  }
  w.close();
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run(const CliFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = flags.config_path.empty() ? parse_config("") : load_config(flags.config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.override_critical) cfg.override_critical = true;
  if (flags.deterministic) cfg.deterministic = true;
  if (flags.threads >= 0) cfg.threads = flags.threads;
  if (cfg.deterministic) cfg.threads = 1;
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  if (cfg.deterministic) Eigen::setNbThreads(1);

  static const std::map<std::string, int (*)(Session&, const RunConfig&, std::ostream&)> commands = {
      {"classify", cmd_classify},   {"solve", cmd_solve},     {"symmetry", cmd_symmetry},
      {"stability", cmd_stability}, {"scaling", cmd_scaling}, {"stampacchia", cmd_stampacchia},
      {"check", cmd_check}};
  const auto it = commands.find(flags.command);
  if (it == commands.end()) {
    err << "unknown command '" << flags.command << "'\n";
    return kExitConfig;
  }

  std::optional<Session> ses;
  int status = kExitFailure;
  try {
    ses.emplace(flags.command, cfg);
    status = it->second(*ses, cfg, out);
  } catch (const RegimeRefused& e) {
    err << "regime refused: " << e.what() << " (use --override-critical to force)\n";
    status = kExitRegime;
  } catch (const NotConverged& e) {
    err << "not converged: " << e.what() << "\n";
    status = kExitNotConverged;
  } catch (const RescaleFailed& e) {
    err << "rescale failed: " << e.what() << "\n";
    status = kExitNotConverged;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    // everything else traces back to parameters the config supplied
    err << "invalid configuration: " << e.what() << "\n";
    status = kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    status = kExitFailure;
  }
  if (ses) {
    try {
      ses->finish(status);
    } catch (const std::exception& e) {
      err << "i/o error: " << e.what() << "\n";
      return kExitIo;
    }
  }
  return status;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Ground states of the mixed local-nonlocal Henon problem on the unit ball"};
  CliFlags f;
  app.add_option("command", f.command, "classify | solve | symmetry | stability | scaling | stampacchia | check")
      ->required();
  app.add_option("--config", f.config_path, "INI configuration file (see docs/config_schema.md)");
  app.add_option("--out", f.out_dir, "output directory (overrides [output] dir)");
  app.add_flag("--override-critical", f.override_critical, "solve outside the existence regime");
  app.add_flag("--deterministic", f.deterministic, "single thread, fixed summation order");
  app.add_option("--threads", f.threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return run(f, std::cout, std::cerr);
}

}  // namespace henon
