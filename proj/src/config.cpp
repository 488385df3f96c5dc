#include "henon/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "henon/errors.hpp"
#include "henon/io.hpp"

namespace henon {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem", {"n", "s", "p", "q", "alpha", "beta", "normalization"}},
      {"mesh", {"M", "grading"}},
      {"solver", {"tol", "max_iter", "seed", "noise", "mode"}},
      {"stability", {"s_values"}},
      {"scaling", {"lambdas", "profile"}},
      {"symmetry", {"alpha_grid", "tol"}},
      {"stampacchia", {"r", "delta", "K"}},
      {"output", {"dir", "trace"}},
      {"run", {"deterministic", "threads", "override_critical"}},
  };
  return s;
}

std::string where(const std::string& sec, const std::string& key) { return "[" + sec + "] " + key; }

double to_double(const std::string& v, const std::string& ctx) {
  const std::string t = boost::trim_copy(v);
  double x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError(ctx + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& v, const std::string& ctx) {
  const std::string t = boost::trim_copy(v);
  long long x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError(ctx + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& ctx) {
  const std::string t = boost::to_lower_copy(boost::trim_copy(v));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(ctx + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const std::string& ctx) {
  std::vector<std::string> parts;
  boost::split(parts, v, boost::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(to_double(p, ctx));
  if (out.empty()) throw ConfigError(ctx + ": empty list");
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  RunConfig c;
  for (const auto& [sec, body] : tree) {
    const auto it = schema().find(sec);
    if (it == schema().end()) {
      if (!body.data().empty()) throw ConfigError("key outside a section: " + sec);
      throw ConfigError("unknown section [" + sec + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + where(sec, key));
      const std::string v = node.get_value<std::string>();
      const std::string ctx = where(sec, key);
      if (sec == "problem") {
        if (key == "n") c.spec.n = static_cast<int>(to_int(v, ctx));
        else if (key == "s") c.spec.s = to_double(v, ctx);
        else if (key == "p") c.spec.p = to_double(v, ctx);
        else if (key == "q") c.spec.q = to_double(v, ctx);
        else if (key == "alpha") c.spec.alpha = to_double(v, ctx);
        else if (key == "beta") c.spec.beta = to_double(v, ctx);
        else if (key == "normalization") {
          try {
            c.spec.normalization = parse_normalization(boost::trim_copy(v));
          } catch (const DomainError& e) {
            throw ConfigError(ctx + ": " + e.what());
          }
        }
      } else if (sec == "mesh") {
        if (key == "M") c.M = static_cast<int>(to_int(v, ctx));
        else c.grading = to_double(v, ctx);
      } else if (sec == "solver") {
        if (key == "tol") c.solver.tol = to_double(v, ctx);
        else if (key == "max_iter") c.solver.max_iter = static_cast<int>(to_int(v, ctx));
        else if (key == "seed") c.solver.seed = static_cast<std::uint64_t>(to_int(v, ctx));
        else if (key == "noise") c.solver.noise = to_double(v, ctx);
        else {
          try {
            c.spec.form = parse_form(boost::trim_copy(v));
          } catch (const DomainError& e) {
            throw ConfigError(ctx + ": " + e.what());
          }
        }
      } else if (sec == "stability") {
        c.stability_s = to_list(v, ctx);
      } else if (sec == "scaling") {
        if (key == "lambdas") c.scaling_lambdas = to_list(v, ctx);
        else {
          c.scaling_profile = boost::trim_copy(v);
          if (c.scaling_profile != "parabola" && c.scaling_profile != "ground_state")
            throw ConfigError(ctx + ": expected parabola or ground_state");
        }
      } else if (sec == "symmetry") {
        if (key == "alpha_grid") c.symmetry_alphas = to_list(v, ctx);
        else c.symmetry_tol = to_double(v, ctx);
      } else if (sec == "stampacchia") {
        if (key == "r") c.stampacchia_r = to_double(v, ctx);
        else if (key == "K") c.stampacchia_K = static_cast<int>(to_int(v, ctx));
        else c.stampacchia_delta = boost::trim_copy(v) == "auto" ? 0.0 : to_double(v, ctx);
      } else if (sec == "output") {
        if (key == "dir") c.out_dir = boost::trim_copy(v);
        else c.write_trace = to_bool(v, ctx);
      } else if (sec == "run") {
        if (key == "deterministic") c.deterministic = to_bool(v, ctx);
        else if (key == "threads") c.threads = static_cast<int>(to_int(v, ctx));
        else c.override_critical = to_bool(v, ctx);
      }
    }
  }

  try {
    validate(c.spec);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (c.M < 4) throw ConfigError("[mesh] M must be >= 4");
  if (!(c.grading >= 1.0)) throw ConfigError("[mesh] grading must be >= 1");
  if (!(c.solver.tol > 0.0)) throw ConfigError("[solver] tol must be > 0");
  if (c.solver.max_iter < 1) throw ConfigError("[solver] max_iter must be >= 1");
  if (!(c.solver.noise >= 0.0 && c.solver.noise < 1.0)) throw ConfigError("[solver] noise must lie in [0,1)");
  if (!(c.symmetry_tol > 0.0)) throw ConfigError("[symmetry] tol must be > 0");
  if (c.stampacchia_K < 1) throw ConfigError("[stampacchia] K must be >= 1");
  if (c.threads < 0) throw ConfigError("[run] threads must be >= 0");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  return {
      {"problem.n", std::to_string(spec.n)},
      {"problem.s", fmt(spec.s)},
      {"problem.p", fmt(spec.p)},
      {"problem.q", fmt(spec.q)},
      {"problem.alpha", fmt(spec.alpha)},
      {"problem.beta", fmt(spec.beta)},
      {"problem.normalization", to_string(spec.normalization)},
      {"mesh.M", std::to_string(M)},
      {"mesh.grading", fmt(grading)},
      {"solver.tol", fmt(solver.tol)},
      {"solver.max_iter", std::to_string(solver.max_iter)},
      {"solver.seed", std::to_string(solver.seed)},
      {"solver.noise", fmt(solver.noise)},
      {"solver.mode", to_string(spec.form)},
      {"stability.s_values", list_str(stability_s)},
      {"scaling.lambdas", list_str(scaling_lambdas)},
      {"scaling.profile", scaling_profile},
      {"symmetry.alpha_grid", list_str(symmetry_alphas)},
      {"symmetry.tol", fmt(symmetry_tol)},
      {"stampacchia.r", fmt(stampacchia_r)},
      {"stampacchia.delta", stampacchia_delta > 0.0 ? fmt(stampacchia_delta) : "auto"},
      {"stampacchia.K", std::to_string(stampacchia_K)},
      {"output.dir", out_dir},
      {"output.trace", write_trace ? "true" : "false"},
      {"run.deterministic", deterministic ? "true" : "false"},
      {"run.threads", std::to_string(threads)},
      {"run.override_critical", override_critical ? "true" : "false"},
  };
}

std::string spec_hash(const ProblemSpec& s) {
  std::string canon = "n=" + std::to_string(s.n) + ";s=" + fmt(s.s) + ";p=" + fmt(s.p) + ";q=" + fmt(s.q) +
                      ";alpha=" + fmt(s.alpha) + ";beta=" + fmt(s.beta) + ";norm=" + to_string(s.normalization) +
                      ";form=" + to_string(s.form);
  return sha256_hex(canon).substr(0, 16);
}

}  // namespace henon
