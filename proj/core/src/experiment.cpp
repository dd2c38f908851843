/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "ddvar/errors.hpp"
#include "ddvar/output.hpp"

namespace ddvar {

std::string_view to_string(ExperimentMethod method) {
  switch (method) {
    case ExperimentMethod::Global:
      return "global";
    case ExperimentMethod::Mps:
      return "mps";
    case ExperimentMethod::Ddda:
      return "ddda";
    case ExperimentMethod::Compare:
      return "compare";
  }
  return "unknown";
}

namespace {

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line, const std::string& expected) {
  throw ConfigError(ErrorCode::ParseError, key, line,
                    where(line) + "bad value '" + value + "' for '" + key + "' (expected " + expected + ")");
}

long parse_long(const std::string& key, const std::string& value, int line) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, line, "an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value, int line) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, line, "an unsigned integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value, int line) {
  if (value.empty()) bad_value(key, value, line, "a real number");
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || errno == ERANGE) bad_value(key, value, line, "a real number");
  return out;
}

template <typename Enum>
Enum parse_enum(const std::string& key, const std::string& value, int line,
                std::initializer_list<std::pair<const char*, Enum>> options) {
  std::string expected;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    expected += (expected.empty() ? "" : " | ") + std::string(name);
  }
  bad_value(key, value, line, expected);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"np", [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.np = parse_long(k, v, l); }},
      {"j_sub",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.j_sub = parse_long(k, v, l); }},
      {"halo",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.halo = parse_long(k, v, l); }},
      {"cov_kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) {
         c.cov_kind = parse_enum<CovarianceKind>(
             k, v, l, {{"identity", CovarianceKind::Identity}, {"gaussian", CovarianceKind::Gaussian}});
       }},
      {"length_scale", [](ExperimentConfig& c, const std::string& k, const std::string& v,
                          int l) { c.length_scale = parse_double(k, v, l); }},
      {"sigma_b", [](ExperimentConfig& c, const std::string& k, const std::string& v,
                     int l) { c.sigma_b = parse_double(k, v, l); }},
      {"sigma_o", [](ExperimentConfig& c, const std::string& k, const std::string& v,
                     int l) { c.sigma_o = parse_double(k, v, l); }},
      {"nobs",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.nobs = parse_long(k, v, l); }},
      {"seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.seed = parse_u64(k, v, l); }},
      {"method",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) {
         c.method = parse_enum<ExperimentMethod>(k, v, l,
                                                 {{"global", ExperimentMethod::Global},
                                                  {"mps", ExperimentMethod::Mps},
                                                  {"ddda", ExperimentMethod::Ddda},
                                                  {"compare", ExperimentMethod::Compare}});
       }},
      {"tol",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.tol = parse_double(k, v, l); }},
      {"max_iters", [](ExperimentConfig& c, const std::string& k, const std::string& v,
                       int l) { c.max_iters = parse_long(k, v, l); }},
      {"update_convention",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) {
         c.update_convention = parse_enum<UpdateConvention>(
             k, v, l,
             {{"v_times_w", UpdateConvention::VTimesW}, {"binv_v_times_w", UpdateConvention::BinvVTimesW}});
       }},
      {"local_solver",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) {
         c.local_solver = parse_enum<LocalSolverKind>(
             k, v, l,
             {{"direct_cholesky", LocalSolverKind::DirectCholesky}, {"cg", LocalSolverKind::ConjugateGradient}});
       }},
      {"cg_tol", [](ExperimentConfig& c, const std::string& k, const std::string& v,
                    int l) { c.cg_tol = parse_double(k, v, l); }},
      {"cg_max",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) { c.cg_max = parse_long(k, v, l); }},
      {"output_dir",
       [](ExperimentConfig& c, const std::string& k, const std::string& v, int l) {
         if (v.empty()) bad_value(k, v, l, "a path");
         c.output_dir = v;
       }},
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Key -> line it was set on, so validation errors can point back into the file.
using LineMap = std::map<std::string, int>;

[[noreturn]] void invalid(const LineMap& lines, const std::string& key, const std::string& what) {
  auto it = lines.find(key);
  const int line = it == lines.end() ? 0 : it->second;
  throw ConfigError(ErrorCode::ValidationError, key, line, where(line) + "'" + key + "' " + what);
}

void validate(const ExperimentConfig& c, const LineMap& lines) {
  if (c.np < 1) invalid(lines, "np", "must be >= 1");
  if (c.j_sub < 1) invalid(lines, "j_sub", "must be >= 1");
  if (c.j_sub > c.np) invalid(lines, "j_sub", "must not exceed np");
  if (c.halo < 0) invalid(lines, "halo", "must be >= 0");
  if (c.j_sub > 1 && c.np / c.j_sub < 2 * c.halo + 1)
    invalid(lines, "halo", "is too large: np / j_sub = " + std::to_string(c.np / c.j_sub) + " < 2*halo+1");
  if (!(c.length_scale > 0.0)) invalid(lines, "length_scale", "must be > 0");
  if (!(c.sigma_b > 0.0)) invalid(lines, "sigma_b", "must be > 0");
  if (!(c.sigma_o > 0.0)) invalid(lines, "sigma_o", "must be > 0");
  const long nobs = c.effective_nobs();
  if (nobs < 0 || nobs > c.np) invalid(lines, "nobs", "must lie in [0, np]");
  if (!(c.tol > 0.0)) invalid(lines, "tol", "must be > 0");
  if (c.max_iters < 1) invalid(lines, "max_iters", "must be >= 1");
  if (!(c.cg_tol > 0.0)) invalid(lines, "cg_tol", "must be > 0");
  if (c.cg_max < 1) invalid(lines, "cg_max", "must be >= 1");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "np",  "j_sub",     "halo",      "cov_kind",          "length_scale", "sigma_b", "sigma_o", "nobs",     "seed",
      "method", "tol", "max_iters", "update_convention", "local_solver", "cg_tol",  "cg_max",  "output_dir"};
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line) {
  auto it = setters().find(key);
  if (it == setters().end())
    throw ConfigError(ErrorCode::ParseError, key, line, where(line) + "unknown key '" + key + "'");
  it->second(cfg, key, value, line);
}

void validate_config(const ExperimentConfig& cfg) { validate(cfg, {}); }

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  LineMap lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ErrorCode::ParseError, "", line_no, where(line_no) + "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(ErrorCode::ParseError, "", line_no, where(line_no) + "missing key");
    if (lines.count(key))
      throw ConfigError(ErrorCode::ParseError, key, line_no,
                        where(line_no) + "duplicate key '" + key + "' (first set on line " +
                            std::to_string(lines[key]) + ")");
    set_config_value(cfg, key, value, line_no);
    lines[key] = line_no;
  }
  validate(cfg, lines);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "np = " << c.np << '\n'
      << "j_sub = " << c.j_sub << '\n'
      << "halo = " << c.halo << '\n'
      << "cov_kind = " << to_string(c.cov_kind) << '\n'
      << "length_scale = " << format_real(c.length_scale) << '\n'
      << "sigma_b = " << format_real(c.sigma_b) << '\n'
      << "sigma_o = " << format_real(c.sigma_o) << '\n'
      << "nobs = " << c.effective_nobs() << '\n'
      << "seed = " << c.seed << '\n'
      << "method = " << to_string(c.method) << '\n'
      << "tol = " << format_real(c.tol) << '\n'
      << "max_iters = " << c.max_iters << '\n'
      << "update_convention = " << to_string(c.update_convention) << '\n'
      << "local_solver = " << to_string(c.local_solver) << '\n'
      << "cg_tol = " << format_real(c.cg_tol) << '\n'
      << "cg_max = " << c.cg_max << '\n'
      << "output_dir = " << c.output_dir.string() << '\n';
  return out.str();
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("DDVAR_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  const std::string value(raw);
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error(ErrorCode::InvalidArgument, "DDVAR_THREADS must be a non-negative integer, got '" + value + "'");
  return out;
}

ProblemInstance build_instance(const ExperimentConfig& cfg) {
  const Grid1D grid = Grid1D::uniform(cfg.np);
  const CovarianceModel cov = cfg.cov_kind == CovarianceKind::Identity
                                  ? build_identity_covariance(grid)
                                  : build_gaussian_covariance(grid, cfg.length_scale, cfg.sigma_b);
  return synthesize(grid, cov, cfg.effective_nobs(), cfg.sigma_o, cfg.seed);
}

Decomposition build_decomposition(const ExperimentConfig& cfg) {
  return decompose_uniform(Grid1D::uniform(cfg.np), static_cast<std::size_t>(cfg.j_sub), cfg.halo);
}

SolverOptions build_solver_options(const ExperimentConfig& cfg, const RunOptions& run_opts) {
  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.max_iters = static_cast<int>(cfg.max_iters);
  opts.local_solver = cfg.local_solver;
  opts.cg_tol = cfg.cg_tol;
  opts.cg_max = static_cast<int>(cfg.cg_max);
  opts.threads = run_opts.threads;
  return opts;
}

// ---------------------------------------------------------------------------
namespace {

void write_config(JsonWriter& w, const ExperimentConfig& c) {
  w.begin_object("config");
  w.field("np", c.np);
  w.field("j_sub", c.j_sub);
  w.field("halo", c.halo);
  w.field("cov_kind", to_string(c.cov_kind));
  w.field("length_scale", c.length_scale);
  w.field("sigma_b", c.sigma_b);
  w.field("sigma_o", c.sigma_o);
  w.field("nobs", c.effective_nobs());
  w.field("seed", static_cast<unsigned long long>(c.seed));
  w.field("method", to_string(c.method));
  w.field("tol", c.tol);
  w.field("max_iters", c.max_iters);
  w.field("update_convention", to_string(c.update_convention));
  w.field("local_solver", to_string(c.local_solver));
  w.end_object();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

std::string result_json(const ExperimentConfig& cfg, const Decomposition& dec, const ProblemInstance& inst,
                        const AssimilationResult& res) {
  JsonWriter w;
  w.begin_object();
  w.field("method", to_string(cfg.method));
  w.field("seed", static_cast<unsigned long long>(cfg.seed));
  write_config(w, cfg);
  write_decomposition(w, dec);
  w.field("scheme", to_string(res.scheme));
  w.field("converged", res.converged);
  w.field("iterations", res.iterations);
  w.begin_object("diagnostics");
  w.field("global_cost", res.diagnostics.global_cost);
  w.field("interface_mismatch", res.diagnostics.interface_mismatch);
  w.field("vs_global_linf", res.diagnostics.vs_global_linf);
  w.end_object();
  w.field("u_analysis", res.u_analysis);
  w.field("u_background", inst.u_background);
  w.begin_array("per_subdomain_w");
  for (const Vector& wi : res.per_subdomain_w) w.element(wi);
  w.end_array();
  w.end_object();
  return w.str();
}

std::string report_json(const ExperimentConfig& cfg, const Decomposition& dec, const EquivalenceReport& rep) {
  JsonWriter w;
  w.begin_object();
  w.field("method", to_string(cfg.method));
  w.field("seed", static_cast<unsigned long long>(cfg.seed));
  write_config(w, cfg);
  write_decomposition(w, dec);
  w.field("c_equal", rep.c_equal);
  w.field("a_structure_exact", rep.a_structure_exact);
  w.field("a_structure_max_abs", rep.a_structure_max_abs);
  w.field("interface_mismatch", rep.interface_mismatch);
  w.field("ddda_in_mps_residual", rep.ddda_in_mps_residual);
  w.field("w_delta_linf", rep.w_delta_linf);
  w.field("w_delta_per_subdomain", rep.w_delta_per_subdomain);
  w.field("cost_global", rep.cost_global);
  w.field("cost_mps", rep.cost_mps);
  w.field("cost_ddda", rep.cost_ddda);
  w.field("iters_mps", rep.iters_mps);
  w.field("mps_converged", rep.mps_converged);
  w.end_object();
  return w.str();
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunOptions& run_opts, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    const ProblemInstance inst = build_instance(cfg);
    const Decomposition dec = build_decomposition(cfg);
    const SolverOptions opts = build_solver_options(cfg, run_opts);

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + cfg.output_dir.string() + "': " + ec.message());

    bool converged = true;
    out << "ddvar " << to_string(cfg.method) << ": np=" << cfg.np << " j_sub=" << cfg.j_sub << " halo=" << cfg.halo
        << " nobs=" << cfg.effective_nobs() << " seed=" << cfg.seed << '\n';

    if (cfg.method == ExperimentMethod::Compare) {
      const EquivalenceReport rep = equivalence_report(inst, dec, opts, cfg.update_convention);
      write_file(cfg.output_dir / "result.json", report_json(cfg, dec, rep));
      write_file(cfg.output_dir / "history.csv", history_to_csv(rep.history_mps, dec.num_subdomains()));
      converged = rep.mps_converged;
      out << "  c_equal              " << (rep.c_equal ? "true" : "false") << '\n'
          << "  a_structure_exact    " << (rep.a_structure_exact ? "true" : "false") << '\n'
          << "  interface_mismatch   " << format_real(rep.interface_mismatch) << '\n'
          << "  ddda_in_mps_residual " << format_real(rep.ddda_in_mps_residual) << '\n'
          << "  w_delta_linf         " << format_real(rep.w_delta_linf) << '\n'
          << "  cost global/mps/ddda " << format_real(rep.cost_global) << " " << format_real(rep.cost_mps) << " "
          << format_real(rep.cost_ddda) << '\n'
          << "  iters_mps            " << rep.iters_mps << (rep.mps_converged ? "" : " (not converged)") << '\n';
    } else {
      const Method method = cfg.method == ExperimentMethod::Global ? Method::Global
                            : cfg.method == ExperimentMethod::Mps  ? Method::Mps
                                                                   : Method::Ddda;
      const AssimilationResult res = assimilate(inst, dec, method, opts, cfg.update_convention);
      write_file(cfg.output_dir / "result.json", result_json(cfg, dec, inst, res));
      if (method == Method::Mps)
        write_file(cfg.output_dir / "history.csv", history_to_csv(res.history, dec.num_subdomains()));
      converged = res.converged;
      out << "  global_cost          " << format_real(res.diagnostics.global_cost) << '\n'
          << "  interface_mismatch   " << format_real(res.diagnostics.interface_mismatch) << '\n'
          << "  vs_global_linf       " << format_real(res.diagnostics.vs_global_linf) << '\n'
          << "  iterations           " << res.iterations << (res.converged ? "" : " (not converged)") << '\n';
    }
    out << "  output               " << cfg.output_dir.string() << '\n';
    if (!converged) {
      err << "ddvar: MPS iteration reached max_iters = " << cfg.max_iters << " without meeting tol\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "ddvar: " << e.what() << '\n';
    return 1;
  }
}

int run_sweep(const ExperimentConfig& base, const std::string& key, const std::vector<std::string>& values,
              const RunOptions& run_opts, std::ostream& out, std::ostream& err) {
  if (key == "output_dir") {
    err << "ddvar: cannot sweep over output_dir\n";
    return 1;
  }
  if (values.empty()) {
    err << "ddvar: sweep needs at least one value\n";
    return 1;
  }
  int status = 0;
  for (const std::string& value : values) {
    ExperimentConfig cfg = base;
    try {
      set_config_value(cfg, key, value);
      validate_config(cfg);
    } catch (const std::exception& e) {
      err << "ddvar: " << e.what() << '\n';
      status = 1;
      continue;
    }
    cfg.output_dir = base.output_dir / (key + "=" + value);
    const int rc = run_experiment(cfg, run_opts, out, err);
    if (rc == 1 || status == 1) {
      status = 1;
    } else {
      status = std::max(status, rc);
    }
  }
  return status;
}

}  // namespace ddvar
