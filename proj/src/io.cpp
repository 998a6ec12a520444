#include "ehdwave/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace ehdwave::io {

namespace fs = std::filesystem;

std::string hex_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw FormatError("not a real number: '" + s + "'");
  return v;
}

json real_to_json(double v) {
  json j{{"hex", hex_string(v)}};
  // JSON has no inf/nan; the hex string still carries them.
  j["dec"] = std::isfinite(v) ? json(v) : json(nullptr);
  return j;
}

double real_from_json(const json& j) {
  if (j.is_object()) {
    if (!j.contains("hex")) throw FormatError("real object without 'hex'");
    return parse_hex(j.at("hex").get<std::string>());
  }
  if (j.is_string()) return parse_hex(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw FormatError("expected a real, got " + std::string(j.type_name()));
}

json trace_to_json(const TraceD& t) {
  json hex = json::array(), dec = json::array();
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    hex.push_back(hex_string(t[i]));
    dec.push_back(std::isfinite(t[i]) ? json(t[i]) : json(nullptr));
  }
  return json{{"hex", hex}, {"dec", dec}};
}

TraceD trace_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("hex") : j;
  if (!arr.is_array()) throw FormatError("trace must be an array");
  TraceD t(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) t[static_cast<Eigen::Index>(i)] = real_from_json(arr[i]);
  return t;
}

namespace {

const char* solver_name(LinearSolver s) {
  switch (s) {
    case LinearSolver::kAuto:
      return "auto";
    case LinearSolver::kDense:
      return "dense";
    case LinearSolver::kKrylov:
      return "krylov";
  }
  return "auto";
}

LinearSolver solver_from_name(const std::string& s) {
  if (s == "auto") return LinearSolver::kAuto;
  if (s == "dense") return LinearSolver::kDense;
  if (s == "krylov") return LinearSolver::kKrylov;
  throw ValidationError("linear_solver", "expected auto, dense or krylov");
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  if constexpr (std::is_floating_point_v<T>)
    field = real_from_json(j.at(key));
  else
    field = j.at(key).get<T>();
}

}  // namespace

json to_json(const NewtonConfig& c) {
  return json{{"tol", c.tol},
              {"max_iter", c.max_iter},
              {"backtrack", c.backtrack},
              {"min_step", c.min_step},
              {"linear_solver", solver_name(c.linear_solver)},
              {"dense_limit", c.dense_limit},
              {"krylov_tol", c.krylov_tol},
              {"krylov_restart", c.krylov_restart},
              {"krylov_max_iter", c.krylov_max_iter}};
}

NewtonConfig newton_from_json(const json& j, NewtonConfig c) {
  take(j, "tol", c.tol);
  take(j, "max_iter", c.max_iter);
  take(j, "backtrack", c.backtrack);
  take(j, "min_step", c.min_step);
  if (j.contains("linear_solver")) c.linear_solver = solver_from_name(j.at("linear_solver").get<std::string>());
  take(j, "dense_limit", c.dense_limit);
  take(j, "krylov_tol", c.krylov_tol);
  take(j, "krylov_restart", c.krylov_restart);
  take(j, "krylov_max_iter", c.krylov_max_iter);
  return c;
}

json to_json(const ContinuationConfig& c) {
  return json{{"eps_start", c.eps_start},
              {"eps_growth", c.eps_growth},
              {"fast_iterations", c.fast_iterations},
              {"eps_switch", c.eps_switch},
              {"ds_max", c.ds_max},
              {"ds_min", c.ds_min},
              {"ds_grow", c.ds_grow},
              {"alpha_weight", c.alpha_weight},
              {"corrector_max_iter", c.corrector_max_iter},
              {"m1_tol_factor", c.m1_tol_factor},
              {"m2_tol", c.m2_tol},
              {"m3_cap", c.m3_cap},
              {"f_cap", c.f_cap},
              {"tail_tol", c.tail_tol},
              {"resolution_tol", c.resolution_tol},
              {"budget", c.budget},
              {"n_min", c.n_min},
              {"n_start", c.n_start},
              {"n_max", c.n_max},
              {"store_every", c.store_every},
              {"check_points", c.check_points},
              {"initializer", c.initializer == Expansion::kNominal ? "nominal" : "consistent"},
              {"newton", to_json(c.newton)}};
}

ContinuationConfig continuation_from_json(const json& j, ContinuationConfig c) {
  take(j, "eps_start", c.eps_start);
  take(j, "eps_growth", c.eps_growth);
  take(j, "fast_iterations", c.fast_iterations);
  take(j, "eps_switch", c.eps_switch);
  take(j, "ds_max", c.ds_max);
  take(j, "ds_min", c.ds_min);
  take(j, "ds_grow", c.ds_grow);
  take(j, "alpha_weight", c.alpha_weight);
  take(j, "corrector_max_iter", c.corrector_max_iter);
  take(j, "m1_tol_factor", c.m1_tol_factor);
  take(j, "m2_tol", c.m2_tol);
  take(j, "m3_cap", c.m3_cap);
  take(j, "f_cap", c.f_cap);
  take(j, "tail_tol", c.tail_tol);
  take(j, "resolution_tol", c.resolution_tol);
  take(j, "budget", c.budget);
  take(j, "n_min", c.n_min);
  take(j, "n_start", c.n_start);
  take(j, "n_max", c.n_max);
  take(j, "store_every", c.store_every);
  take(j, "check_points", c.check_points);
  if (j.contains("initializer")) {
    const std::string s = j.at("initializer").get<std::string>();
    if (s == "nominal")
      c.initializer = Expansion::kNominal;
    else if (s == "consistent")
      c.initializer = Expansion::kConsistent;
    else
      throw ValidationError("initializer", "expected nominal or consistent");
  }
  if (j.contains("newton")) c.newton = newton_from_json(j.at("newton"), c.newton);
  return c;
}

double RunConfig::resolved_alpha() const {
  if (alpha && eps) throw ValidationError("alpha", "give either --alpha or --eps, not both");
  if (alpha) return *alpha;
  if (eps) return (1.0 - gamma + eps1) - *eps;
  throw ValidationError("alpha", "one of --alpha or --eps is required");
}

json to_json(const RunConfig& c) {
  json j{{"command", c.command},
         {"gamma", c.gamma},
         {"eps1", c.eps1},
         {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
         {"eps", c.eps ? json(*c.eps) : json(nullptr)},
         {"half_length", c.half_length},
         {"n_points", c.n_points},
         {"newton", to_json(c.newton)},
         {"continuation", to_json(c.continuation)},
         {"out_dir", c.out_dir},
         {"format", c.format},
         {"input", c.input},
         {"q0_list", c.q0_list},
         {"dt", c.dt},
         {"x_max", c.x_max}};
  return j;
}

RunConfig run_config_from_json(const json& jin) {
  const json& j = jin.contains("run_config") ? jin.at("run_config") : jin;
  RunConfig c;
  take(j, "command", c.command);
  take(j, "gamma", c.gamma);
  take(j, "eps1", c.eps1);
  if (j.contains("alpha") && !j.at("alpha").is_null()) c.alpha = real_from_json(j.at("alpha"));
  if (j.contains("eps") && !j.at("eps").is_null()) c.eps = real_from_json(j.at("eps"));
  take(j, "half_length", c.half_length);
  take(j, "n_points", c.n_points);
  if (j.contains("newton")) c.newton = newton_from_json(j.at("newton"));
  if (j.contains("continuation")) c.continuation = continuation_from_json(j.at("continuation"));
  take(j, "out_dir", c.out_dir);
  take(j, "format", c.format);
  take(j, "input", c.input);
  if (j.contains("q0_list")) c.q0_list = j.at("q0_list").get<std::vector<double>>();
  take(j, "dt", c.dt);
  take(j, "x_max", c.x_max);
  return c;
}

json to_json(const BranchPoint& p) {
  return json{{"s", real_to_json(p.s)},
              {"alpha", real_to_json(p.alpha)},
              {"amplitude", real_to_json(p.amplitude)},
              {"monitor_m1", real_to_json(p.monitor_m1)},
              {"monitor_m2", real_to_json(p.monitor_m2)},
              {"monitor_m3", real_to_json(p.monitor_m3)},
              {"froude", real_to_json(p.froude)},
              {"lambda_min", real_to_json(p.lambda_min)},
              {"residual_norm", real_to_json(p.residual_norm)},
              {"half_length", real_to_json(p.half_length)},
              {"n_points", p.n_points}};
}

BranchPoint branch_point_from_json(const json& j) {
  BranchPoint p;
  p.s = real_from_json(j.at("s"));
  p.alpha = real_from_json(j.at("alpha"));
  p.amplitude = real_from_json(j.at("amplitude"));
  p.monitor_m1 = real_from_json(j.at("monitor_m1"));
  p.monitor_m2 = real_from_json(j.at("monitor_m2"));
  p.monitor_m3 = real_from_json(j.at("monitor_m3"));
  p.froude = real_from_json(j.at("froude"));
  p.lambda_min = real_from_json(j.at("lambda_min"));
  p.residual_norm = real_from_json(j.at("residual_norm"));
  p.half_length = real_from_json(j.at("half_length"));
  p.n_points = j.at("n_points").get<Eigen::Index>();
  return p;
}

json summary_to_json(const DiagnosticsSummary& d) {
  json bounds = json::array();
  for (const BoundCheck& c : d.bounds.checks)
    bounds.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"margin", c.margin}});
  return json{{"residual_norm", d.residual_norm},
              {"lambda_min", d.lambda_min},
              {"nontrivial", d.nontrivial},
              {"fields",
               {{"kinematic", d.fields.kinematic},
                {"electric", d.fields.electric},
                {"bernoulli", d.fields.bernoulli},
                {"far_field", d.fields.far_field}}},
              {"flow_force",
               {{"stations", d.flow_force.stations},
                {"values", d.flow_force.values},
                {"relative_spread", d.flow_force.relative_spread},
                {"quadrature_converged", d.flow_force.quadrature_converged}}},
              {"flux_identity",
               {{"lhs", d.flux.lhs},
                {"rhs", d.flux.rhs},
                {"relative_gap", d.flux.relative_gap},
                {"tail", d.flux.tail},
                {"w1_w1y", d.flux.w1_w1y},
                {"balanced", d.flux.balanced}}},
              {"nodal", {{"passed", d.nodal.passed}, {"summary", d.nodal.summary()}}},
              {"bounds", bounds},
              {"profile",
               {{"overhang", d.profile.overhang},
                {"min_xi_prime", d.profile.min_xi_prime},
                {"self_intersections", d.profile.self_intersections}}},
              {"froude_bound_ok", d.froude_bound_ok},
              {"failures", d.failures}};
}

json solution_to_json(const WaveSolution& s, const RunConfig& rc,
                      const std::optional<DiagnosticsSummary>& diag) {
  json j{{"version", kFormatVersion},
         {"kind", "solution"},
         {"run_config", to_json(rc)},
         {"params",
          {{"gamma", real_to_json(s.params.gamma)},
           {"eps1", real_to_json(s.params.eps1)},
           {"alpha", real_to_json(s.params.alpha)}}},
         {"grid", {{"half_length", real_to_json(s.grid.half_length())}, {"n_points", s.grid.size()}}},
         {"t1", trace_to_json(s.t1)},
         {"residual_norm", real_to_json(s.residual_norm)},
         {"amplitude", real_to_json(s.amplitude)},
         {"tail", real_to_json(s.tail)}};
  j["diagnostics"] = diag ? summary_to_json(*diag) : json(nullptr);
  return j;
}

WaveSolution solution_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kFormatVersion)
      throw FormatError("unsupported format version " + j.at("version").dump());
    if (j.value("kind", "solution") != "solution")
      throw FormatError("expected a solution document, got kind '" + j.value("kind", "") + "'");
    const json& p = j.at("params");
    const ParamsD params = make_params(real_from_json(p.at("gamma")), real_from_json(p.at("eps1")),
                                       real_from_json(p.at("alpha")));
    const json& g = j.at("grid");
    const GridD grid(real_from_json(g.at("half_length")), g.at("n_points").get<Eigen::Index>());
    TraceD t1 = trace_from_json(j.at("t1"));
    if (t1.size() != grid.size()) throw FormatError("t1 length does not match grid.n_points");
    // Stored scalars are re-derived rather than trusted.
    return make_solution(params, grid, std::move(t1), real_from_json(j.at("residual_norm")));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed solution document: ") + e.what());
  }
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(1) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_curve(const fs::path& path, const std::vector<double>& a, const std::vector<double>& b,
                 const std::string& columns, const RunConfig& rc) {
  if (a.size() != b.size()) throw ValidationError("curve", "column lengths differ");
  std::ostringstream s;
  s << "# version " << kFormatVersion << "\n# run_config " << to_json(rc).dump() << "\n# " << columns
    << "\n";
  s << std::setprecision(17);
  for (std::size_t i = 0; i < a.size(); ++i) s << a[i] << ' ' << b[i] << '\n';
  write_atomic(path, s.str());
}

void write_branch(const fs::path& dir, const Branch& b, const RunConfig& rc) {
  std::ostringstream s;
  const json header{{"record", "header"},
                    {"version", kFormatVersion},
                    {"run_config", to_json(rc)},
                    {"gamma", b.flow.gamma},
                    {"eps1", b.flow.eps1},
                    {"alpha_cr", b.flow.alpha_cr()}};
  s << header.dump() << '\n';
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    json rec = to_json(b.points[i]);
    rec["record"] = "point";
    rec["index"] = i;
    s << rec.dump() << '\n';
  }
  json stop{{"record", "stop"},
            {"stop_reason", b.stop_reason ? to_string(*b.stop_reason) : "NONE"},
            {"stop_detail", b.stop_detail},
            {"regrids", b.regrids},
            {"n_points", b.points.size()}};
  if (b.stop_reason) {
    const StopReport rep = classify_stop(b, make_params(b.flow.gamma, b.flow.eps1, 1.0));
    stop["gamma_case"] = rep.gamma_case;
    stop["monitor_triggered"] = rep.monitor_triggered;
    stop["discrepancy"] = rep.discrepancy;
    stop["interpretation"] = rep.interpretation;
  }
  s << stop.dump() << '\n';
  fs::create_directories(dir / "solutions");
  for (const auto& [idx, sol] : b.solutions) {
    char name[64];
    std::snprintf(name, sizeof name, "point_%05zu.json", idx);
    write_json(dir / "solutions" / name, solution_to_json(sol, rc));
  }
  write_atomic(dir / "branch.jsonl", s.str());
}

BranchFile read_branch(const fs::path& dir) {
  std::istringstream in(read_file(dir / "branch.jsonl"));
  BranchFile f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("branch.jsonl: ") + e.what());
    }
    const std::string kind = rec.value("record", "");
    if (kind == "header")
      f.header = rec;
    else if (kind == "point")
      f.points.push_back(branch_point_from_json(rec));
    else if (kind == "stop")
      f.stop = rec;
    else
      throw FormatError("branch.jsonl: unknown record '" + kind + "'");
  }
  if (f.header.is_null()) throw FormatError("branch.jsonl: missing header");
  if (f.header.value("version", 0) != kFormatVersion) throw FormatError("branch.jsonl: unsupported version");
  return f;
}

}  // namespace ehdwave::io
