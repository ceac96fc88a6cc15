#include "diralg/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace diralg {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

const json& require(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ScenarioError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ScenarioError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError(what + " must be finite");
  return d;
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) throw ScenarioError(what + " must be a string");
  return v.get<std::string>();
}

std::vector<int> as_indices(const json& v, const std::string& what) {
  if (!v.is_array()) throw ScenarioError(what + " must be an array of indices");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ScenarioError(what + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ScenarioError("unknown field '" + key + "' in " + where);
    }
  }
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json sweep_json(const SweepResult& r) {
  return json{{"max", r.max_value},
              {"threshold", r.threshold},
              {"passed", r.passed()},
              {"probes", r.probes},
              {"worst_x", vector_json(r.worst_x)}};
}

json entries_json(const std::vector<IntegrabilityEntry>& entries) {
  json a = json::array();
  for (const auto& e : entries) {
    a.push_back(json{{"label", e.label}, {"value", e.value}, {"x", vector_json(e.x)}});
  }
  return a;
}

json integrability_json(const IntegrabilityReport& r) {
  return json{{"applicable", true},
              {"passed", true},
              {"cond1", r.cond1},
              {"cond2", r.cond2},
              {"cond1_max", r.cond1_max},
              {"cond2_max", r.cond2_max},
              {"dirac_lie", r.dirac_lie},
              {"base_is_lie", r.base_is_lie},
              {"base_jacobi_max", r.base_jacobi_max},
              {"probes", r.probes},
              {"cond1_entries", entries_json(r.cond1_entries)},
              {"cond2_entries", entries_json(r.cond2_entries)}};
}

json not_applicable(const std::string& reason) {
  return json{{"applicable", false}, {"passed", true}, {"reason", reason}};
}

// Shortest text that reads back to the same double.
std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

int exit_code_for(const std::exception_ptr& e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const UnknownSystemError& ex) {
    message = ex.what();
    return kExitUnknownSystem;
  } catch (const ScenarioError& ex) {
    message = ex.what();
    return kExitMalformed;
  } catch (const ContractError& ex) {
    message = ex.what();
    return kExitMalformed;
  } catch (const ConstraintError& ex) {
    message = ex.what();
    return kExitStructure;
  } catch (const StructureError& ex) {
    message = ex.what();
    return kExitStructure;
  } catch (const DiralgError& ex) {
    // Degenerate dynamics, failed projection, non-invertible Legendre map,
    // non-finite values.
    message = ex.what();
    return kExitDegenerate;
  } catch (const std::exception& ex) {
    message = ex.what();
    return kExitMalformed;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read scenario file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

VelocitySplit velocity_split(const System& sys) {
  const int n = sys.structure->chart().base_dim();
  const int m = sys.structure->chart().fiber_dim();
  switch (sys.formalism) {
    case Formalism::lagrangian:
      return [n, m](const Vector& s, const Vector& r) {
        return VelocityPair{s.head(n), r.head(n), s.tail(m)};
      };
    case Formalism::hamiltonian: {
      const auto h = std::make_shared<const HamiltonianDef>(*sys.hamiltonian);
      return [h, n, m](const Vector& s, const Vector& r) {
        const Vector x = s.head(n);
        return VelocityPair{x, r.head(n), h->grad_xi(x, s.tail(m))};
      };
    }
    case Formalism::pmp: {
      const auto c = std::make_shared<const ControlSystem>(*sys.control);
      const int q = c->control_dim();
      return [c, n, q](const Vector& s, const Vector& r) {
        const Vector x = s.head(n);
        return VelocityPair{x, r.head(n), c->f(x, s.segment(n, q))};
      };
    }
  }
  throw ContractError("unknown formalism");
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks{"isotropy", "jacobi", "integrability",
                                               "core_annihilator", "legendre_equivalence"};
  return checks;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  reject_unknown(doc,
                 {"schema", "system", "params", "constraint", "formalism", "hamiltonian",
                  "initial", "time", "checks", "probes", "output"},
                 "scenario");
  const std::string schema = as_string(require(doc, "schema"), "schema");
  if (schema != kScenarioSchema) {
    throw ScenarioError("unsupported schema '" + schema + "', expected " + kScenarioSchema);
  }

  Scenario s;
  s.system = as_string(require(doc, "system"), "system");
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) throw ScenarioError("params must be an object");
    for (const auto& [key, value] : p.items()) s.params[key] = as_number(value, "params." + key);
  }
  if (doc.contains("constraint")) {
    const json& c = doc.at("constraint");
    if (!c.is_object()) throw ScenarioError("constraint must be an object");
    reject_unknown(c, {"type", "base_selector", "fiber_selector", "unit_index"}, "constraint");
    const std::string type = as_string(require(c, "type"), "constraint.type");
    if (type == "none") {
      s.unconstrained = true;
    } else if (type == "linear" || type == "affine") {
      ConstraintSpec spec;
      spec.affine = type == "affine";
      if (c.contains("base_selector")) {
        spec.base_selector = as_indices(c.at("base_selector"), "constraint.base_selector");
      }
      spec.fiber_selector = as_indices(require(c, "fiber_selector"), "constraint.fiber_selector");
      if (spec.affine) {
        const json& u = require(c, "unit_index");
        if (!u.is_number_integer()) throw ScenarioError("constraint.unit_index must be an integer");
        spec.unit_index = u.get<int>();
      } else if (c.contains("unit_index")) {
        throw ScenarioError("constraint.unit_index only applies to affine constraints");
      }
      s.constraint = spec;
    } else {
      throw ScenarioError("constraint.type must be none, linear or affine");
    }
  }
  const std::string formalism = as_string(require(doc, "formalism"), "formalism");
  try {
    s.formalism = parse_formalism(formalism);
  } catch (const ContractError& e) {
    throw ScenarioError(e.what());
  }
  if (doc.contains("hamiltonian")) {
    s.hamiltonian = as_string(doc.at("hamiltonian"), "hamiltonian");
    if (s.hamiltonian != "closed_form" && s.hamiltonian != "legendre") {
      throw ScenarioError("hamiltonian must be closed_form or legendre");
    }
  }
  const json& init = require(doc, "initial");
  if (!init.is_array() || init.empty()) throw ScenarioError("initial must be a non-empty array");
  for (const auto& v : init) s.initial.push_back(as_number(v, "initial entry"));

  const json& t = require(doc, "time");
  if (!t.is_object()) throw ScenarioError("time must be an object");
  reject_unknown(t, {"t0", "t1", "dt", "method"}, "time");
  if (t.contains("t0")) s.time.t0 = as_number(t.at("t0"), "time.t0");
  s.time.t1 = as_number(require(t, "t1"), "time.t1");
  s.time.dt = as_number(require(t, "dt"), "time.dt");
  if (t.contains("method")) {
    try {
      s.time.method = parse_method(as_string(t.at("method"), "time.method"));
    } catch (const ContractError& e) {
      throw ScenarioError(e.what());
    }
  }
  if (!(s.time.dt > 0.0)) throw ScenarioError("time.dt must be > 0");
  if (!(s.time.t1 >= s.time.t0)) throw ScenarioError("time.t1 must not precede time.t0");

  if (doc.contains("checks")) {
    const json& c = doc.at("checks");
    if (!c.is_array()) throw ScenarioError("checks must be an array");
    for (const auto& e : c) {
      const std::string name = as_string(e, "check name");
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ScenarioError("unknown check '" + name + "'");
      }
      s.checks.push_back(name);
    }
  }
  if (doc.contains("probes")) {
    const json& p = doc.at("probes");
    if (!p.is_number_integer() || p.get<int>() < 1) {
      throw ScenarioError("probes must be a positive integer");
    }
    s.probes = p.get<int>();
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (!o.is_object()) throw ScenarioError("output must be an object");
    reject_unknown(o, {"csv", "report"}, "output");
    if (o.contains("csv")) s.output.csv = as_string(o.at("csv"), "output.csv");
    if (o.contains("report")) s.output.report = as_string(o.at("report"), "output.report");
  }

  // Checked last so that a malformed document is reported as such first.
  if (find_system(s.system) == nullptr) {
    throw UnknownSystemError("unknown system '" + s.system + "' (see list-systems)");
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::string& path) { return parse_scenario_text(read_file(path)); }

json serialize_scenario(const Scenario& s) {
  json doc;
  doc["schema"] = kScenarioSchema;
  doc["system"] = s.system;
  json params = json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  doc["params"] = params;
  if (s.unconstrained) {
    doc["constraint"] = json{{"type", "none"}};
  } else if (s.constraint) {
    json c{{"type", s.constraint->affine ? "affine" : "linear"},
           {"base_selector", s.constraint->base_selector},
           {"fiber_selector", s.constraint->fiber_selector}};
    if (s.constraint->affine) c["unit_index"] = s.constraint->unit_index;
    doc["constraint"] = c;
  }
  doc["formalism"] = formalism_name(s.formalism);
  doc["hamiltonian"] = s.hamiltonian;
  doc["initial"] = s.initial;
  doc["time"] = json{{"t0", s.time.t0},
                     {"t1", s.time.t1},
                     {"dt", s.time.dt},
                     {"method", method_name(s.time.method)}};
  doc["checks"] = s.checks;
  doc["probes"] = s.probes;
  doc["output"] = json{{"csv", s.output.csv}, {"report", s.output.report}};
  return doc;
}

BuildOptions build_options(const Scenario& s) {
  BuildOptions o;
  o.formalism = s.formalism;
  o.params = s.params;
  o.constraint = s.constraint;
  o.unconstrained = s.unconstrained;
  o.legendre_hamiltonian = s.hamiltonian == "legendre";
  return o;
}

CheckOutcome run_checks(const Scenario& s, const System& sys, Execution exec) {
  CheckOutcome out;
  out.report = json::object();
  const std::vector<std::string>& names = s.checks;
  for (const std::string& name : names) {
    json entry;
    try {
      if (name == "isotropy") {
        entry = sweep_json(isotropy_sweep(*sys.structure, s.probes, 0x150ULL, exec));
      } else if (name == "core_annihilator") {
        entry = sweep_json(core_annihilator_sweep(*sys.structure, s.probes, 0xc02eULL, exec));
      } else if (name == "jacobi") {
        entry = sys.algebroid ? sweep_json(jacobi_sweep(*sys.algebroid, s.probes, 0x1ac0ULL, exec))
                              : not_applicable("system has no skew algebroid");
      } else if (name == "integrability") {
        if (!sys.linear_constraint || !sys.linear_constraint->is_adapted() ||
            !sys.base->is<PiGraph>()) {
          entry = not_applicable("needs a linear adapted constraint on an algebroid graph");
        } else {
          entry = integrability_json(check_integrability(*sys.structure));
        }
      } else if (name == "legendre_equivalence") {
        if (!sys.lagrangian || !sys.hamiltonian) {
          entry = not_applicable("needs both a Lagrangian and a Hamiltonian");
        } else {
          entry = sweep_json(legendre_equivalence_sweep(*sys.structure, *sys.lagrangian,
                                                        *sys.hamiltonian, s.probes, 0x1e9ULL,
                                                        exec));
        }
      }
    } catch (const DiralgError& e) {
      entry = json{{"passed", false}, {"error", e.what()}};
    }
    if (!entry.value("passed", false)) out.all_passed = false;
    out.report[name] = entry;
  }
  return out;
}

std::string trajectory_csv(const System& sys, const Trajectory& traj) {
  const ImplicitProblem& prob = *sys.problem;
  const auto& labels = prob.state_labels();
  std::string out = "t";
  for (const auto& l : labels) out += "," + l;
  for (int c : sys.angle_columns) out += "," + labels[c] + "_wrapped";
  for (const auto& l : labels) out += ",rate_" + l;
  for (const auto& name : traj.monitor_order) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_number(traj.times[i]);
    const Vector& s = traj.states[i];
    for (Eigen::Index k = 0; k < s.size(); ++k) out += "," + format_number(s(k));
    for (int c : sys.angle_columns) out += "," + format_number(wrap_angle(s(c)));
    const Vector& r = traj.rates[i];
    for (Eigen::Index k = 0; k < r.size(); ++k) out += "," + format_number(r(k));
    for (const auto& name : traj.monitor_order) {
      out += "," + format_number(traj.monitors.at(name)[i]);
    }
    out += "\n";
  }
  return out;
}

RunOutcome execute_scenario(const Scenario& s, Execution exec) {
  RunOutcome out;
  out.report = json{{"system", s.system},
                    {"formalism", formalism_name(s.formalism)},
                    {"method", method_name(s.time.method)}};
  std::optional<System> sys;
  try {
    sys = build_system(s.system, build_options(s));
  } catch (...) {
    out.exit_code = exit_code_for(std::current_exception(), out.message);
    out.report["error"] = out.message;
    out.report["exit_code"] = out.exit_code;
    return out;
  }

  const CheckOutcome checks = run_checks(s, *sys, exec);
  out.report["checks"] = checks.report;

  try {
    const Vector init = Eigen::Map<const Vector>(s.initial.data(),
                                                 static_cast<Eigen::Index>(s.initial.size()));
    const Vector s0 = sys->initial_state(init, s.time.t0);
    out.trajectory = integrate(*sys->problem, s0, s.time.t0, s.time.t1, s.time.dt, s.time.method);
  } catch (...) {
    out.exit_code = exit_code_for(std::current_exception(), out.message);
    out.report["error"] = out.message;
    out.report["exit_code"] = out.exit_code;
    return out;
  }
  const Trajectory& traj = *out.trajectory;

  int total_iters = 0;
  int max_iters = 0;
  double max_resid = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    total_iters += traj.newton_iterations[i];
    max_iters = std::max(max_iters, traj.newton_iterations[i]);
    max_resid = std::max(max_resid, traj.residual_norms[i]);
  }
  out.report["newton"] = json{{"steps", static_cast<int>(traj.times.size()) - 1},
                              {"total_iterations", total_iters},
                              {"max_iterations_per_step", max_iters},
                              {"max_residual", max_resid}};

  const AdmissibilityReport adm = admissibility_report(*sys->structure, traj, velocity_split(*sys));
  out.report["admissibility"] = json{{"max_norm", adm.max_norm}};

  json drift = json::object();
  for (const auto& name : traj.monitor_order) {
    if (name != "energy" && name != "hamiltonian") continue;
    const auto& values = traj.monitors.at(name);
    double worst = 0.0;
    for (double v : values) worst = std::max(worst, std::abs(v - values.front()));
    drift[name] = json{{"initial", values.front()},
                       {"max_abs", worst},
                       {"relative", worst / (1.0 + std::abs(values.front()))}};
  }
  out.report["energy_drift"] = drift;

  json monitors = json::object();
  for (const auto& name : traj.monitor_order) {
    const auto& values = traj.monitors.at(name);
    monitors[name] = json{{"first", values.front()},
                          {"last", values.back()},
                          {"max_abs", std::abs(*std::max_element(
                                          values.begin(), values.end(), [](double a, double b) {
                                            return std::abs(a) < std::abs(b);
                                          }))}};
  }
  out.report["monitors"] = monitors;
  out.report["final_state"] = vector_json(traj.states.back());
  out.report["final_time"] = traj.times.back();

  out.csv = trajectory_csv(*sys, traj);
  if (!checks.all_passed) {
    out.exit_code = kExitStructure;
    out.message = "structure check failed";
  }
  out.report["exit_code"] = out.exit_code;
  return out;
}

RunOutcome run_scenario_file(const std::string& path, const std::string& out_dir) {
  Scenario s;
  try {
    s = load_scenario(path);
  } catch (...) {
    RunOutcome out;
    out.exit_code = exit_code_for(std::current_exception(), out.message);
    return out;
  }
  RunOutcome out = execute_scenario(s);
  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  if (out.trajectory) write_file(dir / s.output.csv, out.csv);
  write_file(dir / s.output.report, out.report.dump(2) + "\n");
  return out;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ScenarioError("sweep must look like PARAM=a:b:n");
  SweepSpec spec;
  spec.param = text.substr(0, eq);
  const std::string range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : range.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ScenarioError("sweep must look like PARAM=a:b:n");
  try {
    std::size_t used = 0;
    const std::string a = range.substr(0, c1);
    const std::string b = range.substr(c1 + 1, c2 - c1 - 1);
    const std::string n = range.substr(c2 + 1);
    spec.from = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    spec.to = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    spec.count = std::stoi(n, &used);
    if (used != n.size()) throw std::invalid_argument(n);
  } catch (const std::logic_error&) {
    throw ScenarioError("sweep must look like PARAM=a:b:n");
  }
  if (spec.count < 1) throw ScenarioError("sweep count must be >= 1");
  return spec;
}

int run_sweep_file(const std::string& path, const std::string& out_dir, const SweepSpec& sweep) {
  const Scenario base = load_scenario(path);
  const SystemInfo* info = find_system(base.system);
  if (std::none_of(info->params.begin(), info->params.end(),
                   [&](const ParamSpec& p) { return p.name == sweep.param; })) {
    throw ScenarioError("system " + base.system + " has no parameter '" + sweep.param + "'");
  }
  const int count = sweep.count;
  std::vector<double> values(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    values[i] = count == 1 ? sweep.from : sweep.from + (sweep.to - sweep.from) * i / (count - 1);
  }
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    Scenario s = base;
    s.params[sweep.param] = values[i];
    outcomes[i] = execute_scenario(s, Execution::serial);
  }

  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  json summary = json::array();
  int worst = kExitOk;
  for (int i = 0; i < count; ++i) {
    const std::filesystem::path sub = dir / ("sweep_" + std::to_string(i));
    const RunOutcome& o = outcomes[i];
    if (o.trajectory) write_file(sub / base.output.csv, o.csv);
    write_file(sub / base.output.report, o.report.dump(2) + "\n");
    summary.push_back(json{{"index", i},
                           {"param", sweep.param},
                           {"value", values[i]},
                           {"exit_code", o.exit_code},
                           {"message", o.message},
                           {"final_state", o.report.value("final_state", json::array())}});
    worst = std::max(worst, o.exit_code);
  }
  write_file(dir / "sweep.json", summary.dump(2) + "\n");
  return worst;
}

int check_scenario_file(const std::string& path, std::string& report_text) {
  std::string message;
  try {
    Scenario s = load_scenario(path);
    if (s.checks.empty()) s.checks = known_checks();
    const System sys = build_system(s.system, build_options(s));
    const CheckOutcome out = run_checks(s, sys, Execution::parallel);
    report_text = json{{"system", s.system}, {"checks", out.report}}.dump(2) + "\n";
    return out.all_passed ? kExitOk : kExitStructure;
  } catch (...) {
    const int code = exit_code_for(std::current_exception(), message);
    report_text = json{{"error", message}, {"exit_code", code}}.dump(2) + "\n";
    return code;
  }
}

std::string list_systems_text() {
  std::ostringstream os;
  for (const auto& s : system_catalog()) {
    os << s.name << ": " << s.description << "\n";
    os << "  formalisms:";
    for (Formalism f : s.formalisms) os << " " << formalism_name(f);
    os << "\n  params:";
    for (const auto& p : s.params) {
      os << " " << p.name << "=" << format_number(p.default_value) << " (" << p.description << ")";
      if (&p != &s.params.back()) os << ",";
    }
    os << "\n  initial: " << s.initial << "\n";
  }
  return os.str();
}

json list_systems_json() {
  json systems = json::array();
  json names = json::array();
  for (const auto& s : system_catalog()) {
    json params = json::object();
    for (const auto& p : s.params) {
      params[p.name] = json{{"default", p.default_value}, {"description", p.description}};
    }
    json formalisms = json::array();
    for (Formalism f : s.formalisms) formalisms.push_back(formalism_name(f));
    systems.push_back(json{{"name", s.name},
                           {"description", s.description},
                           {"params", params},
                           {"formalisms", formalisms},
                           {"initial", s.initial}});
    names.push_back(s.name);
  }
  const json indices = json{{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 0}}}};
  json schema = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", kScenarioSchema},
      {"type", "object"},
      {"required", {"schema", "system", "formalism", "initial", "time"}},
      {"additionalProperties", false},
      {"properties",
       {{"schema", {{"const", kScenarioSchema}}},
        {"system", {{"enum", names}}},
        {"params", {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}},
        {"constraint",
         {{"type", "object"},
          {"required", {"type"}},
          {"additionalProperties", false},
          {"properties",
           {{"type", {{"enum", {"none", "linear", "affine"}}}},
            {"base_selector", indices},
            {"fiber_selector", indices},
            {"unit_index", {{"type", "integer"}, {"minimum", 0}}}}}}},
        {"formalism", {{"enum", {"lagrangian", "hamiltonian", "pmp"}}}},
        {"hamiltonian", {{"enum", {"closed_form", "legendre"}}}},
        {"initial", {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "number"}}}}},
        {"time",
         {{"type", "object"},
          {"required", {"t1", "dt"}},
          {"additionalProperties", false},
          {"properties",
           {{"t0", {{"type", "number"}}},
            {"t1", {{"type", "number"}}},
            {"dt", {{"type", "number"}, {"exclusiveMinimum", 0}}},
            {"method", {{"enum", {"rk4", "implicit-midpoint", "implicit_midpoint"}}}}}}}},
        {"checks", {{"type", "array"}, {"items", {{"enum", known_checks()}}}}},
        {"probes", {{"type", "integer"}, {"minimum", 1}}},
        {"output",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"csv", {{"type", "string"}}}, {"report", {{"type", "string"}}}}}}}}}};
  return json{{"scenario_schema", schema}, {"systems", systems}};
}

}  // namespace diralg
