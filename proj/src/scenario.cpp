#include "ricci/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ricci/errors.hpp"

namespace ricci {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known)
      throw SchemaError("unknown key '" + item.key() + "' in " + where);
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    throw SchemaError("missing key '" + std::string(key) + "' in " + where);
  return j.at(key);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(where + " must be finite");
  return v;
}

long long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + " must be an integer");
  return j.get<long long>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw SchemaError(where + " must be a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + " must be a string");
  return j.get<std::string>();
}

const json& as_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  return j;
}

std::vector<double> as_number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

FiberKind kind_from_string(const std::string& s, const std::string& where) {
  if (s == "sphere") return FiberKind::sphere;
  if (s == "flat") return FiberKind::flat;
  if (s == "hyperbolic") return FiberKind::hyperbolic;
  throw SchemaError(where + " must be one of \"sphere\", \"flat\", "
                            "\"hyperbolic\" (got \"" + s + "\")");
}

std::vector<FiberModel> parse_fibers(const json& j) {
  if (!j.is_array() || j.empty())
    throw SchemaError("fibers must be a non-empty array");
  std::vector<FiberModel> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "fibers[" + std::to_string(i) + "]";
    const json& f = as_object(j[i], where);
    check_keys(f, where, {"kind", "dim", "scale"});
    FiberModel m;
    m.kind = kind_from_string(as_string(require(f, "kind", where),
                                        where + ".kind"), where + ".kind");
    long long d = as_integer(require(f, "dim", where), where + ".dim");
    if (d < 1 || d > 16)
      throw DimensionError(where + ".dim must lie in [1, 16]");
    m.dim = static_cast<int>(d);
    m.scale = as_number(require(f, "scale", where), where + ".scale");
    if (!(m.scale > 0)) throw SchemaError(where + ".scale must be positive");
    out.push_back(m);
  }
  return out;
}

SolitonState parse_initial(const json& j, std::size_t fiber_count) {
  const json& ini = as_object(j, "initial");
  check_keys(ini, "initial", {"s", "h", "hp", "f", "fp"});
  SolitonState st;
  st.s = as_number(require(ini, "s", "initial"), "initial.s");
  st.h = as_number_array(require(ini, "h", "initial"), "initial.h");
  st.hp = as_number_array(require(ini, "hp", "initial"), "initial.hp");
  st.f = as_number(require(ini, "f", "initial"), "initial.f");
  st.fp = as_number(require(ini, "fp", "initial"), "initial.fp");
  if (st.h.size() != fiber_count)
    throw DimensionError("initial.h has " + std::to_string(st.h.size()) +
                         " entries but " + std::to_string(fiber_count) +
                         " fibers are declared");
  if (st.hp.size() != fiber_count)
    throw DimensionError("initial.hp has " + std::to_string(st.hp.size()) +
                         " entries but " + std::to_string(fiber_count) +
                         " fibers are declared");
  return st;
}

void parse_control(const json& j, OdeControl& c) {
  const json& ctl = as_object(j, "control");
  check_keys(ctl, "control",
             {"abs_tol", "rel_tol", "h_init", "h_min", "h_max", "fixed_step",
              "fixed_dt", "max_steps", "collapse_eps", "critical_eps",
              "arm_eps"});
  auto num = [&](const char* key, double& slot) {
    if (ctl.contains(key))
      slot = as_number(ctl.at(key), std::string("control.") + key);
  };
  num("abs_tol", c.abs_tol);
  num("rel_tol", c.rel_tol);
  num("h_init", c.h_init);
  num("h_min", c.h_min);
  num("h_max", c.h_max);
  num("fixed_dt", c.fixed_dt);
  num("collapse_eps", c.collapse_eps);
  num("critical_eps", c.critical_eps);
  num("arm_eps", c.arm_eps);
  if (ctl.contains("fixed_step"))
    c.fixed_step = as_bool(ctl.at("fixed_step"), "control.fixed_step");
  if (ctl.contains("max_steps")) {
    long long m = as_integer(ctl.at("max_steps"), "control.max_steps");
    if (m < 1) throw SchemaError("control.max_steps must be positive");
    c.max_steps = static_cast<std::size_t>(m);
  }
}

}  // namespace

const char* to_string(ScenarioSource s) {
  switch (s) {
    case ScenarioSource::explicit_data:
      return "explicit";
    case ScenarioSource::known_case:
      return "known";
    case ScenarioSource::random_draw:
      return "random";
  }
  throw InvalidStateError("unknown scenario source");
}

WarpedSpec Scenario::closed_form() const {
  if (source != ScenarioSource::known_case)
    throw InvalidStateError(
        "scenario '" + name +
        "' has no closed form; only known cases do -- integrated data is "
        "realized through realize_spec instead");
  return known_solution(known_case, known_n, lambda).spec;
}

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  as_object(j, "scenario");
  check_keys(j, "scenario",
             {"name", "description", "fibers", "lambda", "initial", "known",
              "random", "window", "control", "eigenvalue_tol"});

  Scenario sc;
  sc.name = as_string(require(j, "name", "scenario"), "name");
  if (j.contains("description"))
    sc.description = as_string(j.at("description"), "description");

  const bool has_explicit =
      j.contains("fibers") || j.contains("lambda") || j.contains("initial");
  const bool has_known = j.contains("known");
  const bool has_random = j.contains("random");
  if (int(has_explicit) + int(has_known) + int(has_random) != 1)
    throw SchemaError(
        "scenario must contain exactly one data source: fibers/lambda/initial "
        "together, known, or random");

  if (has_explicit) {
    sc.source = ScenarioSource::explicit_data;
    sc.fibers = parse_fibers(require(j, "fibers", "scenario"));
    sc.lambda = as_number(require(j, "lambda", "scenario"), "lambda");
    sc.init = parse_initial(require(j, "initial", "scenario"),
                            sc.fibers.size());
  } else if (has_known) {
    const json& k = as_object(j.at("known"), "known");
    check_keys(k, "known", {"case", "n", "lambda"});
    sc.source = ScenarioSource::known_case;
    sc.known_case = as_string(require(k, "case", "known"), "known.case");
    long long n = as_integer(require(k, "n", "known"), "known.n");
    if (n < 3 || n > 12) throw DimensionError("known.n must lie in [3, 12]");
    sc.known_n = static_cast<int>(n);
    sc.lambda = as_number(require(k, "lambda", "known"), "known.lambda");
    KnownSoliton ks = known_solution(sc.known_case, sc.known_n, sc.lambda);
    sc.fibers = ks.spec.fibers;
    sc.init = ks.state_at(ks.anchor);
  } else {
    const json& r = as_object(j.at("random"), "random");
    check_keys(r, "random", {"n", "k", "seed"});
    sc.source = ScenarioSource::random_draw;
    long long n = as_integer(require(r, "n", "random"), "random.n");
    long long k = as_integer(require(r, "k", "random"), "random.k");
    long long seed = as_integer(require(r, "seed", "random"), "random.seed");
    if (seed < 0) throw SchemaError("random.seed must be non-negative");
    sc.random_n = static_cast<int>(n);
    sc.random_k = static_cast<int>(k);
    sc.random_seed = static_cast<unsigned long>(seed);
    RandomSolitonData data =
        random_soliton_data(sc.random_n, sc.random_k, sc.random_seed);
    sc.fibers = data.fibers;
    sc.lambda = data.lambda;
    sc.init = data.init;
  }

  const json& w = as_object(require(j, "window", "scenario"), "window");
  check_keys(w, "window", {"s_end", "grid_points"});
  sc.s_end = as_number(require(w, "s_end", "window"), "window.s_end");
  if (w.contains("grid_points")) {
    long long m = as_integer(w.at("grid_points"), "window.grid_points");
    if (m < 2) throw SchemaError("window.grid_points must be at least 2");
    sc.grid_points = static_cast<int>(m);
  }

  if (j.contains("control")) parse_control(j.at("control"), sc.control);
  if (j.contains("eigenvalue_tol")) {
    sc.eigenvalue_tol = as_number(j.at("eigenvalue_tol"), "eigenvalue_tol");
    if (!(sc.eigenvalue_tol > 0))
      throw SchemaError("eigenvalue_tol must be positive");
  }

  sc.system();  // validates fiber dimensions and the total dimension now
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace ricci
