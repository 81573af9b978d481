/*
 Copyright 2026 The spdectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#include "spdectl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

// Reads one JSON object, remembering which keys were consumed so leftovers can be rejected.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) invalid(fmt::format("'{}' must be an object", path_.empty() ? "<root>" : path_));
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) {
    if (!has(key)) invalid(fmt::format("missing key '{}'", name(key)));
    return node_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) invalid(fmt::format("'{}' must be a number", name(key)));
    const double d = v.get<double>();
    if (!std::isfinite(d)) invalid(fmt::format("'{}' must be finite", name(key)));
    return d;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) invalid(fmt::format("'{}' must be an integer", name(key)));
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      invalid(fmt::format("'{}' must be a non-negative integer", name(key)));
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) invalid(fmt::format("'{}' must be true or false", name(key)));
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) invalid(fmt::format("'{}' must be a string", name(key)));
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array()) invalid(fmt::format("'{}' must be an array of numbers", name(key)));
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        invalid(fmt::format("'{}' must be an array of finite numbers", name(key)));
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    if (!node_.contains(key) || node_.at(key).is_null()) return Section(empty, name(key));
    return Section(node_.at(key), name(key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) invalid(fmt::format("unknown key '{}'", name(item.key())));
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

int positive(long long v, const std::string& key) {
  if (v < 1 || v > 100000000) invalid(fmt::format("'{}' must be a positive integer", key));
  return static_cast<int>(v);
}

json windows_json(const std::vector<CostWindow>& windows) {
  json out = json::array();
  for (const CostWindow& w : windows) out.push_back({{"lo", w.lo}, {"hi", w.hi}, {"target", w.target}});
  return out;
}

std::vector<double> uniform_centers(double a, double b, int n) {
  std::vector<double> mus;
  const double w = (b - a) / n;
  for (int i = 0; i < n; ++i) mus.push_back(a + (i + 0.5) * w);
  return mus;
}

json nagumo_base() {
  return {
      {"grid", {{"a", 0.0}, {"b", 10.0}, {"J", 1000}, {"bc", "neumann"}}},
      {"drift", {{"kind", "nagumo"}, {"epsilon", 1.0}, {"alpha", -0.5}}},
      {"noise", {{"kind", "cylindrical"}, {"modes", 500}}},
      {"rho", 100.0},
      {"dt", 0.01},
      {"steps", 250},
      {"initial_condition", {{"kind", "nagumo_front"}}},
      {"actuators", {{"mus", uniform_centers(0.0, 10.0, 10)}, {"sigmas", std::vector<double>(10, 0.5)}}},
      {"optimizer", {{"iterations", 100}, {"rollouts", 100}, {"eval_rollouts", 100}}},
      {"mpc", {{"total_steps", 250}, {"plant_noise", true}}},
      {"verify", {{"rollouts", 10000}, {"control_amplitude", 1.0}}},
      {"simulate", {{"rollouts", 1}}},
  };
}

// Canonical form of every semantic field. Defaults are materialized so that spelling a default
// out explicitly does not change the hash.
json canonical_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["grid"] = {{"a", c.a},
               {"b", c.b},
               {"J", c.intervals},
               {"bc", c.bc == Boundary::DirichletZero ? "dirichlet" : "neumann"}};
  j["drift"] = {{"kind", c.drift.kind == DriftKind::Heat ? "heat" : "nagumo"},
                {"epsilon", c.drift.epsilon},
                {"alpha", c.drift.alpha}};
  j["noise"] = {{"kind", c.noise_kind == NoiseKind::Cylindrical ? "cylindrical" : "diagonal"}, {"modes", c.modes}};
  if (c.noise_kind == NoiseKind::Diagonal) j["noise"]["eigenvalues"] = c.eigenvalues;
  j["rho"] = c.rho;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["deterministic"] = c.deterministic;
  json ic;
  switch (c.initial.kind) {
    case InitialKind::Zero: ic = {{"kind", "zero"}}; break;
    case InitialKind::Constant: ic = {{"kind", "constant"}, {"value", c.initial.value}}; break;
    case InitialKind::NagumoFront: ic = {{"kind", "nagumo_front"}}; break;
    case InitialKind::Values: ic = {{"kind", "values"}, {"values", c.initial.values}}; break;
  }
  j["initial_condition"] = ic;
  j["actuators"] = {{"mus", c.mus}, {"sigmas", c.sigmas}};
  j["cost"] = {{"kappa", c.kappa}, {"terminal_only", c.terminal_only}, {"windows", windows_json(c.windows)}};
  j["optimizer"] = {{"iterations", c.iterations}, {"rollouts", c.rollouts}, {"eval_rollouts", c.eval_rollouts}};
  if (c.initial_controls) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < c.initial_controls->rows(); ++i) {
      json row = json::array();
      for (Eigen::Index l = 0; l < c.initial_controls->cols(); ++l) row.push_back((*c.initial_controls)(i, l));
      rows.push_back(row);
    }
    j["optimizer"]["initial_controls"] = rows;
  }
  j["mpc"] = {{"total_steps", c.mpc_total_steps},
              {"mpc_inner_iterations", c.mpc_inner_iterations},
              {"plant_noise", c.plant_noise}};
  j["verify"] = {{"rollouts", c.verify_rollouts}, {"control_amplitude", c.verify_amplitude}};
  j["simulate"] = {{"rollouts", c.simulate_rollouts}, {"controls_csv", c.simulate_controls_csv}};
  return j;
}

ExperimentConfig parse(const json& doc) {
  ExperimentConfig c;
  Section root(doc, "");
  c.preset = root.string("preset", "");
  c.seed = root.unsigned_integer("seed", 1);
  c.output_dir = root.string("output_dir", "out");

  {
    Section s = root.child("grid");
    c.a = s.number("a", 0.0);
    c.b = s.number("b", 1.0);
    c.intervals = positive(s.integer("J", 64), s.name("J"));
    const std::string bc = s.string("bc", "dirichlet");
    if (bc == "dirichlet") c.bc = Boundary::DirichletZero;
    else if (bc == "neumann") c.bc = Boundary::NeumannZero;
    else invalid(fmt::format("'grid.bc' must be \"dirichlet\" or \"neumann\", got \"{}\"", bc));
    s.finish();
  }
  {
    Section s = root.child("drift");
    const std::string kind = s.string("kind", "heat");
    if (kind == "heat") c.drift.kind = DriftKind::Heat;
    else if (kind == "nagumo") c.drift.kind = DriftKind::Nagumo;
    else invalid(fmt::format("'drift.kind' must be \"heat\" or \"nagumo\", got \"{}\"", kind));
    c.drift.epsilon = s.number("epsilon", 0.1);
    c.drift.alpha = s.number("alpha", 0.0);
    if (!(c.drift.epsilon > 0.0)) invalid("'drift.epsilon' must be > 0");
    s.finish();
  }
  {
    Section s = root.child("noise");
    const std::string kind = s.string("kind", "cylindrical");
    if (kind == "cylindrical") {
      c.noise_kind = NoiseKind::Cylindrical;
      c.modes = positive(s.integer("modes", c.intervals / 2), s.name("modes"));
      if (s.has("eigenvalues")) invalid("'noise.eigenvalues' is only valid with kind \"diagonal\"");
    } else if (kind == "diagonal") {
      c.noise_kind = NoiseKind::Diagonal;
      c.eigenvalues = s.numbers("eigenvalues", {});
      if (c.eigenvalues.empty()) invalid("'noise.eigenvalues' must be a non-empty array for kind \"diagonal\"");
      c.modes = positive(s.integer("modes", static_cast<long long>(c.eigenvalues.size())), s.name("modes"));
      if (c.modes != static_cast<int>(c.eigenvalues.size())) {
        invalid("'noise.modes' must equal the number of eigenvalues");
      }
    } else {
      invalid(fmt::format("'noise.kind' must be \"cylindrical\" or \"diagonal\", got \"{}\"", kind));
    }
    s.finish();
  }
  c.rho = root.number("rho", 10.0);
  c.dt = root.number("dt", 0.01);
  c.steps = positive(root.integer("steps", 100), "steps");
  c.deterministic = root.boolean("deterministic", false);
  if (!(c.rho > 0.0)) invalid("'rho' must be > 0");
  if (!(c.dt > 0.0)) invalid("'dt' must be > 0");
  {
    Section s = root.child("initial_condition");
    const std::string kind = s.string("kind", "zero");
    if (kind == "zero") {
      c.initial.kind = InitialKind::Zero;
    } else if (kind == "constant") {
      c.initial.kind = InitialKind::Constant;
      c.initial.value = s.number("value", 0.0);
    } else if (kind == "nagumo_front") {
      c.initial.kind = InitialKind::NagumoFront;
    } else if (kind == "values") {
      c.initial.kind = InitialKind::Values;
      c.initial.values = s.numbers("values", {});
    } else {
      invalid(fmt::format("'initial_condition.kind' must be zero, constant, nagumo_front or values, got \"{}\"", kind));
    }
    s.finish();
  }
  {
    Section s = root.child("actuators");
    c.mus = s.numbers("mus", {});
    c.sigmas = s.numbers("sigmas", {});
    if (c.mus.empty()) invalid("'actuators.mus' must list at least one actuator");
    if (c.sigmas.size() == 1 && c.mus.size() > 1) c.sigmas.assign(c.mus.size(), c.sigmas.front());
    s.finish();
  }
  {
    Section s = root.child("cost");
    c.kappa = s.number("kappa", 1.0);
    c.terminal_only = s.boolean("terminal_only", false);
    if (s.has("windows")) {
      const json& ws = s.raw("windows");
      if (!ws.is_array()) invalid("'cost.windows' must be an array");
      for (std::size_t i = 0; i < ws.size(); ++i) {
        Section w(ws[i], fmt::format("cost.windows[{}]", i));
        CostWindow win;
        win.lo = w.number("lo", 0.0);
        win.hi = w.number("hi", 0.0);
        win.target = w.number("target", 0.0);
        w.raw("lo");
        w.raw("hi");
        w.raw("target");
        w.finish();
        c.windows.push_back(win);
      }
    }
    if (c.windows.empty()) invalid("'cost.windows' must list at least one window");
    s.finish();
  }
  {
    Section s = root.child("optimizer");
    c.iterations = positive(s.integer("iterations", 100), s.name("iterations"));
    c.rollouts = positive(s.integer("rollouts", 100), s.name("rollouts"));
    c.eval_rollouts = positive(s.integer("eval_rollouts", 100), s.name("eval_rollouts"));
    if (c.rollouts < 2) invalid("'optimizer.rollouts' must be >= 2");
    if (s.has("initial_controls")) {
      const json& rows = s.raw("initial_controls");
      if (!rows.is_array() || rows.empty()) invalid("'optimizer.initial_controls' must be an array of rows");
      RowMatrix u(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(c.mus.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != c.mus.size()) {
          invalid(fmt::format("'optimizer.initial_controls[{}]' must hold one value per actuator", i));
        }
        for (std::size_t l = 0; l < c.mus.size(); ++l) {
          if (!rows[i][l].is_number()) invalid("'optimizer.initial_controls' must contain numbers");
          u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = rows[i][l].get<double>();
        }
      }
      if (u.rows() != c.steps) invalid("'optimizer.initial_controls' must have one row per step");
      if (!u.allFinite()) invalid("'optimizer.initial_controls' must be finite");
      c.initial_controls = std::move(u);
    }
    s.finish();
  }
  {
    Section s = root.child("mpc");
    c.mpc_total_steps = positive(s.integer("total_steps", c.steps), s.name("total_steps"));
    c.mpc_inner_iterations = positive(s.integer("mpc_inner_iterations", c.iterations), s.name("mpc_inner_iterations"));
    c.plant_noise = s.boolean("plant_noise", true);
    s.finish();
  }
  {
    Section s = root.child("verify");
    c.verify_rollouts = positive(s.integer("rollouts", 10000), s.name("rollouts"));
    c.verify_amplitude = s.number("control_amplitude", 1.0);
    s.finish();
  }
  {
    Section s = root.child("simulate");
    c.simulate_rollouts = positive(s.integer("rollouts", 1), s.name("rollouts"));
    c.simulate_controls_csv = s.string("controls_csv", "");
    s.finish();
  }
  root.finish();
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"heat_tracking", "nagumo_accelerate", "nagumo_suppress"}; }

json preset_json(const std::string& name) {
  if (name == "heat_tracking") {
    return {
        {"grid", {{"a", 0.0}, {"b", 1.0}, {"J", 64}, {"bc", "dirichlet"}}},
        {"drift", {{"kind", "heat"}, {"epsilon", 0.1}, {"alpha", 0.0}}},
        {"noise", {{"kind", "cylindrical"}, {"modes", 32}}},
        {"rho", 10.0},
        {"dt", 0.01},
        {"steps", 100},
        {"initial_condition", {{"kind", "zero"}}},
        {"actuators", {{"mus", {0.2, 0.5, 0.8}}, {"sigmas", {0.05, 0.05, 0.05}}}},
        {"cost",
         {{"kappa", 3.0},
          {"terminal_only", false},
          {"windows",
           windows_json({{0.18, 0.22, 5.0}, {0.48, 0.52, 2.5}, {0.78, 0.82, 5.0}})}}},
        {"optimizer", {{"iterations", 100}, {"rollouts", 100}, {"eval_rollouts", 100}}},
        {"mpc", {{"total_steps", 100}, {"plant_noise", true}}},
        {"verify", {{"rollouts", 10000}, {"control_amplitude", 1.0}}},
        {"simulate", {{"rollouts", 1}}},
    };
  }
  if (name == "nagumo_accelerate") {
    json j = nagumo_base();
    j["cost"] = {{"kappa", 0.1}, {"terminal_only", false}, {"windows", windows_json({{7.0, 9.9, 1.0}})}};
    return j;
  }
  if (name == "nagumo_suppress") {
    json j = nagumo_base();
    j["cost"] = {{"kappa", 0.1}, {"terminal_only", false}, {"windows", windows_json({{0.7, 0.99, 0.0}})}};
    return j;
  }
  invalid(fmt::format("unknown preset \"{}\"", name));
}

ExperimentConfig load_config_json(const json& doc) {
  if (!doc.is_object()) invalid("config must be a JSON object");
  json merged = json::object();
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) invalid("'preset' must be a string");
    merged = preset_json(doc["preset"].get<std::string>());
  }
  merged.merge_patch(doc);
  ExperimentConfig c = parse(merged);
  try {
    (void)build_experiment(c);
  } catch (const Error& e) {
    invalid(fmt::format("{}: {}", to_string(e.code()), e.what()));
  }
  c.resolved = canonical_json(c);
  c.resolved["output_dir"] = c.output_dir;
  return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open config {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  }
  return load_config_json(doc);
}

void override_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.resolved["seed"] = seed;
}

Field build_initial_condition(const Grid& grid, const InitialCondition& ic) {
  Field f(grid);
  switch (ic.kind) {
    case InitialKind::Zero: break;
    case InitialKind::Constant: f.values.setConstant(ic.value); break;
    case InitialKind::NagumoFront:
      for (int k = 0; k < grid.size(); ++k) f.values[k] = 1.0 / (1.0 + std::exp(-(2.0 - grid.node(k)) / std::sqrt(2.0)));
      break;
    case InitialKind::Values:
      f = Field(grid, Eigen::Map<const Eigen::VectorXd>(ic.values.data(), static_cast<Eigen::Index>(ic.values.size())));
      break;
  }
  return apply_bc(std::move(f));
}

Experiment build_experiment(const ExperimentConfig& c) {
  const Grid grid(c.a, c.b, c.intervals, c.bc);
  NoiseModel noise =
      c.noise_kind == NoiseKind::Cylindrical ? build_eigenbasis(grid, c.modes) : build_eigenbasis(grid, c.eigenvalues);
  SimConfig sim{grid, c.drift, noise, c.rho, c.dt, c.steps, build_initial_condition(grid, c.initial), c.deterministic};
  sim.validate();
  ActuatorSet act = build_actuators(c.mus, c.sigmas, grid, noise);
  CostSpec cost(grid, c.kappa, c.windows, c.terminal_only);
  return Experiment{std::move(sim), std::move(act), std::move(cost)};
}

std::string config_hash(const ExperimentConfig& config) {
  json j = config.resolved;
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

ControlSequence verify_controls(const ExperimentConfig& config, int actuators) {
  RowMatrix u(config.steps, actuators);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int k = 0; k < config.steps; ++k) {
    for (int l = 0; l < actuators; ++l) {
      u(k, l) = config.verify_amplitude * std::sin(two_pi * (k + 0.5) / config.steps + l);
    }
  }
  return ControlSequence(std::move(u), config.dt);
}

}  // namespace spdectl
