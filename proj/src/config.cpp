#include "sspde/config.hpp"

#include <cmath>
#include <fstream>

#include "sspde/errors.hpp"

namespace sspde {

namespace {

void expect(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

double num(const nlohmann::json& v, const std::string& key) {
  expect(v.is_number(), "'" + key + "' must be a number");
  return v.get<double>();
}

int integer(const nlohmann::json& v, const std::string& key) {
  expect(v.is_number_integer(), "'" + key + "' must be an integer");
  return v.get<int>();
}

void parse_grid(const nlohmann::json& j, RunConfig& cfg) {
  expect(j.is_object(), "'grid' must be an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "dimension") cfg.N_dim = integer(val, key);
    else if (key == "cells_per_unit") cfg.cells_per_unit = integer(val, key);
    else throw ConfigError("config: unknown grid key '" + key + "'");
  }
  expect(cfg.N_dim >= 2, "grid dimension must be >= 2");
  expect(cfg.cells_per_unit >= 8, "cells_per_unit must be >= 8");
}

void parse_pipeline(const nlohmann::json& j, RunConfig& cfg) {
  expect(j.is_object(), "'pipeline' must be an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "n_max") cfg.n_max = integer(val, key);
    else if (key == "eps1") cfg.eps1 = num(val, key);
    else if (key == "super_scale") cfg.super_scale = num(val, key);
    else if (key == "verify_tol") cfg.verify_tol = num(val, key);
    else throw ConfigError("config: unknown pipeline key '" + key + "'");
  }
  expect(cfg.n_max >= 1, "n_max must be >= 1");
  expect(cfg.eps1 == -1.0 || cfg.eps1 > 0, "eps1 must be positive (or -1 for the default)");
  expect(std::isfinite(cfg.super_scale), "super_scale must be finite");
  expect(cfg.verify_tol > 0, "verify_tol must be positive");
}

void parse_solver(const nlohmann::json& j, RunConfig& cfg) {
  expect(j.is_object(), "'solver' must be an object");
  SolveSettings& s = cfg.solver;
  for (const auto& [key, val] : j.items()) {
    if (key == "newton_tol") s.newton_tol = num(val, key);
    else if (key == "max_newton") s.max_newton = integer(val, key);
    else if (key == "picard_tol") s.picard_tol = num(val, key);
    else if (key == "max_picard") s.max_picard = integer(val, key);
    else if (key == "armijo_c") s.armijo_c = num(val, key);
    else if (key == "max_backtracks") s.max_backtracks = integer(val, key);
    else if (key == "jac_floor") s.jac_floor = num(val, key);
    else throw ConfigError("config: unknown solver key '" + key + "'");
  }
  expect(s.newton_tol > 0 && s.picard_tol > 0, "tolerances must be positive");
  expect(s.max_newton > 0 && s.max_picard > 0 && s.max_backtracks > 0,
         "iteration limits must be positive");
  expect(s.armijo_c > 0 && s.armijo_c < 1, "armijo_c must lie in (0, 1)");
  expect(s.jac_floor > 0, "jac_floor must be positive");
}

}  // namespace

PipelineConfig RunConfig::pipeline_config() const {
  PipelineConfig p;
  p.op = op;
  p.reaction = reaction;
  p.N_dim = N_dim;
  p.n_max = n_max;
  p.cells_per_unit = cells_per_unit;
  p.eps1 = eps1;
  p.solver = solver;
  p.verify_tol = verify_tol;
  p.super_scale = super_scale;
  p.output_dir = output_dir;
  return p;
}

RunConfig parse_config(const nlohmann::json& j) {
  expect(j.is_object(), "top level must be an object");
  RunConfig cfg;
  bool has_op = false, has_reaction = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "operator") {
      try {
        cfg.op = operator_from_json(val);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      has_op = true;
    } else if (key == "reaction") {
      try {
        cfg.reaction = reaction_from_json(val);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      has_reaction = true;
    } else if (key == "grid") {
      parse_grid(val, cfg);
    } else if (key == "pipeline") {
      parse_pipeline(val, cfg);
    } else if (key == "solver") {
      parse_solver(val, cfg);
    } else if (key == "output_dir") {
      expect(val.is_string(), "'output_dir' must be a string");
      cfg.output_dir = val.get<std::string>();
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  expect(has_op, "'operator' is required");
  expect(has_reaction, "'reaction' is required");
  try {
    cfg.op.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace sspde
