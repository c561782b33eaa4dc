#pragma once

#include <string>

#include "sspde/pipeline.hpp"

namespace sspde {

struct RunConfig {
  OperatorSpec op;
  ReactionSpec reaction;
  int N_dim = 2;
  int cells_per_unit = 512;
  int n_max = 4;
  double eps1 = -1.0;
  SolveSettings solver;
  double super_scale = 1.0;
  double verify_tol = 1e-6;
  std::string output_dir = "out";

  PipelineConfig pipeline_config() const;
};

// Strict schema: unknown keys anywhere are rejected, all failures throw
// ConfigError before any computation starts.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace sspde
