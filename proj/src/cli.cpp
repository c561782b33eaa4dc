#include "sspde/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "sspde/cartesian.hpp"
#include "sspde/errors.hpp"
#include "sspde/pipeline.hpp"

namespace sspde::cli {

namespace {

nlohmann::json check_json(const ConditionCheck& c) {
  return {{"passed", c.passed}, {"worst_t", c.worst_t}, {"worst_value", c.worst_value}};
}

}  // namespace

int cmd_check_operator(const RunConfig& cfg) {
  cfg.op.validate();
  const auto grid = log_grid();
  const ConditionReport rep = verify_appendix_equivalence(cfg.op, grid);
  nlohmann::json out = {{"i_a", rep.i_a},
                        {"s_a", rep.s_a},
                        {"m", rep.m},
                        {"M", rep.M},
                        {"growth_exponent", cfg.op.growth_exponent()},
                        {"ellipticity", check_json(rep.ellipticity)},
                        {"growth", check_json(rep.growth)},
                        {"flux_monotone", check_json(rep.flux_monotone)}};
  std::cout << out.dump(2) << "\n";
  return rep.ellipticity.passed && rep.growth.passed && rep.flux_monotone.passed ? 0 : 1;
}

int cmd_check_exponents(const RunConfig& cfg) {
  const ExponentData ed = cfg.pipeline_config().exponents();
  std::cout << ed.to_json().dump(2) << "\n";
  return 0;
}

int cmd_verify_appendix(const RunConfig& cfg) {
  cfg.op.validate();
  const auto grid = log_grid();
  const ConditionReport rep = verify_appendix_equivalence(cfg.op, grid);
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.passed() ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg, int n) {
  if (n < 1) throw ConfigError("solve: ball index must be >= 1");
  const PipelineConfig pc = cfg.pipeline_config();
  const ExponentData ed = pc.exponents();
  const RadialGrid g(static_cast<double>(n), n * cfg.cells_per_unit, cfg.N_dim);
  FixedPointResult fp =
      fixed_point_convective(cfg.op, g, cfg.reaction, ed, cfg.solver, nullptr, n, g.R());
  nlohmann::json out = {{"ball", n},
                        {"iterations", fp.iterations},
                        {"last_step", fp.last_step},
                        {"trap_radius", fp.trap_radius},
                        {"within_trap", fp.within_trap},
                        {"grad_norms", fp.grad_norms},
                        {"center", fp.u.values.front()}};
  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(cfg.output_dir) / "fields");
    const auto path = fs::path(cfg.output_dir) / "fields" / ("solve_" + std::to_string(n) + ".csv");
    write_csv(fp.u, path.string());
    out["csv"] = path.string();
  }
  std::cout << out.dump(2) << "\n";
  return fp.within_trap ? 0 : 1;
}

int cmd_pipeline(const RunConfig& cfg) {
  const ConditionReport cond = verify_appendix_equivalence(cfg.op, log_grid());
  if (!cond.passed()) {
    std::cout << cond.to_json().dump(2) << "\n";
    std::cerr << "operator fails the equivalence conditions\n";
    return 1;
  }
  const PipelineReport rep = run_pipeline(cfg.pipeline_config());
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.sandwich_ok && rep.positivity_ok ? 0 : 1;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"constructive solver for singular convective equations with "
               "non-homogeneous flux densities"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")->required();

  auto* sc_op = app.add_subcommand("check-operator", "growth and ellipticity summary");
  auto* sc_exp = app.add_subcommand("check-exponents", "derived exponent chain");
  auto* sc_app = app.add_subcommand("verify-appendix", "full condition equivalence report");
  auto* sc_solve = app.add_subcommand("solve", "convective fixed point on one ball");
  int ball = 1;
  sc_solve->add_option("--n", ball, "ball index")->required();
  auto* sc_pipe = app.add_subcommand("pipeline", "full constructive pipeline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    if (sc_op->parsed()) return cmd_check_operator(cfg);
    if (sc_exp->parsed()) return cmd_check_exponents(cfg);
    if (sc_app->parsed()) return cmd_verify_appendix(cfg);
    if (sc_solve->parsed()) return cmd_solve(cfg, ball);
    if (sc_pipe->parsed()) return cmd_pipeline(cfg);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace sspde::cli
