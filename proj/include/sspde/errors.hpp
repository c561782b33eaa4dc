#pragma once

#include <stdexcept>
#include <string>

namespace sspde {

// Reaction evaluated at a nonpositive argument where the model is singular.
class SingularDomainError : public std::domain_error {
public:
  explicit SingularDomainError(const std::string& what) : std::domain_error(what) {}
};

class NoConvergenceError : public std::runtime_error {
public:
  NoConvergenceError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual(last_residual), iterations(iterations) {}
  double last_residual;
  int iterations;
};

// A trapped iteration converged outside its barriers.
class TrapEscapeError : public std::runtime_error {
public:
  TrapEscapeError(const std::string& what, int worst_node, double violation)
      : std::runtime_error(what), worst_node(worst_node), violation(violation) {}
  int worst_node;
  double violation;
};

// Barrier construction or verification failed (reports the worst node).
class ConstructionError : public std::runtime_error {
public:
  ConstructionError(const std::string& what, int worst_node, double violation)
      : std::runtime_error(what), worst_node(worst_node), violation(violation) {}
  int worst_node;
  double violation;
};

class OracleFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Config/schema problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sspde
