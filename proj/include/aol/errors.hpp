#pragma once

#include <stdexcept>
#include <string>

namespace aol {

// Raised when a scenario or loop configuration violates a startup invariant.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when the plant state goes non-finite; the episode loop catches it
// and terminates the episode as a fault.
class SimulationFault : public std::runtime_error {
  public:
    explicit SimulationFault(const std::string& msg) : std::runtime_error(msg) {}
};

class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_;
};

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aol
