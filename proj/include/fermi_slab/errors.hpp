#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fslab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable tag, used in CLI error JSON.
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

class GridMismatch : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "grid_mismatch"; }
};

class IoError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "io_error"; }
};

/// Coulomb solves require (weakly) neutral charge; carries the measured total.
class NeutralityError : public Error {
public:
  NeutralityError(const std::string& what, double total_charge)
      : Error(what), total_charge_(total_charge) {}
  double total_charge() const noexcept { return total_charge_; }
  const char* kind() const noexcept override { return "neutrality"; }

private:
  double total_charge_;
};

/// Eigensolver failure that survived the dense cluster fallback.
class SpectralFailure : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "spectral_failure"; }
};

class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, std::vector<double> residual_history)
      : Error(what), residual_history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const noexcept { return residual_history_; }
  const char* kind() const noexcept override { return "non_convergence"; }

private:
  std::vector<double> residual_history_;
};

/// Parse or semantic error in a run configuration. `location` is
/// "file:line" (or "<override>"), `key` the dotted key when known.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, std::string location, std::string key = {})
      : Error(what), location_(std::move(location)), key_(std::move(key)) {}
  const std::string& location() const noexcept { return location_; }
  const std::string& key() const noexcept { return key_; }
  const char* kind() const noexcept override { return "config"; }

private:
  std::string location_;
  std::string key_;
};

}  // namespace fslab
