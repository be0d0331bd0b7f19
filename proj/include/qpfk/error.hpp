#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qpfk {

enum class ErrorKind {
    symmetry_violation,
    unsupported_resolution,
    resolution_mismatch,
    solvability_violation,
    small_divisor_breach,
    near_resonance,
    degenerate_conjugacy,
    divergence,
    bracket,
    seed_failure,
    invalid_argument,
    config,
    io,
};

const char* to_string(ErrorKind kind);

// Base for every error raised by the library. The kind lets callers (the CLI
// in particular) map failures onto exit codes without a cascade of catches.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

class SmallDivisorBreach : public Error {
  public:
    SmallDivisorBreach(std::vector<int> k, double divisor);
    const std::vector<int>& index() const noexcept { return k_; }
    double divisor() const noexcept { return divisor_; }

  private:
    std::vector<int> k_;
    double divisor_;
};

class DegenerateConjugacy : public Error {
  public:
    DegenerateConjugacy(double min_l, int iteration = -1);
    double min_l() const noexcept { return min_l_; }
    int iteration() const noexcept { return iteration_; }

  private:
    double min_l_;
    int iteration_;
};

class ConfigError : public Error {
  public:
    ConfigError(std::string field, const std::string& message)
        : Error(ErrorKind::config, "config field '" + field + "': " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

}  // namespace qpfk
