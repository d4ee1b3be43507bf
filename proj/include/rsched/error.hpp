#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsched {

// Argument outside the valid domain of an operation (bad index, empty input, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SGD blew up (non-finite RMSE).
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, double eta)
      : std::runtime_error(what + " (eta=" + std::to_string(eta) + ")"), eta_(eta) {}
  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Power budget cannot be met even with every batch core switched off.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsched
