#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgflow {

enum class ErrorKind {
  InvalidArgument,
  IllConditioned,
  RepeatedRoots,
  SingularPade,
  DomainError,
  Overflow,
  DerivativeVanishes,
  NoConvergence,
  NegativeBase,
  LandauPole,
  NoSolution,
  StiffnessBudget,
  PoleEncountered,
  NoBracket,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::RepeatedRoots: return "RepeatedRoots";
    case ErrorKind::SingularPade: return "SingularPade";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DerivativeVanishes: return "DerivativeVanishes";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NegativeBase: return "NegativeBase";
    case ErrorKind::LandauPole: return "LandauPole";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::StiffnessBudget: return "StiffnessBudget";
    case ErrorKind::PoleEncountered: return "PoleEncountered";
    case ErrorKind::NoBracket: return "NoBracket";
  }
  return "Unknown";
}

/// Every numerical failure in the library is reported through this type; the
/// kind names the failing condition so the CLI can surface it verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace rgflow
