#pragma once

#include <stdexcept>
#include <string>

namespace lstsc {

// Base for all library errors. `kind` maps onto CLI exit codes.
class Error : public std::runtime_error {
public:
  enum class Kind { Usage = 2, Io = 3, Contract = 4 };

  Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

// Invalid arguments or configuration supplied by the caller.
class UsageError : public Error {
public:
  explicit UsageError(const std::string& msg) : Error(Kind::Usage, msg) {}
};

// File and stream failures.
class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(Kind::Io, msg) {}
};

// Violated numeric or dimensional contract.
class ContractError : public Error {
public:
  explicit ContractError(const std::string& msg) : Error(Kind::Contract, msg) {}
};

}  // namespace lstsc
