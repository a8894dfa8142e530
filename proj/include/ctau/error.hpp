#pragma once
#include <stdexcept>
#include <string>

namespace ctau {

/* Error taxonomy shared by library and CLI; kind values are the CLI exit codes. */
struct Error : std::runtime_error {
  enum class Kind : int { Parse = 2, Precondition = 3, Budget = 4, Inconclusive = 5 };
  Kind kind;
  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] inline void parse_error(const std::string& m) { throw Error(Error::Kind::Parse, m); }
[[noreturn]] inline void precondition_error(const std::string& m) { throw Error(Error::Kind::Precondition, m); }
[[noreturn]] inline void budget_error(const std::string& m) { throw Error(Error::Kind::Budget, m); }
[[noreturn]] inline void inconclusive_error(const std::string& m) { throw Error(Error::Kind::Inconclusive, m); }

}  // namespace ctau
