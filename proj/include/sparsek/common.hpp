#pragma once

#include <stdexcept>
#include <string>

namespace sparsek {

inline constexpr const char* kVersion = "0.1.0";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySet : public Error { public: using Error::Error; };
class ZeroWeight : public Error { public: using Error::Error; };
class NegativeWeight : public Error { public: using Error::Error; };
class DuplicateEdge : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class BadK : public Error { public: using Error::Error; };
class BadParams : public Error { public: using Error::Error; };
class BadProblem : public Error { public: using Error::Error; };
class NotAPartition : public Error { public: using Error::Error; };
class NotPsd : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class NotUnitNorm : public Error { public: using Error::Error; };
class EmptyCandidate : public Error { public: using Error::Error; };
class InsufficientMass : public Error { public: using Error::Error; };
class TooLarge : public Error { public: using Error::Error; };
class IsolatedVertex : public Error { public: using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace sparsek
