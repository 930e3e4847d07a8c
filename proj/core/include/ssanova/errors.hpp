#pragma once

#include <stdexcept>
#include <string>

namespace ssanova {

/// Machine-readable error classes; the CLI maps these to exit codes and
/// to the "code" field of error reports.
enum class ErrorCode {
  Parameter = 2,           // invalid configuration value
  Ingestion = 3,           // malformed input file
  Domain = 4,              // argument outside the kernel domain [0,1]
  Shape = 5,               // dimension mismatch
  DerivativeOrder = 6,     // requested derivative order >= m
  Numerical = 7,           // factorization / solve failure
  DegenerateResponse = 8,  // response identically zero
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::Ingestion: return "ingestion";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::DerivativeOrder: return "derivative_order";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::DegenerateResponse: return "degenerate_response";
  }
  return "unknown";
}

}  // namespace ssanova
