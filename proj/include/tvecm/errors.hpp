#pragma once
#include <stdexcept>
#include <string>

namespace tvecm {

// Error taxonomy.  The CLI maps IngestionError/ConfigError to exit code 2
// (bad input or configuration) and everything else thrown during a
// computation to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed input files (missing cells, bad numerics, duplicate dates, ...)
struct IngestionError : Error { using Error::Error; };
// sample-size / dimension constraint violated
struct SizeError : Error { using Error::Error; };
// argument outside its mathematical domain
struct DomainError : Error { using Error::Error; };
// singular system, divergence, failed factorization
struct NumericalError : Error { using Error::Error; };
// bad run configuration (unknown keys, out-of-range options)
struct ConfigError : Error { using Error::Error; };

}  // namespace tvecm
