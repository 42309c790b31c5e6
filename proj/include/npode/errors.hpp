#pragma once

#include <stdexcept>
#include <string>

namespace npode {

// Error taxonomy shared by every module. The CLI maps each class to a
// distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape/dimension disagreement between operands.
struct DimensionError : Error {
  using Error::Error;
};

// Mathematically invalid input (log of non-positive, sigma <= 0, ...).
struct DomainError : Error {
  using Error::Error;
};

// Caller broke an API precondition (empty context, non-scalar loss, ...).
struct ContractError : Error {
  using Error::Error;
};

// Invalid or unsupported configuration value.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input data (CSV parse failures, NaN columns, ...).
struct DataError : Error {
  using Error::Error;
};

// Optimization blew up (NaN loss); carries the iteration index in the message.
struct TrainingError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace npode
