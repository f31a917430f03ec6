#pragma once

#include <stdexcept>
#include <string>

namespace mhrag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data: bad dimensions, duplicate ids,
/// non-finite values, unparsable files.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse: invalid arguments or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Failure of something outside the process (LLM endpoint, embedding
/// command). Carries the provider's message verbatim.
class ExternalServiceError : public Error {
 public:
  using Error::Error;
};

class QuestionGenerationError : public ExternalServiceError {
 public:
  using ExternalServiceError::ExternalServiceError;
};

}  // namespace mhrag
