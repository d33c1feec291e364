#pragma once

#include <exception>
#include <string>
#include <utility>

namespace facebn {

// Every library error carries the process exit code used by the CLI:
// 2 = configuration, 3 = data, 4 = numeric.
enum class ErrorCategory : int { Config = 2, Data = 3, Numeric = 4 };

class Error : public std::exception {
 public:
  Error(ErrorCategory category, std::string message)
      : category_(category), message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }
  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

  // Used by the pipeline to tag the failing stage without losing the
  // concrete exception type (the object is mutated and rethrown).
  void prepend_context(const std::string& context) {
    message_ = context + ": " + message_;
  }

 private:
  ErrorCategory category_;
  std::string message_;
};

#define FACEBN_ERROR_TYPE(Name, Category)                 \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(std::string message)                    \
        : Error(ErrorCategory::Category, std::move(message)) {} \
  };

FACEBN_ERROR_TYPE(ConfigError, Config)

FACEBN_ERROR_TYPE(IoError, Data)
FACEBN_ERROR_TYPE(FormatError, Data)
FACEBN_ERROR_TYPE(SplitError, Data)
FACEBN_ERROR_TYPE(DataError, Data)
FACEBN_ERROR_TYPE(RangeError, Data)
FACEBN_ERROR_TYPE(LengthError, Data)
FACEBN_ERROR_TYPE(EmptyDataError, Data)
FACEBN_ERROR_TYPE(ZeroConfigError, Data)
FACEBN_ERROR_TYPE(TooSmallError, Data)
FACEBN_ERROR_TYPE(OffsetError, Data)

FACEBN_ERROR_TYPE(StepError, Numeric)
FACEBN_ERROR_TYPE(AlphaError, Numeric)
FACEBN_ERROR_TYPE(DimMismatchError, Numeric)

#undef FACEBN_ERROR_TYPE

}  // namespace facebn
