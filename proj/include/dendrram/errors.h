#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dendrram {

// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  kDomain = 1,
  kIndex,
  kConfig,
  kParse,
  kIo,
  kNumerical,
  kScale,
  kEvaluation,
};

std::string_view CategoryName(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define DENDRRAM_DEFINE_ERROR(Name, Category)                   \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& message)                   \
        : Error(ErrorCategory::Category, message) {}            \
  };

DENDRRAM_DEFINE_ERROR(DomainError, kDomain)
DENDRRAM_DEFINE_ERROR(IndexError, kIndex)
DENDRRAM_DEFINE_ERROR(ConfigError, kConfig)
DENDRRAM_DEFINE_ERROR(ParseError, kParse)
DENDRRAM_DEFINE_ERROR(IoError, kIo)
DENDRRAM_DEFINE_ERROR(NumericalError, kNumerical)
DENDRRAM_DEFINE_ERROR(ScaleError, kScale)
DENDRRAM_DEFINE_ERROR(EvaluationError, kEvaluation)

#undef DENDRRAM_DEFINE_ERROR

}  // namespace dendrram
