#include "dendrram/errors.h"

namespace dendrram {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kDomain: return "domain";
    case ErrorCategory::kIndex: return "index";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kScale: return "scale";
    case ErrorCategory::kEvaluation: return "evaluation";
  }
  return "unknown";
}

}  // namespace dendrram
