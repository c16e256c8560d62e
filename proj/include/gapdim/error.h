#ifndef GAPDIM_ERROR_H_
#define GAPDIM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapdim {

// Every contract violation in the library maps to one of these codes. The
// CLI uses them to pick diagnostics; tests assert on them.
enum class ErrorCode {
  kParse,
  kInvalidInterval,
  kInvalidResolution,
  kSegmentIndexOutOfRange,
  kRegularityUndefined,
  kInvalidLevelPair,
  kInvalidMesh,
  kInvalidGeneratorSpec,
  kInvalidFunction,
  kInvalidClass,
  kMalformedCertificate,
  kEmptyPointSet,
  kInvalidCap,
  kJoinNotFull,
  kStrictnessLost,
  kNotNonAdjacent,
  kNotDisjointFamily,
  kPtreePreconditionViolated,
  kMissingLabel,
  kMissingPayload,
  kNotErgodic,
  kInvalidProcess,
  kNoMarginalExpectation,
  kInvalidSplit,
  kInvalidArgument,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gapdim

#endif  // GAPDIM_ERROR_H_
