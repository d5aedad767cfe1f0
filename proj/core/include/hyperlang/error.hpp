#ifndef HYPERLANG_ERROR_HPP
#define HYPERLANG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hyperlang {

// Every failure the engine can signal. The CLI maps these to exit code 2;
// domain negatives (rejected input, no section, discrepancies) are reported
// through return values, not exceptions.
enum class Errc {
  // core model
  LiftBeforeGeneration,
  EmptyTier,
  UnknownUnit,
  TierZero,
  // property assignments
  EmptySupport,
  TierMismatch,
  BoundExceeded,
  NotASubset,
  UnknownProperty,
  MissingRestriction,
  // bond engine
  NoRulesForTier,
  MixedTiers,
  IncompatibleGlue,
  LengthBoundExceeded,
  // grammar bridge
  UnknownToken,
  HeightBoundTooSmall,
  // globalizer
  MissingMeaning,
  MissingConstraint,
  // spec documents
  SyntaxError,
  SchemaError,
  ReferenceError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hyperlang

#endif  // HYPERLANG_ERROR_HPP
