#include "hyperlang/error.hpp"

namespace hyperlang {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::LiftBeforeGeneration: return "LiftBeforeGeneration";
    case Errc::EmptyTier: return "EmptyTier";
    case Errc::UnknownUnit: return "UnknownUnit";
    case Errc::TierZero: return "TierZero";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::TierMismatch: return "TierMismatch";
    case Errc::BoundExceeded: return "BoundExceeded";
    case Errc::NotASubset: return "NotASubset";
    case Errc::UnknownProperty: return "UnknownProperty";
    case Errc::MissingRestriction: return "MissingRestriction";
    case Errc::NoRulesForTier: return "NoRulesForTier";
    case Errc::MixedTiers: return "MixedTiers";
    case Errc::IncompatibleGlue: return "IncompatibleGlue";
    case Errc::LengthBoundExceeded: return "LengthBoundExceeded";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::HeightBoundTooSmall: return "HeightBoundTooSmall";
    case Errc::MissingMeaning: return "MissingMeaning";
    case Errc::MissingConstraint: return "MissingConstraint";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ReferenceError: return "ReferenceError";
  }
  return "UnknownError";
}

}  // namespace hyperlang
