#ifndef HYPERLANG_SPEC_IO_HPP
#define HYPERLANG_SPEC_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperlang/globalizer.hpp"
#include "hyperlang/grammar.hpp"
#include "hyperlang/hyperstructure.hpp"

namespace hyperlang {

struct TierSpec {
  PropertyAssignment properties = PropertyAssignment::make_table(0, false);
  std::vector<BondRule> rules;
  std::size_t length_bound = 16;
};

// Meaning tables and admissibility tuples as written in a document: bonds
// are named by derivable-pattern references, e.g. "w1(a,b)". They resolve
// to realized bond identities at globalize time.
struct MeaningSpec {
  int tier = 1;
  std::map<std::string, std::vector<MeaningId>> table;  // key: bond reference
};

struct CompatibilitySpec {
  std::map<std::string, std::vector<AdmissibleTuple>> entries;  // key: bond reference
};

// A validated hyperstructure specification.
struct SpecDocument {
  int version = 1;
  std::vector<std::string> atoms;
  std::vector<TierSpec> tiers;
  std::optional<Cfg> grammar;
  int height_bound = 8;  // grammar stratification depth
  std::optional<std::string> start_property;
  std::vector<MeaningSpec> meanings;
  CompatibilitySpec compatibility;
};

// Parses and validates a JSON document. Errors: SyntaxError for malformed
// JSON, SchemaError with the field path for shape problems, ReferenceError
// for dangling names.
SpecDocument load_spec(const std::string& text);

// Canonical serialization; load_spec(save_spec(d)) reproduces d.
std::string save_spec(const SpecDocument& doc);

// The declared tower (atoms + tier records), not yet generated.
Hyperstructure declared_hyperstructure(const SpecDocument& doc);

// Generates and lifts every declared tier.
Hyperstructure build_hyperstructure(const SpecDocument& doc);

// Parses tokens against the document: grammar documents go through the
// stratified embedding; plain documents match realized sequence bonds of
// the built tower (filtered by start_property when declared).
ParseResult parse_text(const SpecDocument& doc, const std::vector<std::string>& tokens);
std::pair<ParseResult, Hyperstructure> parse_text_realized(
    const SpecDocument& doc, const std::vector<std::string>& tokens);

// Resolves the document's reference-keyed meaning tables against the bonds
// of the given trees. Unreferenced table entries are dropped; unresolved
// bonds surface later as MissingMeaning/MissingConstraint.
std::pair<std::vector<MeaningAssignment>, CompatibilityRelation> resolve_meanings(
    const SpecDocument& doc, const std::vector<DerivationTree>& trees);

// DOT rendering: a directed tree, one rank per tier, edges labeled with the
// boundary map that dissolves them.
std::string export_derivation_dot(const DerivationTree& tree);

// JSON rendering; import reproduces an identical tree.
std::string export_derivation_json(const DerivationTree& tree);
DerivationTree import_derivation_json(const std::string& text);

// Bundled demo documents, name -> JSON text.
const std::vector<std::pair<std::string, std::string>>& bundled_fixtures();
std::string fixture(const std::string& name);

}  // namespace hyperlang

#endif  // HYPERLANG_SPEC_IO_HPP
