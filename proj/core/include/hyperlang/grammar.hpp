#ifndef HYPERLANG_GRAMMAR_HPP
#define HYPERLANG_GRAMMAR_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hyperlang/hyperstructure.hpp"

namespace hyperlang {

struct CfgProduction {
  std::string head;
  std::vector<std::string> body;  // nonempty; no epsilon productions
};

// A context-free grammar. Terminals become tier-0 atoms; bodies are
// nonempty and unit productions must not form cycles.
struct Cfg {
  std::vector<std::string> terminals;
  std::vector<std::string> nonterminals;
  std::vector<CfgProduction> productions;
  std::string start;
};

// Validates symbol sets, production shape, and acyclicity of unit
// productions. Errors: ReferenceError / SchemaError with a description.
void validate_cfg(const Cfg& g);

// Deterministic rule tag of a production: "head->sym.sym.sym".
std::string production_tag(const CfgProduction& p);

// The stratified embedding of a grammar: parse-tree nodes of height k land
// at tier k. Each production becomes a CONCAT rule at every tier, matching
// children by their symbol property; unary lift rules ("lift:X") pad
// shorter subtrees so a production's children always share one tier. Every
// situation is observed under the uniform property "syms", so each pattern
// realizes exactly one bond.
struct StratifiedGrammar {
  Cfg grammar;
  std::vector<std::string> atom_keys;
  std::vector<TierRecord> tiers;  // one record per tier 0..height_bound-1
  int height_bound = 1;
};

// Builds the stratified embedding. The number of distinct production rule
// groups equals the number of productions. Errors: see validate_cfg.
StratifiedGrammar from_cfg(const Cfg& g, int height_bound);

struct ParseResult {
  std::vector<std::string> tokens;
  std::vector<DerivationTree> derivations;  // deterministic order, deduplicated
  bool accepted = false;
};

// Parses a token sequence into stratified derivation trees with root
// property = start symbol. Each distinct parse tree is returned once, as
// its minimal stratification (every node at its natural height). Errors:
// UnknownToken; HeightBoundTooSmall when the input is derivable but every
// tree needs a tier beyond the bound. Rejection is accepted=false.
ParseResult parse_tokens(const StratifiedGrammar& sg,
                         const std::vector<std::string>& tokens);

// Same, also returning the hyperstructure realizing the derivations' bonds.
std::pair<ParseResult, Hyperstructure> parse_tokens_realized(
    const StratifiedGrammar& sg, const std::vector<std::string>& tokens);

// Independent oracle: all strings of length <= max_len derivable in g,
// by exhaustive breadth-first expansion of sentential forms with pruning.
// Shares no code with the stratified parser.
std::vector<std::vector<std::string>> oracle_language(const Cfg& g,
                                                      std::size_t max_len);

// Minimal stratified-derivation height of `tokens` in g, if derivable.
// Dynamic program over spans; used for diagnostics and bound justification.
std::optional<int> min_derivation_height(const Cfg& g,
                                         const std::vector<std::string>& tokens);

struct Discrepancy {
  std::vector<std::string> tokens;
  bool oracle_accepts = false;
  bool parser_accepts = false;
};

struct DiscrepancyReport {
  std::size_t max_len = 0;
  int height_bound = 0;
  std::size_t strings_checked = 0;
  std::string justification;  // why the height bound suffices (or not)
  std::vector<Discrepancy> mismatches;

  bool empty() const { return mismatches.empty(); }
};

// Compares stratified parsing against the expansion oracle on every string
// over the terminals of length <= max_len. The stratified side may be a
// (possibly corrupted) embedding built separately from `g`.
DiscrepancyReport cross_validate(const StratifiedGrammar& sg, const Cfg& g,
                                 std::size_t max_len);
DiscrepancyReport cross_validate(const Cfg& g, std::size_t max_len,
                                 int height_bound);

}  // namespace hyperlang

#endif  // HYPERLANG_GRAMMAR_HPP
