#ifndef HYPERLANG_GLOBALIZER_HPP
#define HYPERLANG_GLOBALIZER_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperlang/hyperstructure.hpp"

namespace hyperlang {

using MeaningId = std::string;

// Levelwise meaning assignment: bond identity -> candidate meanings, in
// declared order (the order fixes lexicographic tie-breaking).
struct MeaningAssignment {
  int tier = 1;
  std::map<std::string, std::vector<MeaningId>> table;  // key: bond key
};

// One admissible combination at a bond: one meaning per child, plus the
// bond's own meaning. For tier-1 bonds (children are atoms) the child list
// is empty and the tuple just filters the bond's own meaning.
struct AdmissibleTuple {
  std::vector<MeaningId> children;
  MeaningId parent;
};

// Per-bond admissibility. Required for every internal bond of a tree
// (tier >= 2); optional for tier-1 bonds.
struct CompatibilityRelation {
  std::map<std::string, std::vector<AdmissibleTuple>> entries;  // key: bond key
};

// A choice of one meaning per bond of a derivation, consistent across
// tiers. A bond identity occurring several times in the tree is one node
// with one meaning.
struct MeaningSection {
  std::map<std::string, MeaningId> assignment;  // key: bond key

  friend bool operator==(const MeaningSection&, const MeaningSection&) = default;
};

struct GlobalizerResult {
  std::optional<MeaningSection> section;
  // When no section exists: the minimal bond (lowest tier, then first in
  // traversal order) at which every admissible tuple is ruled out by the
  // children's feasible meaning sets, computed bottom-up.
  std::optional<UnitId> certificate;

  bool found() const { return section.has_value(); }
};

// Exhaustive backtracking search with bottom-up feasible-set pruning.
// Returns the lexicographically first section (bonds in depth-first
// pre-order, meanings in declared order), or NONE with a certificate.
// Errors: MissingMeaning, MissingConstraint.
GlobalizerResult find_globalizer(const DerivationTree& tree,
                                 const std::vector<MeaningAssignment>& lambdas,
                                 const CompatibilityRelation& constraints);

struct EnumerationResult {
  std::vector<MeaningSection> sections;  // lexicographic order
  bool truncated = false;
  std::size_t total = 0;  // exact when not truncated
};

// All sections in lexicographic order, truncated at `limit` (>= 1).
EnumerationResult enumerate_globalizers(const DerivationTree& tree,
                                        const std::vector<MeaningAssignment>& lambdas,
                                        const CompatibilityRelation& constraints,
                                        std::size_t limit);

struct VerifyResult {
  bool ok = false;
  std::string reason;  // empty when ok
};

// Independent checker: direct evaluation of totality, membership, and
// admissibility. Deliberately shares nothing with the search path.
VerifyResult verify_section(const DerivationTree& tree,
                            const std::vector<MeaningAssignment>& lambdas,
                            const CompatibilityRelation& constraints,
                            const MeaningSection& section);

}  // namespace hyperlang

#endif  // HYPERLANG_GLOBALIZER_HPP
