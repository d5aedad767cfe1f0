#ifndef HYPERLANG_HYPERSTRUCTURE_HPP
#define HYPERLANG_HYPERSTRUCTURE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hyperlang/bond.hpp"
#include "hyperlang/presheaf.hpp"
#include "hyperlang/unit.hpp"

namespace hyperlang {

// One tier of the tower: its observation map, its bond rules, and (once
// generated) its realized bonds. Bonds stored at tier i have supports at
// tier i and identities at tier i+1.
struct TierRecord {
  PropertyAssignment properties = PropertyAssignment::make_table(0, false);
  std::vector<BondRule> rules;
  std::size_t length_bound = 16;
  std::vector<Bond> bonds;  // canonical enumeration order
  bool generated = false;
};

// The full tower. Build steps are functional: lift/generate return a new
// value, so a Hyperstructure in hand is immutable and all read operations
// (boundary, derivation_tree, lookups) are safe to call concurrently.
class Hyperstructure {
 public:
  Hyperstructure(std::vector<std::string> atom_keys, std::vector<TierRecord> tiers);

  // Number of tier records (the declared height of the tower).
  int height() const { return static_cast<int>(tiers_.size()); }

  // Unit levels currently built: 0..built_levels()-1. Level 0 always exists.
  int built_levels() const { return static_cast<int>(units_.size()); }

  const UnitSet& units(int tier) const;
  const TierRecord& tier(int index) const;
  bool has_unit(const UnitId& unit) const;

  // The realized bond promoted to `unit`, if any.
  const Bond* find_bond(const UnitId& unit) const;

  // All realized bonds of every generated tier, in tier order.
  std::vector<const Bond*> all_bonds() const;

  // Internal to build steps; kept public for spec_io's parse realization.
  Hyperstructure with_bonds(int tier, std::vector<Bond> bonds) const;

 private:
  std::vector<TierRecord> tiers_;
  std::vector<UnitSet> units_;

  friend Hyperstructure lift(const Hyperstructure&, int tier);
};

// A derivation node: a bond together with one child per pattern member, in
// pattern order. Leaves are tier-0 atoms. The depth of the tree equals the
// root's tier, since every member sits exactly one tier below its bond.
struct DerivationNode {
  UnitId unit;
  std::optional<Bond> bond;  // nullopt: tier-0 leaf
  std::vector<DerivationNode> children;

  bool is_leaf() const { return !bond.has_value(); }
  std::size_t depth() const;
  std::vector<std::string> leaf_sequence() const;  // frontier, left to right

  friend bool operator==(const DerivationNode&, const DerivationNode&) = default;
};

using DerivationTree = DerivationNode;

// Canonical text form of a tree (used for ordering and deduplication).
std::string tree_encoding(const DerivationNode& node);

// --- Operations on the tower -------------------------------------------

// All bonds a rule set generates from one situation: patterns drawn from
// sit.support whose guard accepts sit.property. Deterministic shortlex
// order. Errors: NoRulesForTier when the tier has no rule set at all.
std::vector<Bond> generate_bonds(const std::vector<BondRule>& rules,
                                 const PropertyAssignment& omega,
                                 const Situation& sit,
                                 std::size_t length_bound = 16);

// The emitted (next-tier) property of a realized bond, from its rule.
std::optional<std::string> emitted_property(const Hyperstructure& h, const Bond& bond);

// Canonical bounded enumeration at a tier: every bond of pattern length <=
// length_bound, each exactly once, whose witnessing situation is its own
// support set. Shortlex by pattern, then rule tag, then property.
std::vector<Bond> enumerate_bonds(const Hyperstructure& h, int tier,
                                  std::size_t length_bound);

// Realizes the canonical enumeration at `tier` (bound defaults to the
// tier's declared length bound) and marks the tier generated.
Hyperstructure generate_tier(const Hyperstructure& h, int tier,
                             std::optional<std::size_t> length_bound = std::nullopt);

// Promotes tier i's bonds to tier i+1 units and injects their emitted
// properties into tier i+1's observation map. Idempotent when tier i+1 was
// already built from the same bond set. Errors: LiftBeforeGeneration,
// EmptyTier.
Hyperstructure lift(const Hyperstructure& h, int tier);

// The boundary map: the unordered set of units a bond binds. Errors:
// TierZero for atoms, UnknownUnit for anything not a realized bond.
UnitSet boundary(const Hyperstructure& h, const UnitId& unit);

// Iterated boundary from a top bond down to atoms, one child per pattern
// member. Errors: UnknownUnit, TierZero.
DerivationTree derivation_tree(const Hyperstructure& h, const UnitId& top);

// generate_tier for every declared tier followed by lift: the full tower.
Hyperstructure build_all(Hyperstructure h);

}  // namespace hyperlang

#endif  // HYPERLANG_HYPERSTRUCTURE_HPP
