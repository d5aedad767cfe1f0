#ifndef HYPERLANG_BOND_HPP
#define HYPERLANG_BOND_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperlang/presheaf.hpp"
#include "hyperlang/unit.hpp"

namespace hyperlang {

// A bond glues a collection of tier-i units into one tier-(i+1) unit.
// The pattern keeps the gluing shape (a sequence for concatenative bonds,
// a sorted set otherwise); the boundary map forgets order, nothing else.
struct Bond {
  UnitId id;                    // tier = support tier + 1
  bool ordered = true;          // sequence pattern vs. unordered support
  std::vector<UnitId> pattern;  // nonempty; all members one tier below id
  PropertyId property;          // the observation under which it was formed
  std::string rule_tag;

  // Unordered support: the boundary image of this bond.
  UnitSet support_set() const;

  int support_tier() const { return id.tier - 1; }

  friend bool operator==(const Bond&, const Bond&) = default;
};

// Builds a bond with a content-derived identity. The key encodes the rule
// tag, the pattern member keys in pattern order, and the witnessing
// property, so identical content yields identical identities across runs:
//   tag(k1,k2,...)@prop   for ordered patterns
//   tag{k1,k2,...}@prop   for unordered supports (members sorted)
Bond make_bond(const std::string& rule_tag, bool ordered,
               std::vector<UnitId> pattern, PropertyId property);

// The property-stripped, human-readable form of a bond key, used by spec
// documents to name derivable bonds: tag(child_ref,...). Atoms are their
// own reference.
std::string bond_ref_of_key(const std::string& key);
std::string bond_ref(const Bond& bond);

// A collection of units together with an observed property: the domain
// element of a bond assignment.
struct Situation {
  UnitSet support;      // canonical (sorted, unique), nonempty
  PropertyId property;  // must be observable on support
};

// Validates support shape and that the property is actually observable.
Situation make_situation(const PropertyAssignment& omega, UnitSet support,
                         const std::string& property);

struct UnitMatcher {
  enum class Kind { Any, Key, Property };
  Kind kind = Kind::Any;
  std::string value;

  bool matches(const UnitId& unit, const PropertyAssignment& omega) const;
};

// One slot of a concatenative pattern: a matcher repeated between min_rep
// and max_rep times. An absent max_rep means "up to the length bound".
struct PatternElement {
  UnitMatcher matcher;
  std::size_t min_rep = 1;
  std::optional<std::size_t> max_rep = 1;
};

// Unordered-support matcher for SETBIND rules.
struct SupportMatcher {
  std::size_t min_size = 1;
  std::optional<std::size_t> max_size;
  std::optional<std::vector<std::string>> of_keys;       // sorted
  std::optional<std::vector<std::string>> keys_exactly;  // sorted

  bool matches(const std::vector<std::string>& subset) const;
};

// An explicit bond listed by a TABLE rule (member keys, resolved at
// generation time against the tier's units).
struct TableEntry {
  bool ordered = true;
  std::vector<std::string> member_keys;
  std::string property;
};

// One way of generating bonds at a tier.
struct BondRule {
  enum class Kind { Concat, SetBind, Table };

  int tier = 0;
  Kind kind = Kind::Concat;
  std::string tag;
  std::string emit;                // property given to generated bonds at the next tier
  std::vector<std::string> guard;  // accepted situation properties; empty = any

  std::vector<PatternElement> pattern;  // Concat
  SupportMatcher support;               // SetBind
  std::vector<TableEntry> entries;      // Table

  bool guard_accepts(const std::string& property) const;
};

// How a sequence of bonds composes into one.
struct GlueSpec {
  enum class Mode { ConcatJoin, SetUnion };

  Mode mode = Mode::ConcatJoin;
  // Key: the sorted distinct property names of the inputs, joined by ",".
  std::map<std::string, std::string> resolution;
  std::optional<std::string> default_property;
  std::size_t length_bound = 16;
};

// b = b1 [] b2 [] ... [] bk. A singleton sequence composes to the identical
// bond. ConcatJoin juxtaposes sequence patterns; SetUnion unions supports.
// The composite's property comes from the glue's resolution map (veto via
// IncompatibleGlue when no resolution applies). Composites stay at the tier
// of their factors; only lifting promotes.
Bond compose(std::span<const Bond> bonds, const GlueSpec& glue);

}  // namespace hyperlang

#endif  // HYPERLANG_BOND_HPP
