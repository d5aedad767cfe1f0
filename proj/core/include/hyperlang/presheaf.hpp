#ifndef HYPERLANG_PRESHEAF_HPP
#define HYPERLANG_PRESHEAF_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hyperlang/unit.hpp"

namespace hyperlang {

// One predicate rule of a rule-based property assignment. A subset S matches
// when its size lies in [min_size, max_size], every member key is drawn from
// `of_keys` (when given), and the member key set equals `keys_exactly` (when
// given). Matching subsets receive all `yields` properties.
struct PropertyRule {
  std::size_t min_size = 1;
  std::optional<std::size_t> max_size;
  std::optional<std::vector<std::string>> of_keys;        // sorted
  std::optional<std::vector<std::string>> keys_exactly;   // sorted
  std::vector<std::string> yields;
};

enum class ViolationKind {
  Identity,      // declared identity restriction is not the identity
  Composition,   // restricting S->S' then S'->S'' differs from S->S''
  Missing,       // a required restriction map has no entry
  Target,        // a restriction image is not in the target subset's table
};

struct LawViolation {
  ViolationKind kind;
  std::vector<std::string> set_outer;   // S
  std::vector<std::string> set_mid;     // S'  (empty for Target/Missing on a pair)
  std::vector<std::string> set_inner;   // S''
  std::string property;
  std::string detail;
};

struct LawReport {
  bool presheaf_mode = false;   // false: laws were skipped, see detail
  std::size_t chains_checked = 0;
  std::vector<LawViolation> violations;

  bool compliant() const { return violations.empty(); }
};

// The observation map of one tier: finite nonempty subsets of the tier's
// units to finite property sets, optionally with restriction maps.
//
// Immutable once built; observe/restrict may be called concurrently.
class PropertyAssignment {
 public:
  enum class Mode { Table, Rules };

  static PropertyAssignment make_table(int tier, bool presheaf);
  static PropertyAssignment make_rules(int tier, std::vector<PropertyRule> rules,
                                       std::size_t bound);

  int tier() const { return tier_; }
  Mode mode() const { return mode_; }
  bool presheaf() const { return presheaf_; }
  std::size_t bound() const { return bound_; }

  // Table-mode construction. Property names keep their declared order.
  void add_entry(const std::vector<std::string>& subset,
                 const std::vector<std::string>& properties);
  void add_restriction(const std::vector<std::string>& from,
                       const std::vector<std::string>& to,
                       const std::string& property, const std::string& image);

  // Emitted singleton properties injected when a lower tier is lifted.
  // They participate in observe() but carry no restriction structure.
  void inject_singleton(const std::string& unit_key, const std::string& property);

  // All property names this assignment can produce (declared + injected).
  std::vector<std::string> declared_properties() const;

  // The meaning of a collection: deterministic, sorted by name, possibly
  // empty. Errors: EmptySupport, TierMismatch, BoundExceeded.
  std::vector<PropertyId> observe(const UnitSet& support) const;

  bool observes(const UnitSet& support, const std::string& property) const;

  // Restriction of a property along S_sub <= S. The identity inclusion is
  // always the identity map. Errors: NotASubset, UnknownProperty,
  // MissingRestriction.
  PropertyId restrict(const UnitSet& set, const UnitSet& subset,
                      const PropertyId& property) const;

  // Exhaustively checks identity and composition of the declared restriction
  // maps over all chains S'' <= S' <= S of declared subsets with |S| <=
  // size_bound. Non-presheaf assignments produce a skipped report.
  LawReport check_presheaf_laws(std::size_t size_bound) const;

  // Evaluates a rule-based assignment into an equivalent extensional table
  // over all nonempty subsets of `universe` up to the evaluation bound.
  PropertyAssignment materialize(const UnitSet& universe) const;

  // Declared table subsets in canonical order (table mode).
  std::vector<std::vector<std::string>> table_subsets() const;

  struct RestrictionEntry {
    std::vector<std::string> from;
    std::vector<std::string> to;
    std::string property;
    std::string image;
  };

  // Views for serialization and validation.
  const std::map<std::vector<std::string>, std::vector<std::string>>& table() const {
    return table_;
  }
  const std::vector<PropertyRule>& property_rules() const { return rules_; }
  std::vector<RestrictionEntry> restriction_entries() const;

 private:
  PropertyAssignment() = default;

  std::vector<std::string> observe_names(const std::vector<std::string>& subset) const;

  int tier_ = 0;
  Mode mode_ = Mode::Table;
  bool presheaf_ = false;
  std::size_t bound_ = 6;  // rule-based evaluation bound on |S|
  std::map<std::vector<std::string>, std::vector<std::string>> table_;
  std::vector<PropertyRule> rules_;
  std::map<std::string, std::vector<std::string>> injected_;
  // (S, S', property on S) -> property on S'
  std::map<std::tuple<std::vector<std::string>, std::vector<std::string>, std::string>,
           std::string>
      restrictions_;
};

}  // namespace hyperlang

#endif  // HYPERLANG_PRESHEAF_HPP
