#ifndef HYPERLANG_UNIT_HPP
#define HYPERLANG_UNIT_HPP

#include <compare>
#include <string>
#include <vector>

namespace hyperlang {

// A unit of some tier: tier 0 holds the declared atoms, tier i+1 holds the
// identities of tier-i bonds. Keys are content-derived and unique within a
// tier, so two builds of the same spec agree on every identity.
struct UnitId {
  int tier = 0;
  std::string key;

  friend auto operator<=>(const UnitId&, const UnitId&) = default;
};

// A named property at one tier, as assigned by that tier's observation map.
struct PropertyId {
  int tier = 0;
  std::string name;

  friend auto operator<=>(const PropertyId&, const PropertyId&) = default;
};

using UnitSet = std::vector<UnitId>;  // kept sorted + unique

// Canonical subset key: the sorted member keys. Used to index property
// tables and restriction maps.
std::vector<std::string> subset_key(const UnitSet& units);

// Sorts and dedups in place, giving the canonical representation.
void canonicalize(UnitSet& units);

}  // namespace hyperlang

#endif  // HYPERLANG_UNIT_HPP
