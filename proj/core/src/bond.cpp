#include "hyperlang/bond.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "hyperlang/error.hpp"

namespace hyperlang {

namespace {

constexpr const char* kJoinTag = "cjoin";
constexpr const char* kUnionTag = "sunion";

std::string pattern_key(const std::string& tag, bool ordered,
                        const std::vector<UnitId>& pattern,
                        const std::string& property) {
  std::ostringstream out;
  out << tag << (ordered ? '(' : '{');
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i) out << ',';
    out << pattern[i].key;
  }
  out << (ordered ? ')' : '}') << '@' << property;
  return out.str();
}

}  // namespace

UnitSet Bond::support_set() const {
  UnitSet support = pattern;
  canonicalize(support);
  return support;
}

Bond make_bond(const std::string& rule_tag, bool ordered, std::vector<UnitId> pattern,
               PropertyId property) {
  if (pattern.empty()) fail(Errc::EmptySupport, "a bond must bind at least one unit");
  int tier = pattern.front().tier;
  for (const auto& u : pattern)
    if (u.tier != tier)
      fail(Errc::MixedTiers, "bond support mixes tiers " + std::to_string(tier) +
                                 " and " + std::to_string(u.tier));
  if (!ordered) {
    std::sort(pattern.begin(), pattern.end());
    pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());
  }
  Bond b;
  b.ordered = ordered;
  b.property = property;
  b.rule_tag = rule_tag;
  b.id = UnitId{tier + 1, pattern_key(rule_tag, ordered, pattern, property.name)};
  b.pattern = std::move(pattern);
  return b;
}

namespace {

// Splits the inside of a bond key at top-level commas.
std::vector<std::string> split_members(const std::string& inside) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string current;
  for (char c : inside) {
    if (c == '(' || c == '{') depth++;
    if (c == ')' || c == '}') depth--;
    if (c == ',' && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

}  // namespace

std::string bond_ref_of_key(const std::string& key) {
  auto open = key.find_first_of("({");
  if (open == std::string::npos) return key;  // an atom
  char close_char = key[open] == '(' ? ')' : '}';
  auto close = key.rfind(close_char);
  if (close == std::string::npos || close < open) return key;
  std::string tag = key.substr(0, open);
  auto members = split_members(key.substr(open + 1, close - open - 1));
  std::ostringstream out;
  out << tag << key[open];
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out << ',';
    out << bond_ref_of_key(members[i]);
  }
  out << close_char;
  return out.str();
}

std::string bond_ref(const Bond& bond) { return bond_ref_of_key(bond.id.key); }

Situation make_situation(const PropertyAssignment& omega, UnitSet support,
                         const std::string& property) {
  canonicalize(support);
  if (!omega.observes(support, property))
    fail(Errc::UnknownProperty,
         "situation property '" + property + "' is not observable on its support");
  return Situation{std::move(support), PropertyId{omega.tier(), property}};
}

bool UnitMatcher::matches(const UnitId& unit, const PropertyAssignment& omega) const {
  switch (kind) {
    case Kind::Any: return true;
    case Kind::Key: return unit.key == value;
    case Kind::Property: return omega.observes({unit}, value);
  }
  return false;
}

bool SupportMatcher::matches(const std::vector<std::string>& subset) const {
  if (subset.size() < min_size) return false;
  if (max_size && subset.size() > *max_size) return false;
  if (of_keys &&
      !std::includes(of_keys->begin(), of_keys->end(), subset.begin(), subset.end()))
    return false;
  if (keys_exactly && subset != *keys_exactly) return false;
  return true;
}

bool BondRule::guard_accepts(const std::string& property) const {
  if (guard.empty()) return true;
  return std::find(guard.begin(), guard.end(), property) != guard.end();
}

Bond compose(std::span<const Bond> bonds, const GlueSpec& glue) {
  if (bonds.empty()) fail(Errc::EmptySupport, "compose of an empty bond sequence");
  if (bonds.size() == 1) return bonds.front();

  int tier = bonds.front().id.tier;
  for (const auto& b : bonds)
    if (b.id.tier != tier)
      fail(Errc::MixedTiers, "composing bonds of tiers " + std::to_string(tier) +
                                 " and " + std::to_string(b.id.tier));

  std::set<std::string> names;
  for (const auto& b : bonds) names.insert(b.property.name);
  std::string combo;
  for (const auto& n : names) combo += (combo.empty() ? "" : ",") + n;
  std::string resolved;
  if (auto it = glue.resolution.find(combo); it != glue.resolution.end())
    resolved = it->second;
  else if (glue.default_property)
    resolved = *glue.default_property;
  else
    fail(Errc::IncompatibleGlue, "no property resolution for inputs {" + combo + "}");

  if (glue.mode == GlueSpec::Mode::ConcatJoin) {
    std::vector<UnitId> joined;
    for (const auto& b : bonds) {
      if (!b.ordered)
        fail(Errc::IncompatibleGlue,
             "concat-join over the unordered bond '" + b.id.key + "'");
      joined.insert(joined.end(), b.pattern.begin(), b.pattern.end());
    }
    if (joined.size() > glue.length_bound)
      fail(Errc::LengthBoundExceeded,
           "composite length " + std::to_string(joined.size()) + " exceeds bound " +
               std::to_string(glue.length_bound));
    return make_bond(kJoinTag, true, std::move(joined),
                     PropertyId{tier - 1, resolved});
  }

  UnitSet merged;
  for (const auto& b : bonds) {
    auto s = b.support_set();
    merged.insert(merged.end(), s.begin(), s.end());
  }
  canonicalize(merged);
  if (merged.size() > glue.length_bound)
    fail(Errc::LengthBoundExceeded,
         "composite support " + std::to_string(merged.size()) + " exceeds bound " +
             std::to_string(glue.length_bound));
  return make_bond(kUnionTag, false, std::move(merged), PropertyId{tier - 1, resolved});
}

}  // namespace hyperlang
