#include "hyperlang/hyperstructure.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "hyperlang/error.hpp"

namespace hyperlang {

Hyperstructure::Hyperstructure(std::vector<std::string> atom_keys,
                               std::vector<TierRecord> tiers)
    : tiers_(std::move(tiers)) {
  UnitSet atoms;
  atoms.reserve(atom_keys.size());
  for (auto& key : atom_keys) atoms.push_back(UnitId{0, std::move(key)});
  canonicalize(atoms);
  units_.push_back(std::move(atoms));
}

const UnitSet& Hyperstructure::units(int tier) const {
  if (tier < 0 || tier >= built_levels())
    fail(Errc::UnknownUnit, "tier " + std::to_string(tier) + " has no built units");
  return units_[static_cast<std::size_t>(tier)];
}

const TierRecord& Hyperstructure::tier(int index) const {
  if (index < 0 || index >= height())
    fail(Errc::NoRulesForTier, "no tier record at index " + std::to_string(index));
  return tiers_[static_cast<std::size_t>(index)];
}

bool Hyperstructure::has_unit(const UnitId& unit) const {
  if (unit.tier < 0 || unit.tier >= built_levels()) return false;
  const auto& level = units_[static_cast<std::size_t>(unit.tier)];
  return std::binary_search(level.begin(), level.end(), unit);
}

const Bond* Hyperstructure::find_bond(const UnitId& unit) const {
  if (unit.tier <= 0 || unit.tier > height()) return nullptr;
  const auto& record = tiers_[static_cast<std::size_t>(unit.tier - 1)];
  for (const auto& b : record.bonds)
    if (b.id == unit) return &b;
  return nullptr;
}

std::vector<const Bond*> Hyperstructure::all_bonds() const {
  std::vector<const Bond*> out;
  for (const auto& record : tiers_)
    for (const auto& b : record.bonds) out.push_back(&b);
  return out;
}

Hyperstructure Hyperstructure::with_bonds(int tier, std::vector<Bond> bonds) const {
  Hyperstructure next = *this;
  auto& record = next.tiers_.at(static_cast<std::size_t>(tier));
  record.bonds = std::move(bonds);
  record.generated = true;
  return next;
}

std::size_t DerivationNode::depth() const {
  std::size_t best = 0;
  for (const auto& child : children) best = std::max(best, child.depth() + 1);
  return best;
}

std::vector<std::string> DerivationNode::leaf_sequence() const {
  std::vector<std::string> out;
  std::function<void(const DerivationNode&)> walk = [&](const DerivationNode& node) {
    if (node.is_leaf()) {
      out.push_back(node.unit.key);
      return;
    }
    for (const auto& child : node.children) walk(child);
  };
  walk(*this);
  return out;
}

std::string tree_encoding(const DerivationNode& node) {
  // A bond key encodes its whole subtree, so the root key is canonical.
  return node.unit.key;
}

namespace {

bool shortlex_less(const Bond& a, const Bond& b) {
  if (a.pattern.size() != b.pattern.size()) return a.pattern.size() < b.pattern.size();
  for (std::size_t i = 0; i < a.pattern.size(); ++i)
    if (a.pattern[i].key != b.pattern[i].key) return a.pattern[i].key < b.pattern[i].key;
  if (a.rule_tag != b.rule_tag) return a.rule_tag < b.rule_tag;
  return a.property.name < b.property.name;
}

void dedup_and_sort(std::vector<Bond>& bonds) {
  std::sort(bonds.begin(), bonds.end(), shortlex_less);
  bonds.erase(std::unique(bonds.begin(), bonds.end(),
                          [](const Bond& a, const Bond& b) { return a.id == b.id; }),
              bonds.end());
}

// Enumerates the sequences a concatenative pattern admits over `candidates
// per element`, in deterministic order, calling sink on each.
void walk_sequences(const BondRule& rule, const std::vector<UnitSet>& candidates,
                    std::size_t length_bound,
                    const std::function<void(const std::vector<UnitId>&)>& sink) {
  std::vector<UnitId> sequence;
  std::size_t elements = rule.pattern.size();

  // Minimum slots still required from element `idx` on.
  std::vector<std::size_t> min_tail(elements + 1, 0);
  for (std::size_t i = elements; i-- > 0;)
    min_tail[i] = min_tail[i + 1] + rule.pattern[i].min_rep;

  std::function<void(std::size_t)> next_element = [&](std::size_t idx) {
    if (idx == elements) {
      if (!sequence.empty()) sink(sequence);
      return;
    }
    const auto& element = rule.pattern[idx];
    std::size_t max_rep = element.max_rep ? *element.max_rep : length_bound;
    std::function<void(std::size_t)> place = [&](std::size_t placed) {
      if (placed >= element.min_rep) {
        if (sequence.size() + min_tail[idx + 1] <= length_bound) next_element(idx + 1);
      }
      if (placed == max_rep) return;
      if (sequence.size() + 1 + min_tail[idx + 1] > length_bound) return;
      for (const auto& u : candidates[idx]) {
        sequence.push_back(u);
        place(placed + 1);
        sequence.pop_back();
      }
    };
    place(0);
  };
  next_element(0);
}

void walk_subsets(const UnitSet& units, std::size_t max_size,
                  const std::function<void(const UnitSet&)>& sink) {
  UnitSet subset;
  std::function<void(std::size_t)> walk = [&](std::size_t start) {
    if (!subset.empty()) sink(subset);
    if (subset.size() == max_size) return;
    for (std::size_t i = start; i < units.size(); ++i) {
      subset.push_back(units[i]);
      walk(i + 1);
      subset.pop_back();
    }
  };
  walk(0);
}

std::vector<Bond> table_rule_bonds(const BondRule& rule, const PropertyAssignment& omega,
                                   const UnitSet& universe, std::size_t length_bound) {
  std::vector<Bond> out;
  for (const auto& entry : rule.entries) {
    if (entry.member_keys.empty() || entry.member_keys.size() > length_bound) continue;
    std::vector<UnitId> members;
    for (const auto& key : entry.member_keys) {
      UnitId unit{omega.tier(), key};
      if (!std::binary_search(universe.begin(), universe.end(), unit))
        fail(Errc::ReferenceError, "table rule '" + rule.tag +
                                       "' names unknown unit '" + key + "'");
      members.push_back(unit);
    }
    UnitSet support = members;
    canonicalize(support);
    if (!omega.observes(support, entry.property))
      fail(Errc::UnknownProperty, "table rule '" + rule.tag + "' entry property '" +
                                      entry.property + "' is not observable");
    out.push_back(make_bond(rule.tag, entry.ordered, std::move(members),
                            PropertyId{omega.tier(), entry.property}));
  }
  return out;
}

}  // namespace

std::vector<Bond> generate_bonds(const std::vector<BondRule>& rules,
                                 const PropertyAssignment& omega, const Situation& sit,
                                 std::size_t length_bound) {
  if (rules.empty())
    fail(Errc::NoRulesForTier,
         "no bond rules declared at tier " + std::to_string(omega.tier()));
  if (!omega.observes(sit.support, sit.property.name))
    fail(Errc::UnknownProperty,
         "situation property '" + sit.property.name + "' is not observable");

  std::vector<Bond> out;
  for (const auto& rule : rules) {
    if (!rule.guard_accepts(sit.property.name)) continue;
    switch (rule.kind) {
      case BondRule::Kind::Concat: {
        std::vector<UnitSet> candidates;
        for (const auto& element : rule.pattern) {
          UnitSet matching;
          for (const auto& u : sit.support)
            if (element.matcher.matches(u, omega)) matching.push_back(u);
          candidates.push_back(std::move(matching));
        }
        walk_sequences(rule, candidates, length_bound,
                       [&](const std::vector<UnitId>& seq) {
                         out.push_back(make_bond(rule.tag, true, seq, sit.property));
                       });
        break;
      }
      case BondRule::Kind::SetBind: {
        std::size_t cap = rule.support.max_size
                              ? std::min(*rule.support.max_size, length_bound)
                              : length_bound;
        walk_subsets(sit.support, cap, [&](const UnitSet& subset) {
          if (rule.support.matches(subset_key(subset)))
            out.push_back(make_bond(rule.tag, false, subset, sit.property));
        });
        break;
      }
      case BondRule::Kind::Table: {
        for (auto& b : table_rule_bonds(rule, omega, sit.support, length_bound))
          if (b.property == sit.property) out.push_back(std::move(b));
        break;
      }
    }
  }
  dedup_and_sort(out);
  return out;
}

std::vector<Bond> enumerate_bonds(const Hyperstructure& h, int tier,
                                  std::size_t length_bound) {
  const auto& record = h.tier(tier);
  if (tier >= h.built_levels())
    fail(Errc::LiftBeforeGeneration,
         "tier " + std::to_string(tier) + " has no built units to bind");
  const auto& universe = h.units(tier);
  const auto& omega = record.properties;

  std::vector<Bond> out;
  // Canonical semantics: a bond's witnessing situation is its own support
  // set; every observation accepted by the rule's guard yields one bond.
  auto witness_properties = [&](const UnitSet& support, const BondRule& rule) {
    std::vector<PropertyId> accepted;
    for (const auto& p : omega.observe(support))
      if (rule.guard_accepts(p.name)) accepted.push_back(p);
    return accepted;
  };

  for (const auto& rule : record.rules) {
    switch (rule.kind) {
      case BondRule::Kind::Concat: {
        std::vector<UnitSet> candidates;
        for (const auto& element : rule.pattern) {
          UnitSet matching;
          for (const auto& u : universe)
            if (element.matcher.matches(u, omega)) matching.push_back(u);
          candidates.push_back(std::move(matching));
        }
        walk_sequences(rule, candidates, length_bound,
                       [&](const std::vector<UnitId>& seq) {
                         UnitSet support = seq;
                         canonicalize(support);
                         for (const auto& p : witness_properties(support, rule))
                           out.push_back(make_bond(rule.tag, true, seq, p));
                       });
        break;
      }
      case BondRule::Kind::SetBind: {
        std::size_t cap = rule.support.max_size
                              ? std::min(*rule.support.max_size, length_bound)
                              : length_bound;
        walk_subsets(universe, cap, [&](const UnitSet& subset) {
          if (!rule.support.matches(subset_key(subset))) return;
          for (const auto& p : witness_properties(subset, rule))
            out.push_back(make_bond(rule.tag, false, subset, p));
        });
        break;
      }
      case BondRule::Kind::Table: {
        for (auto& b : table_rule_bonds(rule, omega, universe, length_bound))
          out.push_back(std::move(b));
        break;
      }
    }
  }
  dedup_and_sort(out);
  return out;
}

Hyperstructure generate_tier(const Hyperstructure& h, int tier,
                             std::optional<std::size_t> length_bound) {
  std::size_t bound = length_bound.value_or(h.tier(tier).length_bound);
  return h.with_bonds(tier, enumerate_bonds(h, tier, bound));
}

std::optional<std::string> emitted_property(const Hyperstructure& h, const Bond& bond) {
  int record_index = bond.support_tier();
  if (record_index < 0 || record_index >= h.height()) return std::nullopt;
  for (const auto& rule : h.tier(record_index).rules)
    if (rule.tag == bond.rule_tag && !rule.emit.empty()) return rule.emit;
  return std::nullopt;
}

Hyperstructure lift(const Hyperstructure& h, int tier) {
  const auto& record = h.tier(tier);
  if (!record.generated)
    fail(Errc::LiftBeforeGeneration,
         "tier " + std::to_string(tier) + " bonds have not been generated");
  if (record.bonds.empty())
    fail(Errc::EmptyTier, "tier " + std::to_string(tier) +
                              " produced zero bonds; nothing to promote");

  UnitSet promoted;
  promoted.reserve(record.bonds.size());
  for (const auto& b : record.bonds) promoted.push_back(b.id);
  canonicalize(promoted);

  Hyperstructure next = h;
  auto level = static_cast<std::size_t>(tier) + 1;
  if (next.units_.size() > level) {
    if (next.units_[level] == promoted) return next;  // idempotent
    next.units_.resize(level);  // rebuilt from a changed bond set
  }
  next.units_.push_back(std::move(promoted));

  if (tier + 1 < next.height()) {
    auto& target = next.tiers_[static_cast<std::size_t>(tier) + 1].properties;
    for (const auto& b : record.bonds)
      if (auto emit = emitted_property(h, b)) target.inject_singleton(b.id.key, *emit);
  }
  return next;
}

UnitSet boundary(const Hyperstructure& h, const UnitId& unit) {
  if (unit.tier == 0)
    fail(Errc::TierZero, "atom '" + unit.key + "' has no boundary");
  const Bond* bond = h.find_bond(unit);
  if (!bond)
    fail(Errc::UnknownUnit, "'" + unit.key + "' is not a realized bond identity");
  return bond->support_set();
}

DerivationTree derivation_tree(const Hyperstructure& h, const UnitId& top) {
  if (top.tier == 0)
    fail(Errc::TierZero, "atom '" + top.key + "' roots no derivation");
  const Bond* bond = h.find_bond(top);
  if (!bond)
    fail(Errc::UnknownUnit, "'" + top.key + "' is not a realized bond identity");
  DerivationNode node;
  node.unit = top;
  node.bond = *bond;
  for (const auto& member : bond->pattern) {
    if (member.tier == 0) {
      node.children.push_back(DerivationNode{member, std::nullopt, {}});
    } else {
      node.children.push_back(derivation_tree(h, member));
    }
  }
  return node;
}

Hyperstructure build_all(Hyperstructure h) {
  for (int t = 0; t < h.height(); ++t) {
    h = generate_tier(h, t);
    h = lift(h, t);
  }
  return h;
}

}  // namespace hyperlang
