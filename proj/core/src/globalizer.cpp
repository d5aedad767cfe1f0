#include "hyperlang/globalizer.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "hyperlang/error.hpp"

namespace hyperlang {

namespace {

// One bond of the derivation, deduplicated by identity: a bond occurring
// several times (shared subterm) is a single node with a single meaning.
struct IndexedBond {
  UnitId unit;
  std::vector<std::string> child_keys;  // child bonds in pattern order
  std::vector<MeaningId> meanings;      // declared order
  const std::vector<AdmissibleTuple>* tuples = nullptr;  // null: unconstrained
  std::size_t preorder = 0;
};

struct Index {
  std::vector<std::string> order;  // pre-order of first visits
  std::map<std::string, IndexedBond> bonds;
};

const std::vector<MeaningId>* lookup_meanings(
    const std::vector<MeaningAssignment>& lambdas, int tier, const std::string& key) {
  for (const auto& lambda : lambdas) {
    if (lambda.tier != tier) continue;
    auto it = lambda.table.find(key);
    if (it != lambda.table.end()) return &it->second;
  }
  return nullptr;
}

Index build_index(const DerivationTree& tree,
                  const std::vector<MeaningAssignment>& lambdas,
                  const CompatibilityRelation& constraints) {
  Index index;
  std::function<void(const DerivationNode&)> walk = [&](const DerivationNode& node) {
    if (node.is_leaf()) return;
    const std::string& key = node.unit.key;
    if (!index.bonds.count(key)) {
      IndexedBond entry;
      entry.unit = node.unit;
      for (const auto& member : node.bond->pattern)
        if (member.tier >= 1) entry.child_keys.push_back(member.key);
      const auto* meanings = lookup_meanings(lambdas, node.unit.tier, key);
      if (!meanings || meanings->empty())
        fail(Errc::MissingMeaning,
             "no meanings assigned to bond '" + bond_ref_of_key(key) + "'");
      entry.meanings = *meanings;
      auto it = constraints.entries.find(key);
      if (it != constraints.entries.end()) {
        entry.tuples = &it->second;
      } else if (!entry.child_keys.empty()) {
        fail(Errc::MissingConstraint,
             "no admissibility tuples for internal bond '" + bond_ref_of_key(key) + "'");
      }
      entry.preorder = index.order.size();
      index.order.push_back(key);
      index.bonds.emplace(key, std::move(entry));
    }
    for (const auto& child : node.children) walk(child);
  };
  walk(tree);
  return index;
}

// Does `tuple` fit this bond under the (partial) assignment? Unassigned
// children are wildcards; equal child keys must receive equal meanings.
bool tuple_fits(const IndexedBond& bond, const AdmissibleTuple& tuple,
                const std::map<std::string, MeaningId>& assigned) {
  if (tuple.children.size() != bond.child_keys.size()) return false;
  std::map<std::string, const MeaningId*> seen;
  for (std::size_t i = 0; i < tuple.children.size(); ++i) {
    const auto& key = bond.child_keys[i];
    auto it = assigned.find(key);
    if (it != assigned.end() && it->second != tuple.children[i]) return false;
    auto [pos, fresh] = seen.emplace(key, &tuple.children[i]);
    if (!fresh && *pos->second != tuple.children[i]) return false;
  }
  return true;
}

// Bottom-up feasible meaning sets (declared order preserved). For trees
// this is exact; with shared subterms it is a sound relaxation and the
// search below settles the rest.
std::map<std::string, std::vector<MeaningId>> feasible_sets(const Index& index) {
  std::vector<const IndexedBond*> by_tier;
  for (const auto& key : index.order) by_tier.push_back(&index.bonds.at(key));
  std::sort(by_tier.begin(), by_tier.end(), [](const IndexedBond* a, const IndexedBond* b) {
    if (a->unit.tier != b->unit.tier) return a->unit.tier < b->unit.tier;
    return a->preorder < b->preorder;
  });

  std::map<std::string, std::vector<MeaningId>> feasible;
  for (const auto* bond : by_tier) {
    std::vector<MeaningId> kept;
    for (const auto& m : bond->meanings) {
      bool ok = true;
      if (bond->tuples) {
        ok = false;
        for (const auto& tuple : *bond->tuples) {
          if (tuple.parent != m) continue;
          if (tuple.children.size() != bond->child_keys.size()) continue;
          bool children_ok = true;
          std::map<std::string, const MeaningId*> seen;
          for (std::size_t i = 0; i < tuple.children.size(); ++i) {
            const auto& child_feasible = feasible.at(bond->child_keys[i]);
            if (std::find(child_feasible.begin(), child_feasible.end(),
                          tuple.children[i]) == child_feasible.end()) {
              children_ok = false;
              break;
            }
            auto [pos, fresh] = seen.emplace(bond->child_keys[i], &tuple.children[i]);
            if (!fresh && *pos->second != tuple.children[i]) {
              children_ok = false;
              break;
            }
          }
          if (children_ok) {
            ok = true;
            break;
          }
        }
      }
      if (ok) kept.push_back(m);
    }
    feasible[bond->unit.key] = std::move(kept);
  }
  return feasible;
}

// Backtracking over pre-order, meanings tried in declared (feasible) order;
// the first complete assignment is the lexicographically first section.
// Returns the number of sections found (capped by `limit` for the sink).
std::size_t search_sections(
    const Index& index, const std::map<std::string, std::vector<MeaningId>>& feasible,
    std::size_t limit, const std::function<void(const MeaningSection&)>& sink,
    bool count_all) {
  std::map<std::string, MeaningId> assigned;
  std::size_t found = 0;

  auto consistent_after = [&](const std::string& key) {
    // Re-check every constrained bond whose participants are all assigned
    // and involve `key`.
    for (const auto& other_key : index.order) {
      const auto& bond = index.bonds.at(other_key);
      if (!bond.tuples) continue;
      bool involves = other_key == key ||
                      std::find(bond.child_keys.begin(), bond.child_keys.end(), key) !=
                          bond.child_keys.end();
      if (!involves) continue;
      if (!assigned.count(other_key)) continue;
      bool all_children = true;
      for (const auto& child : bond.child_keys)
        if (!assigned.count(child)) {
          all_children = false;
          break;
        }
      if (!all_children) continue;
      bool any = false;
      for (const auto& tuple : *bond.tuples) {
        if (tuple.parent != assigned.at(other_key)) continue;
        if (tuple_fits(bond, tuple, assigned)) {
          any = true;
          break;
        }
      }
      if (!any) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> assign = [&](std::size_t idx) -> bool {
    if (idx == index.order.size()) {
      ++found;
      if (found <= limit) sink(MeaningSection{assigned});
      return !count_all && found >= limit;
    }
    const auto& key = index.order[idx];
    for (const auto& m : feasible.at(key)) {
      assigned[key] = m;
      if (consistent_after(key) && assign(idx + 1)) return true;
      assigned.erase(key);
    }
    return false;
  };
  assign(0);
  return found;
}

// The certificate bond: minimal (tier, then pre-order) bond whose sub-DAG
// admits no consistent assignment. When the bottom-up pass already empties
// a feasible set, that bond is the certificate directly.
UnitId certificate_bond(const Index& index,
                        const std::map<std::string, std::vector<MeaningId>>& feasible) {
  std::vector<const IndexedBond*> ordered;
  for (const auto& key : index.order) ordered.push_back(&index.bonds.at(key));
  std::sort(ordered.begin(), ordered.end(), [](const IndexedBond* a, const IndexedBond* b) {
    if (a->unit.tier != b->unit.tier) return a->unit.tier < b->unit.tier;
    return a->preorder < b->preorder;
  });
  for (const auto* bond : ordered)
    if (feasible.at(bond->unit.key).empty()) return bond->unit;

  // Shared-subterm conflicts: find the minimal bond whose reachable
  // sub-index is unsolvable.
  for (const auto* bond : ordered) {
    Index sub;
    std::function<void(const std::string&)> reach = [&](const std::string& key) {
      if (sub.bonds.count(key)) return;
      const auto& entry = index.bonds.at(key);
      sub.order.push_back(key);
      sub.bonds.emplace(key, entry);
      for (const auto& child : entry.child_keys) reach(child);
    };
    reach(bond->unit.key);
    auto sub_feasible = feasible_sets(sub);
    std::size_t solutions =
        search_sections(sub, sub_feasible, 1, [](const MeaningSection&) {}, false);
    if (solutions == 0) return bond->unit;
  }
  return ordered.back()->unit;  // unreachable for genuinely unsolvable input
}

}  // namespace

GlobalizerResult find_globalizer(const DerivationTree& tree,
                                 const std::vector<MeaningAssignment>& lambdas,
                                 const CompatibilityRelation& constraints) {
  Index index = build_index(tree, lambdas, constraints);
  auto feasible = feasible_sets(index);

  GlobalizerResult result;
  std::size_t found = search_sections(
      index, feasible, 1, [&](const MeaningSection& s) { result.section = s; }, false);
  if (found == 0) result.certificate = certificate_bond(index, feasible);
  return result;
}

EnumerationResult enumerate_globalizers(const DerivationTree& tree,
                                        const std::vector<MeaningAssignment>& lambdas,
                                        const CompatibilityRelation& constraints,
                                        std::size_t limit) {
  if (limit < 1) fail(Errc::SchemaError, "enumeration limit must be at least 1");
  Index index = build_index(tree, lambdas, constraints);
  auto feasible = feasible_sets(index);

  EnumerationResult result;
  result.total = search_sections(
      index, feasible, limit,
      [&](const MeaningSection& s) { result.sections.push_back(s); }, true);
  result.truncated = result.total > limit;
  return result;
}

VerifyResult verify_section(const DerivationTree& tree,
                            const std::vector<MeaningAssignment>& lambdas,
                            const CompatibilityRelation& constraints,
                            const MeaningSection& section) {
  // Direct evaluation, independent of the search machinery.
  std::set<std::string> tree_keys;
  VerifyResult result;
  result.ok = true;
  auto reject = [&](const std::string& reason) {
    if (result.ok) {
      result.ok = false;
      result.reason = reason;
    }
  };

  std::function<void(const DerivationNode&)> walk = [&](const DerivationNode& node) {
    if (node.is_leaf() || !result.ok) return;
    const std::string& key = node.unit.key;
    tree_keys.insert(key);
    auto chosen = section.assignment.find(key);
    if (chosen == section.assignment.end()) {
      reject("partial: no meaning chosen for '" + bond_ref_of_key(key) + "'");
      return;
    }
    const auto* meanings = lookup_meanings(lambdas, node.unit.tier, key);
    if (!meanings ||
        std::find(meanings->begin(), meanings->end(), chosen->second) == meanings->end()) {
      reject("meaning '" + chosen->second + "' is not assigned to '" +
             bond_ref_of_key(key) + "'");
      return;
    }
    std::vector<std::string> child_keys;
    for (const auto& member : node.bond->pattern)
      if (member.tier >= 1) child_keys.push_back(member.key);
    auto entry = constraints.entries.find(key);
    if (entry != constraints.entries.end()) {
      bool admissible = false;
      for (const auto& tuple : entry->second) {
        if (tuple.parent != chosen->second) continue;
        if (tuple.children.size() != child_keys.size()) continue;
        bool match = true;
        for (std::size_t i = 0; i < child_keys.size(); ++i) {
          auto child_chosen = section.assignment.find(child_keys[i]);
          if (child_chosen == section.assignment.end() ||
              child_chosen->second != tuple.children[i]) {
            match = false;
            break;
          }
        }
        if (match) {
          admissible = true;
          break;
        }
      }
      if (!admissible) {
        reject("no admissible tuple at '" + bond_ref_of_key(key) + "' for the chosen meanings");
        return;
      }
    } else if (!child_keys.empty()) {
      reject("internal bond '" + bond_ref_of_key(key) + "' has no admissibility entry");
      return;
    }
    for (const auto& child : node.children) walk(child);
  };
  walk(tree);

  if (result.ok) {
    for (const auto& [key, meaning] : section.assignment)
      if (!tree_keys.count(key)) {
        reject("spurious: '" + bond_ref_of_key(key) + "' is not a bond of the tree");
        break;
      }
  }
  return result;
}

}  // namespace hyperlang
