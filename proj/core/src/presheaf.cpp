#include "hyperlang/presheaf.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "hyperlang/error.hpp"

namespace hyperlang {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out << sep;
    out << parts[i];
  }
  return out.str();
}

bool is_subset(const std::vector<std::string>& sub,
               const std::vector<std::string>& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace

PropertyAssignment PropertyAssignment::make_table(int tier, bool presheaf) {
  PropertyAssignment a;
  a.tier_ = tier;
  a.mode_ = Mode::Table;
  a.presheaf_ = presheaf;
  return a;
}

PropertyAssignment PropertyAssignment::make_rules(int tier,
                                                  std::vector<PropertyRule> rules,
                                                  std::size_t bound) {
  PropertyAssignment a;
  a.tier_ = tier;
  a.mode_ = Mode::Rules;
  a.presheaf_ = false;
  a.rules_ = std::move(rules);
  a.bound_ = bound;
  return a;
}

void PropertyAssignment::add_entry(const std::vector<std::string>& subset,
                                   const std::vector<std::string>& properties) {
  auto key = subset;
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  auto& row = table_[key];
  for (const auto& p : properties)
    if (std::find(row.begin(), row.end(), p) == row.end()) row.push_back(p);
}

void PropertyAssignment::add_restriction(const std::vector<std::string>& from,
                                         const std::vector<std::string>& to,
                                         const std::string& property,
                                         const std::string& image) {
  auto from_key = from;
  auto to_key = to;
  std::sort(from_key.begin(), from_key.end());
  std::sort(to_key.begin(), to_key.end());
  restrictions_[{from_key, to_key, property}] = image;
}

void PropertyAssignment::inject_singleton(const std::string& unit_key,
                                          const std::string& property) {
  auto& row = injected_[unit_key];
  if (std::find(row.begin(), row.end(), property) == row.end())
    row.push_back(property);
}

std::vector<std::string> PropertyAssignment::declared_properties() const {
  std::set<std::string> names;
  for (const auto& [subset, props] : table_) names.insert(props.begin(), props.end());
  for (const auto& rule : rules_) names.insert(rule.yields.begin(), rule.yields.end());
  for (const auto& [key, props] : injected_) names.insert(props.begin(), props.end());
  return {names.begin(), names.end()};
}

std::vector<std::string> PropertyAssignment::observe_names(
    const std::vector<std::string>& subset) const {
  std::set<std::string> names;
  if (mode_ == Mode::Table) {
    auto it = table_.find(subset);
    if (it != table_.end()) names.insert(it->second.begin(), it->second.end());
  } else {
    for (const auto& rule : rules_) {
      if (subset.size() < rule.min_size) continue;
      if (rule.max_size && subset.size() > *rule.max_size) continue;
      if (rule.of_keys && !is_subset(subset, *rule.of_keys)) continue;
      if (rule.keys_exactly && subset != *rule.keys_exactly) continue;
      names.insert(rule.yields.begin(), rule.yields.end());
    }
  }
  if (subset.size() == 1) {
    auto it = injected_.find(subset.front());
    if (it != injected_.end()) names.insert(it->second.begin(), it->second.end());
  }
  return {names.begin(), names.end()};
}

std::vector<PropertyId> PropertyAssignment::observe(const UnitSet& support) const {
  if (support.empty()) fail(Errc::EmptySupport, "observe over the empty collection");
  for (const auto& u : support) {
    if (u.tier != tier_) {
      std::ostringstream msg;
      msg << "unit '" << u.key << "' at tier " << u.tier
          << " observed by assignment of tier " << tier_;
      fail(Errc::TierMismatch, msg.str());
    }
  }
  auto key = subset_key(support);
  if (mode_ == Mode::Rules && key.size() > bound_) {
    std::ostringstream msg;
    msg << "subset of size " << key.size() << " exceeds evaluation bound " << bound_;
    fail(Errc::BoundExceeded, msg.str());
  }
  std::vector<PropertyId> result;
  for (const auto& name : observe_names(key)) result.push_back({tier_, name});
  return result;
}

bool PropertyAssignment::observes(const UnitSet& support,
                                  const std::string& property) const {
  for (const auto& p : observe(support))
    if (p.name == property) return true;
  return false;
}

PropertyId PropertyAssignment::restrict(const UnitSet& set, const UnitSet& subset,
                                        const PropertyId& property) const {
  auto set_key = subset_key(set);
  auto sub_key = subset_key(subset);
  if (subset.empty() || set.empty())
    fail(Errc::EmptySupport, "restriction over an empty collection");
  if (!is_subset(sub_key, set_key))
    fail(Errc::NotASubset, "{" + join(sub_key, " ") + "} is not a subset of {" +
                               join(set_key, " ") + "}");
  bool known = false;
  for (const auto& p : observe(set)) known = known || p == property;
  if (!known)
    fail(Errc::UnknownProperty,
         "'" + property.name + "' is not observable on {" + join(set_key, " ") + "}");
  if (sub_key == set_key) return property;  // the identity inclusion
  if (!presheaf_)
    fail(Errc::MissingRestriction,
         "assignment of tier " + std::to_string(tier_) +
             " declares no restriction maps (plain mode)");
  auto it = restrictions_.find({set_key, sub_key, property.name});
  if (it == restrictions_.end())
    fail(Errc::MissingRestriction, "no restriction of '" + property.name + "' along {" +
                                       join(sub_key, " ") + "} <= {" +
                                       join(set_key, " ") + "}");
  return {tier_, it->second};
}

LawReport PropertyAssignment::check_presheaf_laws(std::size_t size_bound) const {
  LawReport report;
  report.presheaf_mode = presheaf_;
  if (!presheaf_) return report;

  std::vector<std::vector<std::string>> subsets;
  for (const auto& [key, props] : table_)
    if (key.size() <= size_bound) subsets.push_back(key);

  auto props_of = [&](const std::vector<std::string>& s) -> const std::vector<std::string>& {
    return table_.at(s);
  };
  auto image = [&](const std::vector<std::string>& from, const std::vector<std::string>& to,
                   const std::string& p) -> const std::string* {
    if (from == to) {
      auto it = restrictions_.find({from, to, p});
      return it != restrictions_.end() ? &it->second : &p;
    }
    auto it = restrictions_.find({from, to, p});
    return it != restrictions_.end() ? &it->second : nullptr;
  };

  // Pairwise pass: every inclusion between declared subsets needs a map for
  // every property, the image must land in the target's table, and the
  // identity inclusion must act as the identity.
  for (const auto& outer : subsets) {
    for (const auto& inner : subsets) {
      if (!is_subset(inner, outer)) continue;
      for (const auto& p : props_of(outer)) {
        report.chains_checked++;
        const std::string* img = image(outer, inner, p);
        if (inner == outer) {
          if (*img != p)
            report.violations.push_back({ViolationKind::Identity, outer, {}, inner, p,
                                         "identity restriction maps '" + p + "' to '" +
                                             *img + "'"});
          continue;
        }
        if (!img) {
          report.violations.push_back({ViolationKind::Missing, outer, {}, inner, p,
                                       "no restriction declared"});
          continue;
        }
        const auto& target = props_of(inner);
        if (std::find(target.begin(), target.end(), *img) == target.end())
          report.violations.push_back({ViolationKind::Target, outer, {}, inner, p,
                                       "image '" + *img + "' not observable on target"});
      }
    }
  }

  // Composition pass over proper chains S'' < S' < S.
  for (const auto& outer : subsets) {
    for (const auto& mid : subsets) {
      if (mid == outer || !is_subset(mid, outer)) continue;
      for (const auto& inner : subsets) {
        if (inner == mid || !is_subset(inner, mid)) continue;
        for (const auto& p : props_of(outer)) {
          report.chains_checked++;
          const std::string* via_mid = image(outer, mid, p);
          if (!via_mid) continue;  // reported by the pairwise pass
          const std::string* two_step = image(mid, inner, *via_mid);
          const std::string* direct = image(outer, inner, p);
          if (!two_step || !direct) continue;
          if (*two_step != *direct) {
            report.violations.push_back(
                {ViolationKind::Composition, outer, mid, inner, p,
                 "restricting via {" + join(mid, " ") + "} gives '" + *two_step +
                     "' but the direct restriction gives '" + *direct + "'"});
          }
        }
      }
    }
  }
  return report;
}

PropertyAssignment PropertyAssignment::materialize(const UnitSet& universe) const {
  PropertyAssignment out = make_table(tier_, false);
  out.injected_ = injected_;
  if (mode_ == Mode::Table) {
    out.table_ = table_;
    return out;
  }
  std::size_t n = universe.size();
  std::size_t cap = std::min(bound_, n);
  std::vector<std::size_t> pick;
  // All nonempty subsets up to the evaluation bound, in index order.
  auto emit = [&]() {
    UnitSet subset;
    for (auto i : pick) subset.push_back(universe[i]);
    canonicalize(subset);
    auto key = subset_key(subset);
    auto names = observe_names(key);
    if (!names.empty()) out.table_[key] = names;
  };
  std::function<void(std::size_t)> walk = [&](std::size_t start) {
    if (!pick.empty()) emit();
    if (pick.size() == cap) return;
    for (std::size_t i = start; i < n; ++i) {
      pick.push_back(i);
      walk(i + 1);
      pick.pop_back();
    }
  };
  walk(0);
  return out;
}

std::vector<std::vector<std::string>> PropertyAssignment::table_subsets() const {
  std::vector<std::vector<std::string>> keys;
  keys.reserve(table_.size());
  for (const auto& [key, props] : table_) keys.push_back(key);
  return keys;
}

std::vector<PropertyAssignment::RestrictionEntry>
PropertyAssignment::restriction_entries() const {
  std::vector<RestrictionEntry> out;
  out.reserve(restrictions_.size());
  for (const auto& [key, image] : restrictions_)
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), image});
  return out;
}

}  // namespace hyperlang
