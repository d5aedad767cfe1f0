#include "hyperlang/spec_io.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hyperlang/error.hpp"

namespace hyperlang {

using nlohmann::json;

namespace {

// Names travel inside bond keys and subset keys, so the delimiters used
// there are reserved.
bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == '(' || c == ')' || c == '{' || c == '}' || c == '@' || c == ',' ||
        c == ' ' || c == '\t' || c == '\n' || c == '\r')
      return false;
  return true;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  fail(Errc::SchemaError, "at " + path + ": " + message);
}

[[noreturn]] void reference_error(const std::string& path, const std::string& message) {
  fail(Errc::ReferenceError, "at " + path + ": " + message);
}

const json& require(const json& obj, const char* field, const std::string& path) {
  if (!obj.is_object() || !obj.contains(field)) schema_error(path + "/" + field, "required field is missing");
  return obj.at(field);
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

std::string as_name(const json& j, const std::string& path) {
  auto s = as_string(j, path);
  if (!valid_name(s))
    schema_error(path, "'" + s + "' contains reserved characters ( ) { } @ , or whitespace");
  return s;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

std::vector<std::string> as_name_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_name(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<std::string> split_subset_key(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string word;
  while (in >> word) out.push_back(word);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- bond reference expressions -----------------------------------------

struct RefNode {
  std::string tag;                // empty: an atom leaf, name in `atom`
  std::string atom;
  std::vector<RefNode> children;  // tag nodes only
  bool is_atom() const { return tag.empty(); }
};

RefNode parse_ref(const std::string& text, const std::string& path) {
  std::size_t pos = 0;
  std::function<RefNode()> parse_node = [&]() -> RefNode {
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != '(' && text[pos] != ')' && text[pos] != ',')
      ++pos;
    std::string name = text.substr(start, pos - start);
    if (name.empty()) schema_error(path, "malformed bond reference '" + text + "'");
    if (pos == text.size() || text[pos] != '(') {
      RefNode leaf;
      leaf.atom = name;
      return leaf;
    }
    ++pos;  // consume '('
    RefNode node;
    node.tag = name;
    while (true) {
      node.children.push_back(parse_node());
      if (pos >= text.size()) schema_error(path, "unterminated bond reference '" + text + "'");
      if (text[pos] == ',') {
        ++pos;
        continue;
      }
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      schema_error(path, "malformed bond reference '" + text + "'");
    }
    return node;
  };
  RefNode root = parse_node();
  if (pos != text.size() || root.is_atom())
    schema_error(path, "'" + text + "' is not a bond reference (expected tag(...))");
  return root;
}

std::size_t bond_children_of_ref(const RefNode& node) {
  std::size_t count = 0;
  for (const auto& child : node.children)
    if (!child.is_atom()) ++count;
  return count;
}

// --- property assignments ------------------------------------------------

PropertyAssignment load_properties(const json& j, int tier, const std::string& path,
                                   const std::vector<std::string>& atoms) {
  std::string mode = as_string(require(j, "mode", path), path + "/mode");
  if (mode == "table") {
    bool presheaf = false;
    if (j.contains("presheaf")) {
      if (!j.at("presheaf").is_boolean()) schema_error(path + "/presheaf", "expected a boolean");
      presheaf = j.at("presheaf").get<bool>();
    }
    auto assignment = PropertyAssignment::make_table(tier, presheaf);
    const json& table = require(j, "table", path);
    if (!table.is_object()) schema_error(path + "/table", "expected an object");
    for (const auto& [subset_text, props] : table.items()) {
      auto members = split_subset_key(subset_text);
      if (members.empty())
        schema_error(path + "/table", "empty subset key");
      if (tier == 0)
        for (const auto& m : members)
          if (!std::binary_search(atoms.begin(), atoms.end(), m))
            reference_error(path + "/table/" + subset_text,
                            "'" + m + "' is not a declared atom");
      assignment.add_entry(members,
                           as_name_array(props, path + "/table/" + subset_text));
    }
    if (j.contains("restrictions")) {
      const json& restrictions = j.at("restrictions");
      if (!restrictions.is_array()) schema_error(path + "/restrictions", "expected an array");
      for (std::size_t k = 0; k < restrictions.size(); ++k) {
        std::string rpath = path + "/restrictions/" + std::to_string(k);
        const json& r = restrictions[k];
        auto from = split_subset_key(as_string(require(r, "from", rpath), rpath + "/from"));
        auto to = split_subset_key(as_string(require(r, "to", rpath), rpath + "/to"));
        auto of = as_name(require(r, "of", rpath), rpath + "/of");
        auto is = as_name(require(r, "is", rpath), rpath + "/is");
        const auto& table_map = assignment.table();
        auto from_it = table_map.find(from);
        auto to_it = table_map.find(to);
        if (from_it == table_map.end())
          reference_error(rpath + "/from", "subset is not in the property table");
        if (to_it == table_map.end())
          reference_error(rpath + "/to", "subset is not in the property table");
        if (!std::includes(from.begin(), from.end(), to.begin(), to.end()))
          schema_error(rpath, "'to' is not a subset of 'from'");
        if (std::find(from_it->second.begin(), from_it->second.end(), of) ==
            from_it->second.end())
          reference_error(rpath + "/of", "'" + of + "' is not observable on 'from'");
        if (std::find(to_it->second.begin(), to_it->second.end(), is) ==
            to_it->second.end())
          reference_error(rpath + "/is", "restriction image '" + is +
                                             "' is not observable on 'to'");
        assignment.add_restriction(from, to, of, is);
      }
    }
    return assignment;
  }
  if (mode == "rules") {
    std::size_t bound = 6;
    if (j.contains("bound")) {
      int b = as_int(j.at("bound"), path + "/bound");
      if (b < 1) schema_error(path + "/bound", "bound must be positive");
      bound = static_cast<std::size_t>(b);
    }
    std::vector<PropertyRule> rules;
    const json& rule_array = require(j, "rules", path);
    if (!rule_array.is_array()) schema_error(path + "/rules", "expected an array");
    for (std::size_t k = 0; k < rule_array.size(); ++k) {
      std::string rpath = path + "/rules/" + std::to_string(k);
      const json& r = rule_array[k];
      PropertyRule rule;
      if (r.contains("min_size")) {
        int v = as_int(r.at("min_size"), rpath + "/min_size");
        if (v < 1) schema_error(rpath + "/min_size", "must be at least 1");
        rule.min_size = static_cast<std::size_t>(v);
      }
      if (r.contains("max_size")) {
        int v = as_int(r.at("max_size"), rpath + "/max_size");
        if (v < 1) schema_error(rpath + "/max_size", "must be at least 1");
        rule.max_size = static_cast<std::size_t>(v);
      }
      if (r.contains("of_keys")) {
        auto keys = as_name_array(r.at("of_keys"), rpath + "/of_keys");
        std::sort(keys.begin(), keys.end());
        rule.of_keys = std::move(keys);
      }
      if (r.contains("keys_exactly")) {
        auto keys = as_name_array(r.at("keys_exactly"), rpath + "/keys_exactly");
        std::sort(keys.begin(), keys.end());
        rule.keys_exactly = std::move(keys);
      }
      rule.yields = as_name_array(require(r, "yield", rpath), rpath + "/yield");
      rules.push_back(std::move(rule));
    }
    return PropertyAssignment::make_rules(tier, std::move(rules), bound);
  }
  schema_error(path + "/mode", "expected \"table\" or \"rules\"");
}

// --- bond rules ------------------------------------------------------------

UnitMatcher load_matcher(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "any") return {UnitMatcher::Kind::Any, ""};
    schema_error(path, "expected \"any\", {\"key\":...} or {\"property\":...}");
  }
  if (j.is_object() && j.contains("key"))
    return {UnitMatcher::Kind::Key, as_name(j.at("key"), path + "/key")};
  if (j.is_object() && j.contains("property"))
    return {UnitMatcher::Kind::Property, as_name(j.at("property"), path + "/property")};
  schema_error(path, "expected \"any\", {\"key\":...} or {\"property\":...}");
}

BondRule load_bond_rule(const json& j, int tier, const std::string& path) {
  BondRule rule;
  rule.tier = tier;
  std::string kind = as_string(require(j, "kind", path), path + "/kind");
  rule.tag = as_name(require(j, "tag", path), path + "/tag");
  rule.emit = as_name(require(j, "emit", path), path + "/emit");
  if (j.contains("guard")) rule.guard = as_name_array(j.at("guard"), path + "/guard");

  if (kind == "concat") {
    rule.kind = BondRule::Kind::Concat;
    const json& pattern = require(j, "pattern", path);
    if (!pattern.is_array() || pattern.empty())
      schema_error(path + "/pattern", "expected a nonempty array");
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      std::string epath = path + "/pattern/" + std::to_string(k);
      const json& e = pattern[k];
      PatternElement element;
      element.matcher = load_matcher(require(e, "match", epath), epath + "/match");
      if (e.contains("min")) {
        int v = as_int(e.at("min"), epath + "/min");
        if (v < 0) schema_error(epath + "/min", "must be nonnegative");
        element.min_rep = static_cast<std::size_t>(v);
      }
      if (e.contains("max")) {
        if (e.at("max").is_null()) {
          element.max_rep = std::nullopt;  // bounded by the tier's length bound
        } else {
          int v = as_int(e.at("max"), epath + "/max");
          if (v < 1) schema_error(epath + "/max", "must be positive (or null)");
          element.max_rep = static_cast<std::size_t>(v);
        }
      } else {
        element.max_rep = element.min_rep;  // exact repetition by default
      }
      if (element.max_rep && *element.max_rep < element.min_rep)
        schema_error(epath, "max repetition below min");
      rule.pattern.push_back(std::move(element));
    }
    return rule;
  }
  if (kind == "setbind") {
    rule.kind = BondRule::Kind::SetBind;
    const json& support = require(j, "support", path);
    std::string spath = path + "/support";
    if (support.contains("min_size")) {
      int v = as_int(support.at("min_size"), spath + "/min_size");
      if (v < 1) schema_error(spath + "/min_size", "must be at least 1");
      rule.support.min_size = static_cast<std::size_t>(v);
    }
    if (support.contains("max_size")) {
      int v = as_int(support.at("max_size"), spath + "/max_size");
      if (v < 1) schema_error(spath + "/max_size", "must be at least 1");
      rule.support.max_size = static_cast<std::size_t>(v);
    }
    if (support.contains("of_keys")) {
      auto keys = as_name_array(support.at("of_keys"), spath + "/of_keys");
      std::sort(keys.begin(), keys.end());
      rule.support.of_keys = std::move(keys);
    }
    if (support.contains("keys_exactly")) {
      auto keys = as_name_array(support.at("keys_exactly"), spath + "/keys_exactly");
      std::sort(keys.begin(), keys.end());
      rule.support.keys_exactly = std::move(keys);
    }
    return rule;
  }
  if (kind == "table") {
    rule.kind = BondRule::Kind::Table;
    const json& entries = require(j, "entries", path);
    if (!entries.is_array()) schema_error(path + "/entries", "expected an array");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      std::string epath = path + "/entries/" + std::to_string(k);
      const json& e = entries[k];
      TableEntry entry;
      entry.member_keys = as_name_array(require(e, "members", epath), epath + "/members");
      if (entry.member_keys.empty()) schema_error(epath + "/members", "must be nonempty");
      if (e.contains("ordered")) {
        if (!e.at("ordered").is_boolean()) schema_error(epath + "/ordered", "expected a boolean");
        entry.ordered = e.at("ordered").get<bool>();
      }
      entry.property = as_name(require(e, "property", epath), epath + "/property");
      rule.entries.push_back(std::move(entry));
    }
    return rule;
  }
  schema_error(path + "/kind", "expected \"concat\", \"setbind\" or \"table\"");
}

// --- grammar ---------------------------------------------------------------

Cfg load_grammar(const json& j, const std::string& path) {
  Cfg g;
  g.terminals = as_name_array(require(j, "terminals", path), path + "/terminals");
  g.nonterminals = as_name_array(require(j, "nonterminals", path), path + "/nonterminals");
  g.start = as_name(require(j, "start", path), path + "/start");
  const json& productions = require(j, "productions", path);
  if (!productions.is_array()) schema_error(path + "/productions", "expected an array");
  for (std::size_t k = 0; k < productions.size(); ++k) {
    std::string ppath = path + "/productions/" + std::to_string(k);
    const json& p = productions[k];
    CfgProduction production;
    production.head = as_name(require(p, "head", ppath), ppath + "/head");
    production.body = as_name_array(require(p, "body", ppath), ppath + "/body");
    g.productions.push_back(std::move(production));
  }
  validate_cfg(g);
  return g;
}

// Properties a rule at tier `i` may test: the tier's own declarations plus
// everything the tier below emits.
std::set<std::string> properties_visible_at(const SpecDocument& doc, std::size_t tier) {
  std::set<std::string> visible;
  const auto declared = doc.tiers[tier].properties.declared_properties();
  visible.insert(declared.begin(), declared.end());
  if (tier > 0)
    for (const auto& rule : doc.tiers[tier - 1].rules)
      if (!rule.emit.empty()) visible.insert(rule.emit);
  return visible;
}

void validate_cross_references(const SpecDocument& doc) {
  for (std::size_t i = 0; i < doc.tiers.size(); ++i) {
    auto visible = properties_visible_at(doc, i);
    std::string tpath = "/tiers/" + std::to_string(i);
    std::set<std::string> tags;
    for (std::size_t k = 0; k < doc.tiers[i].rules.size(); ++k) {
      const auto& rule = doc.tiers[i].rules[k];
      std::string rpath = tpath + "/bond_rules/" + std::to_string(k);
      if (!tags.insert(rule.tag).second)
        schema_error(rpath + "/tag", "duplicate rule tag '" + rule.tag + "'");
      for (const auto& gname : rule.guard)
        if (!visible.count(gname))
          reference_error(rpath + "/guard", "property '" + gname + "' is not declared at tier " +
                                                std::to_string(i));
      for (std::size_t e = 0; e < rule.pattern.size(); ++e) {
        const auto& m = rule.pattern[e].matcher;
        if (m.kind == UnitMatcher::Kind::Property && !visible.count(m.value))
          reference_error(rpath + "/pattern/" + std::to_string(e),
                          "property '" + m.value + "' is not declared at tier " +
                              std::to_string(i));
        if (m.kind == UnitMatcher::Kind::Key && i == 0 &&
            !std::binary_search(doc.atoms.begin(), doc.atoms.end(), m.value))
          reference_error(rpath + "/pattern/" + std::to_string(e),
                          "'" + m.value + "' is not a declared atom");
      }
    }
  }

  if (doc.start_property && !doc.grammar) {
    std::set<std::string> emitted;
    for (const auto& tier : doc.tiers)
      for (const auto& rule : tier.rules)
        if (!rule.emit.empty()) emitted.insert(rule.emit);
    if (!emitted.count(*doc.start_property))
      reference_error("/start_property",
                      "'" + *doc.start_property + "' is not emitted by any bond rule");
  }

  if (doc.grammar) {
    auto terminals = doc.grammar->terminals;
    std::sort(terminals.begin(), terminals.end());
    if (terminals != doc.atoms)
      reference_error("/grammar/terminals", "grammar terminals must equal the atom set");
  }
}

void validate_meaning_refs(const SpecDocument& doc) {
  std::set<std::string> known_tags;
  for (const auto& tier : doc.tiers)
    for (const auto& rule : tier.rules) known_tags.insert(rule.tag);
  if (doc.grammar) {
    for (const auto& p : doc.grammar->productions) known_tags.insert(production_tag(p));
    for (const auto& s : doc.grammar->terminals) known_tags.insert("lift:" + s);
    for (const auto& s : doc.grammar->nonterminals) known_tags.insert("lift:" + s);
  }

  std::function<void(const RefNode&, const std::string&)> check_ref =
      [&](const RefNode& node, const std::string& path) {
        if (node.is_atom()) {
          if (!std::binary_search(doc.atoms.begin(), doc.atoms.end(), node.atom))
            reference_error(path, "'" + node.atom + "' is not a declared atom");
          return;
        }
        if (!known_tags.count(node.tag))
          reference_error(path, "'" + node.tag + "' names no bond rule");
        for (const auto& child : node.children) check_ref(child, path);
      };

  // Every meaning row for a reference, across tiers.
  auto meanings_of_ref = [&](const std::string& ref) {
    std::set<std::string> all;
    for (const auto& spec : doc.meanings) {
      auto it = spec.table.find(ref);
      if (it != spec.table.end()) all.insert(it->second.begin(), it->second.end());
    }
    return all;
  };

  for (std::size_t i = 0; i < doc.meanings.size(); ++i) {
    const auto& spec = doc.meanings[i];
    std::string mpath = "/meanings/" + std::to_string(i);
    if (spec.tier < 1) schema_error(mpath + "/tier", "meanings attach to bonds (tier >= 1)");
    for (const auto& [ref, meanings] : spec.table) {
      std::string rpath = mpath + "/table/" + ref;
      check_ref(parse_ref(ref, rpath), rpath);
      if (meanings.empty()) schema_error(rpath, "meaning set must be nonempty");
    }
  }

  for (const auto& [ref, tuples] : doc.compatibility.entries) {
    std::string cpath = "/compatibility/" + ref;
    RefNode node = parse_ref(ref, cpath);
    check_ref(node, cpath);
    std::size_t arity = bond_children_of_ref(node);
    auto own = meanings_of_ref(ref);
    if (own.empty())
      reference_error(cpath, "bond '" + ref + "' has no meaning table row");
    std::vector<std::string> child_refs;
    for (const auto& child : node.children) {
      if (child.is_atom()) continue;
      std::ostringstream text;
      std::function<void(const RefNode&)> print = [&](const RefNode& n) {
        if (n.is_atom()) {
          text << n.atom;
          return;
        }
        text << n.tag << '(';
        for (std::size_t c = 0; c < n.children.size(); ++c) {
          if (c) text << ',';
          print(n.children[c]);
        }
        text << ')';
      };
      print(child);
      child_refs.push_back(text.str());
    }
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      std::string tpath = cpath + "/tuples/" + std::to_string(t);
      if (tuples[t].children.size() != arity)
        schema_error(tpath, "tuple lists " + std::to_string(tuples[t].children.size()) +
                                " child meanings, bond has " + std::to_string(arity) +
                                " child bonds");
      if (!own.count(tuples[t].parent))
        reference_error(tpath, "parent meaning '" + tuples[t].parent +
                                   "' is not in the bond's meaning row");
      for (std::size_t c = 0; c < tuples[t].children.size(); ++c) {
        auto child_meanings = meanings_of_ref(child_refs[c]);
        if (!child_meanings.empty() && !child_meanings.count(tuples[t].children[c]))
          reference_error(tpath, "child meaning '" + tuples[t].children[c] +
                                     "' is not in the row of '" + child_refs[c] + "'");
      }
    }
  }
}

}  // namespace

SpecDocument load_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::SyntaxError, e.what());
  }
  if (!j.is_object()) schema_error("/", "document must be a JSON object");

  SpecDocument doc;
  doc.version = as_int(require(j, "version", ""), "/version");
  if (doc.version != 1) schema_error("/version", "unsupported version");

  doc.atoms = as_name_array(require(j, "atoms", ""), "/atoms");
  std::sort(doc.atoms.begin(), doc.atoms.end());
  if (std::adjacent_find(doc.atoms.begin(), doc.atoms.end()) != doc.atoms.end())
    schema_error("/atoms", "duplicate atom keys");
  if (doc.atoms.empty()) schema_error("/atoms", "at least one atom is required");

  const json& tiers = require(j, "tiers", "");
  if (!tiers.is_array()) schema_error("/tiers", "expected an array");
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    std::string tpath = "/tiers/" + std::to_string(i);
    const json& t = tiers[i];
    TierSpec spec;
    spec.properties = load_properties(require(t, "properties", tpath),
                                      static_cast<int>(i), tpath + "/properties", doc.atoms);
    const json& rules = require(t, "bond_rules", tpath);
    if (!rules.is_array()) schema_error(tpath + "/bond_rules", "expected an array");
    for (std::size_t k = 0; k < rules.size(); ++k)
      spec.rules.push_back(load_bond_rule(rules[k], static_cast<int>(i),
                                          tpath + "/bond_rules/" + std::to_string(k)));
    if (t.contains("length_bound")) {
      int v = as_int(t.at("length_bound"), tpath + "/length_bound");
      if (v < 1) schema_error(tpath + "/length_bound", "must be at least 1");
      spec.length_bound = static_cast<std::size_t>(v);
    }
    doc.tiers.push_back(std::move(spec));
  }

  if (j.contains("grammar")) doc.grammar = load_grammar(j.at("grammar"), "/grammar");
  if (j.contains("height_bound")) {
    doc.height_bound = as_int(j.at("height_bound"), "/height_bound");
    if (doc.height_bound < 1) schema_error("/height_bound", "must be at least 1");
  }
  if (j.contains("start_property"))
    doc.start_property = as_name(j.at("start_property"), "/start_property");

  if (j.contains("meanings")) {
    const json& meanings = j.at("meanings");
    if (!meanings.is_array()) schema_error("/meanings", "expected an array");
    for (std::size_t i = 0; i < meanings.size(); ++i) {
      std::string mpath = "/meanings/" + std::to_string(i);
      const json& m = meanings[i];
      MeaningSpec spec;
      spec.tier = as_int(require(m, "tier", mpath), mpath + "/tier");
      const json& table = require(m, "table", mpath);
      if (!table.is_object()) schema_error(mpath + "/table", "expected an object");
      for (const auto& [ref, row] : table.items())
        spec.table[ref] = as_name_array(row, mpath + "/table/" + ref);
      doc.meanings.push_back(std::move(spec));
    }
  }

  if (j.contains("compatibility")) {
    const json& compat = j.at("compatibility");
    if (!compat.is_array()) schema_error("/compatibility", "expected an array");
    for (std::size_t i = 0; i < compat.size(); ++i) {
      std::string cpath = "/compatibility/" + std::to_string(i);
      const json& c = compat[i];
      std::string ref = as_string(require(c, "bond", cpath), cpath + "/bond");
      const json& tuples = require(c, "tuples", cpath);
      if (!tuples.is_array()) schema_error(cpath + "/tuples", "expected an array");
      std::vector<AdmissibleTuple> loaded;
      for (std::size_t t = 0; t < tuples.size(); ++t) {
        std::string tpath = cpath + "/tuples/" + std::to_string(t);
        const json& tup = tuples[t];
        AdmissibleTuple tuple;
        tuple.children = as_name_array(require(tup, "children", tpath), tpath + "/children");
        tuple.parent = as_name(require(tup, "parent", tpath), tpath + "/parent");
        loaded.push_back(std::move(tuple));
      }
      doc.compatibility.entries[ref] = std::move(loaded);
    }
  }

  validate_cross_references(doc);
  validate_meaning_refs(doc);
  return doc;
}

namespace {

json matcher_to_json(const UnitMatcher& m) {
  switch (m.kind) {
    case UnitMatcher::Kind::Any: return json("any");
    case UnitMatcher::Kind::Key: return json{{"key", m.value}};
    case UnitMatcher::Kind::Property: return json{{"property", m.value}};
  }
  return json("any");
}

json properties_to_json(const PropertyAssignment& a) {
  json out;
  if (a.mode() == PropertyAssignment::Mode::Table) {
    out["mode"] = "table";
    out["presheaf"] = a.presheaf();
    json table = json::object();
    for (const auto& [subset, props] : a.table()) {
      std::ostringstream key;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) key << ' ';
        key << subset[i];
      }
      table[key.str()] = props;
    }
    out["table"] = std::move(table);
    json restrictions = json::array();
    for (const auto& r : a.restriction_entries()) {
      std::ostringstream from, to;
      for (std::size_t i = 0; i < r.from.size(); ++i) {
        if (i) from << ' ';
        from << r.from[i];
      }
      for (std::size_t i = 0; i < r.to.size(); ++i) {
        if (i) to << ' ';
        to << r.to[i];
      }
      restrictions.push_back(
          {{"from", from.str()}, {"to", to.str()}, {"of", r.property}, {"is", r.image}});
    }
    if (!restrictions.empty()) out["restrictions"] = std::move(restrictions);
    return out;
  }
  out["mode"] = "rules";
  out["bound"] = a.bound();
  json rules = json::array();
  for (const auto& rule : a.property_rules()) {
    json r;
    r["min_size"] = rule.min_size;
    if (rule.max_size) r["max_size"] = *rule.max_size;
    if (rule.of_keys) r["of_keys"] = *rule.of_keys;
    if (rule.keys_exactly) r["keys_exactly"] = *rule.keys_exactly;
    r["yield"] = rule.yields;
    rules.push_back(std::move(r));
  }
  out["rules"] = std::move(rules);
  return out;
}

json bond_rule_to_json(const BondRule& rule) {
  json out;
  out["tag"] = rule.tag;
  out["emit"] = rule.emit;
  if (!rule.guard.empty()) out["guard"] = rule.guard;
  switch (rule.kind) {
    case BondRule::Kind::Concat: {
      out["kind"] = "concat";
      json pattern = json::array();
      for (const auto& e : rule.pattern) {
        json element;
        element["match"] = matcher_to_json(e.matcher);
        element["min"] = e.min_rep;
        if (e.max_rep)
          element["max"] = *e.max_rep;
        else
          element["max"] = nullptr;
        pattern.push_back(std::move(element));
      }
      out["pattern"] = std::move(pattern);
      break;
    }
    case BondRule::Kind::SetBind: {
      out["kind"] = "setbind";
      json support;
      support["min_size"] = rule.support.min_size;
      if (rule.support.max_size) support["max_size"] = *rule.support.max_size;
      if (rule.support.of_keys) support["of_keys"] = *rule.support.of_keys;
      if (rule.support.keys_exactly) support["keys_exactly"] = *rule.support.keys_exactly;
      out["support"] = std::move(support);
      break;
    }
    case BondRule::Kind::Table: {
      out["kind"] = "table";
      json entries = json::array();
      for (const auto& e : rule.entries)
        entries.push_back(
            {{"members", e.member_keys}, {"ordered", e.ordered}, {"property", e.property}});
      out["entries"] = std::move(entries);
      break;
    }
  }
  return out;
}

}  // namespace

std::string save_spec(const SpecDocument& doc) {
  json out;
  out["version"] = doc.version;
  out["atoms"] = doc.atoms;
  json tiers = json::array();
  for (const auto& tier : doc.tiers) {
    json t;
    t["properties"] = properties_to_json(tier.properties);
    json rules = json::array();
    for (const auto& rule : tier.rules) rules.push_back(bond_rule_to_json(rule));
    t["bond_rules"] = std::move(rules);
    t["length_bound"] = tier.length_bound;
    tiers.push_back(std::move(t));
  }
  out["tiers"] = std::move(tiers);

  if (doc.grammar) {
    json g;
    g["terminals"] = doc.grammar->terminals;
    g["nonterminals"] = doc.grammar->nonterminals;
    g["start"] = doc.grammar->start;
    json productions = json::array();
    for (const auto& p : doc.grammar->productions)
      productions.push_back({{"head", p.head}, {"body", p.body}});
    g["productions"] = std::move(productions);
    out["grammar"] = std::move(g);
  }
  out["height_bound"] = doc.height_bound;
  if (doc.start_property) out["start_property"] = *doc.start_property;

  if (!doc.meanings.empty()) {
    json meanings = json::array();
    for (const auto& spec : doc.meanings) {
      json m;
      m["tier"] = spec.tier;
      json table = json::object();
      for (const auto& [ref, row] : spec.table) table[ref] = row;
      m["table"] = std::move(table);
      meanings.push_back(std::move(m));
    }
    out["meanings"] = std::move(meanings);
  }
  if (!doc.compatibility.entries.empty()) {
    json compat = json::array();
    for (const auto& [ref, tuples] : doc.compatibility.entries) {
      json entry;
      entry["bond"] = ref;
      json rows = json::array();
      for (const auto& t : tuples)
        rows.push_back({{"children", t.children}, {"parent", t.parent}});
      entry["tuples"] = std::move(rows);
      compat.push_back(std::move(entry));
    }
    out["compatibility"] = std::move(compat);
  }
  return out.dump(2) + "\n";
}

Hyperstructure declared_hyperstructure(const SpecDocument& doc) {
  std::vector<TierRecord> records;
  for (const auto& spec : doc.tiers) {
    TierRecord record;
    record.properties = spec.properties;
    record.rules = spec.rules;
    record.length_bound = spec.length_bound;
    records.push_back(std::move(record));
  }
  return Hyperstructure(doc.atoms, std::move(records));
}

Hyperstructure build_hyperstructure(const SpecDocument& doc) {
  return build_all(declared_hyperstructure(doc));
}

namespace {

// The frontier of a sequence bond: pattern members left to right, bonds
// expanded recursively. Unordered bonds have no frontier.
std::optional<std::vector<std::string>> frontier(const Hyperstructure& h, const Bond& b) {
  if (!b.ordered) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& member : b.pattern) {
    if (member.tier == 0) {
      out.push_back(member.key);
      continue;
    }
    const Bond* sub = h.find_bond(member);
    if (!sub) return std::nullopt;
    auto nested = frontier(h, *sub);
    if (!nested) return std::nullopt;
    out.insert(out.end(), nested->begin(), nested->end());
  }
  return out;
}

}  // namespace

std::pair<ParseResult, Hyperstructure> parse_text_realized(
    const SpecDocument& doc, const std::vector<std::string>& tokens) {
  if (doc.grammar) {
    auto sg = from_cfg(*doc.grammar, doc.height_bound);
    return parse_tokens_realized(sg, tokens);
  }

  ParseResult result;
  result.tokens = tokens;
  for (const auto& t : tokens)
    if (!std::binary_search(doc.atoms.begin(), doc.atoms.end(), t))
      fail(Errc::UnknownToken, "token '" + t + "' is not a declared atom");

  Hyperstructure h = build_hyperstructure(doc);
  if (tokens.empty()) return {std::move(result), std::move(h)};

  for (const Bond* b : h.all_bonds()) {
    auto leaves = frontier(h, *b);
    if (!leaves || *leaves != tokens) continue;
    if (doc.start_property) {
      auto emitted = emitted_property(h, *b);
      if (!emitted || *emitted != *doc.start_property) continue;
    }
    result.derivations.push_back(derivation_tree(h, b->id));
  }
  std::sort(result.derivations.begin(), result.derivations.end(),
            [](const DerivationNode& a, const DerivationNode& b) {
              if (a.depth() != b.depth()) return a.depth() < b.depth();
              return tree_encoding(a) < tree_encoding(b);
            });
  result.accepted = !result.derivations.empty();
  return {std::move(result), std::move(h)};
}

ParseResult parse_text(const SpecDocument& doc, const std::vector<std::string>& tokens) {
  return parse_text_realized(doc, tokens).first;
}

std::pair<std::vector<MeaningAssignment>, CompatibilityRelation> resolve_meanings(
    const SpecDocument& doc, const std::vector<DerivationTree>& trees) {
  // Reference -> realized bond keys (a reference can match several bonds
  // when the same pattern was observed under different properties).
  std::map<std::string, std::set<std::pair<int, std::string>>> by_ref;
  std::function<void(const DerivationNode&)> walk = [&](const DerivationNode& node) {
    if (node.is_leaf()) return;
    by_ref[bond_ref_of_key(node.unit.key)].insert({node.unit.tier, node.unit.key});
    for (const auto& child : node.children) walk(child);
  };
  for (const auto& tree : trees) walk(tree);

  std::map<int, MeaningAssignment> assignments;
  for (const auto& spec : doc.meanings) {
    for (const auto& [ref, row] : spec.table) {
      auto hit = by_ref.find(ref);
      if (hit == by_ref.end()) continue;
      for (const auto& [tier, key] : hit->second) {
        if (tier != spec.tier) continue;
        auto& assignment = assignments[tier];
        assignment.tier = tier;
        assignment.table[key] = row;
      }
    }
  }
  CompatibilityRelation constraints;
  for (const auto& [ref, tuples] : doc.compatibility.entries) {
    auto hit = by_ref.find(ref);
    if (hit == by_ref.end()) continue;
    for (const auto& [tier, key] : hit->second) constraints.entries[key] = tuples;
  }

  std::vector<MeaningAssignment> lambdas;
  for (auto& [tier, assignment] : assignments) lambdas.push_back(std::move(assignment));
  return {std::move(lambdas), std::move(constraints)};
}

std::string export_derivation_dot(const DerivationTree& tree) {
  std::ostringstream out;
  out << "digraph derivation {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=box];\n";

  std::vector<std::pair<int, std::string>> nodes;  // (tier, node id)
  std::ostringstream edges;
  std::function<std::string(const DerivationNode&)> emit =
      [&](const DerivationNode& node) -> std::string {
    std::string id = "n" + std::to_string(nodes.size());
    nodes.push_back({node.unit.tier, id});
    std::string label = node.is_leaf() ? node.unit.key : bond_ref_of_key(node.unit.key);
    out << "  " << id << " [label=\"" << label << "\"];\n";
    for (const auto& child : node.children) {
      std::string child_id = emit(child);
      edges << "  " << id << " -> " << child_id << " [label=\"∂_"
            << node.unit.tier - 1 << "\"];\n";
    }
    return id;
  };
  emit(tree);
  out << edges.str();

  std::map<int, std::vector<std::string>> ranks;
  for (const auto& [tier, id] : nodes) ranks[tier].push_back(id);
  for (auto it = ranks.rbegin(); it != ranks.rend(); ++it) {
    out << "  { rank=same;";
    for (const auto& id : it->second) out << " " << id << ";";
    out << " }\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

json tree_to_json(const DerivationNode& node) {
  json out;
  out["unit"] = node.unit.key;
  out["tier"] = node.unit.tier;
  if (node.is_leaf()) return out;
  out["tag"] = node.bond->rule_tag;
  out["property"] = node.bond->property.name;
  out["ordered"] = node.bond->ordered;
  json children = json::array();
  for (const auto& child : node.children) children.push_back(tree_to_json(child));
  out["children"] = std::move(children);
  return out;
}

DerivationNode tree_from_json(const json& j, const std::string& path) {
  DerivationNode node;
  int tier = as_int(require(j, "tier", path), path + "/tier");
  std::string key = as_string(require(j, "unit", path), path + "/unit");
  if (!j.contains("children")) {
    if (tier != 0) schema_error(path, "leaf nodes must be tier-0 atoms");
    node.unit = UnitId{0, key};
    return node;
  }
  const json& children = j.at("children");
  if (!children.is_array() || children.empty())
    schema_error(path + "/children", "expected a nonempty array");
  std::vector<UnitId> members;
  for (std::size_t i = 0; i < children.size(); ++i) {
    node.children.push_back(tree_from_json(children[i], path + "/children/" + std::to_string(i)));
    members.push_back(node.children.back().unit);
  }
  std::string tag = as_string(require(j, "tag", path), path + "/tag");
  std::string property = as_string(require(j, "property", path), path + "/property");
  bool ordered = true;
  if (j.contains("ordered")) ordered = j.at("ordered").get<bool>();
  Bond bond = make_bond(tag, ordered, std::move(members), PropertyId{tier - 1, property});
  if (bond.id.key != key)
    schema_error(path + "/unit", "unit key does not match the bond content");
  node.unit = bond.id;
  node.bond = std::move(bond);
  return node;
}

}  // namespace

std::string export_derivation_json(const DerivationTree& tree) {
  return tree_to_json(tree).dump(2) + "\n";
}

DerivationTree import_derivation_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::SyntaxError, e.what());
  }
  return tree_from_json(j, "");
}

}  // namespace hyperlang
