#include "hyperlang/grammar.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "hyperlang/error.hpp"

namespace hyperlang {

namespace {

constexpr const char* kSituationProperty = "syms";

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out << sep;
    out << parts[i];
  }
  return out.str();
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

void validate_cfg(const Cfg& g) {
  if (g.terminals.empty()) fail(Errc::SchemaError, "grammar declares no terminals");
  if (g.nonterminals.empty())
    fail(Errc::SchemaError, "grammar declares no nonterminals");
  for (const auto& t : g.terminals)
    if (contains(g.nonterminals, t))
      fail(Errc::SchemaError, "symbol '" + t + "' is both terminal and nonterminal");
  if (!contains(g.nonterminals, g.start))
    fail(Errc::ReferenceError, "start symbol '" + g.start + "' is not a nonterminal");
  if (g.productions.empty()) fail(Errc::SchemaError, "grammar has no productions");

  for (const auto& p : g.productions) {
    if (!contains(g.nonterminals, p.head))
      fail(Errc::ReferenceError, "production head '" + p.head + "' is not a nonterminal");
    if (p.body.empty())
      fail(Errc::SchemaError,
           "production for '" + p.head + "' has an empty body (no epsilon rules)");
    for (const auto& sym : p.body)
      if (!contains(g.terminals, sym) && !contains(g.nonterminals, sym))
        fail(Errc::ReferenceError, "production body symbol '" + sym + "' is undeclared");
  }

  // Unit productions must not cycle, or derivations would never terminate.
  std::map<std::string, std::vector<std::string>> unit_edges;
  for (const auto& p : g.productions)
    if (p.body.size() == 1 && contains(g.nonterminals, p.body.front()))
      unit_edges[p.head].push_back(p.body.front());
  std::map<std::string, int> state;  // 0 unseen, 1 in progress, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& a) {
    state[a] = 1;
    for (const auto& b : unit_edges[a]) {
      if (state[b] == 1)
        fail(Errc::SchemaError, "unit productions cycle through '" + b + "'");
      if (state[b] == 0) visit(b);
    }
    state[a] = 2;
  };
  for (const auto& nt : g.nonterminals)
    if (state[nt] == 0) visit(nt);
}

std::string production_tag(const CfgProduction& p) {
  return p.head + "->" + join(p.body, ".");
}

StratifiedGrammar from_cfg(const Cfg& g, int height_bound) {
  validate_cfg(g);
  if (height_bound < 1)
    fail(Errc::SchemaError, "height bound must be at least 1");

  StratifiedGrammar sg;
  sg.grammar = g;
  sg.height_bound = height_bound;
  sg.atom_keys = g.terminals;
  std::sort(sg.atom_keys.begin(), sg.atom_keys.end());

  std::size_t max_body = 1;
  for (const auto& p : g.productions) max_body = std::max(max_body, p.body.size());

  std::vector<std::string> symbols = g.terminals;
  symbols.insert(symbols.end(), g.nonterminals.begin(), g.nonterminals.end());
  std::sort(symbols.begin(), symbols.end());

  for (int t = 0; t < height_bound; ++t) {
    TierRecord record;
    std::vector<PropertyRule> prop_rules;
    if (t == 0) {
      // Each terminal is its own singleton property at the atom tier.
      for (const auto& term : g.terminals)
        prop_rules.push_back(PropertyRule{1, 1, std::nullopt,
                                          std::vector<std::string>{term},
                                          {term}});
    }
    // Every nonempty collection is observable under the uniform situation
    // property, so each admissible pattern realizes exactly one bond.
    prop_rules.push_back(
        PropertyRule{1, std::nullopt, std::nullopt, std::nullopt, {kSituationProperty}});
    record.properties =
        PropertyAssignment::make_rules(t, std::move(prop_rules), std::max<std::size_t>(max_body, 6));
    record.length_bound = std::max<std::size_t>(max_body, 1);

    for (const auto& p : g.productions) {
      BondRule rule;
      rule.tier = t;
      rule.kind = BondRule::Kind::Concat;
      rule.tag = production_tag(p);
      rule.emit = p.head;
      rule.guard = {kSituationProperty};
      for (const auto& sym : p.body)
        rule.pattern.push_back(
            PatternElement{UnitMatcher{UnitMatcher::Kind::Property, sym}, 1, 1});
      record.rules.push_back(std::move(rule));
    }
    for (const auto& sym : symbols) {
      BondRule pad;
      pad.tier = t;
      pad.kind = BondRule::Kind::Concat;
      pad.tag = "lift:" + sym;
      pad.emit = sym;
      pad.guard = {kSituationProperty};
      pad.pattern.push_back(
          PatternElement{UnitMatcher{UnitMatcher::Kind::Property, sym}, 1, 1});
      record.rules.push_back(std::move(pad));
    }
    sg.tiers.push_back(std::move(record));
  }
  return sg;
}

namespace {

// A chart entry: a canonically stratified subtree for one symbol over one
// span. Every node sits at its natural height; unary lift bonds are added
// only where siblings differ.
struct ChartTree {
  DerivationNode node;
  std::string symbol;
};

class StratifiedParser {
 public:
  StratifiedParser(const StratifiedGrammar& sg, const std::vector<std::string>& tokens)
      : sg_(sg), tokens_(tokens) {}

  std::vector<ChartTree> roots() { return trees(0, tokens_.size(), sg_.grammar.start); }

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::string>;

  DerivationNode pad_once(const DerivationNode& node, const std::string& symbol) const {
    Bond b = make_bond("lift:" + symbol, true, {node.unit},
                       PropertyId{node.unit.tier, kSituationProperty});
    DerivationNode wrapped;
    wrapped.unit = b.id;
    wrapped.bond = std::move(b);
    wrapped.children.push_back(node);
    return wrapped;
  }

  DerivationNode pad_to(DerivationNode node, const std::string& symbol, int tier) const {
    while (node.unit.tier < tier) node = pad_once(node, symbol);
    return node;
  }

  const std::vector<ChartTree>& trees(std::size_t begin, std::size_t end,
                                      const std::string& symbol) {
    Key key{begin, end, symbol};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    memo_[key] = {};  // unit cycles are rejected up front, so this is safe
    std::vector<ChartTree> found;

    for (const auto& p : sg_.grammar.productions) {
      if (p.head != symbol) continue;
      std::vector<std::vector<ChartTree>> slots(p.body.size());
      std::function<void(std::size_t, std::size_t)> split = [&](std::size_t idx,
                                                                std::size_t at) {
        if (idx == p.body.size()) {
          if (at == end) emit(p, slots, found);
          return;
        }
        const std::string& sym = p.body[idx];
        std::size_t remaining = p.body.size() - idx - 1;
        if (contains(sg_.grammar.terminals, sym)) {
          if (at < end && tokens_[at] == sym && end - at - 1 >= remaining) {
            slots[idx] = {ChartTree{DerivationNode{UnitId{0, sym}, std::nullopt, {}}, sym}};
            split(idx + 1, at + 1);
          }
          return;
        }
        for (std::size_t next = at + 1; next + remaining <= end; ++next) {
          const auto& subtrees = trees(at, next, sym);
          if (subtrees.empty()) continue;
          slots[idx] = subtrees;
          split(idx + 1, next);
        }
      };
      split(0, begin);
    }

    std::sort(found.begin(), found.end(), [](const ChartTree& a, const ChartTree& b) {
      return tree_encoding(a.node) < tree_encoding(b.node);
    });
    found.erase(std::unique(found.begin(), found.end(),
                            [](const ChartTree& a, const ChartTree& b) {
                              return tree_encoding(a.node) == tree_encoding(b.node);
                            }),
                found.end());
    return memo_[key] = std::move(found);
  }

  void emit(const CfgProduction& p, const std::vector<std::vector<ChartTree>>& slots,
            std::vector<ChartTree>& found) {
    std::vector<const ChartTree*> combo(slots.size());
    std::function<void(std::size_t)> walk = [&](std::size_t idx) {
      if (idx == slots.size()) {
        int height = 1;
        for (const auto* c : combo) height = std::max(height, c->node.unit.tier + 1);
        DerivationNode node;
        std::vector<UnitId> members;
        for (const auto* c : combo) {
          DerivationNode padded = pad_to(c->node, c->symbol, height - 1);
          members.push_back(padded.unit);
          node.children.push_back(std::move(padded));
        }
        Bond b = make_bond(production_tag(p), true, std::move(members),
                           PropertyId{height - 1, kSituationProperty});
        node.unit = b.id;
        node.bond = std::move(b);
        found.push_back(ChartTree{std::move(node), p.head});
        return;
      }
      for (const auto& choice : slots[idx]) {
        combo[idx] = &choice;
        walk(idx + 1);
      }
    };
    walk(0);
  }

  const StratifiedGrammar& sg_;
  const std::vector<std::string>& tokens_;
  std::map<Key, std::vector<ChartTree>> memo_;
};

}  // namespace

ParseResult parse_tokens(const StratifiedGrammar& sg,
                         const std::vector<std::string>& tokens) {
  ParseResult result;
  result.tokens = tokens;
  for (const auto& t : tokens)
    if (!std::binary_search(sg.atom_keys.begin(), sg.atom_keys.end(), t))
      fail(Errc::UnknownToken, "token '" + t + "' is not a declared atom");
  if (tokens.empty()) return result;  // no epsilon derivations

  StratifiedParser parser(sg, tokens);
  auto roots = parser.roots();
  bool any_beyond_bound = false;
  for (auto& r : roots) {
    if (r.node.unit.tier <= sg.height_bound)
      result.derivations.push_back(std::move(r.node));
    else
      any_beyond_bound = true;
  }
  if (result.derivations.empty() && any_beyond_bound)
    fail(Errc::HeightBoundTooSmall,
         "input '" + join(tokens, " ") + "' is derivable, but every tree needs more than " +
             std::to_string(sg.height_bound) + " tiers");
  std::sort(result.derivations.begin(), result.derivations.end(),
            [](const DerivationNode& a, const DerivationNode& b) {
              if (a.depth() != b.depth()) return a.depth() < b.depth();
              return tree_encoding(a) < tree_encoding(b);
            });
  result.accepted = !result.derivations.empty();
  return result;
}

std::pair<ParseResult, Hyperstructure> parse_tokens_realized(
    const StratifiedGrammar& sg, const std::vector<std::string>& tokens) {
  ParseResult result = parse_tokens(sg, tokens);
  Hyperstructure h(sg.atom_keys, sg.tiers);

  std::map<int, std::vector<Bond>> by_tier;
  std::function<void(const DerivationNode&)> collect = [&](const DerivationNode& node) {
    if (node.is_leaf()) return;
    by_tier[node.bond->support_tier()].push_back(*node.bond);
    for (const auto& child : node.children) collect(child);
  };
  for (const auto& tree : result.derivations) collect(tree);

  for (int t = 0; t < h.height(); ++t) {
    auto it = by_tier.find(t);
    if (it == by_tier.end()) break;
    std::sort(it->second.begin(), it->second.end(),
              [](const Bond& a, const Bond& b) { return a.id < b.id; });
    it->second.erase(std::unique(it->second.begin(), it->second.end(),
                                 [](const Bond& a, const Bond& b) { return a.id == b.id; }),
                     it->second.end());
    h = h.with_bonds(t, std::move(it->second));
    h = lift(h, t);
  }
  return {std::move(result), std::move(h)};
}

std::vector<std::vector<std::string>> oracle_language(const Cfg& g, std::size_t max_len) {
  validate_cfg(g);
  // Exhaustive leftmost expansion of sentential forms. Bodies are nonempty,
  // so form length never shrinks and pruning at max_len is safe.
  std::set<std::vector<std::string>> visited;
  std::set<std::vector<std::string>> language;
  std::deque<std::vector<std::string>> queue;
  queue.push_back({g.start});
  visited.insert(queue.front());

  auto is_nonterminal = [&](const std::string& s) { return contains(g.nonterminals, s); };

  while (!queue.empty()) {
    auto form = queue.front();
    queue.pop_front();
    std::size_t leftmost = form.size();
    for (std::size_t i = 0; i < form.size(); ++i)
      if (is_nonterminal(form[i])) {
        leftmost = i;
        break;
      }
    if (leftmost == form.size()) {
      language.insert(form);
      continue;
    }
    for (const auto& p : g.productions) {
      if (p.head != form[leftmost]) continue;
      std::vector<std::string> next;
      next.reserve(form.size() + p.body.size() - 1);
      next.insert(next.end(), form.begin(), form.begin() + static_cast<long>(leftmost));
      next.insert(next.end(), p.body.begin(), p.body.end());
      next.insert(next.end(), form.begin() + static_cast<long>(leftmost) + 1, form.end());
      if (next.size() > max_len) continue;
      if (visited.insert(next).second) queue.push_back(next);
    }
  }

  std::vector<std::vector<std::string>> out(language.begin(), language.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::optional<int> min_derivation_height(const Cfg& g,
                                         const std::vector<std::string>& tokens) {
  validate_cfg(g);
  if (tokens.empty()) return std::nullopt;
  const int kInf = std::numeric_limits<int>::max() / 2;
  std::size_t n = tokens.size();
  // height[nt][i][j): minimal stratified height deriving tokens[i..j).
  std::map<std::string, std::vector<std::vector<int>>> height;
  for (const auto& nt : g.nonterminals)
    height[nt].assign(n, std::vector<int>(n + 1, kInf));

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
          // Minimal max-child-height over all splits of [i, j).
          std::function<int(std::size_t, std::size_t)> best = [&](std::size_t idx,
                                                                  std::size_t at) -> int {
            if (idx == p.body.size()) return at == j ? 0 : kInf;
            const auto& sym = p.body[idx];
            std::size_t remaining = p.body.size() - idx - 1;
            if (contains(g.terminals, sym)) {
              if (at < j && tokens[at] == sym && j - at - 1 >= remaining)
                return best(idx + 1, at + 1);
              return kInf;
            }
            int result = kInf;
            for (std::size_t next = at + 1; next + remaining <= j; ++next) {
              int child = height[sym][at][next];
              if (child >= kInf) continue;
              int rest = best(idx + 1, next);
              if (rest >= kInf) continue;
              result = std::min(result, std::max(child, rest));
            }
            return result;
          };
          int value = best(0, i);
          if (value < kInf && value + 1 < height[p.head][i][j]) {
            height[p.head][i][j] = value + 1;
            changed = true;
          }
        }
      }
    }
  }
  int result = height[g.start][0][n];
  if (result >= kInf) return std::nullopt;
  return result;
}

namespace {

void all_strings(const std::vector<std::string>& alphabet, std::size_t max_len,
                 const std::function<void(const std::vector<std::string>&)>& sink) {
  std::vector<std::string> current;
  std::function<void()> walk = [&]() {
    sink(current);
    if (current.size() == max_len) return;
    for (const auto& a : alphabet) {
      current.push_back(a);
      walk();
      current.pop_back();
    }
  };
  walk();
}

}  // namespace

DiscrepancyReport cross_validate(const StratifiedGrammar& sg, const Cfg& g,
                                 std::size_t max_len) {
  if (sg.height_bound < static_cast<int>(max_len))
    fail(Errc::HeightBoundTooSmall,
         "cross-validation up to length " + std::to_string(max_len) +
             " requires a height bound of at least that length");
  DiscrepancyReport report;
  report.max_len = max_len;
  report.height_bound = sg.height_bound;

  std::set<std::vector<std::string>> oracle;
  int needed_height = 0;
  for (const auto& s : oracle_language(g, max_len)) {
    oracle.insert(s);
    if (auto h = min_derivation_height(g, s)) needed_height = std::max(needed_height, *h);
  }

  std::vector<std::string> alphabet = g.terminals;
  std::sort(alphabet.begin(), alphabet.end());
  all_strings(alphabet, max_len, [&](const std::vector<std::string>& s) {
    report.strings_checked++;
    bool in_oracle = s.empty() ? false : oracle.count(s) > 0;
    bool parsed = false;
    try {
      parsed = parse_tokens(sg, s).accepted;
    } catch (const Error& e) {
      if (e.code() != Errc::HeightBoundTooSmall) throw;
      parsed = false;  // derivable only beyond the bound; a real mismatch
    }
    if (in_oracle != parsed) report.mismatches.push_back({s, in_oracle, parsed});
  });

  std::ostringstream why;
  why << "derivable strings of length <= " << max_len << " need height <= "
      << needed_height << " (span dynamic program); stratification bound "
      << sg.height_bound << (needed_height <= sg.height_bound ? " covers" : " MISSES")
      << " every tree";
  report.justification = why.str();
  return report;
}

DiscrepancyReport cross_validate(const Cfg& g, std::size_t max_len, int height_bound) {
  return cross_validate(from_cfg(g, height_bound), g, max_len);
}

}  // namespace hyperlang
