// Command-line front end for the tiered hyperstructure engine.
//
// Exit codes: 0 success, 1 domain negative (rejected input, no section,
// discrepancies, law violations), 2 usage or spec errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperlang/error.hpp"
#include "hyperlang/spec_io.hpp"

namespace {

using namespace hyperlang;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kError = 2;

bool g_color = false;

void report_error(const std::string& message) {
  if (g_color)
    std::cerr << "\033[31merror:\033[0m " << message << "\n";
  else
    std::cerr << "error: " << message << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::SyntaxError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SpecDocument load_document(const std::string& path) { return load_spec(read_file(path)); }

std::string violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Identity: return "identity";
    case ViolationKind::Composition: return "composition";
    case ViolationKind::Missing: return "missing restriction";
    case ViolationKind::Target: return "target";
  }
  return "violation";
}

std::string subset_text(const std::vector<std::string>& keys) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out << ' ';
    out << keys[i];
  }
  out << '}';
  return out.str();
}

int run_check(const std::string& path) {
  SpecDocument doc = load_document(path);
  std::cout << "spec OK: " << doc.atoms.size() << " atom(s), " << doc.tiers.size()
            << " tier(s)";
  if (doc.grammar)
    std::cout << ", grammar with " << doc.grammar->productions.size()
              << " production(s), start " << doc.grammar->start;
  std::cout << "\n";

  bool violations = false;
  for (std::size_t i = 0; i < doc.tiers.size(); ++i) {
    const auto& properties = doc.tiers[i].properties;
    if (!properties.presheaf()) {
      std::cout << "tier " << i << ": plain assignment, laws skipped\n";
      continue;
    }
    std::size_t full_size = 0;
    for (const auto& subset : properties.table_subsets())
      full_size = std::max(full_size, subset.size());
    LawReport report = properties.check_presheaf_laws(std::max<std::size_t>(full_size, 1));
    if (report.compliant()) {
      std::cout << "tier " << i << ": presheaf laws compliant (" << report.chains_checked
                << " chains checked)\n";
      continue;
    }
    violations = true;
    std::cout << "tier " << i << ": " << report.violations.size()
              << " presheaf law violation(s)\n";
    for (const auto& v : report.violations) {
      std::cout << "  " << violation_kind_name(v.kind) << ": " << subset_text(v.set_outer);
      if (!v.set_mid.empty()) std::cout << " -> " << subset_text(v.set_mid);
      std::cout << " -> " << subset_text(v.set_inner) << " on '" << v.property
                << "': " << v.detail << "\n";
    }
  }
  return violations ? kNegative : kOk;
}

int run_parse(const std::string& path, const std::vector<std::string>& tokens,
              const std::string& emit) {
  SpecDocument doc = load_document(path);
  ParseResult result = parse_text(doc, tokens);
  if (result.accepted)
    std::cout << "accepted, " << result.derivations.size() << " derivation"
              << (result.derivations.size() == 1 ? "" : "s") << "\n";
  else
    std::cout << "rejected, 0 derivations\n";
  if (emit == "dot") {
    for (const auto& tree : result.derivations) std::cout << export_derivation_dot(tree);
  } else if (emit == "json") {
    std::cout << "[\n";
    for (std::size_t i = 0; i < result.derivations.size(); ++i) {
      std::string text = export_derivation_json(result.derivations[i]);
      if (i + 1 < result.derivations.size()) text.insert(text.size() - 1, ",");
      std::cout << text;
    }
    std::cout << "]\n";
  }
  return result.accepted ? kOk : kNegative;
}

int run_generate(const std::string& path, int tier, int bound) {
  SpecDocument doc = load_document(path);
  Hyperstructure h = [&doc]() {
    if (doc.tiers.empty() && doc.grammar) {
      auto sg = from_cfg(*doc.grammar, doc.height_bound);
      return Hyperstructure(sg.atom_keys, sg.tiers);
    }
    return declared_hyperstructure(doc);
  }();
  for (int t = 0; t < tier; ++t) {
    h = generate_tier(h, t);
    h = lift(h, t);
  }
  std::size_t length_bound =
      bound > 0 ? static_cast<std::size_t>(bound) : h.tier(tier).length_bound;
  auto bonds = enumerate_bonds(h, tier, length_bound);
  std::cout << bonds.size() << " bond(s) at tier " << tier << " (length bound "
            << length_bound << ")\n";
  for (const auto& b : bonds) std::cout << b.id.key << "\n";
  return kOk;
}

int run_globalize(const std::string& path, const std::vector<std::string>& tokens) {
  SpecDocument doc = load_document(path);
  ParseResult result = parse_text(doc, tokens);
  if (!result.accepted) {
    std::cout << "rejected, nothing to globalize\n";
    return kNegative;
  }
  const DerivationTree& tree = result.derivations.front();
  auto [lambdas, constraints] = resolve_meanings(doc, {tree});
  GlobalizerResult g = find_globalizer(tree, lambdas, constraints);
  if (g.found()) {
    // Rows ordered by tier, then reference; tiers come from the tree.
    std::map<std::string, int> tiers;
    std::function<void(const DerivationNode&)> walk = [&](const DerivationNode& node) {
      if (node.is_leaf()) return;
      tiers[node.unit.key] = node.unit.tier;
      for (const auto& child : node.children) walk(child);
    };
    walk(tree);
    std::map<std::pair<int, std::string>, MeaningId> rows;
    for (const auto& [key, meaning] : g.section->assignment)
      rows[{tiers.count(key) ? tiers[key] : 0, bond_ref_of_key(key)}] = meaning;
    std::cout << "section:\n";
    for (const auto& [key, meaning] : rows)
      std::cout << "  " << key.second << " -> " << meaning << "\n";
    return kOk;
  }
  std::cout << "NONE: no global section\n";
  std::cout << "certificate: " << bond_ref_of_key(g.certificate->key) << " at tier "
            << g.certificate->tier << "\n";
  return kNegative;
}

int run_oracle(const std::string& path, int max_len) {
  SpecDocument doc = load_document(path);
  if (!doc.grammar)
    fail(Errc::SchemaError, "'" + path + "' declares no grammar to cross-validate");
  auto sg = from_cfg(*doc.grammar, doc.height_bound);
  auto language = oracle_language(*doc.grammar, static_cast<std::size_t>(max_len));
  std::cout << "language (length <= " << max_len << "): " << language.size()
            << " string(s)\n";
  for (const auto& s : language) {
    for (std::size_t i = 0; i < s.size(); ++i) std::cout << (i ? " " : "") << s[i];
    std::cout << "\n";
  }
  DiscrepancyReport report = cross_validate(sg, *doc.grammar, static_cast<std::size_t>(max_len));
  std::cout << "cross-validation: " << report.strings_checked << " strings checked, "
            << report.mismatches.size() << " discrepancies\n";
  std::cout << "justification: " << report.justification << "\n";
  for (const auto& m : report.mismatches) {
    std::cout << "  mismatch:";
    for (const auto& t : m.tokens) std::cout << " " << t;
    std::cout << " (oracle " << (m.oracle_accepts ? "accepts" : "rejects") << ", parser "
              << (m.parser_accepts ? "accepts" : "rejects") << ")\n";
  }
  return report.empty() ? kOk : kNegative;
}

int run_demo(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : bundled_fixtures()) {
    std::filesystem::path target = std::filesystem::path(dir) / name;
    std::ofstream out(target, std::ios::binary);
    if (!out) fail(Errc::SyntaxError, "cannot write '" + target.string() + "'");
    out << text;
    std::cout << "wrote " << target.string() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperlang: a tiered hyperstructure language engine"};
  app.require_subcommand(1);
  app.add_flag("--color", g_color, "colorize diagnostics on stderr");

  std::string spec_path;
  std::vector<std::string> tokens;
  std::string emit;
  int tier = 0;
  int bound = 0;
  int max_len = 6;
  std::string demo_dir = ".";

  auto* check = app.add_subcommand("check", "validate a spec and its presheaf laws");
  check->add_option("spec", spec_path, "spec document")->required();

  auto* parse = app.add_subcommand("parse", "parse a token sequence");
  parse->add_option("spec", spec_path, "spec document")->required();
  parse->add_option("--input", tokens, "whitespace-separated atom keys")
      ->required()
      ->expected(-1);
  parse->add_option("--emit", emit, "emit derivations (dot|json)")
      ->check(CLI::IsMember({"dot", "json"}));

  auto* generate = app.add_subcommand("generate", "enumerate bonds at a tier");
  generate->add_option("spec", spec_path, "spec document")->required();
  generate->add_option("--tier", tier, "tier index")->required();
  generate->add_option("--bound", bound, "pattern length bound");

  auto* globalize = app.add_subcommand("globalize", "search for a global meaning section");
  globalize->add_option("spec", spec_path, "spec document")->required();
  globalize->add_option("--input", tokens, "whitespace-separated atom keys")
      ->required()
      ->expected(-1);

  auto* oracle = app.add_subcommand("oracle", "cross-validate a grammar spec");
  oracle->add_option("spec", spec_path, "spec document")->required();
  oracle->add_option("--max-len", max_len, "maximum string length");

  auto* demo = app.add_subcommand("demo", "materialize the bundled fixtures");
  demo->add_option("--dir", demo_dir, "target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(e.what());
    return kError;
  }

  try {
    if (app.got_subcommand(check)) return run_check(spec_path);
    if (app.got_subcommand(parse)) return run_parse(spec_path, tokens, emit);
    if (app.got_subcommand(generate)) return run_generate(spec_path, tier, bound);
    if (app.got_subcommand(globalize)) return run_globalize(spec_path, tokens);
    if (app.got_subcommand(oracle)) return run_oracle(spec_path, max_len);
    if (app.got_subcommand(demo)) return run_demo(demo_dir);
  } catch (const hyperlang::Error& e) {
    report_error(e.what());
    return kError;
  } catch (const std::exception& e) {
    report_error(e.what());
    return kError;
  }
  return kError;
}
