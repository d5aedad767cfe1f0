#include <algorithm>

#include "hyperlang/error.hpp"
#include "hyperlang/spec_io.hpp"

namespace hyperlang {

namespace {

// Letters a,b with a presheaf observation table; "pair" binds any ordered
// pair of atoms, and the grammar block fixes S -> ab as the accepted
// language for parsing.
constexpr const char* kAbWords = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "tiers": [
    {
      "properties": {
        "mode": "table",
        "presheaf": true,
        "table": { "a": ["letter"], "b": ["letter"], "a b": ["letters"] },
        "restrictions": [
          {"from": "a b", "to": "a", "of": "letters", "is": "letter"},
          {"from": "a b", "to": "b", "of": "letters", "is": "letter"}
        ]
      },
      "bond_rules": [
        { "kind": "concat", "tag": "pair", "emit": "word",
          "pattern": [ {"match": "any", "min": 2, "max": 2} ] }
      ],
      "length_bound": 8
    }
  ],
  "grammar": {
    "terminals": ["a", "b"],
    "nonterminals": ["S"],
    "start": "S",
    "productions": [ {"head": "S", "body": ["a", "b"]} ]
  },
  "height_bound": 4
})json";

// Two atoms under one unbounded-repetition rule: the generativity demo.
// Sequences of length 2..n realize sum(2^k, k=2..n) bonds.
constexpr const char* kAbSeq = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "tiers": [
    {
      "properties": {
        "mode": "rules",
        "bound": 6,
        "rules": [ {"min_size": 1, "yield": ["run"]} ]
      },
      "bond_rules": [
        { "kind": "concat", "tag": "seq", "emit": "run",
          "pattern": [ {"match": "any", "min": 2, "max": null} ] }
      ],
      "length_bound": 16
    }
  ]
})json";

// Two-tier sentence demo: words ab and ba glue into a sentence; the
// meaning tables admit exactly one global section.
constexpr const char* kSentence = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "start_property": "sentence",
  "tiers": [
    {
      "properties": {
        "mode": "table",
        "presheaf": true,
        "table": { "a": ["letter"], "b": ["letter"], "a b": ["letters"] },
        "restrictions": [
          {"from": "a b", "to": "a", "of": "letters", "is": "letter"},
          {"from": "a b", "to": "b", "of": "letters", "is": "letter"}
        ]
      },
      "bond_rules": [
        { "kind": "concat", "tag": "w1", "emit": "word",
          "pattern": [ {"match": {"key": "a"}}, {"match": {"key": "b"}} ] },
        { "kind": "concat", "tag": "w2", "emit": "word",
          "pattern": [ {"match": {"key": "b"}}, {"match": {"key": "a"}} ] }
      ],
      "length_bound": 8
    },
    {
      "properties": {
        "mode": "rules",
        "bound": 6,
        "rules": [ {"min_size": 1, "yield": ["words"]} ]
      },
      "bond_rules": [
        { "kind": "concat", "tag": "s", "emit": "sentence", "guard": ["words"],
          "pattern": [ {"match": {"property": "word"}, "min": 2, "max": 2} ] }
      ],
      "length_bound": 8
    }
  ],
  "meanings": [
    { "tier": 1, "table": { "w1(a,b)": ["m1", "m2"], "w2(b,a)": ["m3"] } },
    { "tier": 2, "table": { "s(w1(a,b),w2(b,a))": ["M"] } }
  ],
  "compatibility": [
    { "bond": "s(w1(a,b),w2(b,a))",
      "tuples": [ {"children": ["m2", "m3"], "parent": "M"} ] }
  ]
})json";

// Three tiers with nonempty meaning sets everywhere, yet no global
// section: the tier-2 tuple forces y1 while the tier-3 tuple demands y2.
constexpr const char* kThreeTier = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "start_property": "sentence",
  "tiers": [
    {
      "properties": { "mode": "rules", "bound": 6, "rules": [ {"min_size": 1, "yield": ["tok"]} ] },
      "bond_rules": [
        { "kind": "concat", "tag": "w", "emit": "word",
          "pattern": [ {"match": {"key": "a"}}, {"match": {"key": "b"}} ] }
      ],
      "length_bound": 8
    },
    {
      "properties": { "mode": "rules", "bound": 6, "rules": [ {"min_size": 1, "yield": ["grp"]} ] },
      "bond_rules": [
        { "kind": "concat", "tag": "P", "emit": "phrase", "guard": ["grp"],
          "pattern": [ {"match": {"property": "word"}} ] }
      ],
      "length_bound": 8
    },
    {
      "properties": { "mode": "rules", "bound": 6, "rules": [ {"min_size": 1, "yield": ["grps"]} ] },
      "bond_rules": [
        { "kind": "concat", "tag": "R", "emit": "sentence", "guard": ["grps"],
          "pattern": [ {"match": {"property": "phrase"}} ] }
      ],
      "length_bound": 8
    }
  ],
  "meanings": [
    { "tier": 1, "table": { "w(a,b)": ["x1"] } },
    { "tier": 2, "table": { "P(w(a,b))": ["y1", "y2"] } },
    { "tier": 3, "table": { "R(P(w(a,b)))": ["z1"] } }
  ],
  "compatibility": [
    { "bond": "P(w(a,b))", "tuples": [ {"children": ["x1"], "parent": "y1"} ] },
    { "bond": "R(P(w(a,b)))", "tuples": [ {"children": ["y2"], "parent": "z1"} ] }
  ]
})json";

// Solvable with the full meaning sets, unsolvable once any middle tier is
// collapsed to its first meaning: the multiplicity-of-patterning witness.
constexpr const char* kMultiplicity = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "start_property": "sentence",
  "tiers": [
    {
      "properties": { "mode": "rules", "bound": 6, "rules": [ {"min_size": 1, "yield": ["tok"]} ] },
      "bond_rules": [
        { "kind": "concat", "tag": "wa", "emit": "word", "pattern": [ {"match": {"key": "a"}} ] },
        { "kind": "concat", "tag": "wb", "emit": "word", "pattern": [ {"match": {"key": "b"}} ] }
      ],
      "length_bound": 8
    },
    {
      "properties": { "mode": "rules", "bound": 6, "rules": [ {"min_size": 1, "yield": ["grp"]} ] },
      "bond_rules": [
        { "kind": "concat", "tag": "P", "emit": "phrase", "guard": ["grp"],
          "pattern": [ {"match": {"property": "word"}} ] }
      ],
      "length_bound": 8
    },
    {
      "properties": { "mode": "rules", "bound": 6, "rules": [ {"min_size": 1, "yield": ["grps"]} ] },
      "bond_rules": [
        { "kind": "concat", "tag": "R", "emit": "sentence", "guard": ["grps"],
          "pattern": [ {"match": {"property": "phrase"}, "min": 2, "max": 2} ] }
      ],
      "length_bound": 8
    }
  ],
  "meanings": [
    { "tier": 1, "table": { "wa(a)": ["x1", "x2"], "wb(b)": ["x1", "x2"] } },
    { "tier": 2, "table": { "P(wa(a))": ["y1", "y2"], "P(wb(b))": ["y1", "y2"] } },
    { "tier": 3, "table": { "R(P(wa(a)),P(wb(b)))": ["Z"] } }
  ],
  "compatibility": [
    { "bond": "P(wa(a))",
      "tuples": [ {"children": ["x2"], "parent": "y1"}, {"children": ["x2"], "parent": "y2"} ] },
    { "bond": "P(wb(b))",
      "tuples": [ {"children": ["x2"], "parent": "y1"}, {"children": ["x2"], "parent": "y2"} ] },
    { "bond": "R(P(wa(a)),P(wb(b)))",
      "tuples": [ {"children": ["y2", "y2"], "parent": "Z"} ] }
  ]
})json";

constexpr const char* kAnbn = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "tiers": [],
  "grammar": {
    "terminals": ["a", "b"],
    "nonterminals": ["S"],
    "start": "S",
    "productions": [
      {"head": "S", "body": ["a", "b"]},
      {"head": "S", "body": ["a", "S", "b"]}
    ]
  },
  "height_bound": 8
})json";

// Three nonterminals, genuinely ambiguous: a^k b splits between A and B in
// k ways.
constexpr const char* kAmbig = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "tiers": [],
  "grammar": {
    "terminals": ["a", "b"],
    "nonterminals": ["S", "A", "B"],
    "start": "S",
    "productions": [
      {"head": "S", "body": ["A", "B"]},
      {"head": "A", "body": ["a"]},
      {"head": "A", "body": ["a", "A"]},
      {"head": "B", "body": ["b"]},
      {"head": "B", "body": ["a", "B"]}
    ]
  },
  "height_bound": 8
})json";

constexpr const char* kSab = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "tiers": [],
  "grammar": {
    "terminals": ["a", "b"],
    "nonterminals": ["S", "A", "B"],
    "start": "S",
    "productions": [
      {"head": "S", "body": ["A", "B"]},
      {"head": "A", "body": ["a"]},
      {"head": "B", "body": ["b"]}
    ]
  },
  "height_bound": 4
})json";

// A unit production above the a^n b^n core plus an unreachable
// nonterminal; the language is unchanged.
constexpr const char* kUnitChain = R"json({
  "version": 1,
  "atoms": ["a", "b"],
  "tiers": [],
  "grammar": {
    "terminals": ["a", "b"],
    "nonterminals": ["S", "A", "U"],
    "start": "S",
    "productions": [
      {"head": "S", "body": ["A"]},
      {"head": "A", "body": ["a", "b"]},
      {"head": "A", "body": ["a", "A", "b"]},
      {"head": "U", "body": ["b", "a"]}
    ]
  },
  "height_bound": 8
})json";

// Deliberately malformed: the atoms field is missing.
constexpr const char* kBroken = R"json({
  "version": 1,
  "tiers": []
})json";

// Valid schema, broken presheaf: restricting w from {a,b,c} via {a,b} to
// {a} gives p, but the direct restriction gives q.
constexpr const char* kBrokenPresheaf = R"json({
  "version": 1,
  "atoms": ["a", "b", "c"],
  "tiers": [
    {
      "properties": {
        "mode": "table",
        "presheaf": true,
        "table": { "a": ["p", "q"], "a b": ["x"], "a b c": ["w"] },
        "restrictions": [
          {"from": "a b c", "to": "a b", "of": "w", "is": "x"},
          {"from": "a b", "to": "a", "of": "x", "is": "p"},
          {"from": "a b c", "to": "a", "of": "w", "is": "q"}
        ]
      },
      "bond_rules": [
        { "kind": "concat", "tag": "t", "emit": "e",
          "pattern": [ {"match": "any"} ] }
      ],
      "length_bound": 4
    }
  ]
})json";

}  // namespace

const std::vector<std::pair<std::string, std::string>>& bundled_fixtures() {
  static const std::vector<std::pair<std::string, std::string>> fixtures = {
      {"ab-words.json", kAbWords},
      {"ab-seq.json", kAbSeq},
      {"sentence.json", kSentence},
      {"three-tier.json", kThreeTier},
      {"multiplicity.json", kMultiplicity},
      {"anbn.json", kAnbn},
      {"ambig.json", kAmbig},
      {"sab.json", kSab},
      {"unit-chain.json", kUnitChain},
      {"broken.json", kBroken},
      {"broken-presheaf.json", kBrokenPresheaf},
  };
  return fixtures;
}

std::string fixture(const std::string& name) {
  for (const auto& [key, text] : bundled_fixtures())
    if (key == name) return text;
  fail(Errc::ReferenceError, "no bundled fixture named '" + name + "'");
}

}  // namespace hyperlang
