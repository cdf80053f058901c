#pragma once

#include <cstdint>
#include <string>

#include "gpcert/graphprod.hpp"

namespace gpcert {

// A fully validated workbench setup: the product graph with its vertex
// groups, weights, and budgets, plus CLI defaults. `canonical_text` is a
// normalized re-emission of the configuration (sorted keys, defaults made
// explicit, generator sets symmetrized); certificates embed it so they can be
// re-verified without the original file, and two files describing the same
// setup canonicalize to identical bytes.
struct WorkbenchConfig {
  ProductGraph graph;
  std::int64_t default_ball_radius = 8;
  std::string canonical_text;
};

// Parse and validate a JSON configuration document.
//
// Schema (single JSON object; unknown keys are rejected):
//   {
//     "vertices": [                     // required, at least one entry
//       {"id": "v1", "weight": 3,      // id charset [A-Za-z0-9_-], "e" reserved
//        "group": {"kind": "cyclic", "modulus": 4,
//                  "generators": [1, 3]}},            // optional residues
//       {"id": "v2", "weight": 1,
//        "group": {"kind": "free-abelian", "rank": 2}},
//       {"id": "v3", "weight": 2,
//        "group": {"kind": "free", "rank": 2, "max_letters": 64}},
//       {"id": "v4", "weight": 1,
//        "group": {"kind": "table",
//                  "labels": ["1", "a", "b"],
//                  "table": [["1","a","b"],["a","b","1"],["b","1","a"]],
//                  "generators": ["a", "b"]}}         // optional labels
//     ],
//     "edges": [["v1", "v2"]],          // optional; adjacent groups commute
//     "budgets": {"node_cap": 5000000,  // optional; search-tree node cap
//                 "max_syllables": 32}, // optional; reduced word length cap
//     "defaults": {"ball": 8}           // optional; ball radius when a
//   }                                   // command is run without --ball
//
// Malformed JSON raises ParseError (with byte offset); schema violations and
// invalid group/graph data raise ConfigError.
WorkbenchConfig parse_config(const std::string& json_text);

// Read a file and parse it; ConfigError when the file cannot be read.
WorkbenchConfig load_config(const std::string& path);

// Copy with the search-tree node budget replaced (the CLI --budget override);
// the canonical text is re-emitted so embedded configs state the budget that
// was actually in force.
WorkbenchConfig with_node_cap(const WorkbenchConfig& cfg, std::int64_t node_cap);

}  // namespace gpcert
