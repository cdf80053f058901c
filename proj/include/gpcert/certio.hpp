#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpcert/config.hpp"

namespace gpcert {

// A rendered artifact ready to write: certificate or game transcript.
//
// `text` is the complete JSON document. Every artifact embeds its own inputs
// (canonical config, scales, radii, budgets) so it can be re-verified without
// the original command line, plus an integrity digest over the canonical
// serialization. Rendering is deterministic: set elements are sorted
// lexicographically and object keys alphabetically, so identical inputs
// produce byte-identical artifacts.
struct Artifact {
  std::string text;
  std::vector<std::string> header;  // self-description: scales, radii, budgets
  std::string summary;              // one-line verification result
  bool failed = false;              // set when a game transcript ends in failure
};

// Cover of the weighted ball of the product by scale-separated families, one
// artifact per construction. Each builder fully verifies its output (exact
// disjointness, coverage, and boundedness checks on the enumerated ball) and
// throws VerificationError instead of rendering an invalid certificate.
Artifact make_asdim_certificate(const WorkbenchConfig& cfg, std::int64_t scale,
                                std::int64_t ball_radius);
Artifact make_apc_free_certificate(const WorkbenchConfig& cfg,
                                   const std::vector<std::int64_t>& scales,
                                   std::int64_t ball_radius);
Artifact make_tree_certificate(const WorkbenchConfig& cfg, std::int64_t syllable_cap,
                               std::int64_t depth, std::int64_t cover_scale);

// Assemble a cover of a union of pieces from per-piece covers plus a shared
// region. The input document schema is documented in the README; the
// certificate embeds the normalized input.
Artifact make_union_certificate(const std::string& input_json_text);

// Play the decomposition game on a space given by the space grammar, using a
// named strategy ("zn": axis-by-axis slab blocks). A failed game is still
// rendered — with "failed": true and the recorded reason — so the outcome is
// never silently dropped.
Artifact make_game_transcript(const std::string& space_spec, const std::string& strategy_name,
                              const std::vector<std::int64_t>& scales);

// Re-verify a previously written artifact: integrity digest, envelope shape,
// rebuild from the embedded inputs, and structural comparison of the rebuilt
// document against the stored one. Returns the summary line on success.
// Throws VerificationError (digest/content mismatch, or the artifact is
// marked failed), ParseError/ConfigError (malformed document), and lets
// RefusalError/BudgetError from the rebuild propagate.
std::string verify_artifact_text(const std::string& text);

// Whole-file IO. write_atomic stages the content in a sibling temp file and
// renames it over the target so readers never observe a partial write.
std::string read_file(const std::string& path);
void write_atomic(const std::string& path, const std::string& content);

}  // namespace gpcert
