#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <initializer_list>
#include <string>

#include "subprocess.hpp"

// End-to-end tests of the command-line binary: every subcommand is driven as
// a subprocess, outputs are matched against pinned expected text, and each
// documented exit code (0 success, 2 parse/config, 3 unsupported structure,
// 4 budget, 5 verification failure) is exercised.

namespace {

using gpcert_testing::CmdResult;
using gpcert_testing::lines_of;
using gpcert_testing::run_cmd;
using gpcert_testing::shell_quote;
using gpcert_testing::slurp;
using gpcert_testing::write_file;

std::string fixture_path(const std::string& name) {
  // Anchored next to the binary under test so the location does not depend on
  // the working directory the tests happen to run from.
  static const std::string dir = [] {
    const std::filesystem::path d =
        std::filesystem::path(GPCERT_CLI_PATH).parent_path() / "cli_fixtures";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir + "/" + name;
}

// Path graph u(1) -- v(2) -- x(3), one integer factor per vertex.
std::string p3_config() {
  static const std::string path = [] {
    const std::string p = fixture_path("p3.json");
    write_file(p, R"({
  "vertices": [
    {"id": "u", "weight": 1, "group": {"kind": "free-abelian", "rank": 1}},
    {"id": "v", "weight": 2, "group": {"kind": "free-abelian", "rank": 1}},
    {"id": "x", "weight": 3, "group": {"kind": "free-abelian", "rank": 1}}
  ],
  "edges": [["u", "v"], ["v", "x"]],
  "defaults": {"ball": 10}
})");
    return p;
  }();
  return path;
}

// Free product of two integer factors with weights 1 and 2, no edges.
std::string free_config() {
  static const std::string path = [] {
    const std::string p = fixture_path("free.json");
    write_file(p, R"({
  "vertices": [
    {"id": "a", "weight": 1, "group": {"kind": "free-abelian", "rank": 1}},
    {"id": "b", "weight": 2, "group": {"kind": "free-abelian", "rank": 1}}
  ],
  "defaults": {"ball": 15}
})");
    return p;
  }();
  return path;
}

// Free product of two weight-1 integer factors.
std::string free11_config() {
  static const std::string path = [] {
    const std::string p = fixture_path("free11.json");
    write_file(p, R"({
  "vertices": [
    {"id": "a", "weight": 1, "group": {"kind": "free-abelian", "rank": 1}},
    {"id": "b", "weight": 1, "group": {"kind": "free-abelian", "rank": 1}}
  ]
})");
    return p;
  }();
  return path;
}

// One cyclic, one integer, and one multiplication-table factor.
std::string mixed_config() {
  static const std::string path = [] {
    const std::string p = fixture_path("mixed.json");
    write_file(p, R"({
  "vertices": [
    {"id": "c", "weight": 3, "group": {"kind": "cyclic", "modulus": 4}},
    {"id": "z", "weight": 1, "group": {"kind": "free-abelian", "rank": 1}},
    {"id": "s", "weight": 2,
     "group": {"kind": "table", "labels": ["1", "g"], "table": [["1", "g"], ["g", "1"]]}}
  ],
  "edges": [["c", "z"]]
})");
    return p;
  }();
  return path;
}

std::string cli(std::initializer_list<std::string> args) {
  std::string cmd = shell_quote(GPCERT_CLI_PATH);
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  return cmd;
}

}  // namespace

TEST_CASE("norm, distance, and reduce print pinned values") {
  const std::string cfg = p3_config();

  CmdResult r = run_cmd(cli({"norm", "--config", cfg, "u^5"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "5\n");

  r = run_cmd(cli({"norm", "--config", cfg, "e"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "0\n");

  // d(u^3, v^1): cancel u^3 (cost 3) and pay for v^1 (cost 2).
  r = run_cmd(cli({"distance", "--config", cfg, "u^3", "v^1"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "5\n");

  // u and v commute, so the conjugate collapses.
  r = run_cmd(cli({"reduce", "--config", cfg, "u^1*v^2*u^-1"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "v^2\n");

  // Adjacent-vertex syllables merge across a commuting middle syllable.
  r = run_cmd(cli({"reduce", "--config", cfg, "u^2*v^1*u^3"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "u^5*v^1\n");

  r = run_cmd(cli({"reduce", "--config", cfg, "e"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "e\n");
}

TEST_CASE("mixed factor kinds parse bracket literals and reduce modulo orders") {
  const std::string cfg = mixed_config();

  CmdResult r = run_cmd(cli({"norm", "--config", cfg, "c^3"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "3\n");

  r = run_cmd(cli({"norm", "--config", cfg, "s[g]"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "2\n");

  // s has order two.
  r = run_cmd(cli({"reduce", "--config", cfg, "s[g]*s[g]"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "e\n");

  // c has order four and commutes with z.
  r = run_cmd(cli({"reduce", "--config", cfg, "c^2*z^1*c^2"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "z^1\n");
}

TEST_CASE("standard-form and decompose split an element at a scale") {
  const std::string cfg = p3_config();

  CmdResult r = run_cmd(cli({"standard-form", "--config", cfg, "--scale", "2", "u^2*x^1*v^1"}));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "u^2*x^1*v^1\n");

  r = run_cmd(cli({"decompose", "--config", cfg, "--scale", "2", "x^1*u^2*v^1"}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "x: x^1");
  CHECK(lines[1] == "b: u^2*v^1");

  // The two parts multiply back to the original element.
  const std::string x_part = lines[0].substr(3);
  const std::string b_part = lines[1].substr(3);
  CmdResult back =
      run_cmd(cli({"distance", "--config", cfg, x_part + "*" + b_part, "x^1*u^2*v^1"}));
  CHECK(back.exit_code == 0);
  CHECK(back.output == "0\n");
}

TEST_CASE("ball prints headers and a sorted deterministic element list") {
  const std::string cfg = p3_config();

  const CmdResult r = run_cmd(cli({"ball", "--config", cfg}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() >= 4);
  CHECK(lines[0] == "ball radius: 10");
  CHECK(lines[1] == "budgets: node_cap=5000000, max_syllables=32");
  CHECK(lines[2] == "elements: 1313");
  CHECK(lines.size() == 3 + 1313);
  for (std::size_t i = 4; i < lines.size(); ++i) CHECK(lines[i - 1] < lines[i]);

  const CmdResult again = run_cmd(cli({"ball", "--config", cfg}));
  CHECK(again.output == r.output);

  // A centered ball has the same size by left-invariance.
  const CmdResult centered = run_cmd(cli({"ball", "--config", cfg, "x^2", "--ball", "4"}));
  const CmdResult origin = run_cmd(cli({"ball", "--config", cfg, "--ball", "4"}));
  CHECK(centered.exit_code == 0);
  CHECK(lines_of(centered.output)[2] == lines_of(origin.output)[2]);
}

TEST_CASE("parse errors report a position and exit 2") {
  const std::string cfg = p3_config();

  CmdResult r = run_cmd(cli({"norm", "--config", cfg, "u^"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("parse error: expected an integer (at offset 2)"));

  r = run_cmd(cli({"norm", "--config", cfg, "q^1"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("unknown vertex id 'q'"));

  r = run_cmd(cli({"sfdc-play", "Z^2", "zn", "2,,5"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("parse error: scale list: expected an integer"));

  r = run_cmd(cli({"apc-free", "--config", free_config(), "--scales", "3x"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("parse error"));
}

TEST_CASE("config schema violations exit 2 with a named key") {
  const std::string bad_key = fixture_path("bad_key.json");
  write_file(bad_key, R"({"vertices": [], "surprise": 1})");
  CmdResult r = run_cmd(cli({"norm", "--config", bad_key, "e"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("surprise"));

  const std::string bad_weight = fixture_path("bad_weight.json");
  write_file(bad_weight,
             R"({"vertices": [{"id": "u", "weight": 0,
                 "group": {"kind": "free-abelian", "rank": 1}}]})");
  r = run_cmd(cli({"norm", "--config", bad_weight, "e"}));
  CHECK(r.exit_code == 2);

  const std::string bad_kind = fixture_path("bad_kind.json");
  write_file(bad_kind,
             R"({"vertices": [{"id": "u", "weight": 1, "group": {"kind": "mystery"}}]})");
  r = run_cmd(cli({"norm", "--config", bad_kind, "e"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("mystery"));

  const std::string not_json = fixture_path("not_json.json");
  write_file(not_json, "plainly not json\n");
  r = run_cmd(cli({"norm", "--config", not_json, "e"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("config JSON"));

  r = run_cmd(cli({"norm", "--config", fixture_path("no_such_file.json"), "e"}));
  CHECK(r.exit_code == 2);
}

TEST_CASE("budget overrides trip the node cap and exit 4") {
  const CmdResult r =
      run_cmd(cli({"ball", "--config", p3_config(), "--ball", "14", "--budget", "100"}));
  CHECK(r.exit_code == 4);
  CHECK(r.contains("budget exceeded:"));
}

TEST_CASE("unsupported structures are refused with exit 3") {
  // Both free-product commands require exactly two non-commuting factors.
  CmdResult r = run_cmd(cli({"tree-yr", "--config", p3_config(), "--scale", "2"}));
  CHECK(r.exit_code == 3);
  CHECK(r.contains("refusal:"));

  r = run_cmd(cli({"apc-free", "--config", p3_config(), "--scales", "1,2,2,3"}));
  CHECK(r.exit_code == 3);
  CHECK(r.contains("refusal:"));
}

TEST_CASE("cli usage errors exit 2 and help exits 0") {
  CmdResult r = run_cmd(shell_quote(GPCERT_CLI_PATH));
  CHECK(r.exit_code == 2);

  r = run_cmd(cli({"--help"}));
  CHECK(r.exit_code == 0);

  r = run_cmd(cli({"no-such-command"}));
  CHECK(r.exit_code == 2);

  r = run_cmd(cli({"sfdc-play", "Z^2", "bogus", "2,5"}));
  CHECK(r.exit_code == 2);
  CHECK(r.contains("unknown strategy 'bogus' (available: zn)"));
}

TEST_CASE("asdim-witness certificate round-trips through verify") {
  const std::string out = fixture_path("asdim_cert.json");
  const CmdResult r = run_cmd(cli({"asdim-witness", "--config", p3_config(), "--scale", "4",
                                   "--ball", "10", "--out", out}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "scale: 4");
  CHECK(lines[1] == "ball radius: 10");
  CHECK(lines[2] == "budgets: node_cap=5000000, max_syllables=32");
  CHECK(lines[3] == "mesh: 20");
  CHECK(lines[4] == "3 families, disjoint > 4, covering: true");
  CHECK(lines[5] == "wrote: " + out);

  const CmdResult v = run_cmd(cli({"verify", out}));
  CHECK(v.exit_code == 0);
  CHECK(v.output == "verified: 3 families, disjoint > 4, covering: true\n");
}

TEST_CASE("certificates are byte-identical across runs and config formatting") {
  const std::string out_a = fixture_path("det_a.json");
  const std::string out_b = fixture_path("det_b.json");
  CHECK(run_cmd(cli({"asdim-witness", "--config", p3_config(), "--scale", "4", "--ball", "8",
                     "--out", out_a}))
            .exit_code == 0);
  CHECK(run_cmd(cli({"asdim-witness", "--config", p3_config(), "--scale", "4", "--ball", "8",
                     "--out", out_b}))
            .exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));

  // The same configuration minified and with reordered keys canonicalizes to
  // the same embedded form, so the artifact is byte-identical as well.
  const std::string reordered = fixture_path("p3_reordered.json");
  write_file(reordered,
             R"({"defaults":{"ball":10},"edges":[["u","v"],["v","x"]],"vertices":[)"
             R"({"id":"u","weight":1,"group":{"kind":"free-abelian","rank":1}},)"
             R"({"id":"v","weight":2,"group":{"kind":"free-abelian","rank":1}},)"
             R"({"id":"x","weight":3,"group":{"kind":"free-abelian","rank":1}}]})");
  const std::string out_c = fixture_path("det_c.json");
  CHECK(run_cmd(cli({"asdim-witness", "--config", reordered, "--scale", "4", "--ball", "8",
                     "--out", out_c}))
            .exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_c));
}

TEST_CASE("tampered certificates fail verification with exit 5") {
  const std::string out = fixture_path("tamper_base.json");
  REQUIRE(run_cmd(cli({"asdim-witness", "--config", p3_config(), "--scale", "4", "--ball", "8",
                       "--out", out}))
              .exit_code == 0);
  const std::string text = slurp(out);

  const auto expect_exit_5 = [&](const std::string& mutated, const std::string& note) {
    CAPTURE(note);
    const std::string path = fixture_path("tampered.json");
    write_file(path, mutated);
    const CmdResult v = run_cmd(cli({"verify", path}));
    CHECK(v.exit_code == 5);
    CHECK(v.contains("verification failed:"));
  };

  // Flip one digest character.
  const std::size_t dpos = text.find("fnv1a64:") + 8;
  REQUIRE(dpos != std::string::npos + 8);
  std::string flipped = text;
  flipped[dpos] = flipped[dpos] == '0' ? '1' : '0';
  expect_exit_5(flipped, "digest character flipped");

  // Change a payload number: the digest catches it before any re-derivation.
  const std::size_t mpos = text.find("\"mesh\": 16");
  REQUIRE(mpos != std::string::npos);
  std::string remeshed = text;
  remeshed.replace(mpos, 10, "\"mesh\": 17");
  expect_exit_5(remeshed, "mesh edited");

  // Change the claimed separation in the inputs.
  const std::size_t spos = text.find("\"scale\": 4");
  REQUIRE(spos != std::string::npos);
  std::string rescaled = text;
  rescaled.replace(spos, 10, "\"scale\": 5");
  expect_exit_5(rescaled, "input scale edited");

  // Non-JSON input is a parse error, not a verification failure.
  const std::string garbled = fixture_path("garbled.json");
  write_file(garbled, "not json at all\n");
  const CmdResult v = run_cmd(cli({"verify", garbled}));
  CHECK(v.exit_code == 2);
  CHECK(v.contains("parse error"));

  // A missing artifact is a configuration error.
  const CmdResult missing = run_cmd(cli({"verify", fixture_path("absent.json")}));
  CHECK(missing.exit_code == 2);
}

TEST_CASE("apc-free emits a verified multi-scale certificate") {
  const std::string out = fixture_path("apc_cert.json");
  const CmdResult r = run_cmd(cli({"apc-free", "--config", free_config(), "--scales", "1,2,2,3",
                                   "--ball", "6", "--out", out}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "scales: 1,2,2,3 (effective: 1,2,2,3,3,3)");
  CHECK(lines[1] == "ball radius: 6");
  CHECK(lines[2] == "budgets: node_cap=5000000, max_syllables=32");
  CHECK(lines[3] == "6 families, scales 1,2,2,3,3,3, covering: true");

  const CmdResult v = run_cmd(cli({"verify", out}));
  CHECK(v.exit_code == 0);
  CHECK(v.output == "verified: 6 families, scales 1,2,2,3,3,3, covering: true\n");
}

TEST_CASE("tree-yr reports the comparison factors and a verified cover") {
  const std::string out = fixture_path("tree_cert.json");
  const CmdResult r = run_cmd(
      cli({"tree-yr", "--config", free11_config(), "--scale", "2", "--depth", "2", "--out", out}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "syllable cap: 2");
  CHECK(lines[1] == "depth: 2");
  CHECK(lines[2] == "cover scale: 2");
  CHECK(lines[3] == "vertices: 41");
  CHECK(lines[5] == "2 families, disjoint > 2, mesh <= 12, covering: true");

  const CmdResult v = run_cmd(cli({"verify", out}));
  CHECK(v.exit_code == 0);
  CHECK(v.output == "verified: 2 families, disjoint > 2, mesh <= 12, covering: true\n");
}

TEST_CASE("union-cover assembles per-piece covers and verifies") {
  const std::string in_path = fixture_path("union_in.json");
  write_file(in_path, R"({
  "dim": 1,
  "scales": [1, 2],
  "gaps": [1, 2],
  "bounds": [2, 2],
  "pieces": [
    {"label": "X0", "elements": [[0], [1], [2], [3], [4], [5]]},
    {"label": "X1", "elements": [[40], [41], [42], [43], [44], [45]]}
  ],
  "piece_families": [
    [
      {"label": "u0", "sets": [[[0], [1]], [[4], [5]]]},
      {"label": "u1", "sets": [[[40], [41]], [[44], [45]]]}
    ],
    [
      {"label": "u0", "sets": [[[2], [3]]]},
      {"label": "u1", "sets": [[[42], [43]]]}
    ]
  ],
  "shared_region": [[6], [7], [8], [9], [10], [11], [12], [13], [14], [15], [16], [17],
                    [18], [19], [20], [21], [22], [23], [24], [25], [26], [27], [28],
                    [29], [30], [31], [32], [33], [34], [35], [36], [37], [38], [39]],
  "shared_cover": [
    {"label": "v", "sets": [[[6], [7], [8], [9], [10], [11], [12], [13], [14], [15],
                             [16], [17], [18], [19], [20], [21], [22], [23], [24], [25],
                             [26], [27], [28], [29], [30], [31], [32], [33], [34], [35],
                             [36], [37], [38], [39]]]}
  ]
})");
  const std::string out = fixture_path("union_cert.json");
  const CmdResult r = run_cmd(cli({"union-cover", "--in", in_path, "--out", out}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "scales: 1,2");
  CHECK(lines[1] == "gaps: 1,2");
  CHECK(lines[2] == "declared bounds: 2,2");
  CHECK(lines[3] == "pieces: 2");
  CHECK(lines[4] == "meshes: 37,1");
  CHECK(lines[5] == "2 families, covering: true");

  const CmdResult v = run_cmd(cli({"verify", out}));
  CHECK(v.exit_code == 0);
  CHECK(v.output == "verified: 2 families, covering: true\n");

  // A declared bound below its gap is rejected up front as a bad problem.
  std::string bad = slurp(in_path);
  const std::size_t bpos = bad.find("\"bounds\": [2, 2]");
  REQUIRE(bpos != std::string::npos);
  bad.replace(bpos, 16, "\"bounds\": [0, 2]");
  const std::string bad_path = fixture_path("union_bad.json");
  write_file(bad_path, bad);
  const CmdResult f = run_cmd(cli({"union-cover", "--in", bad_path}));
  CHECK(f.exit_code == 2);
  CHECK(f.contains("each bound must be at least its gap"));

  // An input whose first-scale family is not actually 1-separated fails the
  // assembly checks proper.
  std::string unsep = slurp(in_path);
  const std::size_t upos = unsep.find("[[[0], [1]], [[4], [5]]]");
  REQUIRE(upos != std::string::npos);
  unsep.replace(upos, 24, "[[[0], [1], [2], [3]], [[4], [5]]]");
  const std::string unsep_path = fixture_path("union_unsep.json");
  write_file(unsep_path, unsep);
  const CmdResult g = run_cmd(cli({"union-cover", "--in", unsep_path}));
  CHECK(g.exit_code == 5);
  CHECK(g.contains("verification failed:"));
}

TEST_CASE("sfdc-play records verified transcripts and failed ones exit 5") {
  const std::string out = fixture_path("transcript.json");
  const CmdResult r = run_cmd(cli({"sfdc-play", "Z^2", "zn", "2,5", "--out", out}));
  CHECK(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "space: Z^2");
  CHECK(lines[1] == "strategy: zn");
  CHECK(lines[2] == "scales: 2,5");
  CHECK(lines[3] == "2 steps, final bound 16, verified: true");

  const CmdResult v = run_cmd(cli({"verify", out}));
  CHECK(v.exit_code == 0);
  CHECK(v.output == "verified: 2 steps, final bound 16, verified: true\n");

  // Too few scales: the game fails, the transcript is still written with the
  // failure recorded, and both the play and any later verify exit 5.
  const std::string failed_out = fixture_path("transcript_failed.json");
  const CmdResult f = run_cmd(cli({"sfdc-play", "Z^2", "zn", "3", "--out", failed_out}));
  CHECK(f.exit_code == 5);
  CHECK(f.contains("failed after 1 steps"));
  CHECK(slurp(failed_out).find("\"failed\": true") != std::string::npos);

  const CmdResult fv = run_cmd(cli({"verify", failed_out}));
  CHECK(fv.exit_code == 5);
  CHECK(fv.contains("marked failed"));
}

TEST_CASE("prop-a-check passes by default and fails when corrupted") {
  const CmdResult ok = run_cmd(cli({"prop-a-check"}));
  CHECK(ok.exit_code == 0);
  const auto lines = lines_of(ok.output);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "domain radius: 30");
  CHECK(lines[1] == "set radius: 10");
  CHECK(lines[2] == "closeness r: 1, eps: 1/4");
  CHECK(lines[3] == "base points present: true");
  CHECK(lines[4] == "overlap ratios below eps: true");
  CHECK(lines[5] == "members within range: true");
  CHECK(lines[6] == "conditions: pass");

  const CmdResult bad = run_cmd(cli({"prop-a-check", "--corrupt", "drop-first-pair"}));
  CHECK(bad.exit_code == 5);
  CHECK(bad.contains("base points present: false"));
  CHECK(bad.contains("does not contain its own base point"));
  CHECK(bad.contains("conditions: fail"));

  // Radii too small for the ratio bound: the averaging condition fails honestly.
  const CmdResult tight = run_cmd(cli({"prop-a-check", "--ball", "1", "--eps", "1/4"}));
  CHECK(tight.exit_code == 5);
  CHECK(tight.contains("overlap ratios below eps: false"));
}
