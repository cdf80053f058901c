// gpcert: weighted word metrics on graph products of groups, with
// machine-verified finite-scale certificates for cover constructions and
// decomposition games.
//
// Exit codes: 0 success/verified, 2 parse or configuration error, 3 the
// construction is outside the supported structure classes, 4 a search budget
// was exceeded, 5 verification failed.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gpcert/certio.hpp"
#include "gpcert/config.hpp"
#include "gpcert/covers.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/graphprod.hpp"
#include "gpcert/metric.hpp"

namespace {

using namespace gpcert;

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::size_t i = 0;
  while (true) {
    const std::size_t start = i;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
    std::size_t digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      ++i;
      ++digits;
    }
    if (digits == 0) throw ParseError("scale list: expected an integer", start);
    out.push_back(std::stoll(text.substr(start, i - start)));
    if (i == text.size()) break;
    if (text[i] != ',') throw ParseError("scale list: expected ','", i);
    ++i;
  }
  return out;
}

WorkbenchConfig load_with_budget(const std::string& path, std::int64_t budget) {
  WorkbenchConfig cfg = load_config(path);
  if (budget >= 0) cfg = with_node_cap(cfg, budget);
  return cfg;
}

void print_header(const std::vector<std::string>& lines) {
  for (const std::string& line : lines) std::cout << line << "\n";
}

int emit_artifact(const Artifact& art, const std::string& out_path) {
  print_header(art.header);
  std::cout << art.summary << "\n";
  if (!out_path.empty()) {
    write_atomic(out_path, art.text);
    std::cout << "wrote: " << out_path << "\n";
  }
  return art.failed ? 5 : 0;
}

PropertyAFamily ball_family_on_line(std::int64_t domain_radius, std::int64_t ball_radius,
                                    std::int64_t r, Frac eps) {
  PropertyAFamily fam;
  fam.r = r;
  fam.eps = eps;
  fam.range = ball_radius;
  for (std::int64_t x = -domain_radius; x <= domain_radius; ++x) {
    fam.domain.push_back(ZPoint{x});
    std::vector<WeightedPoint> set;
    for (std::int64_t y = x - ball_radius; y <= x + ball_radius; ++y) {
      set.push_back(WeightedPoint{ZPoint{y}, 1});
    }
    fam.sets.push_back(std::move(set));
  }
  return fam;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted word metrics on graph products, with verified certificates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string word_text;
  std::string word_text_b;
  std::string scales_text;
  std::int64_t scale = -1;
  std::int64_t ball_radius = -1;
  std::int64_t budget = -1;

  auto* norm_cmd = app.add_subcommand("norm", "print the weighted word norm of an element");
  norm_cmd->add_option("--config", config_path, "configuration file")->required();
  norm_cmd->add_option("word", word_text, "element in the word grammar")->required();
  norm_cmd->add_option("--budget", budget, "search-tree node cap override");

  auto* dist_cmd = app.add_subcommand("distance", "print the distance between two elements");
  dist_cmd->add_option("--config", config_path, "configuration file")->required();
  dist_cmd->add_option("first", word_text, "first element")->required();
  dist_cmd->add_option("second", word_text_b, "second element")->required();
  dist_cmd->add_option("--budget", budget, "search-tree node cap override");

  auto* ball_cmd = app.add_subcommand("ball", "list the ball around an element");
  ball_cmd->add_option("--config", config_path, "configuration file")->required();
  ball_cmd->add_option("center", word_text, "center element (default identity)");
  ball_cmd->add_option("--ball", ball_radius, "ball radius (default from the config)");
  ball_cmd->add_option("--budget", budget, "search-tree node cap override");

  auto* reduce_cmd = app.add_subcommand("reduce", "print the canonical normal form");
  reduce_cmd->add_option("--config", config_path, "configuration file")->required();
  reduce_cmd->add_option("word", word_text, "element in the word grammar")->required();

  auto* std_cmd = app.add_subcommand("standard-form",
                                     "print the standard form at a scale: light tail last");
  std_cmd->add_option("--config", config_path, "configuration file")->required();
  std_cmd->add_option("--scale", scale, "weight threshold for light vertices")->required();
  std_cmd->add_option("word", word_text, "element in the word grammar")->required();

  auto* decompose_cmd =
      app.add_subcommand("decompose", "split an element as (permissible) * (light part)");
  decompose_cmd->add_option("--config", config_path, "configuration file")->required();
  decompose_cmd->add_option("--scale", scale, "weight threshold for light vertices")->required();
  decompose_cmd->add_option("word", word_text, "element in the word grammar")->required();

  auto* asdim_cmd = app.add_subcommand(
      "asdim-witness", "build and verify a scale-separated cover of the ball");
  asdim_cmd->add_option("--config", config_path, "configuration file")->required();
  asdim_cmd->add_option("--scale", scale, "required separation between sets")->required();
  asdim_cmd->add_option("--ball", ball_radius, "ball radius (default from the config)");
  asdim_cmd->add_option("--out", out_path, "certificate output path");
  asdim_cmd->add_option("--budget", budget, "search-tree node cap override");

  auto* apc_cmd = app.add_subcommand(
      "apc-free", "cover a two-factor free product at a whole scale sequence");
  apc_cmd->add_option("--config", config_path, "configuration file")->required();
  apc_cmd->add_option("--scales", scales_text, "comma-separated non-decreasing scales")
      ->required();
  apc_cmd->add_option("--ball", ball_radius, "ball radius (default from the config)");
  apc_cmd->add_option("--out", out_path, "certificate output path");
  apc_cmd->add_option("--budget", budget, "search-tree node cap override");

  std::string in_path;
  auto* union_cmd = app.add_subcommand(
      "union-cover", "assemble a cover of a union of pieces from per-piece covers");
  union_cmd->add_option("--in", in_path, "problem description (JSON)")->required();
  union_cmd->add_option("--out", out_path, "certificate output path");

  std::int64_t depth = 3;
  std::int64_t cover_scale = -1;
  auto* tree_cmd = app.add_subcommand(
      "tree-yr", "enumerate the bounded-syllable tree of a free product and cover it");
  tree_cmd->add_option("--config", config_path, "configuration file")->required();
  tree_cmd->add_option("--scale", scale, "syllable norm cap")->required();
  tree_cmd->add_option("--depth", depth, "syllable-count depth bound (default 3)");
  tree_cmd->add_option("--cover-scale", cover_scale,
                       "separation for the tree cover (default: the syllable cap)");
  tree_cmd->add_option("--out", out_path, "certificate output path");

  std::string space_text;
  std::string strategy_name;
  auto* sfdc_cmd = app.add_subcommand(
      "sfdc-play", "play the decomposition game on a space and record a transcript");
  sfdc_cmd->add_option("space", space_text, "space in the space grammar, e.g. \"Z^2\"")
      ->required();
  sfdc_cmd->add_option("strategy", strategy_name, "strategy name (zn)")->required();
  sfdc_cmd->add_option("scales", scales_text, "comma-separated scale sequence")->required();
  sfdc_cmd->add_option("--out", out_path, "transcript output path");

  std::string artifact_path;
  auto* verify_cmd =
      app.add_subcommand("verify", "re-verify a certificate or transcript from its inputs");
  verify_cmd->add_option("path", artifact_path, "artifact to verify")->required();

  std::int64_t domain_radius = 30;
  std::int64_t pa_r = 1;
  std::string eps_text = "1/4";
  std::string corrupt = "none";
  auto* pa_cmd = app.add_subcommand(
      "prop-a-check", "check the averaging conditions for interval families on the line");
  pa_cmd->add_option("--domain-radius", domain_radius, "domain is [-N, N] (default 30)");
  pa_cmd->add_option("--ball", ball_radius, "set radius around each point (default 10)");
  pa_cmd->add_option("--r", pa_r, "domain closeness threshold (default 1)");
  pa_cmd->add_option("--eps", eps_text, "ratio bound as a fraction (default 1/4)");
  pa_cmd->add_option("--corrupt", corrupt, "none | drop-first-pair (for testing condition 1)")
      ->check(CLI::IsMember({"none", "drop-first-pair"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(norm_cmd)) {
      const WorkbenchConfig cfg = load_with_budget(config_path, budget);
      const GPWord w = parse_word(cfg.graph, word_text);
      std::cout << gp_norm(cfg.graph, w) << "\n";
      return 0;
    }
    if (app.got_subcommand(dist_cmd)) {
      const WorkbenchConfig cfg = load_with_budget(config_path, budget);
      const GPWord g = parse_word(cfg.graph, word_text);
      const GPWord h = parse_word(cfg.graph, word_text_b);
      std::cout << gp_distance(cfg.graph, g, h) << "\n";
      return 0;
    }
    if (app.got_subcommand(ball_cmd)) {
      const WorkbenchConfig cfg = load_with_budget(config_path, budget);
      const std::int64_t radius = ball_radius >= 0 ? ball_radius : cfg.default_ball_radius;
      const GPWord center =
          word_text.empty() ? GPWord{} : parse_word(cfg.graph, word_text);
      const auto elements = gp_ball(cfg.graph, center, radius);
      std::vector<std::string> printed;
      printed.reserve(elements.size());
      for (const GPWord& w : elements) printed.push_back(print_word(cfg.graph, w));
      std::sort(printed.begin(), printed.end());
      std::cout << "ball radius: " << radius << "\n";
      std::cout << "budgets: node_cap=" << cfg.graph.node_cap
                << ", max_syllables=" << cfg.graph.max_syllables << "\n";
      std::cout << "elements: " << printed.size() << "\n";
      for (const std::string& s : printed) std::cout << s << "\n";
      return 0;
    }
    if (app.got_subcommand(reduce_cmd)) {
      const WorkbenchConfig cfg = load_config(config_path);
      const GPWord w = parse_word(cfg.graph, word_text);
      std::cout << print_word(cfg.graph, reduce(cfg.graph, w)) << "\n";
      return 0;
    }
    if (app.got_subcommand(std_cmd)) {
      const WorkbenchConfig cfg = load_config(config_path);
      const GPWord w = parse_word(cfg.graph, word_text);
      std::cout << print_word(cfg.graph, standard_form(cfg.graph, w, scale)) << "\n";
      return 0;
    }
    if (app.got_subcommand(decompose_cmd)) {
      const WorkbenchConfig cfg = load_config(config_path);
      const GPWord w = parse_word(cfg.graph, word_text);
      const auto [x, b] = decompose_xb(cfg.graph, w, scale);
      std::cout << "x: " << print_word(cfg.graph, x) << "\n";
      std::cout << "b: " << print_word(cfg.graph, b) << "\n";
      return 0;
    }
    if (app.got_subcommand(asdim_cmd)) {
      const WorkbenchConfig cfg = load_with_budget(config_path, budget);
      const std::int64_t radius = ball_radius >= 0 ? ball_radius : cfg.default_ball_radius;
      return emit_artifact(make_asdim_certificate(cfg, scale, radius), out_path);
    }
    if (app.got_subcommand(apc_cmd)) {
      const WorkbenchConfig cfg = load_with_budget(config_path, budget);
      const std::int64_t radius = ball_radius >= 0 ? ball_radius : cfg.default_ball_radius;
      const auto scales = parse_int_list(scales_text);
      return emit_artifact(make_apc_free_certificate(cfg, scales, radius), out_path);
    }
    if (app.got_subcommand(union_cmd)) {
      return emit_artifact(make_union_certificate(read_file(in_path)), out_path);
    }
    if (app.got_subcommand(tree_cmd)) {
      const WorkbenchConfig cfg = load_config(config_path);
      const std::int64_t cover_r = cover_scale >= 0 ? cover_scale : scale;
      return emit_artifact(make_tree_certificate(cfg, scale, depth, cover_r), out_path);
    }
    if (app.got_subcommand(sfdc_cmd)) {
      const auto scales = parse_int_list(scales_text);
      return emit_artifact(make_game_transcript(space_text, strategy_name, scales), out_path);
    }
    if (app.got_subcommand(verify_cmd)) {
      const std::string summary = verify_artifact_text(read_file(artifact_path));
      std::cout << "verified: " << summary << "\n";
      return 0;
    }
    if (app.got_subcommand(pa_cmd)) {
      const std::int64_t radius = ball_radius >= 0 ? ball_radius : 10;
      if (domain_radius < 0 || radius < 0 || pa_r < 0) {
        throw ConfigError("radii must be >= 0");
      }
      PropertyAFamily fam = ball_family_on_line(domain_radius, radius, pa_r,
                                                frac_parse(eps_text));
      if (corrupt == "drop-first-pair") {
        auto& first = fam.sets.at(0);
        first.erase(std::remove(first.begin(), first.end(), WeightedPoint{fam.domain.at(0), 1}),
                    first.end());
      }
      const PropertyAReport report = verify_property_A(fam);
      std::cout << "domain radius: " << domain_radius << "\n";
      std::cout << "set radius: " << radius << "\n";
      std::cout << "closeness r: " << pa_r << ", eps: " << frac_print(fam.eps) << "\n";
      std::cout << "base points present: " << (report.base_points_present ? "true" : "false")
                << "\n";
      std::cout << "overlap ratios below eps: " << (report.ratios_small ? "true" : "false")
                << "\n";
      std::cout << "members within range: " << (report.within_range ? "true" : "false") << "\n";
      for (const std::string& f : report.failures) std::cout << "violation: " << f << "\n";
      std::cout << "conditions: " << (report.pass() ? "pass" : "fail") << "\n";
      return report.pass() ? 0 : 5;
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const RefusalError& e) {
    std::cerr << "refusal: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
