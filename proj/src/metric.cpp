#include "gpcert/metric.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <queue>

#include "gpcert/errors.hpp"

namespace gpcert {

namespace {

struct GenStep {
  Syllable syllable;
  std::int64_t cost;
};

std::vector<GenStep> generator_steps(const ProductGraph& graph, const std::vector<int>* subset) {
  std::vector<GenStep> steps;
  const auto add_vertex = [&](int v) {
    const auto& info = graph.vertices[static_cast<std::size_t>(v)];
    for (const auto& s : info.group.generators) {
      steps.push_back(GenStep{Syllable{v, s}, info.weight});
    }
  };
  if (subset != nullptr) {
    for (int v : *subset) {
      if (v < 0 || v >= static_cast<int>(graph.vertices.size())) {
        throw ConfigError("subgroup vertex index out of range");
      }
      add_vertex(v);
    }
  } else {
    for (int v = 0; v < static_cast<int>(graph.vertices.size()); ++v) add_vertex(v);
  }
  return steps;
}

std::int64_t effective_cap(const ProductGraph& graph, std::int64_t node_cap) {
  return node_cap > 0 ? node_cap : graph.node_cap;
}

// Uniform-cost search from the identity. With target != nullptr, returns as
// soon as the target's exact distance is settled; with radius >= 0, explores
// the full closed ball instead. Distances keyed by normal form.
std::map<GPWord, std::int64_t> ucs(const ProductGraph& graph, const std::vector<GenStep>& steps,
                                   const GPWord* target, std::int64_t radius,
                                   std::int64_t node_cap, std::int64_t* target_out) {
  std::map<GPWord, std::int64_t> dist;
  // (cost, word) ordering makes the pop order deterministic.
  std::priority_queue<std::pair<std::int64_t, GPWord>, std::vector<std::pair<std::int64_t, GPWord>>,
                      std::greater<>>
      frontier;
  dist[GPWord{}] = 0;
  frontier.emplace(0, GPWord{});
  while (!frontier.empty()) {
    const auto [d, w] = frontier.top();
    frontier.pop();
    auto it = dist.find(w);
    if (it == dist.end() || it->second < d) continue;  // stale entry
    if (target != nullptr && w == *target) {
      *target_out = d;
      return dist;
    }
    for (const auto& step : steps) {
      const std::int64_t nd = d + step.cost;
      if (radius >= 0 && nd > radius) continue;
      GPWord next = gp_multiply(graph, w, GPWord{step.syllable});
      auto found = dist.find(next);
      if (found != dist.end() && found->second <= nd) continue;
      dist[next] = nd;
      if (static_cast<std::int64_t>(dist.size()) > node_cap) {
        throw BudgetError("norm search exceeded the node cap");
      }
      frontier.emplace(nd, std::move(next));
    }
  }
  if (target != nullptr) {
    throw BudgetError("norm search exhausted without reaching the target");
  }
  return dist;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

}  // namespace

std::int64_t syllable_norm(const ProductGraph& graph, const GPWord& word) {
  const GPWord w = reduce(graph, word);
  std::int64_t total = 0;
  for (const auto& s : w) {
    const auto& info = graph.vertices[static_cast<std::size_t>(s.vertex)];
    total += vg_norm_weighted(info.group, s.elem, info.weight);
  }
  return total;
}

std::int64_t syllable_distance(const ProductGraph& graph, const GPWord& g, const GPWord& h) {
  return syllable_norm(graph, gp_multiply(graph, gp_invert(graph, g), h));
}

void word_parent_step(const ProductGraph& graph, GPWord& w) {
  auto& last = w.back();
  const auto& g = graph.vertices[static_cast<std::size_t>(last.vertex)].group;
  GroupElement p = vg_parent_step(g, last.elem);
  if (vg_is_identity(g, p)) {
    w.pop_back();
  } else {
    last.elem = std::move(p);
  }
}

std::int64_t gp_norm(const ProductGraph& graph, const GPWord& word, std::int64_t node_cap) {
  const GPWord target = reduce(graph, word);
  if (target.empty()) return 0;
  const auto steps = generator_steps(graph, nullptr);
  std::int64_t result = -1;
  ucs(graph, steps, &target, -1, effective_cap(graph, node_cap), &result);
  return result;
}

std::int64_t gp_distance(const ProductGraph& graph, const GPWord& g, const GPWord& h,
                         std::int64_t node_cap) {
  return gp_norm(graph, gp_multiply(graph, gp_invert(graph, g), h), node_cap);
}

std::vector<GPWord> gp_ball(const ProductGraph& graph, const GPWord& center, std::int64_t radius,
                            std::int64_t node_cap) {
  if (radius < 0) throw ConfigError("ball radius must be non-negative");
  const GPWord c = reduce(graph, center);
  const auto steps = generator_steps(graph, nullptr);
  const auto dist = ucs(graph, steps, nullptr, radius, effective_cap(graph, node_cap), nullptr);
  std::vector<GPWord> out;
  out.reserve(dist.size());
  for (const auto& [w, d] : dist) {
    out.push_back(c.empty() ? w : gp_multiply(graph, c, w));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GPWord> gp_ball_subgroup(const ProductGraph& graph, const std::vector<int>& vertices,
                                     std::int64_t radius, std::int64_t node_cap) {
  if (radius < 0) throw ConfigError("ball radius must be non-negative");
  const auto steps = generator_steps(graph, &vertices);
  const auto dist = ucs(graph, steps, nullptr, radius, effective_cap(graph, node_cap), nullptr);
  std::vector<GPWord> out;
  out.reserve(dist.size());
  for (const auto& [w, d] : dist) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

Frac make_frac(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ConfigError("fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = gcd64(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Frac{num, den};
}

Frac frac_add(Frac a, Frac b) { return make_frac(a.num * b.den + b.num * a.den, a.den * b.den); }
Frac frac_sub(Frac a, Frac b) { return make_frac(a.num * b.den - b.num * a.den, a.den * b.den); }
Frac frac_mul(Frac a, Frac b) { return make_frac(a.num * b.num, a.den * b.den); }

int frac_cmp(Frac a, Frac b) {
  const __int128 lhs = static_cast<__int128>(a.num) * b.den;
  const __int128 rhs = static_cast<__int128>(b.num) * a.den;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

Frac frac_parse(const std::string& text, std::size_t offset_base) {
  std::size_t pos = 0;
  const auto read_int = [&]() -> std::int64_t {
    const std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) != 0) {
      ++pos;
      ++digits;
    }
    if (digits == 0 || digits > 15) {
      throw ParseError("expected an integer", offset_base + start);
    }
    return std::stoll(text.substr(start, pos - start));
  };
  const std::int64_t num = read_int();
  std::int64_t den = 1;
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    den = read_int();
    if (den == 0) throw ParseError("zero denominator", offset_base + pos - 1);
  }
  if (pos != text.size()) throw ParseError("trailing characters in fraction", offset_base + pos);
  return make_frac(num, den);
}

std::string frac_print(Frac f) {
  if (f.den == 1) return std::to_string(f.num);
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

PiecewiseLinear make_piecewise_linear(std::vector<std::pair<Frac, Frac>> points, Frac tail_slope) {
  if (points.empty()) throw ConfigError("piecewise-linear control needs at least one point");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (frac_cmp(points[i - 1].first, points[i].first) >= 0) {
      throw ConfigError("piecewise-linear x-coordinates must be strictly increasing");
    }
    if (frac_cmp(points[i - 1].second, points[i].second) > 0) {
      throw ConfigError("control functions must be non-decreasing");
    }
  }
  if (frac_cmp(tail_slope, Frac{0, 1}) < 0) {
    throw ConfigError("control functions must be non-decreasing");
  }
  return PiecewiseLinear{std::move(points), tail_slope};
}

Frac pl_eval(const PiecewiseLinear& f, Frac x) {
  if (f.points.empty()) throw ConfigError("piecewise-linear control needs at least one point");
  if (frac_cmp(x, f.points.front().first) <= 0) return f.points.front().second;
  for (std::size_t i = 1; i < f.points.size(); ++i) {
    if (frac_cmp(x, f.points[i].first) <= 0) {
      const auto& [x0, y0] = f.points[i - 1];
      const auto& [x1, y1] = f.points[i];
      // y0 + (y1-y0)/(x1-x0) * (x - x0)
      const Frac slope = frac_mul(frac_sub(y1, y0), make_frac(frac_sub(x1, x0).den,
                                                              frac_sub(x1, x0).num));
      return frac_add(y0, frac_mul(slope, frac_sub(x, x0)));
    }
  }
  const auto& [xl, yl] = f.points.back();
  return frac_add(yl, frac_mul(f.tail_slope, frac_sub(x, xl)));
}

PiecewiseLinear pl_parse(const std::string& text) {
  // Linear shorthand: [coef] 't' ['/' div] [('+'|'-') const]  |  fraction.
  const std::size_t t_pos = text.find('t');
  if (t_pos == std::string::npos) {
    const Frac c = frac_parse(text);
    return make_piecewise_linear({{Frac{0, 1}, c}}, Frac{0, 1});
  }
  Frac coef{1, 1};
  if (t_pos > 0) coef = frac_parse(text.substr(0, t_pos));
  std::size_t pos = t_pos + 1;
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    std::size_t digits = pos;
    while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits])) != 0) {
      ++digits;
    }
    if (digits == pos) throw ParseError("expected a divisor after '/'", pos);
    const std::int64_t den = std::stoll(text.substr(pos, digits - pos));
    if (den == 0) throw ParseError("zero denominator", pos);
    coef = frac_mul(coef, make_frac(1, den));
    pos = digits;
  }
  Frac constant{0, 1};
  if (pos < text.size()) {
    if (text[pos] != '+' && text[pos] != '-') {
      throw ParseError("expected '+', '-', or end after the slope term", pos);
    }
    constant = frac_parse(text.substr(pos), pos);
  }
  return make_piecewise_linear({{Frac{0, 1}, constant}}, coef);
}

CoarseReport verify_coarse_map(const std::vector<CoarseSample>& samples, const ControlPair& cp) {
  CoarseReport report;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Frac dx{samples[i].dx, 1};
    const Frac dy{samples[i].dy, 1};
    const Frac lo = pl_eval(cp.rho1, dx);
    const Frac hi = pl_eval(cp.rho2, dx);
    if (frac_cmp(lo, dy) > 0) {
      report.violations.push_back("sample " + std::to_string(i) + ": rho1(" +
                                  std::to_string(samples[i].dx) + ") = " + frac_print(lo) +
                                  " exceeds target distance " + std::to_string(samples[i].dy));
    }
    if (frac_cmp(dy, hi) > 0) {
      report.violations.push_back("sample " + std::to_string(i) + ": target distance " +
                                  std::to_string(samples[i].dy) + " exceeds rho2(" +
                                  std::to_string(samples[i].dx) + ") = " + frac_print(hi));
    }
  }
  return report;
}

}  // namespace gpcert
