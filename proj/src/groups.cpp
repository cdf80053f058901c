#include "gpcert/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <set>
#include <unordered_map>

#include "gpcert/errors.hpp"

namespace gpcert {

namespace {

constexpr std::int64_t kMaxCyclicModulus = 1'000'000;
constexpr int kMaxFiniteTable = 64;
constexpr int kMaxFreeAbelianRank = 16;
constexpr int kMaxFreeRank = 26;
constexpr std::int64_t kMaxParsedMagnitude = 1'000'000'000'000'000LL;

bool label_char_ok(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.' ||
         c == '+' || c == '-';
}

void check_label(const std::string& label) {
  if (label.empty()) throw ConfigError("finite-table label must be non-empty");
  for (char c : label) {
    if (!label_char_ok(c)) {
      throw ConfigError("finite-table label '" + label +
                        "' contains a character outside [A-Za-z0-9_.+-]");
    }
  }
}

// Breadth-first word lengths and geodesic parents over an explicit neighbor
// function on {0, …, n-1}; start is the identity.
template <typename Neighbors>
void bfs_norms(std::int64_t n, std::int64_t identity, Neighbors neighbors,
               std::vector<std::int64_t>& norm_table, std::vector<std::int64_t>& parent_step) {
  norm_table.assign(static_cast<std::size_t>(n), -1);
  parent_step.assign(static_cast<std::size_t>(n), -1);
  norm_table[static_cast<std::size_t>(identity)] = 0;
  parent_step[static_cast<std::size_t>(identity)] = identity;
  std::deque<std::int64_t> queue{identity};
  while (!queue.empty()) {
    const std::int64_t cur = queue.front();
    queue.pop_front();
    for (std::int64_t next : neighbors(cur)) {
      if (norm_table[static_cast<std::size_t>(next)] >= 0) continue;
      norm_table[static_cast<std::size_t>(next)] = norm_table[static_cast<std::size_t>(cur)] + 1;
      parent_step[static_cast<std::size_t>(next)] = cur;
      queue.push_back(next);
    }
  }
  for (std::int64_t d : norm_table) {
    if (d < 0) throw ConfigError("generating set does not generate the group");
  }
}

std::int64_t mod_norm(std::int64_t value, std::int64_t m) {
  std::int64_t r = value % m;
  if (r < 0) r += m;
  return r;
}

std::int64_t parse_int_at(const std::string& text, std::size_t& pos, std::size_t offset_base) {
  const std::size_t start = pos;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
  std::size_t digits = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])) != 0) {
    ++pos;
    ++digits;
  }
  if (digits == 0) throw ParseError("expected an integer", offset_base + start);
  if (digits > 18) throw ParseError("integer literal too large", offset_base + start);
  const std::int64_t value = std::strtoll(text.substr(start, pos - start).c_str(), nullptr, 10);
  if (value > kMaxParsedMagnitude || value < -kMaxParsedMagnitude) {
    throw ParseError("integer literal too large", offset_base + start);
  }
  return value;
}

void require_valid(const VertexGroupSpec& g, const GroupElement& a, const char* who) {
  if (!vg_is_valid(g, a)) throw ConfigError(std::string(who) + ": element invalid for group kind");
}

}  // namespace

VertexGroupSpec make_cyclic(std::int64_t modulus,
                            const std::vector<std::int64_t>& generator_residues) {
  if (modulus < 2) throw ConfigError("cyclic modulus must be >= 2");
  if (modulus > kMaxCyclicModulus) throw ConfigError("cyclic modulus exceeds the supported cap");
  VertexGroupSpec g;
  g.kind = GroupKind::Cyclic;
  g.modulus = modulus;
  std::set<std::int64_t> gens;
  if (generator_residues.empty()) {
    gens.insert(1);
    gens.insert(mod_norm(-1, modulus));
  } else {
    for (std::int64_t r : generator_residues) {
      const std::int64_t v = mod_norm(r, modulus);
      if (v == 0) throw ConfigError("cyclic generating set must not contain the identity");
      gens.insert(v);
    }
    for (std::int64_t v : gens) {
      if (gens.count(mod_norm(-v, modulus)) == 0) {
        throw ConfigError("cyclic generating set is not closed under inverses");
      }
    }
  }
  for (std::int64_t v : gens) g.generators.push_back(GroupElement{{v}});
  bfs_norms(
      modulus, 0,
      [&](std::int64_t cur) {
        std::vector<std::int64_t> out;
        out.reserve(gens.size());
        for (std::int64_t s : gens) out.push_back(mod_norm(cur + s, modulus));
        return out;
      },
      g.norm_table, g.parent_step);
  return g;
}

VertexGroupSpec make_free_abelian(int rank) {
  if (rank < 1) throw ConfigError("free-abelian rank must be >= 1");
  if (rank > kMaxFreeAbelianRank) throw ConfigError("free-abelian rank exceeds the supported cap");
  VertexGroupSpec g;
  g.kind = GroupKind::FreeAbelian;
  g.rank = rank;
  for (int sign : {+1, -1}) {
    for (int i = 0; i < rank; ++i) {
      GroupElement e;
      e.v.assign(static_cast<std::size_t>(rank), 0);
      e.v[static_cast<std::size_t>(i)] = sign;
      g.generators.push_back(std::move(e));
    }
  }
  return g;
}

VertexGroupSpec make_free(int rank, std::int64_t max_letters) {
  if (rank < 1) throw ConfigError("free rank must be >= 1");
  if (rank > kMaxFreeRank) throw ConfigError("free rank exceeds the supported cap (letters a..z)");
  if (max_letters < 1) throw ConfigError("free-group letter cap must be >= 1");
  VertexGroupSpec g;
  g.kind = GroupKind::Free;
  g.rank = rank;
  g.max_letters = max_letters;
  for (int i = 1; i <= rank; ++i) {
    g.generators.push_back(GroupElement{{i}});
    g.generators.push_back(GroupElement{{-i}});
  }
  return g;
}

VertexGroupSpec make_finite_table(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<std::string>>& table_labels,
                                  const std::vector<std::string>& generator_labels) {
  const int n = static_cast<int>(labels.size());
  if (n < 1) throw ConfigError("finite table must have at least one element");
  if (n > kMaxFiniteTable) throw ConfigError("finite tables are capped at 64 elements");
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < n; ++i) {
    check_label(labels[static_cast<std::size_t>(i)]);
    if (!index.emplace(labels[static_cast<std::size_t>(i)], i).second) {
      throw ConfigError("duplicate finite-table label '" + labels[static_cast<std::size_t>(i)] + "'");
    }
  }
  if (static_cast<int>(table_labels.size()) != n) {
    throw ConfigError("finite table must be square (row count mismatch)");
  }
  VertexGroupSpec g;
  g.kind = GroupKind::FiniteTable;
  g.labels = labels;
  g.table.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(table_labels[static_cast<std::size_t>(i)].size()) != n) {
      throw ConfigError("finite table must be square (column count mismatch)");
    }
    for (int j = 0; j < n; ++j) {
      const std::string& cell = table_labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      auto it = index.find(cell);
      if (it == index.end()) throw ConfigError("finite-table cell '" + cell + "' is not a label");
      g.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = it->second;
    }
  }
  int identity = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      ok = g.table[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)] == j &&
           g.table[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)] == j;
    }
    if (ok) {
      identity = e;
      break;
    }
  }
  if (identity < 0) throw ConfigError("finite table has no two-sided identity");
  g.identity_index = identity;
  g.inverse.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == identity &&
          g.table[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] == identity) {
        g.inverse[static_cast<std::size_t>(i)] = j;
        break;
      }
    }
    if (g.inverse[static_cast<std::size_t>(i)] < 0) {
      throw ConfigError("finite-table element '" + labels[static_cast<std::size_t>(i)] +
                        "' has no two-sided inverse");
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const int ab = g.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        const int bc = g.table[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
        if (g.table[static_cast<std::size_t>(ab)][static_cast<std::size_t>(c)] !=
            g.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(bc)]) {
          throw ConfigError("finite table is not associative");
        }
      }
    }
  }
  std::set<int> gen_idx;
  if (generator_labels.empty()) {
    for (int i = 0; i < n; ++i) {
      if (i != identity) gen_idx.insert(i);
    }
    if (gen_idx.empty() && n > 1) throw ConfigError("finite table has no candidate generators");
  } else {
    for (const std::string& label : generator_labels) {
      auto it = index.find(label);
      if (it == index.end()) throw ConfigError("generator label '" + label + "' is not a label");
      if (it->second == identity) {
        throw ConfigError("finite-table generating set must not contain the identity");
      }
      gen_idx.insert(it->second);
    }
    for (int i : gen_idx) {
      if (gen_idx.count(g.inverse[static_cast<std::size_t>(i)]) == 0) {
        throw ConfigError("finite-table generating set is not closed under inverses");
      }
    }
  }
  for (int i : gen_idx) g.generators.push_back(GroupElement{{i}});
  bfs_norms(
      n, identity,
      [&](std::int64_t cur) {
        std::vector<std::int64_t> out;
        out.reserve(gen_idx.size());
        for (int s : gen_idx) {
          out.push_back(g.table[static_cast<std::size_t>(cur)][static_cast<std::size_t>(s)]);
        }
        return out;
      },
      g.norm_table, g.parent_step);
  return g;
}

GroupElement vg_identity(const VertexGroupSpec& g) {
  switch (g.kind) {
    case GroupKind::Cyclic:
      return GroupElement{{0}};
    case GroupKind::FreeAbelian:
      return GroupElement{std::vector<std::int64_t>(static_cast<std::size_t>(g.rank), 0)};
    case GroupKind::Free:
      return GroupElement{{}};
    case GroupKind::FiniteTable:
      return GroupElement{{g.identity_index}};
  }
  throw ConfigError("unknown group kind");
}

bool vg_is_identity(const VertexGroupSpec& g, const GroupElement& a) {
  return a == vg_identity(g);
}

bool vg_is_valid(const VertexGroupSpec& g, const GroupElement& a) {
  switch (g.kind) {
    case GroupKind::Cyclic:
      return a.v.size() == 1 && a.v[0] >= 0 && a.v[0] < g.modulus;
    case GroupKind::FreeAbelian:
      return static_cast<int>(a.v.size()) == g.rank;
    case GroupKind::Free: {
      if (static_cast<std::int64_t>(a.v.size()) > g.max_letters) return false;
      for (std::size_t i = 0; i < a.v.size(); ++i) {
        const std::int64_t x = a.v[i];
        if (x == 0 || x > g.rank || x < -g.rank) return false;
        if (i > 0 && a.v[i - 1] == -x) return false;
      }
      return true;
    }
    case GroupKind::FiniteTable:
      return a.v.size() == 1 && a.v[0] >= 0 &&
             a.v[0] < static_cast<std::int64_t>(g.labels.size());
  }
  return false;
}

GroupElement vg_multiply(const VertexGroupSpec& g, const GroupElement& a, const GroupElement& b) {
  require_valid(g, a, "multiply");
  require_valid(g, b, "multiply");
  switch (g.kind) {
    case GroupKind::Cyclic:
      return GroupElement{{mod_norm(a.v[0] + b.v[0], g.modulus)}};
    case GroupKind::FreeAbelian: {
      GroupElement out = a;
      for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
      return out;
    }
    case GroupKind::Free: {
      GroupElement out = a;
      for (std::int64_t x : b.v) {
        if (!out.v.empty() && out.v.back() == -x) {
          out.v.pop_back();
        } else {
          out.v.push_back(x);
        }
      }
      if (static_cast<std::int64_t>(out.v.size()) > g.max_letters) {
        throw BudgetError("free-group element exceeds the configured letter cap");
      }
      return out;
    }
    case GroupKind::FiniteTable:
      return GroupElement{
          {g.table[static_cast<std::size_t>(a.v[0])][static_cast<std::size_t>(b.v[0])]}};
  }
  throw ConfigError("unknown group kind");
}

GroupElement vg_invert(const VertexGroupSpec& g, const GroupElement& a) {
  require_valid(g, a, "invert");
  switch (g.kind) {
    case GroupKind::Cyclic:
      return GroupElement{{mod_norm(-a.v[0], g.modulus)}};
    case GroupKind::FreeAbelian: {
      GroupElement out = a;
      for (std::int64_t& x : out.v) x = -x;
      return out;
    }
    case GroupKind::Free: {
      GroupElement out;
      out.v.reserve(a.v.size());
      for (auto it = a.v.rbegin(); it != a.v.rend(); ++it) out.v.push_back(-*it);
      return out;
    }
    case GroupKind::FiniteTable:
      return GroupElement{{g.inverse[static_cast<std::size_t>(a.v[0])]}};
  }
  throw ConfigError("unknown group kind");
}

std::int64_t vg_norm(const VertexGroupSpec& g, const GroupElement& a) {
  require_valid(g, a, "norm");
  switch (g.kind) {
    case GroupKind::Cyclic:
    case GroupKind::FiniteTable:
      return g.norm_table[static_cast<std::size_t>(a.v[0])];
    case GroupKind::FreeAbelian: {
      std::int64_t s = 0;
      for (std::int64_t x : a.v) s += std::llabs(x);
      return s;
    }
    case GroupKind::Free:
      return static_cast<std::int64_t>(a.v.size());
  }
  throw ConfigError("unknown group kind");
}

std::int64_t vg_norm_weighted(const VertexGroupSpec& g, const GroupElement& a,
                              std::int64_t weight) {
  if (weight < 1) throw ConfigError("weights must be positive integers");
  return weight * vg_norm(g, a);
}

namespace {

void enumerate_abelian(int rank, std::int64_t budget, std::vector<std::int64_t>& partial,
                       std::vector<GroupElement>& out, std::int64_t node_cap) {
  if (static_cast<int>(partial.size()) == rank) {
    if (static_cast<std::int64_t>(out.size()) >= node_cap) {
      throw BudgetError("ball enumeration exceeded the node cap");
    }
    out.push_back(GroupElement{partial});
    return;
  }
  for (std::int64_t x = -budget; x <= budget; ++x) {
    partial.push_back(x);
    enumerate_abelian(rank, budget - std::llabs(x), partial, out, node_cap);
    partial.pop_back();
  }
}

void enumerate_free(const VertexGroupSpec& g, std::int64_t remaining,
                    std::vector<std::int64_t>& partial, std::vector<GroupElement>& out,
                    std::int64_t node_cap) {
  if (static_cast<std::int64_t>(out.size()) >= node_cap) {
    throw BudgetError("ball enumeration exceeded the node cap");
  }
  out.push_back(GroupElement{partial});
  if (remaining == 0) return;
  if (static_cast<std::int64_t>(partial.size()) >= g.max_letters) return;
  for (int i = 1; i <= g.rank; ++i) {
    for (std::int64_t letter : {static_cast<std::int64_t>(i), static_cast<std::int64_t>(-i)}) {
      if (!partial.empty() && partial.back() == -letter) continue;
      partial.push_back(letter);
      enumerate_free(g, remaining - 1, partial, out, node_cap);
      partial.pop_back();
    }
  }
}

}  // namespace

std::vector<GroupElement> vg_ball(const VertexGroupSpec& g, std::int64_t radius,
                                  std::int64_t weight, std::int64_t node_cap) {
  if (radius < 0) throw ConfigError("ball radius must be non-negative");
  if (weight < 1) throw ConfigError("weights must be positive integers");
  const std::int64_t budget = radius / weight;  // word-length budget
  std::vector<GroupElement> out;
  switch (g.kind) {
    case GroupKind::Cyclic:
    case GroupKind::FiniteTable: {
      const std::int64_t n = static_cast<std::int64_t>(g.norm_table.size());
      for (std::int64_t i = 0; i < n; ++i) {
        if (g.norm_table[static_cast<std::size_t>(i)] <= budget) out.push_back(GroupElement{{i}});
      }
      break;
    }
    case GroupKind::FreeAbelian: {
      std::vector<std::int64_t> partial;
      enumerate_abelian(g.rank, budget, partial, out, node_cap);
      break;
    }
    case GroupKind::Free: {
      std::vector<std::int64_t> partial;
      enumerate_free(g, std::min(budget, g.max_letters), partial, out, node_cap);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GroupElement vg_parent_step(const VertexGroupSpec& g, const GroupElement& a) {
  require_valid(g, a, "parent_step");
  if (vg_is_identity(g, a)) throw ConfigError("parent_step: identity has no parent");
  switch (g.kind) {
    case GroupKind::Cyclic:
    case GroupKind::FiniteTable:
      return GroupElement{{g.parent_step[static_cast<std::size_t>(a.v[0])]}};
    case GroupKind::FreeAbelian: {
      GroupElement out = a;
      for (std::int64_t& x : out.v) {
        if (x != 0) {
          x += (x > 0) ? -1 : 1;
          return out;
        }
      }
      break;
    }
    case GroupKind::Free: {
      GroupElement out = a;
      out.v.pop_back();
      return out;
    }
  }
  throw ConfigError("parent_step: unreachable");
}

std::int64_t vg_diameter(const VertexGroupSpec& g) {
  if (g.kind != GroupKind::Cyclic && g.kind != GroupKind::FiniteTable) {
    throw ConfigError("diameter is only defined for finite vertex groups");
  }
  std::int64_t best = 0;
  for (std::int64_t n : g.norm_table) best = std::max(best, n);
  return best;
}

std::string vg_print(const VertexGroupSpec& g, const GroupElement& a) {
  require_valid(g, a, "print");
  switch (g.kind) {
    case GroupKind::Cyclic:
      return std::to_string(a.v[0]);
    case GroupKind::FreeAbelian: {
      if (g.rank == 1) return std::to_string(a.v[0]);
      std::string out = "(";
      for (std::size_t i = 0; i < a.v.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(a.v[i]);
      }
      out += ")";
      return out;
    }
    case GroupKind::Free: {
      std::string out;
      for (std::int64_t x : a.v) {
        out += static_cast<char>((x > 0 ? 'a' + x : 'A' - x) - 1);
      }
      return out;
    }
    case GroupKind::FiniteTable:
      return g.labels[static_cast<std::size_t>(a.v[0])];
  }
  throw ConfigError("unknown group kind");
}

GroupElement vg_parse(const VertexGroupSpec& g, const std::string& text,
                      std::size_t offset_base) {
  std::size_t pos = 0;
  switch (g.kind) {
    case GroupKind::Cyclic: {
      const std::int64_t v = parse_int_at(text, pos, offset_base);
      if (pos != text.size()) throw ParseError("trailing characters after integer", offset_base + pos);
      return GroupElement{{mod_norm(v, g.modulus)}};
    }
    case GroupKind::FreeAbelian: {
      GroupElement out;
      if (g.rank == 1) {
        out.v.push_back(parse_int_at(text, pos, offset_base));
      } else {
        if (pos >= text.size() || text[pos] != '(') {
          throw ParseError("expected '(' opening a coordinate vector", offset_base + pos);
        }
        ++pos;
        for (int i = 0; i < g.rank; ++i) {
          if (i > 0) {
            if (pos >= text.size() || text[pos] != ',') {
              throw ParseError("expected ',' in coordinate vector", offset_base + pos);
            }
            ++pos;
          }
          out.v.push_back(parse_int_at(text, pos, offset_base));
        }
        if (pos >= text.size() || text[pos] != ')') {
          throw ParseError("expected ')' closing a coordinate vector", offset_base + pos);
        }
        ++pos;
      }
      if (pos != text.size()) throw ParseError("trailing characters after vector", offset_base + pos);
      return out;
    }
    case GroupKind::Free: {
      GroupElement raw;
      for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        std::int64_t letter = 0;
        if (c >= 'a' && c <= 'z') letter = c - 'a' + 1;
        if (c >= 'A' && c <= 'Z') letter = -(c - 'A' + 1);
        if (letter == 0 || std::llabs(letter) > g.rank) {
          throw ParseError("letter outside the free group's alphabet", offset_base + pos);
        }
        raw.v.push_back(letter);
      }
      // Canonicalize by free reduction.
      GroupElement out;
      for (std::int64_t x : raw.v) {
        if (!out.v.empty() && out.v.back() == -x) {
          out.v.pop_back();
        } else {
          out.v.push_back(x);
        }
      }
      if (static_cast<std::int64_t>(out.v.size()) > g.max_letters) {
        throw BudgetError("free-group element exceeds the configured letter cap");
      }
      return out;
    }
    case GroupKind::FiniteTable: {
      for (std::size_t i = 0; i < g.labels.size(); ++i) {
        if (g.labels[i] == text) return GroupElement{{static_cast<std::int64_t>(i)}};
      }
      throw ParseError("unknown finite-table label '" + text + "'", offset_base);
    }
  }
  throw ConfigError("unknown group kind");
}

}  // namespace gpcert
