#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lssa {

// Partially ordered multisets of memory actions. The order is kept as an
// edge list whose transitive closure is the partial order; equality is DAG
// isomorphism after deleting tick nodes.
struct PomAction {
  enum class Kind { Tick, Read, Write, BufWrite };
  Kind kind = Kind::Tick;
  int loc = -1;
  std::uint64_t val = 0;
};

inline std::uint64_t pom_action_code(const PomAction& a) {
  return (static_cast<std::uint64_t>(a.kind) << 56) |
         (static_cast<std::uint64_t>(a.loc & 0xffffff) << 32) | (a.val & 0xffffffffull);
}

struct Pomset {
  std::vector<PomAction> labels;
  std::vector<std::pair<int, int>> edges;  // u happens before v
};

inline Pomset pom_empty() { return {}; }

inline Pomset pom_tick() {
  Pomset p;
  p.labels.push_back(PomAction{});
  return p;
}

inline Pomset pom_single(PomAction a) {
  Pomset p;
  p.labels.push_back(a);
  return p;
}

// Lexicographic-order sum: everything in p precedes everything in q.
inline Pomset pom_seq(const Pomset& p, const Pomset& q) {
  Pomset out = p;
  int off = static_cast<int>(p.labels.size());
  for (auto& l : q.labels) out.labels.push_back(l);
  for (auto& [u, v] : q.edges) out.edges.emplace_back(u + off, v + off);
  for (int i = 0; i < off; ++i)
    for (size_t j = 0; j < q.labels.size(); ++j)
      out.edges.emplace_back(i, off + static_cast<int>(j));
  return out;
}

// Disjoint incomparable union.
inline Pomset pom_par(const Pomset& p, const Pomset& q) {
  Pomset out = p;
  int off = static_cast<int>(p.labels.size());
  for (auto& l : q.labels) out.labels.push_back(l);
  for (auto& [u, v] : q.edges) out.edges.emplace_back(u + off, v + off);
  return out;
}

// Closure matrix of the order relation.
inline std::vector<std::vector<bool>> pom_closure(const Pomset& p) {
  int n = static_cast<int>(p.labels.size());
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (auto& [u, v] : p.edges) le[u][v] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (le[i][k])
        for (int j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = true;
  return le;
}

// Canonical certificate: tick nodes removed, then the lexicographically
// minimal (label, predecessor-mask) sequence over all node orderings.
struct PomCanon {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> cert;

  bool operator==(const PomCanon& o) const { return cert == o.cert; }
  bool operator<(const PomCanon& o) const { return cert < o.cert; }
};

inline PomCanon pom_canonical(const Pomset& p) {
  auto le = pom_closure(p);
  std::vector<int> keep;
  for (size_t i = 0; i < p.labels.size(); ++i)
    if (p.labels[i].kind != PomAction::Kind::Tick) keep.push_back(static_cast<int>(i));
  int n = static_cast<int>(keep.size());
  std::vector<std::uint64_t> code(n);
  std::vector<std::vector<bool>> ord(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    code[i] = pom_action_code(p.labels[keep[i]]);
    for (int j = 0; j < n; ++j) ord[i][j] = le[keep[i]][keep[j]];
  }
  PomCanon best;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> cur;
  std::vector<int> placed;      // node index by position
  std::vector<int> pos(n, -1);  // node -> position
  bool have_best = false;
  // enumerate linear extensions, keeping the minimal key sequence; `eq` says
  // whether cur equals the best certificate's prefix so far
  std::function<void(bool)> go = [&](bool eq) {
    int at = static_cast<int>(placed.size());
    if (at == n) {
      if (!have_best || cur < best.cert) {
        best.cert = cur;
        have_best = true;
      }
      return;
    }
    // candidates achieving the minimal key at this position; only nodes whose
    // predecessors are all placed, so the mask is the full predecessor set
    std::uint64_t bestc = ~0ull;
    std::uint32_t bestm = ~0u;
    std::vector<int> cands;
    for (int v = 0; v < n; ++v) {
      if (pos[v] >= 0) continue;
      bool ready = true;
      for (int u = 0; u < n; ++u)
        if (pos[u] < 0 && ord[u][v]) ready = false;
      if (!ready) continue;
      std::uint32_t mask = 0;
      for (int u = 0; u < n; ++u)
        if (pos[u] >= 0 && ord[u][v]) mask |= 1u << pos[u];
      if (code[v] < bestc || (code[v] == bestc && mask < bestm)) {
        bestc = code[v];
        bestm = mask;
        cands.clear();
      }
      if (code[v] == bestc && mask == bestm) cands.push_back(v);
    }
    bool next_eq = eq;
    if (have_best && eq) {
      auto key = std::make_pair(bestc, bestm);
      if (key > best.cert[at]) return;
      next_eq = key == best.cert[at];
    }
    for (int v : cands) {
      cur.emplace_back(bestc, bestm);
      pos[v] = at;
      placed.push_back(v);
      go(next_eq);
      placed.pop_back();
      pos[v] = -1;
      cur.pop_back();
    }
  };
  go(true);
  return best;
}

inline bool pom_equal(const Pomset& p, const Pomset& q) {
  return pom_canonical(p) == pom_canonical(q);
}

inline int pom_compare(const Pomset& p, const Pomset& q) {
  PomCanon a = pom_canonical(p), b = pom_canonical(q);
  if (a.cert < b.cert) return -1;
  if (b.cert < a.cert) return 1;
  return 0;
}

inline std::string pom_str(const Pomset& p, const std::vector<std::string>& locs) {
  std::string s = "{";
  bool first = true;
  for (auto& a : p.labels) {
    if (a.kind == PomAction::Kind::Tick) continue;
    if (!first) s += ", ";
    first = false;
    std::string l = a.loc >= 0 && a.loc < static_cast<int>(locs.size())
                        ? locs[a.loc]
                        : "l" + std::to_string(a.loc);
    switch (a.kind) {
      case PomAction::Kind::Read: s += l + "=" + std::to_string(a.val); break;
      case PomAction::Kind::Write: s += l + ":=" + std::to_string(a.val); break;
      case PomAction::Kind::BufWrite: s += l + "^:=" + std::to_string(a.val); break;
      default: break;
    }
  }
  return s + "}";
}

}  // namespace lssa
