#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lssa {

// A finite join-semilattice of effects. Element 0 is always bottom (pure).
// Joins are stored in a table computed from a declared partial order.
struct EffectLattice {
  std::vector<std::string> names;
  std::vector<std::vector<int>> join_table;

  static EffectLattice two_point() {
    EffectLattice e;
    e.names = {"pure", "impure"};
    e.join_table = {{0, 1}, {1, 1}};
    return e;
  }

  // Builds a lattice from element names and a list of order pairs a <= b.
  // Fails if some pair of elements lacks a least upper bound.
  static EffectLattice from_order(std::vector<std::string> ns,
                                  const std::vector<std::pair<int, int>>& leq_pairs) {
    int n = static_cast<int>(ns.size());
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) le[i][i] = true;
    for (auto& [a, b] : leq_pairs) le[a][b] = true;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (le[i][k] && le[k][j]) le[i][j] = true;
    for (int i = 1; i < n; ++i)
      if (!le[0][i]) throw std::invalid_argument("effect lattice: element 0 must be bottom");
    EffectLattice e;
    e.names = std::move(ns);
    e.join_table.assign(n, std::vector<int>(n, -1));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        std::optional<int> lub;
        for (int c = 0; c < n; ++c) {
          if (!(le[a][c] && le[b][c])) continue;
          if (!lub || le[c][*lub]) {
            // candidate must be below every other upper bound
            bool least = true;
            for (int d = 0; d < n; ++d)
              if (le[a][d] && le[b][d] && !le[c][d]) least = false;
            if (least) lub = c;
          }
        }
        if (!lub)
          throw std::invalid_argument("effect lattice: no join for " + e.names[a] + ", " +
                                      e.names[b]);
        e.join_table[a][b] = *lub;
      }
    return e;
  }

  int size() const { return static_cast<int>(names.size()); }
  int bot() const { return 0; }

  int top() const {
    int t = 0;
    for (int i = 1; i < size(); ++i) t = join(t, i);
    return t;
  }

  int join(int a, int b) const { return join_table[a][b]; }
  bool leq(int a, int b) const { return join(a, b) == b; }

  std::optional<int> index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (names[i] == name) return i;
    return std::nullopt;
  }
};

using Effect = int;

}  // namespace lssa
