#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "lssa/effects.hpp"
#include "lssa/signature.hpp"
#include "lssa/types.hpp"

namespace lssa {

// Typing hypothesis: a variable of type ty usable at effect >= eff.
struct Hyp {
  TyPtr ty;
  Effect eff = 0;
};

// Contexts grow at the back; de Bruijn index 0 is the last entry.
struct Ctx {
  std::vector<Hyp> entries;

  int size() const { return static_cast<int>(entries.size()); }

  const Hyp& lookup(int i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("ctx lookup out of range");
    return entries[entries.size() - 1 - i];
  }

  Ctx push(TyPtr ty, Effect eff = 0) const {
    Ctx c = *this;
    c.entries.push_back(Hyp{std::move(ty), eff});
    return c;
  }
};

struct LabelCtx {
  std::vector<TyPtr> entries;

  int size() const { return static_cast<int>(entries.size()); }

  const TyPtr& lookup(int i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("label ctx lookup out of range");
    return entries[entries.size() - 1 - i];
  }

  LabelCtx push(TyPtr ty) const {
    LabelCtx c = *this;
    c.entries.push_back(std::move(ty));
    return c;
  }

  // Extends with the parameter types of a where-block so that local label i
  // is blocks[i]; the params are pushed outermost-last-first.
  LabelCtx push_blocks(const std::vector<TyPtr>& params) const {
    LabelCtx c = *this;
    for (auto it = params.rbegin(); it != params.rend(); ++it) c.entries.push_back(*it);
    return c;
  }
};

// Witness for ctx weakening g <= d: a strictly monotone renaming taking each
// d-index to the g-index it maps to (with g-entry effect <= d-entry effect).
struct WkWitness {
  std::vector<int> ren;  // ren[i] = g index for d index i
};

namespace detail {
// Backtracking over wk-cons/wk-skip; positions count from the binding end.
inline bool ctx_wk_rec(const EffectLattice& eff, const Ctx& g, const Ctx& d, int gi, int di,
                       std::vector<int>& ren) {
  if (di == d.size()) return true;  // remaining g entries are all skipped
  if (gi == g.size()) return false;
  const Hyp& hg = g.lookup(gi);
  const Hyp& hd = d.lookup(di);
  if (ty_equal(hg.ty, hd.ty) && eff.leq(hg.eff, hd.eff)) {
    ren[di] = gi;
    if (ctx_wk_rec(eff, g, d, gi + 1, di + 1, ren)) return true;
  }
  return ctx_wk_rec(eff, g, d, gi + 1, di, ren);
}
}  // namespace detail

inline std::optional<WkWitness> ctx_weakens(const EffectLattice& eff, const Ctx& g,
                                            const Ctx& d) {
  WkWitness w;
  w.ren.assign(d.size(), -1);
  if (detail::ctx_wk_rec(eff, g, d, 0, 0, w.ren)) return w;
  return std::nullopt;
}

inline WkWitness wk_compose(const WkWitness& w1, const WkWitness& w2) {
  // w1 : G <= G', w2 : G' <= D; result : G <= D
  WkWitness w;
  w.ren.reserve(w2.ren.size());
  for (int i : w2.ren) w.ren.push_back(w1.ren[i]);
  return w;
}

// Witness for label weakening l <= k (l has fewer labels): an injection of
// l-indices into k-indices with equal parameter types.
struct LWkWitness {
  std::vector<int> ren;  // ren[i] = k index for l index i
};

namespace detail {
inline bool lctx_wk_rec(const LabelCtx& l, const LabelCtx& k, int li, int ki,
                        std::vector<int>& ren) {
  if (li == l.size()) return true;
  if (ki == k.size()) return false;
  if (ty_equal(l.lookup(li), k.lookup(ki))) {
    ren[li] = ki;
    if (lctx_wk_rec(l, k, li + 1, ki + 1, ren)) return true;
  }
  return lctx_wk_rec(l, k, li, ki + 1, ren);
}
}  // namespace detail

inline std::optional<LWkWitness> lctx_weakens(const LabelCtx& l, const LabelCtx& k) {
  LWkWitness w;
  w.ren.assign(l.size(), -1);
  if (detail::lctx_wk_rec(l, k, 0, 0, w.ren)) return w;
  return std::nullopt;
}

inline LWkWitness lwk_compose(const LWkWitness& w1, const LWkWitness& w2) {
  // w1 : L <= L', w2 : L' <= K; result : L <= K
  LWkWitness w;
  w.ren.reserve(w1.ren.size());
  for (int i : w1.ren) w.ren.push_back(w2.ren[i]);
  return w;
}

}  // namespace lssa
