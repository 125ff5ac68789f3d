#pragma once

#include <stdexcept>
#include <vector>

#include "lssa/cfg.hpp"
#include "lssa/subst.hpp"
#include "lssa/syntax.hpp"
#include "lssa/typing.hpp"

namespace lssa {

struct NormalizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- A-normal form ----

inline bool atom_shape(const TermPtr& t) {
  auto is_var = [](const TermPtr& x) { return x->kind == Term::Kind::Var; };
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Unit: return true;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort: return is_var(t->a);
    case Term::Kind::Pair: return is_var(t->a) && is_var(t->b);
    default: return false;
  }
}

// letanf x a r: a let binding `a`, flattened so that every binding in the
// result is atomic. r binds the result of a at index 0.
inline RegionPtr let_anf(const TermPtr& a, const RegionPtr& r) {
  if (atom_shape(a)) return r_let1(a, r);
  switch (a->kind) {
    case Term::Kind::Op:
      return let_anf(a->a, r_let1(t_op(a->op, t_var(0)), shift_region_vars(r, 1, 1)));
    case Term::Kind::Inl:
      return let_anf(a->a, r_let1(t_inl(t_var(0), a->ann), shift_region_vars(r, 1, 1)));
    case Term::Kind::Inr:
      return let_anf(a->a, r_let1(t_inr(t_var(0), a->ann), shift_region_vars(r, 1, 1)));
    case Term::Kind::Abort:
      return let_anf(a->a, r_let1(t_abort(t_var(0), a->ann), shift_region_vars(r, 1, 1)));
    case Term::Kind::Let1:
      return let_anf(a->a, let_anf(a->b, shift_region_vars(r, 1, 1)));
    case Term::Kind::Pair:
      return let_anf(a->a,
                     let_anf(shift_term(a->b, 1, 0),
                             r_let1(t_pair(t_var(1), t_var(0)), shift_region_vars(r, 2, 1))));
    case Term::Kind::Let2:
      return let_anf(a->a, r_let2(t_var(0), let_anf(shift_term(a->b, 1, 2),
                                                    shift_region_vars(r, 3, 1))));
    case Term::Kind::Case:
      return let_anf(
          a->a, r_case(t_var(0),
                       let_anf(shift_term(a->b, 1, 1), shift_region_vars(r, 2, 1)),
                       let_anf(shift_term(a->c, 1, 1), shift_region_vars(r, 2, 1))));
    default: throw NormalizeError("let_anf: malformed term");
  }
}

// Equivalence-preserving conversion to ANF. Variables already in branch or
// scrutinee position are left alone, which makes the conversion idempotent.
inline RegionPtr to_anf(const RegionPtr& r) {
  switch (r->kind) {
    case Region::Kind::Br:
      if (r->term->kind == Term::Kind::Var) return r;
      return let_anf(r->term, r_br(r->label, t_var(0)));
    case Region::Kind::Let1: return let_anf(r->term, to_anf(r->a));
    case Region::Kind::Let2: {
      if (r->term->kind == Term::Kind::Var) return r_let2(r->term, to_anf(r->a));
      return let_anf(r->term, r_let2(t_var(0), shift_region_vars(to_anf(r->a), 1, 2)));
    }
    case Region::Kind::Case: {
      if (r->term->kind == Term::Kind::Var)
        return r_case(r->term, to_anf(r->a), to_anf(r->b));
      return let_anf(r->term,
                     r_case(t_var(0), shift_region_vars(to_anf(r->a), 1, 1),
                            shift_region_vars(to_anf(r->b), 1, 1)));
    }
    case Region::Kind::Where: {
      std::vector<RegionPtr> bs;
      bs.reserve(r->blocks.size());
      for (auto& b : r->blocks) bs.push_back(to_anf(b));
      return r_where(to_anf(r->a), r->params, std::move(bs));
    }
  }
  throw NormalizeError("to_anf: malformed region");
}

// ---- strict SSA ----

inline bool terminator_shape(const RegionPtr& r) {
  switch (r->kind) {
    case Region::Kind::Br: return r->term->kind == Term::Kind::Var;
    case Region::Kind::Case:
      return r->term->kind == Term::Kind::Var && terminator_shape(r->a) &&
             terminator_shape(r->b);
    default: return false;
  }
}

namespace detail {

struct SsaAcc {
  std::vector<TyPtr> params;
  std::vector<RegionPtr> blocks;
};

inline RegionPtr strictify(const Signature& sig, const Ctx& ctx, const RegionPtr& r);

// ssawhere: accumulates dismantled where-blocks; invariant: in `r` and every
// accumulated body, label i < |acc| refers to acc block i.
inline RegionPtr ssa_where(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                           SsaAcc acc) {
  if (terminator_shape(r)) return r_where(r, acc.params, acc.blocks);
  Effect top = sig.effects.top();
  switch (r->kind) {
    case Region::Kind::Let1: {
      auto a = infer_term(sig, ctx, top, r->term);
      if (!a) throw NormalizeError("to_strict: ill-typed binding");
      for (auto& b : acc.blocks) b = shift_region_vars(b, 1, 1);
      return r_let1(r->term, ssa_where(sig, ctx.push(*a), r->a, std::move(acc)));
    }
    case Region::Kind::Let2: {
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Prod)
        throw NormalizeError("to_strict: ill-typed binding");
      for (auto& b : acc.blocks) b = shift_region_vars(b, 2, 1);
      return r_let2(r->term, ssa_where(sig, ctx.push((*e)->a).push((*e)->b), r->a,
                                       std::move(acc)));
    }
    case Region::Kind::Case: {
      // introduce fresh labels for the two arms
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Sum)
        throw NormalizeError("to_strict: ill-typed scrutinee");
      int n = static_cast<int>(acc.blocks.size());
      RegionPtr head = r_case(r->term, r_br(n, t_var(0)), r_br(n + 1, t_var(0)));
      SsaAcc out;
      out.params = acc.params;
      out.blocks.reserve(n + 2);
      for (auto& b : acc.blocks) out.blocks.push_back(shift_region_labels(b, 2, n));
      out.params.push_back((*e)->a);
      out.blocks.push_back(
          strictify(sig, ctx.push((*e)->a), shift_region_labels(r->a, 2, n)));
      out.params.push_back((*e)->b);
      out.blocks.push_back(
          strictify(sig, ctx.push((*e)->b), shift_region_labels(r->b, 2, n)));
      return r_where(head, out.params, out.blocks);
    }
    case Region::Kind::Where: {
      int m = static_cast<int>(r->blocks.size());
      SsaAcc out;
      out.params = r->params;
      for (size_t i = 0; i < r->blocks.size(); ++i)
        out.blocks.push_back(strictify(sig, ctx.push(r->params[i]), r->blocks[i]));
      for (size_t i = 0; i < acc.blocks.size(); ++i) {
        out.params.push_back(acc.params[i]);
        out.blocks.push_back(shift_region_labels(acc.blocks[i], m, 0));
      }
      return ssa_where(sig, ctx, r->a, std::move(out));
    }
    case Region::Kind::Br: {
      // non-variable branch argument: not ANF; normalize locally
      return ssa_where(sig, ctx, to_anf(r), std::move(acc));
    }
  }
  throw NormalizeError("to_strict: malformed region");
}

inline RegionPtr strictify(const Signature& sig, const Ctx& ctx, const RegionPtr& r) {
  return ssa_where(sig, ctx, r, SsaAcc{});
}

}  // namespace detail

// Conversion to strict SSA shape: ANF first, then where-block placement along
// the dominance structure.
inline RegionPtr to_strict(const Signature& sig, const Ctx& ctx, const RegionPtr& r) {
  return detail::strictify(sig, ctx, to_anf(r));
}

// ---- entry/children split of a strict region ----

struct EntrySplit {
  RegionPtr entry;  // lets ending in the terminator
  std::vector<TyPtr> params;
  std::vector<RegionPtr> children;
};

inline EntrySplit split_entry(const RegionPtr& r) {
  switch (r->kind) {
    case Region::Kind::Let1: {
      EntrySplit s = split_entry(r->a);
      s.entry = r_let1(r->term, s.entry);
      return s;
    }
    case Region::Kind::Let2: {
      EntrySplit s = split_entry(r->a);
      s.entry = r_let2(r->term, s.entry);
      return s;
    }
    case Region::Kind::Where: return EntrySplit{r->a, r->params, r->blocks};
    default: throw NormalizeError("split_entry: region is not strict");
  }
}

inline RegionPtr add_dom(const RegionPtr& entry, const std::vector<TyPtr>& params,
                         const std::vector<RegionPtr>& children) {
  switch (entry->kind) {
    case Region::Kind::Let1: return r_let1(entry->term, add_dom(entry->a, params, children));
    case Region::Kind::Let2: return r_let2(entry->term, add_dom(entry->a, params, children));
    default: return r_where(entry, params, children);
  }
}

// ---- packing of contexts and label contexts ----

inline TyPtr packed_ctx_ty(const Ctx& ctx) {
  TyPtr t = ty_unit();
  for (auto& h : ctx.entries) t = ty_prod(t, h.ty);
  return t;
}

// packed(G): the tuple of all variables in scope.
inline TermPtr packed_ctx_term(const Ctx& ctx) {
  TermPtr t = t_unit();
  int n = ctx.size();
  for (int p = 0; p < n; ++p) t = t_pair(t, t_var(n - 1 - p));
  return t;
}

// projection of variable i (de Bruijn) out of a packed context value
inline TermPtr packed_ctx_proj(const TermPtr& packed, int i) {
  TermPtr t = packed;
  for (int k = 0; k < i; ++k) t = t_let2(t, t_var(1));  // pi_l
  return t_let2(t, t_var(0));                           // pi_r
}

// pack : G -> (box : [G]); a single-entry substitution
inline Subst pack_ctx(const Ctx& ctx) { return Subst{packed_ctx_term(ctx)}; }

// unpack : (box : [G]) -> G
inline Subst unpack_ctx(const Ctx& ctx) {
  Subst g;
  for (int i = 0; i < ctx.size(); ++i) g.push_back(packed_ctx_proj(t_var(0), i));
  return g;
}

inline TyPtr packed_lctx_ty(const LabelCtx& lctx) {
  TyPtr t = ty_empty();
  for (auto& a : lctx.entries) t = ty_sum(t, a);
  return t;
}

// prefix sum types tau_k over the first k entries
inline std::vector<TyPtr> packed_lctx_prefixes(const LabelCtx& lctx) {
  std::vector<TyPtr> taus{ty_empty()};
  for (auto& a : lctx.entries) taus.push_back(ty_sum(taus.back(), a));
  return taus;
}

// iota_{L,l}: inject a value for label j (de Bruijn) into [L]
inline TermPtr packed_lctx_inj(const LabelCtx& lctx, int j, const TermPtr& e) {
  auto taus = packed_lctx_prefixes(lctx);
  int n = lctx.size();
  TermPtr t = t_inr(e, taus[n - j]);
  for (int k = n - j + 1; k <= n; ++k) t = t_inl(t, taus[k]);
  return t;
}

// pack+ : L -> (bl : [L])
inline LabelSubst pack_labels(const LabelCtx& lctx) {
  LabelSubst s;
  for (int j = 0; j < lctx.size(); ++j)
    s.push_back(r_br(0, packed_lctx_inj(lctx, j, t_var(0))));
  return s;
}

// The divergent region: where br l () { l(x): br l x }
inline RegionPtr inf_region() {
  return r_where(r_br(0, t_unit()), {ty_unit()}, {r_br(0, t_var(0))});
}

// unpack+(L) applied to the bound parameter: a case tree dispatching a packed
// label value back to the labels of L. The impossible empty summand aborts
// into label 0 when L is nonempty and loops otherwise.
inline RegionPtr unpack_region(const LabelCtx& lctx) {
  int n = lctx.size();
  if (n == 0) return inf_region();
  std::function<RegionPtr(int)> go = [&](int k) -> RegionPtr {
    if (k == 0) return r_br(0, t_abort(t_var(0), lctx.lookup(0)));
    return r_case(t_var(0), go(k - 1), r_br(n - k, t_var(0)));
  };
  return go(n);
}

// unpack+ : (bl : [L]) -> L
inline LabelSubst unpack_labels(const LabelCtx& lctx) {
  return LabelSubst{unpack_region(lctx)};
}

// Region packing: box : [G] |- [r] |> bl([L])
inline RegionPtr pack_region(const Ctx& ctx, const RegionPtr& r, const LabelCtx& lctx) {
  RegionPtr labeled = lsubst_region(pack_labels(lctx), r);
  return subst_region(unpack_ctx(ctx), labeled);
}

// ---- structured control flow ----

// seq(r, s): run r to its single output label, binding the result for s.
inline RegionPtr seq_region(const RegionPtr& r, const TyPtr& mid, const RegionPtr& s) {
  return r_where(r, {mid}, {shift_region_labels(s, 1, 0)});
}

// loop(e, body): functional do-while; body returns exit + next-state. The
// ambient label context must be the single output label.
inline RegionPtr loop_region(const TermPtr& e, const TyPtr& state, const TyPtr& out,
                             const RegionPtr& body) {
  TyPtr ba = ty_sum(out, state);
  RegionPtr cont = r_case(t_var(0), r_br(2, t_var(0)), r_br(1, t_var(0)));
  RegionPtr blk = r_where(body, {ba}, {cont});
  return r_where(r_br(0, e), {state}, {blk});
}

// ua: associativity of n-ary coproducts, [L ++ R] -> [L] + [R].
// Both pieces are given as label-context vectors (outermost first).
inline TermPtr ua_term(const std::vector<TyPtr>& lvec, const std::vector<TyPtr>& rvec,
                       const TermPtr& e) {
  auto packed_of = [](const std::vector<TyPtr>& v, size_t upto) {
    TyPtr t = ty_empty();
    for (size_t i = 0; i < upto; ++i) t = ty_sum(t, v[i]);
    return t;
  };
  TyPtr lty = packed_of(lvec, lvec.size());
  std::function<TermPtr(size_t, const TermPtr&)> go = [&](size_t k,
                                                          const TermPtr& x) -> TermPtr {
    // x : [L ++ R[0..k)]  ->  [L] + [R[0..k)]
    TyPtr rk = packed_of(rvec, k);
    TyPtr res = ty_sum(lty, rk);
    if (k == 0) return t_inl(x, res);
    TyPtr rk1 = packed_of(rvec, k - 1);
    TermPtr inner = go(k - 1, t_var(0));
    TermPtr split = t_case(inner, t_inl(t_var(0), res),
                           t_inr(t_inl(t_var(0), rk), res));
    return t_case(x, split, t_inr(t_inr(t_var(0), rk), res));
  };
  return go(rvec.size(), e);
}

namespace detail {

// Label-context vector (outermost first) for packing helpers.
inline std::vector<TyPtr> lctx_vec(const LabelCtx& l) { return l.entries; }

inline RegionPtr topwhile(const Signature& sig, const Ctx& ctx, const LabelCtx& lctx,
                          const RegionPtr& r);

// The n-ary case over a packed tag driving one loop iteration. Returns a
// region over `ctx_m` (the original context plus `extra` binders ending in
// the tag), targeting a single label of type [L] + [R]. The blocks are typed
// in the original context plus their own parameter.
inline RegionPtr loop_dispatch(const Signature& sig, const Ctx& ctx_m, int extra,
                               const LabelCtx& lctx, const LabelCtx& ext,
                               const std::vector<TyPtr>& params,
                               const std::vector<RegionPtr>& blocks) {
  int m = static_cast<int>(blocks.size());
  std::vector<TyPtr> lvec = lctx_vec(lctx);
  std::vector<TyPtr> rvec;
  for (int i = m - 1; i >= 0; --i) rvec.push_back(params[i]);  // label j at position m-1-j
  auto packed_of = [](const std::vector<TyPtr>& v, size_t upto) {
    TyPtr t = ty_empty();
    for (size_t i = 0; i < upto; ++i) t = ty_sum(t, v[i]);
    return t;
  };
  TyPtr lpack = packed_of(lvec, lvec.size());
  TyPtr rpack = packed_of(rvec, rvec.size());
  TyPtr out_ty = ty_sum(lpack, rpack);
  TyPtr ext_pack = packed_lctx_ty(ext);

  // peel depth d handles local label d; context gains one binder per level
  std::function<RegionPtr(int, const Ctx&, int)> go = [&](int d, const Ctx& c,
                                                          int depth) -> RegionPtr {
    if (d == m)  // impossible empty summand
      return r_br(0, t_abort(t_var(0), out_ty));
    // Inr arm: local label d with parameter params[d]
    Ctx arm_ctx = c.push(params[d]);
    RegionPtr body = shift_region_vars(blocks[d], extra + depth, 1);
    RegionPtr tw = topwhile(sig, arm_ctx, ext, body);
    RegionPtr cont = r_br(0, ua_term(lvec, rvec, t_var(0)));
    RegionPtr leaf = seq_region(tw, ext_pack, cont);
    return r_case(t_var(0), go(d + 1, c.push(packed_of(rvec, m - 1 - d)), depth + 1), leaf);
  };
  return go(0, ctx_m, 0);
}

inline RegionPtr topwhile(const Signature& sig, const Ctx& ctx, const LabelCtx& lctx,
                          const RegionPtr& r) {
  Effect top = sig.effects.top();
  switch (r->kind) {
    case Region::Kind::Br:
      return r_br(0, packed_lctx_inj(lctx, r->label, r->term));
    case Region::Kind::Let1: {
      auto a = infer_term(sig, ctx, top, r->term);
      if (!a) throw NormalizeError("to_structured: ill-typed binding");
      return r_let1(r->term, topwhile(sig, ctx.push(*a), lctx, r->a));
    }
    case Region::Kind::Let2: {
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Prod)
        throw NormalizeError("to_structured: ill-typed binding");
      return r_let2(r->term, topwhile(sig, ctx.push((*e)->a).push((*e)->b), lctx, r->a));
    }
    case Region::Kind::Case: {
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Sum)
        throw NormalizeError("to_structured: ill-typed scrutinee");
      return r_case(r->term, topwhile(sig, ctx.push((*e)->a), lctx, r->a),
                    topwhile(sig, ctx.push((*e)->b), lctx, r->b));
    }
    case Region::Kind::Where: {
      int m = static_cast<int>(r->blocks.size());
      if (m == 0) return topwhile(sig, ctx, lctx, r->a);
      LabelCtx ext = lctx.push_blocks(r->params);
      RegionPtr h = topwhile(sig, ctx, ext, r->a);
      std::vector<TyPtr> lvec = lctx_vec(lctx);
      std::vector<TyPtr> rvec;
      for (int i = m - 1; i >= 0; --i) rvec.push_back(r->params[i]);
      auto packed_of = [](const std::vector<TyPtr>& v) {
        TyPtr t = ty_empty();
        for (auto& x : v) t = ty_sum(t, x);
        return t;
      };
      TyPtr lpack = packed_of(lvec);
      TyPtr rpack = packed_of(rvec);
      TyPtr ext_pack = packed_lctx_ty(ext);
      Ctx kctx = ctx.push(ext_pack);
      // the dispatcher sits under the seq binder, the case arm and the loop
      // parameter, three binders below the original context
      Ctx ctx_m = kctx.push(rpack).push(rpack);
      RegionPtr dispatch = loop_dispatch(sig, ctx_m, 3, lctx, ext, r->params, r->blocks);
      RegionPtr arm_exit = r_br(0, t_var(0));
      RegionPtr arm_loop = loop_region(t_var(0), rpack, lpack, dispatch);
      RegionPtr k = r_case(ua_term(lvec, rvec, t_var(0)), arm_exit, arm_loop);
      return seq_region(h, ext_pack, k);
    }
  }
  throw NormalizeError("to_structured: malformed region");
}

}  // namespace detail

inline RegionPtr topwhile(const Signature& sig, const Ctx& ctx, const LabelCtx& lctx,
                          const RegionPtr& r) {
  return detail::topwhile(sig, ctx, lctx, r);
}

// Bohm-Jacopini structuring: packs the label context into a tag, runs the
// loop-and-switch form, and dispatches the tag back to the original labels.
// The label context must be nonempty (no structured region targets an empty
// one).
inline RegionPtr to_structured(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                               const LabelCtx& lctx) {
  if (lctx.size() == 0)
    throw NormalizeError("to_structured: needs at least one exit label");
  RegionPtr packed = detail::topwhile(sig, ctx, lctx, r);
  return seq_region(packed, packed_lctx_ty(lctx), unpack_region(lctx));
}

}  // namespace lssa
