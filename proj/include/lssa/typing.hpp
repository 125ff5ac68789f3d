#pragma once

#include <optional>
#include <string>

#include "lssa/context.hpp"
#include "lssa/signature.hpp"
#include "lssa/syntax.hpp"

namespace lssa {

// Effect of a context: join of all hypothesis effects.
inline Effect ctx_effect(const Signature& sig, const Ctx& ctx) {
  Effect e = sig.effects.bot();
  for (auto& h : ctx.entries) e = sig.effects.join(e, h.eff);
  return e;
}

// Syntax-directed type inference; Inl/Inr/Abort carry annotations so the
// result is unique when it exists. `err` (optional) receives the first
// failing rule.
inline std::optional<TyPtr> infer_term(const Signature& sig, const Ctx& ctx, Effect eff,
                                       const TermPtr& t, std::string* err = nullptr) {
  auto fail = [&](const std::string& m) -> std::optional<TyPtr> {
    if (err && err->empty()) *err = m;
    return std::nullopt;
  };
  switch (t->kind) {
    case Term::Kind::Var: {
      if (t->var < 0 || t->var >= ctx.size()) return fail("unbound variable index");
      const Hyp& h = ctx.lookup(t->var);
      if (!sig.effects.leq(h.eff, eff)) return fail("variable effect exceeds ambient effect");
      return h.ty;
    }
    case Term::Kind::Op: {
      if (t->op < 0 || t->op >= static_cast<int>(sig.instrs.size()))
        return fail("unknown instruction");
      const Instr& f = sig.instrs[t->op];
      if (!sig.effects.leq(f.effect, eff)) return fail("instruction effect exceeds ambient");
      auto a = infer_term(sig, ctx, eff, t->a, err);
      if (!a) return std::nullopt;
      if (!ty_equal(*a, f.dom)) return fail("instruction argument type mismatch");
      return f.cod;
    }
    case Term::Kind::Let1: {
      auto a = infer_term(sig, ctx, eff, t->a, err);
      if (!a) return std::nullopt;
      return infer_term(sig, ctx.push(*a), eff, t->b, err);
    }
    case Term::Kind::Unit: return ty_unit();
    case Term::Kind::Pair: {
      auto a = infer_term(sig, ctx, eff, t->a, err);
      if (!a) return std::nullopt;
      auto b = infer_term(sig, ctx, eff, t->b, err);
      if (!b) return std::nullopt;
      return ty_prod(*a, *b);
    }
    case Term::Kind::Let2: {
      auto e = infer_term(sig, ctx, eff, t->a, err);
      if (!e) return std::nullopt;
      if ((*e)->kind != Ty::Kind::Prod) return fail("let2 bound term is not a product");
      return infer_term(sig, ctx.push((*e)->a).push((*e)->b), eff, t->b, err);
    }
    case Term::Kind::Inl: {
      if (!t->ann || t->ann->kind != Ty::Kind::Sum) return fail("inl annotation is not a sum");
      auto a = infer_term(sig, ctx, eff, t->a, err);
      if (!a) return std::nullopt;
      if (!ty_equal(*a, t->ann->a)) return fail("inl argument type mismatch");
      return t->ann;
    }
    case Term::Kind::Inr: {
      if (!t->ann || t->ann->kind != Ty::Kind::Sum) return fail("inr annotation is not a sum");
      auto a = infer_term(sig, ctx, eff, t->a, err);
      if (!a) return std::nullopt;
      if (!ty_equal(*a, t->ann->b)) return fail("inr argument type mismatch");
      return t->ann;
    }
    case Term::Kind::Abort: {
      if (!t->ann) return fail("abort lacks a result annotation");
      auto a = infer_term(sig, ctx, eff, t->a, err);
      if (!a) return std::nullopt;
      if ((*a)->kind != Ty::Kind::Empty) return fail("abort argument is not of empty type");
      return t->ann;
    }
    case Term::Kind::Case: {
      auto e = infer_term(sig, ctx, eff, t->a, err);
      if (!e) return std::nullopt;
      if ((*e)->kind != Ty::Kind::Sum) return fail("case scrutinee is not a sum");
      auto l = infer_term(sig, ctx.push((*e)->a), eff, t->b, err);
      if (!l) return std::nullopt;
      auto r = infer_term(sig, ctx.push((*e)->b), eff, t->c, err);
      if (!r) return std::nullopt;
      if (!ty_equal(*l, *r)) return fail("case arms have different types");
      return *l;
    }
  }
  return fail("malformed term");
}

inline bool check_term(const Signature& sig, const Ctx& ctx, Effect eff, const TermPtr& t,
                       const TyPtr& ty) {
  auto inferred = infer_term(sig, ctx, eff, t);
  return inferred && ty_equal(*inferred, ty);
}

inline bool check_region(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                         const LabelCtx& lctx, std::string* err = nullptr) {
  auto fail = [&](const std::string& m) {
    if (err && err->empty()) *err = m;
    return false;
  };
  Effect top = sig.effects.top();
  switch (r->kind) {
    case Region::Kind::Br: {
      if (r->label < 0 || r->label >= lctx.size()) return fail("unbound label index");
      // branch arguments must be pure
      if (!check_term(sig, ctx, sig.effects.bot(), r->term, lctx.lookup(r->label)))
        return fail("branch argument is not pure at the label's parameter type");
      return true;
    }
    case Region::Kind::Let1: {
      auto a = infer_term(sig, ctx, top, r->term, err);
      if (!a) return fail("let bound term ill-typed");
      return check_region(sig, ctx.push(*a), r->a, lctx, err);
    }
    case Region::Kind::Let2: {
      auto e = infer_term(sig, ctx, top, r->term, err);
      if (!e) return fail("let2 bound term ill-typed");
      if ((*e)->kind != Ty::Kind::Prod) return fail("let2 bound term is not a product");
      return check_region(sig, ctx.push((*e)->a).push((*e)->b), r->a, lctx, err);
    }
    case Region::Kind::Case: {
      auto e = infer_term(sig, ctx, top, r->term, err);
      if (!e) return fail("case scrutinee ill-typed");
      if ((*e)->kind != Ty::Kind::Sum) return fail("case scrutinee is not a sum");
      return check_region(sig, ctx.push((*e)->a), r->a, lctx, err) &&
             check_region(sig, ctx.push((*e)->b), r->b, lctx, err);
    }
    case Region::Kind::Where: {
      LabelCtx ext = lctx.push_blocks(r->params);
      if (!check_region(sig, ctx, r->a, ext, err)) return false;
      for (size_t i = 0; i < r->blocks.size(); ++i)
        if (!check_region(sig, ctx.push(r->params[i]), r->blocks[i], ext, err)) return false;
      return true;
    }
  }
  return fail("malformed region");
}

// Substitutions are total sequences: gamma[i] replaces variable i of the
// target context and is understood in the source context.
using Subst = std::vector<TermPtr>;
// Label substitutions: sigma[i] is the body for label i, binding 1 parameter.
using LabelSubst = std::vector<RegionPtr>;

inline bool check_subst(const Signature& sig, const Ctx& g, const Subst& gamma, const Ctx& d) {
  if (static_cast<int>(gamma.size()) != d.size()) return false;
  for (int i = 0; i < d.size(); ++i) {
    const Hyp& h = d.lookup(i);
    if (!check_term(sig, g, h.eff, gamma[i], h.ty)) return false;
  }
  return true;
}

inline bool check_label_subst(const Signature& sig, const Ctx& g, const LabelSubst& sigma,
                              const LabelCtx& l, const LabelCtx& k) {
  if (static_cast<int>(sigma.size()) != l.size()) return false;
  for (int i = 0; i < l.size(); ++i)
    if (!check_region(sig, g.push(l.lookup(i)), sigma[i], k)) return false;
  return true;
}

// ---- syntactic sub-classes ----

inline bool var_at(const Signature& sig, const Ctx& ctx, Effect eff, const TermPtr& t,
                   const TyPtr& ty) {
  if (t->kind != Term::Kind::Var) return false;
  if (t->var < 0 || t->var >= ctx.size()) return false;
  const Hyp& h = ctx.lookup(t->var);
  return ty_equal(h.ty, ty) && sig.effects.leq(h.eff, eff);
}

inline bool is_atomic(const Signature& sig, const Ctx& ctx, Effect eff, const TermPtr& t,
                      const TyPtr& ty) {
  switch (t->kind) {
    case Term::Kind::Var: return var_at(sig, ctx, eff, t, ty);
    case Term::Kind::Op: {
      if (t->a->kind != Term::Kind::Var) return false;
      if (t->op < 0 || t->op >= static_cast<int>(sig.instrs.size())) return false;
      const Instr& f = sig.instrs[t->op];
      return sig.effects.leq(f.effect, eff) && var_at(sig, ctx, eff, t->a, f.dom) &&
             ty_equal(f.cod, ty);
    }
    case Term::Kind::Unit: return ty->kind == Ty::Kind::Unit;
    case Term::Kind::Pair:
      return ty->kind == Ty::Kind::Prod && var_at(sig, ctx, eff, t->a, ty->a) &&
             var_at(sig, ctx, eff, t->b, ty->b);
    case Term::Kind::Inl:
      return ty->kind == Ty::Kind::Sum && ty_equal(t->ann, ty) &&
             var_at(sig, ctx, eff, t->a, ty->a);
    case Term::Kind::Inr:
      return ty->kind == Ty::Kind::Sum && ty_equal(t->ann, ty) &&
             var_at(sig, ctx, eff, t->a, ty->b);
    case Term::Kind::Abort: {
      if (!ty_equal(t->ann, ty) || t->a->kind != Term::Kind::Var) return false;
      if (t->a->var < 0 || t->a->var >= ctx.size()) return false;
      return ctx.lookup(t->a->var).ty->kind == Ty::Kind::Empty;
    }
    default: return false;
  }
}

inline std::optional<TyPtr> infer_atomic(const Signature& sig, const Ctx& ctx, Effect eff,
                                         const TermPtr& t) {
  auto ty = infer_term(sig, ctx, eff, t);
  if (ty && is_atomic(sig, ctx, eff, t, *ty)) return ty;
  return std::nullopt;
}

inline bool check_anf(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                      const LabelCtx& lctx) {
  Effect top = sig.effects.top();
  switch (r->kind) {
    case Region::Kind::Br:
      return r->label >= 0 && r->label < lctx.size() && r->term->kind == Term::Kind::Var &&
             var_at(sig, ctx, sig.effects.bot(), r->term, lctx.lookup(r->label));
    case Region::Kind::Let1: {
      auto a = infer_atomic(sig, ctx, top, r->term);
      return a && check_anf(sig, ctx.push(*a), r->a, lctx);
    }
    case Region::Kind::Let2: {
      auto e = infer_atomic(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Prod) return false;
      return check_anf(sig, ctx.push((*e)->a).push((*e)->b), r->a, lctx);
    }
    case Region::Kind::Case: {
      if (r->term->kind != Term::Kind::Var) return false;
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Sum) return false;
      return check_anf(sig, ctx.push((*e)->a), r->a, lctx) &&
             check_anf(sig, ctx.push((*e)->b), r->b, lctx);
    }
    case Region::Kind::Where: {
      LabelCtx ext = lctx.push_blocks(r->params);
      if (!check_anf(sig, ctx, r->a, ext)) return false;
      for (size_t i = 0; i < r->blocks.size(); ++i)
        if (!check_anf(sig, ctx.push(r->params[i]), r->blocks[i], ext)) return false;
      return true;
    }
  }
  return false;
}

// Terminators: case trees over variables with unconditional branches at the
// leaves.
inline bool check_terminator(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                             const LabelCtx& lctx) {
  switch (r->kind) {
    case Region::Kind::Br:
      return r->label >= 0 && r->label < lctx.size() && r->term->kind == Term::Kind::Var &&
             var_at(sig, ctx, sig.effects.bot(), r->term, lctx.lookup(r->label));
    case Region::Kind::Case: {
      if (r->term->kind != Term::Kind::Var) return false;
      auto e = infer_term(sig, ctx, sig.effects.top(), r->term);
      if (!e || (*e)->kind != Ty::Kind::Sum) return false;
      return check_terminator(sig, ctx.push((*e)->a), r->a, lctx) &&
             check_terminator(sig, ctx.push((*e)->b), r->b, lctx);
    }
    default: return false;
  }
}

// Strict regions: a basic block (atomic lets, then a terminator wrapped in a
// where-block of strict children). A terminator with no children still needs
// its explicit empty where-block.
inline bool check_strict(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                         const LabelCtx& lctx) {
  Effect top = sig.effects.top();
  switch (r->kind) {
    case Region::Kind::Let1: {
      auto a = infer_atomic(sig, ctx, top, r->term);
      return a && check_strict(sig, ctx.push(*a), r->a, lctx);
    }
    case Region::Kind::Let2: {
      auto e = infer_atomic(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Prod) return false;
      return check_strict(sig, ctx.push((*e)->a).push((*e)->b), r->a, lctx);
    }
    case Region::Kind::Where: {
      LabelCtx ext = lctx.push_blocks(r->params);
      if (!check_terminator(sig, ctx, r->a, ext)) return false;
      for (size_t i = 0; i < r->blocks.size(); ++i)
        if (!check_strict(sig, ctx.push(r->params[i]), r->blocks[i], ext)) return false;
      return true;
    }
    default: return false;
  }
}

// ---- structured regions ----

inline bool check_structured(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                             const LabelCtx& lctx);

namespace detail {

// seq(r, s) is where r' { block }: the head uses only the bound label.
inline bool structured_seq(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                           const LabelCtx& lctx) {
  if (r->kind != Region::Kind::Where || r->blocks.size() != 1) return false;
  auto head_labels = free_labels(r->a);
  for (int l : head_labels)
    if (l != 0) return false;
  LabelCtx single;
  single = single.push(r->params[0]);
  if (!check_structured(sig, ctx, r->a, single)) return false;
  // the block must not branch back to the bound label
  auto blk_labels = free_labels(r->blocks[0]);
  if (blk_labels.count(0)) return false;
  RegionPtr s = map_region_labels(r->blocks[0], [](int l) { return l - 1; });
  return check_structured(sig, ctx.push(r->params[0]), s, lctx);
}

// loop(e, body) is where (br 0 e) { where body' { case x0 { br 2 x, br 1 y } } }
// at a single-label context.
inline bool structured_loop(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                            const LabelCtx& lctx) {
  if (lctx.size() != 1) return false;
  if (r->kind != Region::Kind::Where || r->blocks.size() != 1) return false;
  if (r->a->kind != Region::Kind::Br || r->a->label != 0) return false;
  const TyPtr& state_ty = r->params[0];
  const RegionPtr& blk = r->blocks[0];
  if (blk->kind != Region::Kind::Where || blk->blocks.size() != 1) return false;
  const RegionPtr& cont = blk->blocks[0];
  if (cont->kind != Region::Kind::Case || cont->term->kind != Term::Kind::Var ||
      cont->term->var != 0)
    return false;
  auto is_br_var0 = [](const RegionPtr& x, int lbl) {
    return x->kind == Region::Kind::Br && x->label == lbl &&
           x->term->kind == Term::Kind::Var && x->term->var == 0;
  };
  if (!is_br_var0(cont->a, 2) || !is_br_var0(cont->b, 1)) return false;
  // body must only use its own exit label
  auto body_labels = free_labels(blk->a);
  for (int l : body_labels)
    if (l != 0) return false;
  TyPtr body_out = blk->params[0];
  if (body_out->kind != Ty::Kind::Sum) return false;
  if (!ty_equal(body_out->a, lctx.lookup(0)) || !ty_equal(body_out->b, state_ty)) return false;
  if (!infer_term(sig, ctx, sig.effects.top(), r->a->term)) return false;
  LabelCtx single;
  single = single.push(body_out);
  return check_structured(sig, ctx.push(state_ty), blk->a, single);
}

}  // namespace detail

inline bool check_structured(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                             const LabelCtx& lctx) {
  Effect top = sig.effects.top();
  switch (r->kind) {
    case Region::Kind::Br:
      return r->label >= 0 && r->label < lctx.size() &&
             check_term(sig, ctx, sig.effects.bot(), r->term, lctx.lookup(r->label));
    case Region::Kind::Let1: {
      auto a = infer_term(sig, ctx, top, r->term);
      return a && check_structured(sig, ctx.push(*a), r->a, lctx);
    }
    case Region::Kind::Let2: {
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Prod) return false;
      return check_structured(sig, ctx.push((*e)->a).push((*e)->b), r->a, lctx);
    }
    case Region::Kind::Case: {
      auto e = infer_term(sig, ctx, top, r->term);
      if (!e || (*e)->kind != Ty::Kind::Sum) return false;
      return check_structured(sig, ctx.push((*e)->a), r->a, lctx) &&
             check_structured(sig, ctx.push((*e)->b), r->b, lctx);
    }
    case Region::Kind::Where:
      return detail::structured_loop(sig, ctx, r, lctx) ||
             detail::structured_seq(sig, ctx, r, lctx);
  }
  return false;
}

// ---- renaming along weakening witnesses ----

inline TermPtr rename_term(const TermPtr& t, const WkWitness& w, int depth = 0) {
  switch (t->kind) {
    case Term::Kind::Var:
      return t->var >= depth ? t_var(w.ren[t->var - depth] + depth) : t;
    case Term::Kind::Unit: return t;
    case Term::Kind::Op: return t_op(t->op, rename_term(t->a, w, depth));
    case Term::Kind::Let1:
      return t_let1(rename_term(t->a, w, depth), rename_term(t->b, w, depth + 1));
    case Term::Kind::Pair:
      return t_pair(rename_term(t->a, w, depth), rename_term(t->b, w, depth));
    case Term::Kind::Let2:
      return t_let2(rename_term(t->a, w, depth), rename_term(t->b, w, depth + 2));
    case Term::Kind::Inl: return t_inl(rename_term(t->a, w, depth), t->ann);
    case Term::Kind::Inr: return t_inr(rename_term(t->a, w, depth), t->ann);
    case Term::Kind::Abort: return t_abort(rename_term(t->a, w, depth), t->ann);
    case Term::Kind::Case:
      return t_case(rename_term(t->a, w, depth), rename_term(t->b, w, depth + 1),
                    rename_term(t->c, w, depth + 1));
  }
  return t;
}

inline RegionPtr rename_region_vars(const RegionPtr& r, const WkWitness& w, int depth = 0) {
  switch (r->kind) {
    case Region::Kind::Br: return r_br(r->label, rename_term(r->term, w, depth));
    case Region::Kind::Let1:
      return r_let1(rename_term(r->term, w, depth), rename_region_vars(r->a, w, depth + 1));
    case Region::Kind::Let2:
      return r_let2(rename_term(r->term, w, depth), rename_region_vars(r->a, w, depth + 2));
    case Region::Kind::Case:
      return r_case(rename_term(r->term, w, depth), rename_region_vars(r->a, w, depth + 1),
                    rename_region_vars(r->b, w, depth + 1));
    case Region::Kind::Where: {
      std::vector<RegionPtr> bs;
      for (auto& blk : r->blocks) bs.push_back(rename_region_vars(blk, w, depth + 1));
      return r_where(rename_region_vars(r->a, w, depth), r->params, std::move(bs));
    }
  }
  return r;
}

inline RegionPtr rename_region_labels(const RegionPtr& r, const LWkWitness& w) {
  return map_region_labels(r, [&](int l) { return w.ren[l]; });
}

}  // namespace lssa
