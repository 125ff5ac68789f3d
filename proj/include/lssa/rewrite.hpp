#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/subst.hpp"
#include "lssa/syntax.hpp"
#include "lssa/typing.hpp"

namespace lssa {

// Every rule of the equational theory, as a directed, position-addressed
// rewrite. Congruence is implicit in the position path.
enum class RuleId {
  // term rules
  Let1Beta, Let1Eta, Let1Op, Let1Let1, Let1Let2, Let1Abort, Let1Case,
  Let2Pair, Let2Eta, Let2Bind, CaseInl, CaseInr, CaseEta, CaseBind,
  Initial, Terminal, InitialExpr,
  // region rules
  Let1BetaR, Let1OpR, Let1Let1R, Let1Let2R, Let1CaseR, Let1AbortR,
  Let2PairR, Let2BindR, CaseInlR, CaseInrR, CaseBindR,
  CfgBeta1, CfgBeta2, CfgEta, Codiag, Uni, Dinat, InitialR,
  // derived rules
  Case2Cfg, CfgFuse1, CfgFuse2, PermCfg,
};

struct RuleInfo {
  RuleId id;
  const char* name;
  bool on_terms;      // subject is a term node
  const char* params; // parameter schema, for the CLI and fuzzers
  const char* side;   // side-condition summary
};

inline const std::vector<RuleInfo>& rule_catalog() {
  static const std::vector<RuleInfo> cat = {
      {RuleId::Let1Beta, "let1-beta", true, "rev: lhs", "bound term pure"},
      {RuleId::Let1Eta, "let1-eta", true, "", ""},
      {RuleId::Let1Op, "let1-op", true, "", ""},
      {RuleId::Let1Let1, "let1-let1", true, "", ""},
      {RuleId::Let1Let2, "let1-let2", true, "", ""},
      {RuleId::Let1Abort, "let1-abort", true, "", ""},
      {RuleId::Let1Case, "let1-case", true, "", "rev: both arm continuations equal"},
      {RuleId::Let2Pair, "let2-pair", true, "", ""},
      {RuleId::Let2Eta, "let2-eta", true, "", ""},
      {RuleId::Let2Bind, "let2-bind", true, "", ""},
      {RuleId::CaseInl, "case-inl", true, "rev: lhs", ""},
      {RuleId::CaseInr, "case-inr", true, "rev: lhs", ""},
      {RuleId::CaseEta, "case-eta", true, "", "arm annotations equal the scrutinee type"},
      {RuleId::CaseBind, "case-bind", true, "", ""},
      {RuleId::Initial, "initial", true, "target", "some hypothesis of empty type, pure"},
      {RuleId::Terminal, "terminal", true, "target", "both sides pure at unit type"},
      {RuleId::InitialExpr, "initial-expr", true, "target, witness",
       "a pure term of empty type exists"},
      {RuleId::Let1BetaR, "let1-beta-r", false, "rev: lhs", "bound term pure"},
      {RuleId::Let1OpR, "let1-op-r", false, "", ""},
      {RuleId::Let1Let1R, "let1-let1-r", false, "", ""},
      {RuleId::Let1Let2R, "let1-let2-r", false, "", ""},
      {RuleId::Let1CaseR, "let1-case-r", false, "", "rev: both arm continuations equal"},
      {RuleId::Let1AbortR, "let1-abort-r", false, "", ""},
      {RuleId::Let2PairR, "let2-pair-r", false, "", ""},
      {RuleId::Let2BindR, "let2-bind-r", false, "", ""},
      {RuleId::CaseInlR, "case-inl-r", false, "rev: lhs", ""},
      {RuleId::CaseInrR, "case-inr-r", false, "rev: lhs", ""},
      {RuleId::CaseBindR, "case-bind-r", false, "", ""},
      {RuleId::CfgBeta1, "cfg-beta1", false, "k (rev)", "branch argument pure"},
      {RuleId::CfgBeta2, "cfg-beta2", false, "rev: lhs", "target label not locally bound"},
      {RuleId::CfgEta, "cfg-eta", false, "rev: lhs", ""},
      {RuleId::Codiag, "codiag", false, "rev: lhs", "inner head forwards the outer parameter"},
      {RuleId::Uni, "uni", false, "r, e, s, t; premise mode",
       "mediator pure; premise is an equivalence"},
      {RuleId::Dinat, "dinat", false, "r, sigma, ts, label types", ""},
      {RuleId::InitialR, "initial-r", false, "target", "some hypothesis of empty type"},
      {RuleId::Case2Cfg, "case2cfg", false, "", ""},
      {RuleId::CfgFuse1, "cfg-fuse1", false, "rev: k", "outer blocks unused by inner head"},
      {RuleId::CfgFuse2, "cfg-fuse2", false, "k (rev: k, m)",
       "pulled labels referenced only from the nested block"},
      {RuleId::PermCfg, "perm-cfg", false, "perm", "perm is a bijection"},
  };
  return cat;
}

inline const RuleInfo& rule_info(RuleId id) {
  for (auto& r : rule_catalog())
    if (r.id == id) return r;
  throw std::logic_error("unknown rule");
}

inline std::optional<RuleId> rule_by_name(const std::string& name) {
  for (auto& r : rule_catalog())
    if (name == r.name) return r.id;
  return std::nullopt;
}

struct RuleInstance {
  RuleId rule;
  std::vector<int> path;  // child indices from the judgment root
  bool backward = false;
  int k = -1;                      // block index / split point
  int m = -1;                      // secondary count (cfg-fuse2 reverse)
  std::vector<int> perm;           // perm-cfg
  TermPtr term1, term2;            // rule targets / witnesses / mediator e
  RegionPtr reg1;                  // lhs payload for non-invertible reversals
  std::vector<RegionPtr> sigma;    // dinat sigma bodies / uni s
  std::vector<RegionPtr> tbodies;  // dinat t bodies / uni t
  std::vector<TyPtr> tys1, tys2;   // dinat: ell/kappa parameter types; uni: A/B
  bool verify_premise = false;     // uni
};

struct RewriteError : std::runtime_error {
  enum class Kind { BadPosition, PatternMismatch, SideCondition, Premise, IllTyped };
  Kind kind;
  RewriteError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Premise oracle for uni: called with (ctx, lhs, rhs, lctx) of the premise
// equivalence; returns whether it holds.
using UniVerifier =
    std::function<bool(const Ctx&, const RegionPtr&, const RegionPtr&, const LabelCtx&)>;

namespace detail {

[[noreturn]] inline void rw_fail(RewriteError::Kind k, const std::string& m) {
  throw RewriteError(k, m);
}

inline void need(bool cond, RewriteError::Kind k, const std::string& m) {
  if (!cond) rw_fail(k, m);
}

inline std::optional<TermPtr> try_unshift_term(const TermPtr& t, int by, int cutoff) {
  for (int v : free_vars(t))
    if (v >= cutoff && v < cutoff + by) return std::nullopt;
  // shifting by a negative amount is safe once the gap is known to be unused
  std::function<TermPtr(const TermPtr&, int)> go = [&](const TermPtr& x, int c) -> TermPtr {
    switch (x->kind) {
      case Term::Kind::Var: return x->var >= c ? t_var(x->var - by) : x;
      case Term::Kind::Unit: return x;
      case Term::Kind::Op: return t_op(x->op, go(x->a, c));
      case Term::Kind::Let1: return t_let1(go(x->a, c), go(x->b, c + 1));
      case Term::Kind::Pair: return t_pair(go(x->a, c), go(x->b, c));
      case Term::Kind::Let2: return t_let2(go(x->a, c), go(x->b, c + 2));
      case Term::Kind::Inl: return t_inl(go(x->a, c), x->ann);
      case Term::Kind::Inr: return t_inr(go(x->a, c), x->ann);
      case Term::Kind::Abort: return t_abort(go(x->a, c), x->ann);
      case Term::Kind::Case: return t_case(go(x->a, c), go(x->b, c + 1), go(x->c, c + 1));
    }
    return x;
  };
  return go(t, cutoff);
}

inline std::optional<RegionPtr> try_unshift_region_vars(const RegionPtr& r, int by,
                                                        int cutoff) {
  for (int v : free_vars(r))
    if (v >= cutoff && v < cutoff + by) return std::nullopt;
  std::function<RegionPtr(const RegionPtr&, int)> go = [&](const RegionPtr& x,
                                                           int c) -> RegionPtr {
    auto tm = [&](const TermPtr& t) { return *try_unshift_term(t, by, c); };
    switch (x->kind) {
      case Region::Kind::Br: return r_br(x->label, tm(x->term));
      case Region::Kind::Let1: return r_let1(tm(x->term), go(x->a, c + 1));
      case Region::Kind::Let2: return r_let2(tm(x->term), go(x->a, c + 2));
      case Region::Kind::Case: return r_case(tm(x->term), go(x->a, c + 1), go(x->b, c + 1));
      case Region::Kind::Where: {
        std::vector<RegionPtr> bs;
        for (auto& b : x->blocks) bs.push_back(go(b, c + 1));
        return r_where(go(x->a, c), x->params, std::move(bs));
      }
    }
    return x;
  };
  // free variables of inner terms are covered by free_vars on the region
  return go(r, cutoff);
}

inline std::optional<RegionPtr> try_unshift_region_labels(const RegionPtr& r, int by,
                                                          int cutoff) {
  for (int l : free_labels(r))
    if (l >= cutoff && l < cutoff + by) return std::nullopt;
  return map_region_labels(r, [&](int l) { return l >= cutoff ? l - by : l; });
}

}  // namespace detail

// ---- construction of rule sides used by both apply and the fuzzers ----

// uni: where (where r { l(x): br k e }) { k(y): s }  ~~  where r { l(x): t }
inline RegionPtr uni_lhs(const RegionPtr& r, const TermPtr& e, const RegionPtr& s,
                         const TyPtr& a_ty, const TyPtr& b_ty) {
  RegionPtr inner =
      r_where(shift_region_labels(r, 1, 1), {a_ty}, {r_br(1, e)});
  return r_where(inner, {b_ty}, {s});
}
inline RegionPtr uni_rhs(const RegionPtr& r, const RegionPtr& t, const TyPtr& a_ty) {
  return r_where(r, {a_ty}, {t});
}
inline RegionPtr uni_premise_lhs(const TermPtr& e, const RegionPtr& s) {
  return r_let1(e, shift_region_vars(s, 1, 1));
}
inline RegionPtr uni_premise_rhs(const RegionPtr& t, const TermPtr& e, const TyPtr& a_ty) {
  return r_where(shift_region_labels(t, 1, 1), {a_ty}, {r_br(1, shift_term(e, 1, 1))});
}

// dinat: where ([^sigma]r) { (k_j(y): [^sigma]t_j)_j }
//     ~~ where r { (l_i(x): [k_j -> t_j](sigma_i))_i }
inline LabelSubst dinat_up_sigma(const std::vector<RegionPtr>& sigma, int n_kappa,
                                 int l_len) {
  LabelSubst up = sigma;  // entries 0..n_ell-1
  for (int k = 0; k < l_len; ++k) up.push_back(r_br(n_kappa + k, t_var(0)));
  return up;
}
inline RegionPtr dinat_lhs(const RegionPtr& r, const std::vector<RegionPtr>& sigma,
                           const std::vector<RegionPtr>& ts, const std::vector<TyPtr>& b_tys,
                           int l_len) {
  int m = static_cast<int>(ts.size());
  LabelSubst up = dinat_up_sigma(sigma, m, l_len);
  std::vector<RegionPtr> blocks;
  blocks.reserve(m);
  for (auto& t : ts) blocks.push_back(lsubst_region(up, t));
  return r_where(lsubst_region(up, r), b_tys, std::move(blocks));
}
inline RegionPtr dinat_rhs(const RegionPtr& r, const std::vector<RegionPtr>& sigma,
                           const std::vector<RegionPtr>& ts, const std::vector<TyPtr>& a_tys) {
  LabelSubst tau;
  tau.reserve(ts.size());
  for (auto& t : ts) tau.push_back(shift_region_vars(t, 1, 1));
  std::vector<RegionPtr> blocks;
  blocks.reserve(sigma.size());
  for (auto& s : sigma) blocks.push_back(lsubst_region(tau, s));
  return r_where(r, a_tys, std::move(blocks));
}

// cfg-eta: the control-flow graph substitution; entry j wraps a branch in a
// copy of the where-block (uniformly for local and outer labels).
inline LabelSubst cfg_subst(const std::vector<TyPtr>& params,
                            const std::vector<RegionPtr>& blocks, int covered) {
  std::vector<RegionPtr> shifted;
  shifted.reserve(blocks.size());
  for (auto& b : blocks) shifted.push_back(shift_region_vars(b, 1, 1));
  LabelSubst sigma;
  sigma.reserve(covered);
  for (int j = 0; j < covered; ++j)
    sigma.push_back(r_where(r_br(j, t_var(0)), params, shifted));
  return sigma;
}

namespace detail {

using RewriteError::Kind::BadPosition;
using RewriteError::Kind::IllTyped;
using RewriteError::Kind::PatternMismatch;
using RewriteError::Kind::Premise;
using RewriteError::Kind::SideCondition;

inline TermPtr term_rule_local(const Signature& sig, const Ctx& ctx, Effect eff,
                               const TermPtr& t, const RuleInstance& inst) {
  Effect bot = sig.effects.bot();
  auto is_var0 = [](const TermPtr& x) {
    return x->kind == Term::Kind::Var && x->var == 0;
  };
  switch (inst.rule) {
    case RuleId::Let1Beta: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1, PatternMismatch, "let1-beta: expected let");
        need(infer_term(sig, ctx, bot, t->a).has_value(), SideCondition,
             "let1-beta: bound term must be pure");
        return subst_beta_term(t->b, t->a);
      }
      need(inst.term1 && inst.term1->kind == Term::Kind::Let1, PatternMismatch,
           "let1-beta rev: needs the let payload");
      need(infer_term(sig, ctx, bot, inst.term1->a).has_value(), SideCondition,
           "let1-beta rev: bound term must be pure");
      need(term_equal(subst_beta_term(inst.term1->b, inst.term1->a), t), PatternMismatch,
           "let1-beta rev: payload does not reduce to the subject");
      return inst.term1;
    }
    case RuleId::Let1Eta: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1 && is_var0(t->b), PatternMismatch,
             "let1-eta: expected let x = a; x");
        return t->a;
      }
      return t_let1(t, t_var(0));
    }
    case RuleId::Let1Op: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1 && t->a->kind == Term::Kind::Op, PatternMismatch,
             "let1-op: expected let y = f a; c");
        return t_let1(t->a->a, t_let1(t_op(t->a->op, t_var(0)), shift_term(t->b, 1, 1)));
      }
      need(t->kind == Term::Kind::Let1 && t->b->kind == Term::Kind::Let1 &&
               t->b->a->kind == Term::Kind::Op && is_var0(t->b->a->a),
           PatternMismatch, "let1-op rev: shape mismatch");
      auto c = try_unshift_term(t->b->b, 1, 1);
      need(c.has_value(), PatternMismatch, "let1-op rev: continuation uses the argument");
      return t_let1(t_op(t->b->a->op, t->a), *c);
    }
    case RuleId::Let1Let1: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1 && t->a->kind == Term::Kind::Let1, PatternMismatch,
             "let1-let1: expected let y = (let x = a; b); c");
        return t_let1(t->a->a, t_let1(t->a->b, shift_term(t->b, 1, 1)));
      }
      need(t->kind == Term::Kind::Let1 && t->b->kind == Term::Kind::Let1, PatternMismatch,
           "let1-let1 rev: shape mismatch");
      auto c = try_unshift_term(t->b->b, 1, 1);
      need(c.has_value(), PatternMismatch, "let1-let1 rev: continuation uses inner binder");
      return t_let1(t_let1(t->a, t->b->a), *c);
    }
    case RuleId::Let1Let2: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1 && t->a->kind == Term::Kind::Let2, PatternMismatch,
             "let1-let2: expected let z = (let (x,y) = e; c); d");
        return t_let2(t->a->a, t_let1(t->a->b, shift_term(t->b, 2, 1)));
      }
      need(t->kind == Term::Kind::Let2 && t->b->kind == Term::Kind::Let1, PatternMismatch,
           "let1-let2 rev: shape mismatch");
      auto d = try_unshift_term(t->b->b, 2, 1);
      need(d.has_value(), PatternMismatch, "let1-let2 rev: continuation uses pair parts");
      return t_let1(t_let2(t->a, t->b->a), *d);
    }
    case RuleId::Let1Abort: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1 && t->a->kind == Term::Kind::Abort, PatternMismatch,
             "let1-abort: expected let y = abort a; b");
        return t_let1(t->a->a,
                      t_let1(t_abort(t_var(0), t->a->ann), shift_term(t->b, 1, 1)));
      }
      need(t->kind == Term::Kind::Let1 && t->b->kind == Term::Kind::Let1 &&
               t->b->a->kind == Term::Kind::Abort && is_var0(t->b->a->a),
           PatternMismatch, "let1-abort rev: shape mismatch");
      auto b = try_unshift_term(t->b->b, 1, 1);
      need(b.has_value(), PatternMismatch, "let1-abort rev: continuation uses the argument");
      return t_let1(t_abort(t->a, t->b->a->ann), *b);
    }
    case RuleId::Let1Case: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let1 && t->a->kind == Term::Kind::Case, PatternMismatch,
             "let1-case: expected let z = case ..; d");
        TermPtr d = shift_term(t->b, 1, 1);
        return t_case(t->a->a, t_let1(t->a->b, d), t_let1(t->a->c, d));
      }
      need(t->kind == Term::Kind::Case && t->b->kind == Term::Kind::Let1 &&
               t->c->kind == Term::Kind::Let1 && term_equal(t->b->b, t->c->b),
           PatternMismatch, "let1-case rev: shape mismatch");
      auto d = try_unshift_term(t->b->b, 1, 1);
      need(d.has_value(), PatternMismatch, "let1-case rev: continuation uses case binder");
      return t_let1(t_case(t->a, t->b->a, t->c->a), *d);
    }
    case RuleId::Let2Pair: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let2 && t->a->kind == Term::Kind::Pair, PatternMismatch,
             "let2-pair: expected let (x,y) = (a,b); c");
        return t_let1(t->a->a, t_let1(shift_term(t->a->b, 1, 0), t->b));
      }
      need(t->kind == Term::Kind::Let1 && t->b->kind == Term::Kind::Let1, PatternMismatch,
           "let2-pair rev: shape mismatch");
      auto b = try_unshift_term(t->b->a, 1, 0);
      need(b.has_value(), PatternMismatch, "let2-pair rev: second component uses the first");
      return t_let2(t_pair(t->a, *b), t->b->b);
    }
    case RuleId::Let2Eta: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let2 && t->b->kind == Term::Kind::Pair &&
                 t->b->a->kind == Term::Kind::Var && t->b->a->var == 1 &&
                 is_var0(t->b->b),
             PatternMismatch, "let2-eta: expected let (x,y) = e; (x,y)");
        return t->a;
      }
      return t_let2(t, t_pair(t_var(1), t_var(0)));
    }
    case RuleId::Let2Bind: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Let2, PatternMismatch, "let2-bind: expected let2");
        return t_let1(t->a, t_let2(t_var(0), shift_term(t->b, 1, 2)));
      }
      need(t->kind == Term::Kind::Let1 && t->b->kind == Term::Kind::Let2 && is_var0(t->b->a),
           PatternMismatch, "let2-bind rev: shape mismatch");
      auto c = try_unshift_term(t->b->b, 1, 2);
      need(c.has_value(), PatternMismatch, "let2-bind rev: body uses the bound pair");
      return t_let2(t->a, *c);
    }
    case RuleId::CaseInl: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Case && t->a->kind == Term::Kind::Inl, PatternMismatch,
             "case-inl: expected case (inl a)");
        return t_let1(t->a->a, t->b);
      }
      need(inst.term1 && inst.term1->kind == Term::Kind::Case &&
               inst.term1->a->kind == Term::Kind::Inl,
           PatternMismatch, "case-inl rev: needs the case payload");
      need(term_equal(t_let1(inst.term1->a->a, inst.term1->b), t), PatternMismatch,
           "case-inl rev: payload does not reduce to the subject");
      return inst.term1;
    }
    case RuleId::CaseInr: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Case && t->a->kind == Term::Kind::Inr, PatternMismatch,
             "case-inr: expected case (inr b)");
        return t_let1(t->a->a, t->c);
      }
      need(inst.term1 && inst.term1->kind == Term::Kind::Case &&
               inst.term1->a->kind == Term::Kind::Inr,
           PatternMismatch, "case-inr rev: needs the case payload");
      need(term_equal(t_let1(inst.term1->a->a, inst.term1->c), t), PatternMismatch,
           "case-inr rev: payload does not reduce to the subject");
      return inst.term1;
    }
    case RuleId::CaseEta: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Case && t->b->kind == Term::Kind::Inl &&
                 is_var0(t->b->a) && t->c->kind == Term::Kind::Inr && is_var0(t->c->a) &&
                 ty_equal(t->b->ann, t->c->ann),
             PatternMismatch, "case-eta: expected case e { inl x, inr y }");
        auto ety = infer_term(sig, ctx, eff, t->a);
        need(ety && ty_equal(*ety, t->b->ann), SideCondition,
             "case-eta: annotations must equal the scrutinee type");
        return t->a;
      }
      auto ety = infer_term(sig, ctx, eff, t);
      need(ety && (*ety)->kind == Ty::Kind::Sum, SideCondition,
           "case-eta rev: subject must have sum type");
      return t_case(t, t_inl(t_var(0), *ety), t_inr(t_var(0), *ety));
    }
    case RuleId::CaseBind: {
      if (!inst.backward) {
        need(t->kind == Term::Kind::Case, PatternMismatch, "case-bind: expected case");
        return t_let1(t->a, t_case(t_var(0), shift_term(t->b, 1, 1), shift_term(t->c, 1, 1)));
      }
      need(t->kind == Term::Kind::Let1 && t->b->kind == Term::Kind::Case && is_var0(t->b->a),
           PatternMismatch, "case-bind rev: shape mismatch");
      auto l = try_unshift_term(t->b->b, 1, 1);
      auto r = try_unshift_term(t->b->c, 1, 1);
      need(l && r, PatternMismatch, "case-bind rev: arms use the bound scrutinee");
      return t_case(t->a, *l, *r);
    }
    case RuleId::Initial: {
      bool found = false;
      for (int i = 0; i < ctx.size(); ++i) {
        const Hyp& h = ctx.lookup(i);
        if (h.ty->kind == Ty::Kind::Empty && h.eff == bot) found = true;
      }
      need(found, SideCondition, "initial: no pure hypothesis of empty type");
      need(inst.term1 != nullptr, PatternMismatch, "initial: needs a target term");
      return inst.term1;
    }
    case RuleId::Terminal: {
      need(check_term(sig, ctx, bot, t, ty_unit()), SideCondition,
           "terminal: subject not pure at unit type");
      need(inst.term1 != nullptr, PatternMismatch, "terminal: needs a target term");
      need(check_term(sig, ctx, bot, inst.term1, ty_unit()), SideCondition,
           "terminal: target not pure at unit type");
      return inst.term1;
    }
    case RuleId::InitialExpr: {
      need(inst.term2 != nullptr, PatternMismatch, "initial-expr: needs a witness");
      need(check_term(sig, ctx, bot, inst.term2, ty_empty()), SideCondition,
           "initial-expr: witness is not a pure term of empty type");
      need(inst.term1 != nullptr, PatternMismatch, "initial-expr: needs a target term");
      return inst.term1;
    }
    default: rw_fail(PatternMismatch, "rule is not a term rule");
  }
}

inline RegionPtr region_rule_local(const Signature& sig, const Ctx& ctx, const LabelCtx& lctx,
                                   const RegionPtr& r, const RuleInstance& inst,
                                   const UniVerifier& verifier) {
  Effect bot = sig.effects.bot();
  auto is_var0 = [](const TermPtr& x) {
    return x->kind == Term::Kind::Var && x->var == 0;
  };
  switch (inst.rule) {
    case RuleId::Let1BetaR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let1, PatternMismatch, "let1-beta-r: expected let");
        need(infer_term(sig, ctx, bot, r->term).has_value(), SideCondition,
             "let1-beta-r: bound term must be pure");
        return subst_beta_region(r->a, r->term);
      }
      need(inst.reg1 && inst.reg1->kind == Region::Kind::Let1, PatternMismatch,
           "let1-beta-r rev: needs the let payload");
      need(infer_term(sig, ctx, bot, inst.reg1->term).has_value(), SideCondition,
           "let1-beta-r rev: bound term must be pure");
      need(region_equal(subst_beta_region(inst.reg1->a, inst.reg1->term), r),
           PatternMismatch, "let1-beta-r rev: payload does not reduce to the subject");
      return inst.reg1;
    }
    case RuleId::Let1OpR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let1 && r->term->kind == Term::Kind::Op,
             PatternMismatch, "let1-op-r: expected let y = f a; r");
        return r_let1(r->term->a, r_let1(t_op(r->term->op, t_var(0)),
                                         shift_region_vars(r->a, 1, 1)));
      }
      need(r->kind == Region::Kind::Let1 && r->a->kind == Region::Kind::Let1 &&
               r->a->term->kind == Term::Kind::Op && is_var0(r->a->term->a),
           PatternMismatch, "let1-op-r rev: shape mismatch");
      auto body = try_unshift_region_vars(r->a->a, 1, 1);
      need(body.has_value(), PatternMismatch, "let1-op-r rev: body uses the argument");
      return r_let1(t_op(r->a->term->op, r->term), *body);
    }
    case RuleId::Let1Let1R: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let1 && r->term->kind == Term::Kind::Let1,
             PatternMismatch, "let1-let1-r: expected let y = (let x = a; b); r");
        return r_let1(r->term->a,
                      r_let1(r->term->b, shift_region_vars(r->a, 1, 1)));
      }
      need(r->kind == Region::Kind::Let1 && r->a->kind == Region::Kind::Let1,
           PatternMismatch, "let1-let1-r rev: shape mismatch");
      auto body = try_unshift_region_vars(r->a->a, 1, 1);
      need(body.has_value(), PatternMismatch, "let1-let1-r rev: body uses inner binder");
      return r_let1(t_let1(r->term, r->a->term), *body);
    }
    case RuleId::Let1Let2R: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let1 && r->term->kind == Term::Kind::Let2,
             PatternMismatch, "let1-let2-r: expected let z = (let (x,y) = e; c); r");
        return r_let2(r->term->a, r_let1(r->term->b, shift_region_vars(r->a, 2, 1)));
      }
      need(r->kind == Region::Kind::Let2 && r->a->kind == Region::Kind::Let1,
           PatternMismatch, "let1-let2-r rev: shape mismatch");
      auto body = try_unshift_region_vars(r->a->a, 2, 1);
      need(body.has_value(), PatternMismatch, "let1-let2-r rev: body uses pair parts");
      return r_let1(t_let2(r->term, r->a->term), *body);
    }
    case RuleId::Let1CaseR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let1 && r->term->kind == Term::Kind::Case,
             PatternMismatch, "let1-case-r: expected let z = case ..; r");
        RegionPtr body = shift_region_vars(r->a, 1, 1);
        return r_case(r->term->a, r_let1(r->term->b, body), r_let1(r->term->c, body));
      }
      need(r->kind == Region::Kind::Case && r->a->kind == Region::Kind::Let1 &&
               r->b->kind == Region::Kind::Let1 && region_equal(r->a->a, r->b->a),
           PatternMismatch, "let1-case-r rev: shape mismatch");
      auto body = try_unshift_region_vars(r->a->a, 1, 1);
      need(body.has_value(), PatternMismatch, "let1-case-r rev: body uses case binder");
      return r_let1(t_case(r->term, r->a->term, r->b->term), *body);
    }
    case RuleId::Let1AbortR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let1 && r->term->kind == Term::Kind::Abort,
             PatternMismatch, "let1-abort-r: expected let y = abort a; r");
        return r_let1(r->term->a, r_let1(t_abort(t_var(0), r->term->ann),
                                         shift_region_vars(r->a, 1, 1)));
      }
      need(r->kind == Region::Kind::Let1 && r->a->kind == Region::Kind::Let1 &&
               r->a->term->kind == Term::Kind::Abort && is_var0(r->a->term->a),
           PatternMismatch, "let1-abort-r rev: shape mismatch");
      auto body = try_unshift_region_vars(r->a->a, 1, 1);
      need(body.has_value(), PatternMismatch, "let1-abort-r rev: body uses the argument");
      return r_let1(t_abort(r->term, r->a->term->ann), *body);
    }
    case RuleId::Let2PairR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let2 && r->term->kind == Term::Kind::Pair,
             PatternMismatch, "let2-pair-r: expected let (x,y) = (a,b); r");
        return r_let1(r->term->a, r_let1(shift_term(r->term->b, 1, 0), r->a));
      }
      need(r->kind == Region::Kind::Let1 && r->a->kind == Region::Kind::Let1,
           PatternMismatch, "let2-pair-r rev: shape mismatch");
      auto b = try_unshift_term(r->a->term, 1, 0);
      need(b.has_value(), PatternMismatch, "let2-pair-r rev: second component uses first");
      return r_let2(t_pair(r->term, *b), r->a->a);
    }
    case RuleId::Let2BindR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Let2, PatternMismatch, "let2-bind-r: expected let2");
        return r_let1(r->term, r_let2(t_var(0), shift_region_vars(r->a, 1, 2)));
      }
      need(r->kind == Region::Kind::Let1 && r->a->kind == Region::Kind::Let2 &&
               is_var0(r->a->term),
           PatternMismatch, "let2-bind-r rev: shape mismatch");
      auto body = try_unshift_region_vars(r->a->a, 1, 2);
      need(body.has_value(), PatternMismatch, "let2-bind-r rev: body uses the bound pair");
      return r_let2(r->term, *body);
    }
    case RuleId::CaseInlR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Case && r->term->kind == Term::Kind::Inl,
             PatternMismatch, "case-inl-r: expected case (inl a)");
        return r_let1(r->term->a, r->a);
      }
      need(inst.reg1 && inst.reg1->kind == Region::Kind::Case &&
               inst.reg1->term->kind == Term::Kind::Inl,
           PatternMismatch, "case-inl-r rev: needs the case payload");
      need(region_equal(r_let1(inst.reg1->term->a, inst.reg1->a), r), PatternMismatch,
           "case-inl-r rev: payload does not reduce to the subject");
      return inst.reg1;
    }
    case RuleId::CaseInrR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Case && r->term->kind == Term::Kind::Inr,
             PatternMismatch, "case-inr-r: expected case (inr b)");
        return r_let1(r->term->a, r->b);
      }
      need(inst.reg1 && inst.reg1->kind == Region::Kind::Case &&
               inst.reg1->term->kind == Term::Kind::Inr,
           PatternMismatch, "case-inr-r rev: needs the case payload");
      need(region_equal(r_let1(inst.reg1->term->a, inst.reg1->b), r), PatternMismatch,
           "case-inr-r rev: payload does not reduce to the subject");
      return inst.reg1;
    }
    case RuleId::CaseBindR: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Case, PatternMismatch, "case-bind-r: expected case");
        return r_let1(r->term, r_case(t_var(0), shift_region_vars(r->a, 1, 1),
                                      shift_region_vars(r->b, 1, 1)));
      }
      need(r->kind == Region::Kind::Let1 && r->a->kind == Region::Kind::Case &&
               is_var0(r->a->term),
           PatternMismatch, "case-bind-r rev: shape mismatch");
      auto l = try_unshift_region_vars(r->a->a, 1, 1);
      auto rr = try_unshift_region_vars(r->a->b, 1, 1);
      need(l && rr, PatternMismatch, "case-bind-r rev: arms use the bound scrutinee");
      return r_case(r->term, *l, *rr);
    }
    case RuleId::CfgBeta1: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Where && r->a->kind == Region::Kind::Br,
             PatternMismatch, "cfg-beta1: expected a where with a branch head");
        int k = r->a->label;
        need(k >= 0 && k < static_cast<int>(r->blocks.size()), SideCondition,
             "cfg-beta1: head must branch to a bound label");
        need(infer_term(sig, ctx, bot, r->a->term).has_value(), SideCondition,
             "cfg-beta1: branch argument must be pure");
        return r_where(r_let1(r->a->term, r->blocks[k]), r->params, r->blocks);
      }
      need(r->kind == Region::Kind::Where && r->a->kind == Region::Kind::Let1,
           PatternMismatch, "cfg-beta1 rev: expected a where with a let head");
      int k = inst.k;
      if (k < 0) {
        for (int i = 0; i < static_cast<int>(r->blocks.size()); ++i)
          if (region_equal(r->blocks[i], r->a->a)) {
            k = i;
            break;
          }
      }
      need(k >= 0 && k < static_cast<int>(r->blocks.size()) &&
               region_equal(r->blocks[k], r->a->a),
           PatternMismatch, "cfg-beta1 rev: head body is not a copy of block k");
      need(infer_term(sig, ctx, bot, r->a->term).has_value(), SideCondition,
           "cfg-beta1 rev: branch argument must be pure");
      return r_where(r_br(k, r->a->term), r->params, r->blocks);
    }
    case RuleId::CfgBeta2: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Where && r->a->kind == Region::Kind::Br,
             PatternMismatch, "cfg-beta2: expected a where with a branch head");
        int n = static_cast<int>(r->blocks.size());
        need(r->a->label >= n, SideCondition, "cfg-beta2: label must not be locally bound");
        need(infer_term(sig, ctx, bot, r->a->term).has_value(), SideCondition,
             "cfg-beta2: branch argument must be pure");
        return r_br(r->a->label - n, r->a->term);
      }
      need(inst.reg1 && inst.reg1->kind == Region::Kind::Where, PatternMismatch,
           "cfg-beta2 rev: needs the where payload");
      RuleInstance fwd = inst;
      fwd.backward = false;
      need(region_equal(region_rule_local(sig, ctx, lctx, inst.reg1, fwd, verifier), r),
           PatternMismatch, "cfg-beta2 rev: payload does not reduce to the subject");
      return inst.reg1;
    }
    case RuleId::CfgEta: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Where, PatternMismatch, "cfg-eta: expected a where");
        int covered = static_cast<int>(r->blocks.size()) + lctx.size();
        return lsubst_region(cfg_subst(r->params, r->blocks, covered), r->a);
      }
      need(inst.reg1 && inst.reg1->kind == Region::Kind::Where, PatternMismatch,
           "cfg-eta rev: needs the where payload");
      RuleInstance fwd = inst;
      fwd.backward = false;
      need(region_equal(region_rule_local(sig, ctx, lctx, inst.reg1, fwd, verifier), r),
           PatternMismatch, "cfg-eta rev: payload does not expand to the subject");
      return inst.reg1;
    }
    case RuleId::Codiag: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Where && r->blocks.size() == 1, PatternMismatch,
             "codiag: expected a single-label where");
        const RegionPtr& blk = r->blocks[0];
        need(blk->kind == Region::Kind::Where && blk->blocks.size() == 1 &&
                 blk->a->kind == Region::Kind::Br && blk->a->label == 0 &&
                 is_var0(blk->a->term) && ty_equal(blk->params[0], r->params[0]),
             PatternMismatch, "codiag: inner where must forward the outer parameter");
        auto s = try_unshift_region_vars(blk->blocks[0], 1, 1);
        need(s.has_value(), PatternMismatch, "codiag: inner body uses the outer parameter");
        RegionPtr merged =
            map_region_labels(*s, [](int l) { return l <= 1 ? 0 : l - 1; });
        return r_where(r->a, r->params, {merged});
      }
      need(inst.reg1 != nullptr, PatternMismatch, "codiag rev: needs the nested payload");
      RuleInstance fwd = inst;
      fwd.backward = false;
      need(region_equal(region_rule_local(sig, ctx, lctx, inst.reg1, fwd, verifier), r),
           PatternMismatch, "codiag rev: payload does not collapse to the subject");
      return inst.reg1;
    }
    case RuleId::Uni: {
      need(inst.reg1 && inst.term1 && inst.sigma.size() == 1 && inst.tbodies.size() == 1 &&
               inst.tys1.size() == 1 && inst.tys2.size() == 1,
           PatternMismatch, "uni: needs r, e, s, t and both parameter types");
      const RegionPtr& rr = inst.reg1;
      const TermPtr& e = inst.term1;
      const RegionPtr& s = inst.sigma[0];
      const RegionPtr& t = inst.tbodies[0];
      const TyPtr& a_ty = inst.tys1[0];
      const TyPtr& b_ty = inst.tys2[0];
      need(check_term(sig, ctx.push(a_ty), bot, e, b_ty), SideCondition,
           "uni: mediator must be pure");
      if (inst.verify_premise) {
        need(static_cast<bool>(verifier), Premise, "uni: no premise verifier configured");
        RegionPtr pl = uni_premise_lhs(e, s);
        RegionPtr pr = uni_premise_rhs(t, e, a_ty);
        need(verifier(ctx.push(a_ty), pl, pr, lctx.push(b_ty)), Premise,
             "uni: premise equivalence failed verification");
      }
      RegionPtr lhs = uni_lhs(rr, e, s, a_ty, b_ty);
      RegionPtr rhs = uni_rhs(rr, t, a_ty);
      if (!inst.backward) {
        need(region_equal(lhs, r), PatternMismatch, "uni: subject is not the packed loop");
        return rhs;
      }
      need(region_equal(rhs, r), PatternMismatch, "uni rev: subject is not the fused loop");
      return lhs;
    }
    case RuleId::Dinat: {
      need(inst.reg1 && inst.sigma.size() == inst.tys1.size() &&
               inst.tbodies.size() == inst.tys2.size() && !inst.sigma.empty() &&
               !inst.tbodies.empty(),
           PatternMismatch, "dinat: needs r, sigma, ts and the label types");
      RegionPtr lhs = dinat_lhs(inst.reg1, inst.sigma, inst.tbodies, inst.tys2, lctx.size());
      RegionPtr rhs = dinat_rhs(inst.reg1, inst.sigma, inst.tbodies, inst.tys1);
      if (!inst.backward) {
        need(region_equal(lhs, r), PatternMismatch, "dinat: subject mismatch");
        return rhs;
      }
      need(region_equal(rhs, r), PatternMismatch, "dinat rev: subject mismatch");
      return lhs;
    }
    case RuleId::InitialR: {
      bool found = false;
      for (int i = 0; i < ctx.size(); ++i)
        if (ctx.lookup(i).ty->kind == Ty::Kind::Empty) found = true;
      need(found, SideCondition, "initial-r: no hypothesis of empty type");
      need(inst.reg1 != nullptr, PatternMismatch, "initial-r: needs a target region");
      return inst.reg1;
    }
    case RuleId::Case2Cfg: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Case, PatternMismatch, "case2cfg: expected a case");
        auto ety = infer_term(sig, ctx, sig.effects.top(), r->term);
        need(ety && (*ety)->kind == Ty::Kind::Sum, SideCondition,
             "case2cfg: scrutinee must have a sum type");
        RegionPtr head = r_case(r->term, r_br(0, t_var(0)), r_br(1, t_var(0)));
        return r_where(head, {(*ety)->a, (*ety)->b},
                       {shift_region_labels(r->a, 2, 0), shift_region_labels(r->b, 2, 0)});
      }
      need(r->kind == Region::Kind::Where && r->blocks.size() == 2 &&
               r->a->kind == Region::Kind::Case && r->a->a->kind == Region::Kind::Br &&
               r->a->a->label == 0 && is_var0(r->a->a->term) &&
               r->a->b->kind == Region::Kind::Br && r->a->b->label == 1 &&
               is_var0(r->a->b->term),
           PatternMismatch, "case2cfg rev: shape mismatch");
      auto s = try_unshift_region_labels(r->blocks[0], 2, 0);
      auto t = try_unshift_region_labels(r->blocks[1], 2, 0);
      need(s && t, PatternMismatch, "case2cfg rev: blocks use the bound labels");
      return r_case(r->a->term, *s, *t);
    }
    case RuleId::CfgFuse1: {
      if (!inst.backward) {
        need(r->kind == Region::Kind::Where && r->a->kind == Region::Kind::Where,
             PatternMismatch, "cfg-fuse1: expected a nested where head");
        const RegionPtr& in = r->a;
        int n_in = static_cast<int>(in->blocks.size());
        std::vector<TyPtr> params = in->params;
        std::vector<RegionPtr> blocks = in->blocks;
        for (size_t j = 0; j < r->blocks.size(); ++j) {
          params.push_back(r->params[j]);
          blocks.push_back(shift_region_labels(r->blocks[j], n_in, 0));
        }
        return r_where(in->a, std::move(params), std::move(blocks));
      }
      need(r->kind == Region::Kind::Where, PatternMismatch, "cfg-fuse1 rev: expected where");
      int k = inst.k;
      int n = static_cast<int>(r->blocks.size());
      need(k >= 0 && k <= n, PatternMismatch, "cfg-fuse1 rev: needs the split point");
      std::vector<TyPtr> pin(r->params.begin(), r->params.begin() + k);
      std::vector<RegionPtr> bin(r->blocks.begin(), r->blocks.begin() + k);
      std::vector<TyPtr> pout(r->params.begin() + k, r->params.end());
      std::vector<RegionPtr> bout;
      for (int j = k; j < n; ++j) {
        auto b = try_unshift_region_labels(r->blocks[j], k, 0);
        need(b.has_value(), PatternMismatch, "cfg-fuse1 rev: outer block uses inner labels");
        bout.push_back(*b);
      }
      return r_where(r_where(r->a, std::move(pin), std::move(bin)), std::move(pout),
                     std::move(bout));
    }
    case RuleId::CfgFuse2: {
      int big_n;
      if (!inst.backward) {
        need(r->kind == Region::Kind::Where, PatternMismatch, "cfg-fuse2: expected a where");
        int k = inst.k;
        int n_out = static_cast<int>(r->blocks.size());
        need(k >= 0 && k < n_out, PatternMismatch, "cfg-fuse2: needs the block index");
        const RegionPtr& nested = r->blocks[k];
        need(nested->kind == Region::Kind::Where, PatternMismatch,
             "cfg-fuse2: block k does not hold a nested where");
        int m = static_cast<int>(nested->blocks.size());
        auto remap = [m, n_out](int l) {
          if (l < m) return n_out + l;
          if (l < m + n_out) return l - m;
          return l;
        };
        std::vector<TyPtr> params;
        std::vector<RegionPtr> blocks;
        for (int j = 0; j < n_out; ++j) {
          params.push_back(r->params[j]);
          if (j == k)
            blocks.push_back(map_region_labels(nested->a, remap));
          else
            blocks.push_back(shift_region_labels(r->blocks[j], m, n_out));
        }
        for (int i = 0; i < m; ++i) {
          params.push_back(nested->params[i]);
          // hoisted blocks leave the scope of block k's parameter
          auto hoisted = try_unshift_region_vars(nested->blocks[i], 1, 1);
          need(hoisted.has_value(), SideCondition,
               "cfg-fuse2: nested block uses the enclosing block's parameter");
          blocks.push_back(map_region_labels(*hoisted, remap));
        }
        return r_where(shift_region_labels(r->a, m, n_out), std::move(params),
                       std::move(blocks));
      }
      need(r->kind == Region::Kind::Where, PatternMismatch, "cfg-fuse2 rev: expected where");
      big_n = static_cast<int>(r->blocks.size());
      int k = inst.k, m = inst.m;
      need(k >= 0 && m > 0 && k < big_n - m, PatternMismatch,
           "cfg-fuse2 rev: needs block index and count");
      int n_out = big_n - m;
      auto unmap = [m, n_out](int l) {
        if (l < n_out) return l + m;
        if (l < n_out + m) return l - n_out;
        return l;
      };
      // labels n_out..n_out+m-1 may only appear in block k and the pulled blocks
      auto head = try_unshift_region_labels(r->a, m, n_out);
      need(head.has_value(), PatternMismatch, "cfg-fuse2 rev: head uses pulled labels");
      std::vector<TyPtr> pout, pin;
      std::vector<RegionPtr> bout, bin;
      for (int j = 0; j < n_out; ++j) {
        pout.push_back(r->params[j]);
        if (j == k) {
          bout.push_back(nullptr);  // placeholder, replaced below
        } else {
          auto b = try_unshift_region_labels(r->blocks[j], m, n_out);
          need(b.has_value(), PatternMismatch,
               "cfg-fuse2 rev: sibling block uses pulled labels");
          bout.push_back(*b);
        }
      }
      for (int i = 0; i < m; ++i) {
        pin.push_back(r->params[n_out + i]);
        // re-nested blocks go back under block k's parameter
        bin.push_back(shift_region_vars(map_region_labels(r->blocks[n_out + i], unmap), 1, 1));
      }
      RegionPtr s = map_region_labels(r->blocks[k], unmap);
      bout[k] = r_where(s, std::move(pin), std::move(bin));
      return r_where(*head, std::move(pout), std::move(bout));
    }
    case RuleId::PermCfg: {
      need(r->kind == Region::Kind::Where, PatternMismatch, "perm-cfg: expected a where");
      int n = static_cast<int>(r->blocks.size());
      need(static_cast<int>(inst.perm.size()) == n, PatternMismatch,
           "perm-cfg: permutation size mismatch");
      std::vector<int> pi = inst.perm;
      {
        std::vector<bool> hit(n, false);
        for (int x : pi) {
          need(x >= 0 && x < n && !hit[x], SideCondition, "perm-cfg: not a permutation");
          hit[x] = true;
        }
      }
      if (inst.backward) {  // invert
        std::vector<int> inv(n);
        for (int i = 0; i < n; ++i) inv[pi[i]] = i;
        pi = inv;
      }
      auto remap = [&pi, n](int l) { return l < n ? pi[l] : l; };
      std::vector<TyPtr> params(n);
      std::vector<RegionPtr> blocks(n);
      for (int i = 0; i < n; ++i) {
        params[pi[i]] = r->params[i];
        blocks[pi[i]] = map_region_labels(r->blocks[i], remap);
      }
      return r_where(map_region_labels(r->a, remap), std::move(params), std::move(blocks));
    }
    default: rw_fail(PatternMismatch, "rule is not a region rule");
  }
}

// Path descent through a term; tracks the context (the effect is ambient).
inline TermPtr rewrite_term_at(const Signature& sig, Ctx ctx, Effect eff, const TermPtr& t,
                               const std::vector<int>& path, size_t idx,
                               const RuleInstance& inst) {
  if (idx == path.size()) return term_rule_local(sig, ctx, eff, t, inst);
  int step = path[idx];
  auto sub = [&](const Ctx& c, const TermPtr& x) {
    return rewrite_term_at(sig, c, eff, x, path, idx + 1, inst);
  };
  Effect top = sig.effects.top();
  switch (t->kind) {
    case Term::Kind::Op:
      need(step == 0, BadPosition, "op has one child");
      return t_op(t->op, sub(ctx, t->a));
    case Term::Kind::Let1: {
      if (step == 0) return t_let1(sub(ctx, t->a), t->b);
      need(step == 1, BadPosition, "let has two children");
      auto a = infer_term(sig, ctx, top, t->a);
      need(a.has_value(), IllTyped, "bound term ill-typed during descent");
      return t_let1(t->a, sub(ctx.push(*a), t->b));
    }
    case Term::Kind::Pair:
      need(step == 0 || step == 1, BadPosition, "pair has two children");
      return step == 0 ? t_pair(sub(ctx, t->a), t->b) : t_pair(t->a, sub(ctx, t->b));
    case Term::Kind::Let2: {
      if (step == 0) return t_let2(sub(ctx, t->a), t->b);
      need(step == 1, BadPosition, "let2 has two children");
      auto e = infer_term(sig, ctx, top, t->a);
      need(e.has_value() && (*e)->kind == Ty::Kind::Prod, IllTyped, "let2 bound ill-typed");
      return t_let2(t->a, sub(ctx.push((*e)->a).push((*e)->b), t->b));
    }
    case Term::Kind::Inl:
      need(step == 0, BadPosition, "inl has one child");
      return t_inl(sub(ctx, t->a), t->ann);
    case Term::Kind::Inr:
      need(step == 0, BadPosition, "inr has one child");
      return t_inr(sub(ctx, t->a), t->ann);
    case Term::Kind::Abort:
      need(step == 0, BadPosition, "abort has one child");
      return t_abort(sub(ctx, t->a), t->ann);
    case Term::Kind::Case: {
      if (step == 0) return t_case(sub(ctx, t->a), t->b, t->c);
      auto e = infer_term(sig, ctx, top, t->a);
      need(e.has_value() && (*e)->kind == Ty::Kind::Sum, IllTyped, "case scrutinee ill-typed");
      if (step == 1) return t_case(t->a, sub(ctx.push((*e)->a), t->b), t->c);
      need(step == 2, BadPosition, "case has three children");
      return t_case(t->a, t->b, sub(ctx.push((*e)->b), t->c));
    }
    default: rw_fail(BadPosition, "no such child");
  }
}

inline RegionPtr rewrite_region_at(const Signature& sig, Ctx ctx, LabelCtx lctx,
                                   const RegionPtr& r, const std::vector<int>& path,
                                   size_t idx, const RuleInstance& inst,
                                   const UniVerifier& verifier) {
  if (idx == path.size()) {
    if (rule_info(inst.rule).on_terms)
      rw_fail(BadPosition, "term rule applied at a region position");
    return region_rule_local(sig, ctx, lctx, r, inst, verifier);
  }
  int step = path[idx];
  Effect top = sig.effects.top();
  auto subr = [&](const Ctx& c, const LabelCtx& l, const RegionPtr& x) {
    return rewrite_region_at(sig, c, l, x, path, idx + 1, inst, verifier);
  };
  auto subt = [&](const TermPtr& x) {
    // term rules inside regions run at the most permissive effect
    return rewrite_term_at(sig, ctx, top, x, path, idx + 1, inst);
  };
  switch (r->kind) {
    case Region::Kind::Br:
      need(step == 0, BadPosition, "br has one child");
      return r_br(r->label, subt(r->term));
    case Region::Kind::Let1: {
      if (step == 0) return r_let1(subt(r->term), r->a);
      need(step == 1, BadPosition, "let has two children");
      auto a = infer_term(sig, ctx, top, r->term);
      need(a.has_value(), IllTyped, "bound term ill-typed during descent");
      return r_let1(r->term, subr(ctx.push(*a), lctx, r->a));
    }
    case Region::Kind::Let2: {
      if (step == 0) return r_let2(subt(r->term), r->a);
      need(step == 1, BadPosition, "let2 has two children");
      auto e = infer_term(sig, ctx, top, r->term);
      need(e.has_value() && (*e)->kind == Ty::Kind::Prod, IllTyped, "let2 bound ill-typed");
      return r_let2(r->term, subr(ctx.push((*e)->a).push((*e)->b), lctx, r->a));
    }
    case Region::Kind::Case: {
      if (step == 0) return r_case(subt(r->term), r->a, r->b);
      auto e = infer_term(sig, ctx, top, r->term);
      need(e.has_value() && (*e)->kind == Ty::Kind::Sum, IllTyped, "case scrutinee ill-typed");
      if (step == 1) return r_case(r->term, subr(ctx.push((*e)->a), lctx, r->a), r->b);
      need(step == 2, BadPosition, "case has three children");
      return r_case(r->term, r->a, subr(ctx.push((*e)->b), lctx, r->b));
    }
    case Region::Kind::Where: {
      LabelCtx ext = lctx.push_blocks(r->params);
      if (step == 0) return r_where(subr(ctx, ext, r->a), r->params, r->blocks);
      int i = step - 1;
      need(i >= 0 && i < static_cast<int>(r->blocks.size()), BadPosition, "no such block");
      std::vector<RegionPtr> bs = r->blocks;
      bs[i] = subr(ctx.push(r->params[i]), ext, r->blocks[i]);
      return r_where(r->a, r->params, std::move(bs));
    }
  }
  rw_fail(BadPosition, "no such child");
}

}  // namespace detail

// Applies a rule instance to a term judgment. The subject must typecheck, and
// the result is re-checked at the same judgment.
inline TermPtr apply_term_rule(const Signature& sig, const Ctx& ctx, Effect eff,
                               const TermPtr& t, const TyPtr& ty, const RuleInstance& inst) {
  if (!check_term(sig, ctx, eff, t, ty))
    throw RewriteError(RewriteError::Kind::IllTyped, "subject does not typecheck");
  TermPtr out = detail::rewrite_term_at(sig, ctx, eff, t, inst.path, 0, inst);
  if (!check_term(sig, ctx, eff, out, ty))
    throw RewriteError(RewriteError::Kind::IllTyped, "rewritten term does not typecheck");
  return out;
}

// Applies a rule instance to a region judgment; term rules may be addressed
// at term positions inside the region.
inline RegionPtr apply_region_rule(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                                   const LabelCtx& lctx, const RuleInstance& inst,
                                   const UniVerifier& verifier = nullptr) {
  if (!check_region(sig, ctx, r, lctx))
    throw RewriteError(RewriteError::Kind::IllTyped, "subject does not typecheck");
  RegionPtr out = detail::rewrite_region_at(sig, ctx, lctx, r, inst.path, 0, inst, verifier);
  if (!check_region(sig, ctx, out, lctx))
    throw RewriteError(RewriteError::Kind::IllTyped, "rewritten region does not typecheck");
  return out;
}

}  // namespace lssa
