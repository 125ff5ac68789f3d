#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "lssa/interp.hpp"
#include "lssa/rewrite.hpp"
#include "lssa/subst.hpp"
#include "lssa/typing.hpp"

namespace lssa {

// The standard differential-testing signature: two base types with carriers
// of size 2, a few pure total instructions, and one impure instruction that
// is genuinely nondeterministic in set-like models (so that rewrites which
// duplicate or reorder effects get caught).
inline Signature fuzz_signature(Interp& interp) {
  Signature sig;
  int b0 = sig.add_base("b0", 2);
  int b1 = sig.add_base("b1", 2);
  TyPtr t0 = ty_base(b0), t1 = ty_base(b1);
  auto add = [&](const std::string& n, TyPtr dom, TyPtr cod, Effect e, Behavior b) {
    sig.add_instr(n, std::move(dom), std::move(cod), e);
    interp.by_instr.push_back(std::move(b));
  };
  add("mk0", ty_unit(), t0, 0, pure_fn([b0](const ValuePtr&) { return v_base(b0, 0); }));
  add("mk1", ty_unit(), t1, 0, pure_fn([b1](const ValuePtr&) { return v_base(b1, 1); }));
  add("neg", t0, t0, 0,
      pure_fn([b0](const ValuePtr& v) { return v_base(b0, 1 - word_of(v)); }));
  add("cast", t0, t1, 0,
      pure_fn([b1](const ValuePtr& v) { return v_base(b1, word_of(v)); }));
  add("mix", ty_prod(t1, t0), t0, 0, pure_fn([b0](const ValuePtr& v) {
        return v_base(b0, (word_of(v->a) ^ word_of(v->b)) & 1);
      }));
  add("isz", t0, ty_bool(), 0,
      pure_fn([](const ValuePtr& v) { return v_bool(word_of(v) == 0); }));
  {
    Behavior b;
    b.kind = Behavior::Kind::Nondet;
    add("chaos", t0, t0, sig.effects.top(), std::move(b));
  }
  return sig;
}

struct Gen {
  std::mt19937_64 rng;
  const Signature* sig;

  explicit Gen(const Signature& s, std::uint64_t seed) : rng(seed), sig(&s) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  bool coin(int pct) { return pick(100) < pct; }

  TyPtr gen_ty(int depth) {
    int c = pick(depth > 0 ? 6 : 4);
    switch (c) {
      case 0: return ty_unit();
      case 1:
      case 2:
      case 3: return ty_base(pick(static_cast<int>(sig->bases.size())));
      case 4: return ty_prod(gen_ty(depth - 1), gen_ty(depth - 1));
      default: return ty_sum(gen_ty(depth - 1), gen_ty(depth - 1));
    }
  }

  Ctx gen_ctx(int max_len, bool with_empty = false) {
    Ctx ctx;
    int n = pick(max_len + 1);
    for (int i = 0; i < n; ++i)
      ctx = ctx.push(gen_ty(1), coin(25) ? sig->effects.top() : sig->effects.bot());
    if (with_empty) ctx = ctx.push(ty_empty(), sig->effects.bot());
    return ctx;
  }

  LabelCtx gen_lctx(int min_len, int max_len) {
    LabelCtx l;
    int n = min_len + pick(max_len - min_len + 1);
    for (int i = 0; i < n; ++i) l = l.push(gen_ty(1));
    return l;
  }

  // Canonical pure inhabitant of a type, using variables when needed for the
  // empty type.
  std::optional<TermPtr> synth(const Ctx& ctx, const TyPtr& ty) {
    switch (ty->kind) {
      case Ty::Kind::Unit: return t_unit();
      case Ty::Kind::Base:
        for (int i = 0; i < static_cast<int>(sig->instrs.size()); ++i) {
          const Instr& f = sig->instrs[i];
          if (f.effect == 0 && f.cod->kind == Ty::Kind::Base && f.cod->base == ty->base &&
              f.dom->kind == Ty::Kind::Unit)
            return t_op(i, t_unit());
        }
        for (int i = 0; i < ctx.size(); ++i)
          if (ty_equal(ctx.lookup(i).ty, ty) && ctx.lookup(i).eff == 0) return t_var(i);
        return std::nullopt;
      case Ty::Kind::Prod: {
        auto a = synth(ctx, ty->a);
        auto b = synth(ctx, ty->b);
        if (!a || !b) return std::nullopt;
        return t_pair(*a, *b);
      }
      case Ty::Kind::Sum: {
        if (auto a = synth(ctx, ty->a)) return t_inl(*a, ty);
        if (auto b = synth(ctx, ty->b)) return t_inr(*b, ty);
        return std::nullopt;
      }
      case Ty::Kind::Empty:
        for (int i = 0; i < ctx.size(); ++i)
          if (ctx.lookup(i).ty->kind == Ty::Kind::Empty && ctx.lookup(i).eff == 0)
            return t_var(i);
        return std::nullopt;
    }
    return std::nullopt;
  }

  TermPtr gen_term(const Ctx& ctx, Effect eff, const TyPtr& ty, int size) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto t = try_term(ctx, eff, ty, size);
      if (t) return *t;
    }
    auto s = synth(ctx, ty);
    if (s) return *s;
    throw std::runtime_error("gen_term: cannot inhabit type");
  }

  std::optional<TermPtr> try_term(const Ctx& ctx, Effect eff, const TyPtr& ty, int size) {
    // leaves
    if (size <= 0 || coin(25)) {
      std::vector<TermPtr> leaves;
      for (int i = 0; i < ctx.size(); ++i) {
        const Hyp& h = ctx.lookup(i);
        if (ty_equal(h.ty, ty) && sig->effects.leq(h.eff, eff)) leaves.push_back(t_var(i));
      }
      if (auto s = synth(ctx, ty)) leaves.push_back(*s);
      if (!leaves.empty()) return leaves[pick(static_cast<int>(leaves.size()))];
      if (size <= 0) return std::nullopt;
    }
    switch (pick(8)) {
      case 0: {  // op
        std::vector<int> fs;
        for (int i = 0; i < static_cast<int>(sig->instrs.size()); ++i)
          if (ty_equal(sig->instrs[i].cod, ty) && sig->effects.leq(sig->instrs[i].effect, eff))
            fs.push_back(i);
        if (fs.empty()) return std::nullopt;
        int f = fs[pick(static_cast<int>(fs.size()))];
        auto a = try_term(ctx, eff, sig->instrs[f].dom, size - 1);
        if (!a) return std::nullopt;
        return t_op(f, *a);
      }
      case 1: {  // let1
        TyPtr a_ty = gen_ty(1);
        auto a = try_term(ctx, eff, a_ty, size / 2);
        if (!a) return std::nullopt;
        auto b = try_term(ctx.push(a_ty), eff, ty, size / 2);
        if (!b) return std::nullopt;
        return t_let1(*a, *b);
      }
      case 2: {  // let2
        TyPtr a_ty = gen_ty(1), b_ty = gen_ty(1);
        auto e = try_term(ctx, eff, ty_prod(a_ty, b_ty), size / 2);
        if (!e) return std::nullopt;
        auto c = try_term(ctx.push(a_ty).push(b_ty), eff, ty, size / 2);
        if (!c) return std::nullopt;
        return t_let2(*e, *c);
      }
      case 3: {  // case
        TyPtr a_ty = gen_ty(1), b_ty = gen_ty(1);
        auto e = try_term(ctx, eff, ty_sum(a_ty, b_ty), size / 2);
        if (!e) return std::nullopt;
        auto l = try_term(ctx.push(a_ty), eff, ty, size / 2);
        if (!l) return std::nullopt;
        auto r = try_term(ctx.push(b_ty), eff, ty, size / 2);
        if (!r) return std::nullopt;
        return t_case(*e, *l, *r);
      }
      case 4:
        if (ty->kind == Ty::Kind::Prod) {
          auto a = try_term(ctx, eff, ty->a, size / 2);
          auto b = try_term(ctx, eff, ty->b, size / 2);
          if (!a || !b) return std::nullopt;
          return t_pair(*a, *b);
        }
        return try_term(ctx, eff, ty, 0);
      case 5:
        if (ty->kind == Ty::Kind::Sum) {
          if (coin(50)) {
            auto a = try_term(ctx, eff, ty->a, size - 1);
            if (a) return t_inl(*a, ty);
          }
          auto b = try_term(ctx, eff, ty->b, size - 1);
          if (b) return t_inr(*b, ty);
          auto a = try_term(ctx, eff, ty->a, size - 1);
          if (a) return t_inl(*a, ty);
          return std::nullopt;
        }
        return try_term(ctx, eff, ty, 0);
      case 6: {  // abort, when an empty hypothesis is around
        for (int i = 0; i < ctx.size(); ++i)
          if (ctx.lookup(i).ty->kind == Ty::Kind::Empty &&
              sig->effects.leq(ctx.lookup(i).eff, eff))
            return t_abort(t_var(i), ty);
        return try_term(ctx, eff, ty, 0);
      }
      default: return try_term(ctx, eff, ty, 0);
    }
  }

  RegionPtr gen_region(const Ctx& ctx, const LabelCtx& lctx, int size, int where_depth,
                       int max_lets = 10) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto r = try_region(ctx, lctx, size, where_depth, max_lets);
      if (r) return *r;
    }
    throw std::runtime_error("gen_region: cannot build a region");
  }

  std::optional<RegionPtr> try_region(const Ctx& ctx, const LabelCtx& lctx, int size,
                                      int where_depth, int max_lets) {
    Effect top = sig->effects.top();
    if (lctx.size() == 0) return std::nullopt;
    if (size <= 0 || coin(20)) {  // br
      int l = pick(lctx.size());
      auto a = try_term(ctx, sig->effects.bot(), lctx.lookup(l), 2);
      if (!a) {
        auto s = synth(ctx, lctx.lookup(l));
        if (!s) return std::nullopt;
        return r_br(l, *s);
      }
      return r_br(l, *a);
    }
    switch (pick(5)) {
      case 0: {
        if (max_lets <= 0) return try_region(ctx, lctx, 0, where_depth, max_lets);
        TyPtr a_ty = gen_ty(1);
        auto a = try_term(ctx, top, a_ty, 3);
        if (!a) return std::nullopt;
        auto body = try_region(ctx.push(a_ty), lctx, size - 1, where_depth, max_lets - 1);
        if (!body) return std::nullopt;
        return r_let1(*a, *body);
      }
      case 1: {
        if (max_lets <= 0) return try_region(ctx, lctx, 0, where_depth, max_lets);
        TyPtr a_ty = gen_ty(1), b_ty = gen_ty(1);
        auto e = try_term(ctx, top, ty_prod(a_ty, b_ty), 3);
        if (!e) return std::nullopt;
        auto body =
            try_region(ctx.push(a_ty).push(b_ty), lctx, size - 1, where_depth, max_lets - 1);
        if (!body) return std::nullopt;
        return r_let2(*e, *body);
      }
      case 2: {
        TyPtr a_ty = gen_ty(1), b_ty = gen_ty(1);
        auto e = try_term(ctx, top, ty_sum(a_ty, b_ty), 3);
        if (!e) return std::nullopt;
        auto l = try_region(ctx.push(a_ty), lctx, size / 2, where_depth, max_lets);
        if (!l) return std::nullopt;
        auto r = try_region(ctx.push(b_ty), lctx, size / 2, where_depth, max_lets);
        if (!r) return std::nullopt;
        return r_case(*e, *l, *r);
      }
      case 3: {
        if (where_depth <= 0) return try_region(ctx, lctx, size, 0, max_lets);
        int n = 1 + pick(2);
        std::vector<TyPtr> params;
        for (int i = 0; i < n; ++i) params.push_back(gen_ty(1));
        LabelCtx ext = lctx.push_blocks(params);
        auto head = try_region(ctx, ext, size / 2, where_depth - 1, max_lets);
        if (!head) return std::nullopt;
        std::vector<RegionPtr> blocks;
        for (int i = 0; i < n; ++i) {
          auto b = try_region(ctx.push(params[i]), ext, size / (n + 1), where_depth - 1,
                              max_lets);
          if (!b) return std::nullopt;
          blocks.push_back(*b);
        }
        return r_where(*head, params, blocks);
      }
      default: return try_region(ctx, lctx, 0, where_depth, max_lets);
    }
  }

  Subst gen_subst(const Ctx& src, const Ctx& tgt, int size = 3) {
    Subst g;
    for (int i = 0; i < tgt.size(); ++i) {
      const Hyp& h = tgt.lookup(i);
      g.push_back(gen_term(src, h.eff, h.ty, size));
    }
    return g;
  }
};

// One generated rewrite-rule application site: a well-typed subject at a
// judgment, with the instance addressing the embedded redex.
struct FuzzedCase {
  bool on_term = true;
  Ctx ctx;
  Effect eff = 0;
  TyPtr ty;        // term judgments
  LabelCtx lctx;   // region judgments
  TermPtr term;
  RegionPtr region;
  RuleInstance inst;
};

inline bool build_region_case(Gen& g, const Signature& sig, FuzzedCase& fc, RuleId rule);

namespace fuzz_detail {

inline bool has_payload(const RuleInstance& inst) {
  return inst.term1 || inst.term2 || inst.reg1 || !inst.sigma.empty() ||
         !inst.tbodies.empty();
}

// Wraps a term subject in 0..2 enclosing frames, updating the path. Frames
// that would shift the redex are skipped when the instance carries payload
// terms expressed in the redex's context.
inline void embed_term(Gen& g, FuzzedCase& fc) {
  bool payload = has_payload(fc.inst);
  int wraps = g.pick(3);
  for (int i = 0; i < wraps; ++i) {
    switch (g.pick(3)) {
      case 0: {  // let with the subject as bound term
        TyPtr ty2 = g.gen_ty(1);
        auto body = g.try_term(fc.ctx.push(fc.ty), fc.eff, ty2, 3);
        if (!body) continue;
        fc.term = t_let1(fc.term, *body);
        fc.ty = ty2;
        fc.inst.path.insert(fc.inst.path.begin(), 0);
        break;
      }
      case 1: {  // let with the subject under a binder
        if (payload) continue;
        TyPtr a_ty = g.gen_ty(1);
        auto a = g.try_term(fc.ctx, fc.eff, a_ty, 3);
        if (!a) continue;
        fc.term = t_let1(*a, shift_term(fc.term, 1, 0));
        fc.inst.path.insert(fc.inst.path.begin(), 1);
        break;
      }
      default: {  // pair
        TyPtr b_ty = g.gen_ty(1);
        auto b = g.try_term(fc.ctx, fc.eff, b_ty, 3);
        if (!b) continue;
        fc.term = t_pair(fc.term, *b);
        fc.ty = ty_prod(fc.ty, b_ty);
        fc.inst.path.insert(fc.inst.path.begin(), 0);
        break;
      }
    }
  }
  // occasionally sink the whole term judgment into a region
  if (g.coin(25)) {
    LabelCtx l = g.gen_lctx(1, 2);
    auto arg = g.synth(fc.ctx.push(fc.ty), l.lookup(0));
    if (arg) {
      fc.on_term = false;
      fc.lctx = l;
      fc.region = r_let1(fc.term, r_br(0, *arg));
      fc.inst.path.insert(fc.inst.path.begin(), 0);
    }
  }
}

inline void embed_region(Gen& g, FuzzedCase& fc) {
  if (has_payload(fc.inst)) return;  // payloads are relative to the root judgment
  int wraps = g.pick(3);
  for (int i = 0; i < wraps; ++i) {
    switch (g.pick(3)) {
      case 0: {  // let above the region
        TyPtr a_ty = g.gen_ty(1);
        auto a = g.try_term(fc.ctx, g.sig->effects.top(), a_ty, 3);
        if (!a) continue;
        fc.region = r_let1(*a, shift_region_vars(fc.region, 1, 0));
        fc.inst.path.insert(fc.inst.path.begin(), 1);
        break;
      }
      case 1: {  // case with the subject as one arm
        TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
        auto e = g.try_term(fc.ctx, g.sig->effects.top(), ty_sum(a_ty, b_ty), 3);
        if (!e) continue;
        auto other = g.try_region(fc.ctx.push(b_ty), fc.lctx, 2, 1, 3);
        if (!other) continue;
        fc.region = r_case(*e, shift_region_vars(fc.region, 1, 0), *other);
        fc.inst.path.insert(fc.inst.path.begin(), 1);
        break;
      }
      default: {  // a where wrapper with a forwarding block
        int j = g.pick(fc.lctx.size());
        TyPtr pty = fc.lctx.lookup(j);
        fc.region = r_where(shift_region_labels(fc.region, 1, 0), {pty},
                            {r_br(1 + j, t_var(0))});
        fc.inst.path.insert(fc.inst.path.begin(), 0);
        break;
      }
    }
  }
}

}  // namespace fuzz_detail

// Generates n well-typed subjects where `rule` applies, by instantiating the
// rule's left side with random fillers and embedding it at a random position.
inline std::vector<FuzzedCase> fuzz_rule_instances(const Signature& sig, RuleId rule,
                                                   std::uint64_t seed, int n) {
  Gen g(sig, seed);
  Effect top = sig.effects.top();
  Effect bot = sig.effects.bot();
  std::vector<FuzzedCase> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < n && guard++ < n * 200) {
    try {
      FuzzedCase fc;
      fc.inst.rule = rule;
      fc.eff = top;
      bool needs_empty = rule == RuleId::Let1Abort || rule == RuleId::Let1AbortR ||
                         rule == RuleId::Initial || rule == RuleId::InitialExpr ||
                         rule == RuleId::InitialR;
      fc.ctx = g.gen_ctx(2, needs_empty);
      switch (rule) {
        // ---- term rules ----
        case RuleId::Let1Beta: {
          TyPtr a_ty = g.gen_ty(1);
          TermPtr a = g.gen_term(fc.ctx, bot, a_ty, 3);
          fc.ty = g.gen_ty(1);
          TermPtr b = g.gen_term(fc.ctx.push(a_ty), top, fc.ty, 4);
          fc.term = t_let1(a, b);
          fc.inst.term1 = fc.term;
          break;
        }
        case RuleId::Let1Eta: {
          fc.ty = g.gen_ty(1);
          fc.term = t_let1(g.gen_term(fc.ctx, top, fc.ty, 4), t_var(0));
          break;
        }
        case RuleId::Let1Op: {
          int f = g.pick(static_cast<int>(sig.instrs.size()));
          TermPtr a = g.gen_term(fc.ctx, top, sig.instrs[f].dom, 3);
          fc.ty = g.gen_ty(1);
          TermPtr c = g.gen_term(fc.ctx.push(sig.instrs[f].cod), top, fc.ty, 3);
          fc.term = t_let1(t_op(f, a), c);
          break;
        }
        case RuleId::Let1Let1: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
          TermPtr a = g.gen_term(fc.ctx, top, a_ty, 3);
          TermPtr b = g.gen_term(fc.ctx.push(a_ty), top, b_ty, 3);
          fc.ty = g.gen_ty(1);
          TermPtr c = g.gen_term(fc.ctx.push(b_ty), top, fc.ty, 3);
          fc.term = t_let1(t_let1(a, b), c);
          break;
        }
        case RuleId::Let1Let2: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1), c_ty = g.gen_ty(1);
          TermPtr e = g.gen_term(fc.ctx, top, ty_prod(a_ty, b_ty), 3);
          TermPtr c = g.gen_term(fc.ctx.push(a_ty).push(b_ty), top, c_ty, 3);
          fc.ty = g.gen_ty(1);
          TermPtr d = g.gen_term(fc.ctx.push(c_ty), top, fc.ty, 3);
          fc.term = t_let1(t_let2(e, c), d);
          break;
        }
        case RuleId::Let1Abort: {
          TyPtr a_ty = g.gen_ty(1);
          TermPtr a;
          {
            auto s = g.synth(fc.ctx, ty_empty());
            if (!s) continue;
            a = *s;
          }
          fc.ty = g.gen_ty(1);
          TermPtr b = g.gen_term(fc.ctx.push(a_ty), top, fc.ty, 3);
          fc.term = t_let1(t_abort(a, a_ty), b);
          break;
        }
        case RuleId::Let1Case: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1), c_ty = g.gen_ty(1);
          TermPtr e = g.gen_term(fc.ctx, top, ty_sum(a_ty, b_ty), 3);
          TermPtr a1 = g.gen_term(fc.ctx.push(a_ty), top, c_ty, 3);
          TermPtr a2 = g.gen_term(fc.ctx.push(b_ty), top, c_ty, 3);
          fc.ty = g.gen_ty(1);
          TermPtr d = g.gen_term(fc.ctx.push(c_ty), top, fc.ty, 3);
          fc.term = t_let1(t_case(e, a1, a2), d);
          break;
        }
        case RuleId::Let2Pair: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
          TermPtr a = g.gen_term(fc.ctx, top, a_ty, 3);
          TermPtr b = g.gen_term(fc.ctx, top, b_ty, 3);
          fc.ty = g.gen_ty(1);
          TermPtr c = g.gen_term(fc.ctx.push(a_ty).push(b_ty), top, fc.ty, 3);
          fc.term = t_let2(t_pair(a, b), c);
          break;
        }
        case RuleId::Let2Eta: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
          fc.ty = ty_prod(a_ty, b_ty);
          fc.term = t_let2(g.gen_term(fc.ctx, top, fc.ty, 4), t_pair(t_var(1), t_var(0)));
          break;
        }
        case RuleId::Let2Bind: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
          TermPtr e = g.gen_term(fc.ctx, top, ty_prod(a_ty, b_ty), 3);
          fc.ty = g.gen_ty(1);
          TermPtr c = g.gen_term(fc.ctx.push(a_ty).push(b_ty), top, fc.ty, 3);
          fc.term = t_let2(e, c);
          break;
        }
        case RuleId::CaseInl:
        case RuleId::CaseInr: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
          TyPtr sum = ty_sum(a_ty, b_ty);
          fc.ty = g.gen_ty(1);
          TermPtr c = g.gen_term(fc.ctx.push(a_ty), top, fc.ty, 3);
          TermPtr d = g.gen_term(fc.ctx.push(b_ty), top, fc.ty, 3);
          TermPtr inj = rule == RuleId::CaseInl
                            ? t_inl(g.gen_term(fc.ctx, top, a_ty, 3), sum)
                            : t_inr(g.gen_term(fc.ctx, top, b_ty, 3), sum);
          fc.term = t_case(inj, c, d);
          fc.inst.term1 = fc.term;
          break;
        }
        case RuleId::CaseEta: {
          TyPtr sum = ty_sum(g.gen_ty(1), g.gen_ty(1));
          fc.ty = sum;
          TermPtr e = g.gen_term(fc.ctx, top, sum, 4);
          fc.term = t_case(e, t_inl(t_var(0), sum), t_inr(t_var(0), sum));
          break;
        }
        case RuleId::CaseBind: {
          TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
          TermPtr e = g.gen_term(fc.ctx, top, ty_sum(a_ty, b_ty), 3);
          fc.ty = g.gen_ty(1);
          fc.term = t_case(e, g.gen_term(fc.ctx.push(a_ty), top, fc.ty, 3),
                           g.gen_term(fc.ctx.push(b_ty), top, fc.ty, 3));
          break;
        }
        case RuleId::Initial: {
          fc.ty = g.gen_ty(1);
          fc.term = g.gen_term(fc.ctx, top, fc.ty, 3);
          fc.inst.term1 = g.gen_term(fc.ctx, top, fc.ty, 3);
          break;
        }
        case RuleId::Terminal: {
          fc.ty = ty_unit();
          fc.term = g.gen_term(fc.ctx, bot, ty_unit(), 3);
          fc.inst.term1 = g.gen_term(fc.ctx, bot, ty_unit(), 3);
          break;
        }
        case RuleId::InitialExpr: {
          fc.ty = g.gen_ty(1);
          fc.term = g.gen_term(fc.ctx, top, fc.ty, 3);
          fc.inst.term1 = g.gen_term(fc.ctx, top, fc.ty, 3);
          auto w = g.synth(fc.ctx, ty_empty());
          if (!w) continue;
          fc.inst.term2 = *w;
          break;
        }
        // ---- region rules ----
        default: {
          fc.on_term = false;
          fc.lctx = g.gen_lctx(1, 2);
          if (!build_region_case(g, sig, fc, rule)) continue;
          break;
        }
      }
      if (fc.on_term) {
        if (!check_term(sig, fc.ctx, fc.eff, fc.term, fc.ty)) continue;
        fuzz_detail::embed_term(g, fc);
        if (fc.on_term) {
          if (!check_term(sig, fc.ctx, fc.eff, fc.term, fc.ty)) continue;
        } else if (!check_region(sig, fc.ctx, fc.region, fc.lctx)) {
          continue;
        }
      } else {
        if (!check_region(sig, fc.ctx, fc.region, fc.lctx)) continue;
        fuzz_detail::embed_region(g, fc);
        if (!check_region(sig, fc.ctx, fc.region, fc.lctx)) continue;
      }
      out.push_back(std::move(fc));
    } catch (const std::exception&) {
      continue;
    }
  }
  if (static_cast<int>(out.size()) < n)
    throw std::runtime_error(std::string("fuzz_rule_instances: generation starved for ") +
                             rule_info(rule).name);
  return out;
}

// The inverse instance for a round trip: flips the direction and, for the
// target-style rules (which rewrite to a supplied term), points the payload
// back at the original redex.
// The redex a fuzzed instance addresses, when it is a term.
inline TermPtr subject_term_at(const FuzzedCase& fc) {
  size_t i = 0;
  TermPtr t;
  if (!fc.on_term) {
    RegionPtr r = fc.region;
    while (true) {
      int s = fc.inst.path[i++];
      if (r->kind == Region::Kind::Where) {
        r = s == 0 ? r->a : r->blocks[s - 1];
        continue;
      }
      if (s == 0) {
        t = r->term;
        break;
      }
      r = r->kind == Region::Kind::Case && s == 2 ? r->b : r->a;
    }
  } else {
    t = fc.term;
  }
  for (; i < fc.inst.path.size(); ++i) {
    int s = fc.inst.path[i];
    t = s == 0 ? t->a : (s == 1 ? t->b : t->c);
  }
  return t;
}

inline RuleInstance reverse_instance(const FuzzedCase& fc) {
  RuleInstance rev = fc.inst;
  rev.backward = !rev.backward;
  switch (fc.inst.rule) {
    case RuleId::Initial:
    case RuleId::Terminal:
    case RuleId::InitialExpr:
      // symmetric rules: the round trip re-targets the original redex
      rev.term1 = subject_term_at(fc);
      rev.backward = fc.inst.backward;
      break;
    case RuleId::InitialR:
      rev.reg1 = fc.region;  // payload rules sit at the root
      rev.backward = fc.inst.backward;
      break;
    default: break;
  }
  return rev;
}

// Builders for region-rule left sides; returns false to retry.
inline bool build_region_case(Gen& g, const Signature& sig, FuzzedCase& fc, RuleId rule) {
  Effect top = sig.effects.top();
  Effect bot = sig.effects.bot();
  switch (rule) {
    case RuleId::Let1BetaR: {
      TyPtr a_ty = g.gen_ty(1);
      TermPtr a = g.gen_term(fc.ctx, bot, a_ty, 3);
      fc.region = r_let1(a, g.gen_region(fc.ctx.push(a_ty), fc.lctx, 4, 1));
      fc.inst.reg1 = fc.region;
      return true;
    }
    case RuleId::Let1OpR: {
      int f = g.pick(static_cast<int>(sig.instrs.size()));
      TermPtr a = g.gen_term(fc.ctx, top, sig.instrs[f].dom, 3);
      fc.region =
          r_let1(t_op(f, a), g.gen_region(fc.ctx.push(sig.instrs[f].cod), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::Let1Let1R: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
      TermPtr a = g.gen_term(fc.ctx, top, a_ty, 3);
      TermPtr b = g.gen_term(fc.ctx.push(a_ty), top, b_ty, 3);
      fc.region = r_let1(t_let1(a, b), g.gen_region(fc.ctx.push(b_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::Let1Let2R: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1), c_ty = g.gen_ty(1);
      TermPtr e = g.gen_term(fc.ctx, top, ty_prod(a_ty, b_ty), 3);
      TermPtr c = g.gen_term(fc.ctx.push(a_ty).push(b_ty), top, c_ty, 3);
      fc.region = r_let1(t_let2(e, c), g.gen_region(fc.ctx.push(c_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::Let1CaseR: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1), c_ty = g.gen_ty(1);
      TermPtr e = g.gen_term(fc.ctx, top, ty_sum(a_ty, b_ty), 3);
      TermPtr a1 = g.gen_term(fc.ctx.push(a_ty), top, c_ty, 3);
      TermPtr a2 = g.gen_term(fc.ctx.push(b_ty), top, c_ty, 3);
      fc.region =
          r_let1(t_case(e, a1, a2), g.gen_region(fc.ctx.push(c_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::Let1AbortR: {
      auto w = g.synth(fc.ctx, ty_empty());
      if (!w) return false;
      TyPtr a_ty = g.gen_ty(1);
      fc.region = r_let1(t_abort(*w, a_ty), g.gen_region(fc.ctx.push(a_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::Let2PairR: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
      TermPtr a = g.gen_term(fc.ctx, top, a_ty, 3);
      TermPtr b = g.gen_term(fc.ctx, top, b_ty, 3);
      fc.region =
          r_let2(t_pair(a, b), g.gen_region(fc.ctx.push(a_ty).push(b_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::Let2BindR: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
      TermPtr e = g.gen_term(fc.ctx, top, ty_prod(a_ty, b_ty), 3);
      fc.region = r_let2(e, g.gen_region(fc.ctx.push(a_ty).push(b_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::CaseInlR:
    case RuleId::CaseInrR: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
      TyPtr sum = ty_sum(a_ty, b_ty);
      RegionPtr rl = g.gen_region(fc.ctx.push(a_ty), fc.lctx, 3, 1);
      RegionPtr rr = g.gen_region(fc.ctx.push(b_ty), fc.lctx, 3, 1);
      TermPtr inj = rule == RuleId::CaseInlR
                        ? t_inl(g.gen_term(fc.ctx, top, a_ty, 3), sum)
                        : t_inr(g.gen_term(fc.ctx, top, b_ty, 3), sum);
      fc.region = r_case(inj, rl, rr);
      fc.inst.reg1 = fc.region;
      return true;
    }
    case RuleId::CaseBindR: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
      TermPtr e = g.gen_term(fc.ctx, top, ty_sum(a_ty, b_ty), 3);
      fc.region = r_case(e, g.gen_region(fc.ctx.push(a_ty), fc.lctx, 3, 1),
                         g.gen_region(fc.ctx.push(b_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::CfgBeta1: {
      int n = 1 + g.pick(2);
      std::vector<TyPtr> params;
      for (int i = 0; i < n; ++i) params.push_back(g.gen_ty(1));
      LabelCtx ext = fc.lctx.push_blocks(params);
      int k = g.pick(n);
      TermPtr a = g.gen_term(fc.ctx, bot, params[k], 3);
      std::vector<RegionPtr> blocks;
      for (int i = 0; i < n; ++i)
        blocks.push_back(g.gen_region(fc.ctx.push(params[i]), ext, 3, 1));
      fc.region = r_where(r_br(k, a), params, blocks);
      fc.inst.k = k;
      return true;
    }
    case RuleId::CfgBeta2: {
      int n = 1 + g.pick(2);
      std::vector<TyPtr> params;
      for (int i = 0; i < n; ++i) params.push_back(g.gen_ty(1));
      LabelCtx ext = fc.lctx.push_blocks(params);
      int j = g.pick(fc.lctx.size());
      TermPtr b = g.gen_term(fc.ctx, bot, fc.lctx.lookup(j), 3);
      std::vector<RegionPtr> blocks;
      for (int i = 0; i < n; ++i)
        blocks.push_back(g.gen_region(fc.ctx.push(params[i]), ext, 3, 1));
      fc.region = r_where(r_br(n + j, b), params, blocks);
      fc.inst.reg1 = fc.region;
      return true;
    }
    case RuleId::CfgEta: {
      int n = 1 + g.pick(2);
      std::vector<TyPtr> params;
      for (int i = 0; i < n; ++i) params.push_back(g.gen_ty(1));
      LabelCtx ext = fc.lctx.push_blocks(params);
      std::vector<RegionPtr> blocks;
      for (int i = 0; i < n; ++i)
        blocks.push_back(g.gen_region(fc.ctx.push(params[i]), ext, 3, 1));
      fc.region = r_where(g.gen_region(fc.ctx, ext, 3, 1), params, blocks);
      fc.inst.reg1 = fc.region;
      return true;
    }
    case RuleId::Codiag: {
      TyPtr a_ty = g.gen_ty(1);
      LabelCtx two = fc.lctx.push(a_ty).push(a_ty);  // ell then kappa innermost
      RegionPtr s = g.gen_region(fc.ctx.push(a_ty), two, 3, 1);
      RegionPtr head = g.gen_region(fc.ctx, fc.lctx.push(a_ty), 3, 1);
      RegionPtr inner = r_where(r_br(0, t_var(0)), {a_ty}, {shift_region_vars(s, 1, 1)});
      fc.region = r_where(head, {a_ty}, {inner});
      fc.inst.reg1 = fc.region;
      return true;
    }
    case RuleId::Uni: {
      // identity-mediator family: e = x, s = t up to the label renaming
      TyPtr a_ty = g.gen_ty(1);
      RegionPtr t = g.gen_region(fc.ctx.push(a_ty), fc.lctx.push(a_ty), 3, 1);
      RegionPtr r = g.gen_region(fc.ctx, fc.lctx.push(a_ty), 3, 1);
      fc.inst.reg1 = r;
      fc.inst.term1 = t_var(0);
      fc.inst.sigma = {t};
      fc.inst.tbodies = {t};
      fc.inst.tys1 = {a_ty};
      fc.inst.tys2 = {a_ty};
      fc.inst.verify_premise = false;
      fc.region = uni_lhs(r, t_var(0), t, a_ty, a_ty);
      return true;
    }
    case RuleId::Dinat: {
      int n = 1 + g.pick(2);
      int m = 1 + g.pick(2);
      std::vector<TyPtr> a_tys, b_tys;
      for (int i = 0; i < n; ++i) a_tys.push_back(g.gen_ty(1));
      for (int j = 0; j < m; ++j) b_tys.push_back(g.gen_ty(1));
      LabelCtx ell = fc.lctx;
      for (int i = n - 1; i >= 0; --i) ell = ell.push(a_tys[i]);
      LabelCtx kap;
      for (int j = m - 1; j >= 0; --j) kap = kap.push(b_tys[j]);
      RegionPtr r = g.gen_region(fc.ctx, ell, 3, 1);
      std::vector<RegionPtr> sigma, ts;
      for (int i = 0; i < n; ++i)
        sigma.push_back(g.gen_region(fc.ctx.push(a_tys[i]), kap, 2, 0));
      for (int j = 0; j < m; ++j)
        ts.push_back(g.gen_region(fc.ctx.push(b_tys[j]), ell, 3, 1));
      fc.inst.reg1 = r;
      fc.inst.sigma = sigma;
      fc.inst.tbodies = ts;
      fc.inst.tys1 = a_tys;
      fc.inst.tys2 = b_tys;
      fc.region = dinat_lhs(r, sigma, ts, b_tys, fc.lctx.size());
      return true;
    }
    case RuleId::InitialR: {
      fc.region = g.gen_region(fc.ctx, fc.lctx, 3, 1);
      fc.inst.reg1 = g.gen_region(fc.ctx, fc.lctx, 3, 1);
      return true;
    }
    case RuleId::Case2Cfg: {
      TyPtr a_ty = g.gen_ty(1), b_ty = g.gen_ty(1);
      TermPtr e = g.gen_term(fc.ctx, top, ty_sum(a_ty, b_ty), 3);
      fc.region = r_case(e, g.gen_region(fc.ctx.push(a_ty), fc.lctx, 3, 1),
                         g.gen_region(fc.ctx.push(b_ty), fc.lctx, 3, 1));
      return true;
    }
    case RuleId::CfgFuse1: {
      int n_in = 1 + g.pick(2), n_out = 1 + g.pick(2);
      std::vector<TyPtr> pin, pout;
      for (int i = 0; i < n_in; ++i) pin.push_back(g.gen_ty(1));
      for (int j = 0; j < n_out; ++j) pout.push_back(g.gen_ty(1));
      LabelCtx lout = fc.lctx.push_blocks(pout);
      LabelCtx lin = lout.push_blocks(pin);
      std::vector<RegionPtr> bin, bout;
      for (int i = 0; i < n_in; ++i) bin.push_back(g.gen_region(fc.ctx.push(pin[i]), lin, 3, 0));
      for (int j = 0; j < n_out; ++j)
        bout.push_back(g.gen_region(fc.ctx.push(pout[j]), lout, 3, 0));
      RegionPtr r = g.gen_region(fc.ctx, lin, 3, 0);
      fc.region = r_where(r_where(r, pin, bin), pout, bout);
      fc.inst.k = n_in;
      return true;
    }
    case RuleId::CfgFuse2: {
      int n = 1 + g.pick(2), m = 1 + g.pick(2);
      std::vector<TyPtr> pout, pin;
      for (int i = 0; i < n; ++i) pout.push_back(g.gen_ty(1));
      for (int i = 0; i < m; ++i) pin.push_back(g.gen_ty(1));
      int k = g.pick(n);
      LabelCtx lout = fc.lctx.push_blocks(pout);
      LabelCtx lin = lout.push_blocks(pin);
      RegionPtr head = g.gen_region(fc.ctx, lout, 3, 0);
      std::vector<RegionPtr> bout;
      for (int i = 0; i < n; ++i) {
        if (i == k) {
          RegionPtr s = g.gen_region(fc.ctx.push(pout[k]), lin, 3, 0);
          std::vector<RegionPtr> bin;
          for (int j = 0; j < m; ++j) {
            RegionPtr body = g.gen_region(fc.ctx.push(pin[j]), lin, 3, 0);
            // the nested blocks live under the enclosing block's parameter
            bin.push_back(shift_region_vars(body, 1, 1));
          }
          std::vector<TyPtr> pin_shift = pin;
          bout.push_back(r_where(s, pin_shift, bin));
        } else {
          bout.push_back(g.gen_region(fc.ctx.push(pout[i]), lout, 3, 0));
        }
      }
      fc.region = r_where(head, pout, bout);
      fc.inst.k = k;
      fc.inst.m = m;
      return true;
    }
    case RuleId::PermCfg: {
      int n = 2 + g.pick(2);
      std::vector<TyPtr> params;
      for (int i = 0; i < n; ++i) params.push_back(g.gen_ty(1));
      LabelCtx ext = fc.lctx.push_blocks(params);
      std::vector<RegionPtr> blocks;
      for (int i = 0; i < n; ++i)
        blocks.push_back(g.gen_region(fc.ctx.push(params[i]), ext, 3, 1));
      fc.region = r_where(g.gen_region(fc.ctx, ext, 3, 1), params, blocks);
      std::vector<int> perm;
      for (int i = 0; i < n; ++i) perm.push_back(i);
      std::shuffle(perm.begin(), perm.end(), g.rng);
      fc.inst.perm = perm;
      return true;
    }
    default: return false;
  }
}

}  // namespace lssa
