#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/syntax.hpp"
#include "lssa/typing.hpp"

namespace lssa {

// Standard SSA: a control-flow graph of basic blocks with arguments, using
// globally unique variable ids and dominance-based scoping. Terms inside
// blocks are atomic, with Var fields holding global ids instead of de Bruijn
// indices.

struct CfgTerminator;
using CfgTermPtr = std::shared_ptr<const CfgTerminator>;

struct CfgTerminator {
  bool is_case = false;
  // br
  int target = -1;
  bool target_is_exit = false;
  int arg = -1;  // global var id
  // case
  int scrut = -1;
  int bind_l = -1, bind_r = -1;
  CfgTermPtr l, r;
};

inline CfgTermPtr cfg_br(int target, bool is_exit, int arg) {
  auto t = std::make_shared<CfgTerminator>();
  auto* m = const_cast<CfgTerminator*>(t.get());
  m->target = target;
  m->target_is_exit = is_exit;
  m->arg = arg;
  return t;
}

inline CfgTermPtr cfg_case(int scrut, int bind_l, CfgTermPtr l, int bind_r, CfgTermPtr r) {
  auto t = std::make_shared<CfgTerminator>();
  auto* m = const_cast<CfgTerminator*>(t.get());
  m->is_case = true;
  m->scrut = scrut;
  m->bind_l = bind_l;
  m->bind_r = bind_r;
  m->l = std::move(l);
  m->r = std::move(r);
  return t;
}

struct CfgBind {
  bool binary = false;
  int def1 = -1, def2 = -1;
  TermPtr rhs;  // atomic, over global ids
};

struct CfgBlock {
  int id = -1;
  bool has_param = false;
  int param = -1;
  TyPtr param_ty;
  std::vector<CfgBind> binds;
  CfgTermPtr term;
};

struct Cfg {
  std::vector<Hyp> ambient;  // global id i = ambient[i] for i < ambient.size()
  LabelCtx exits;
  std::vector<CfgBlock> blocks;  // blocks[0] is the entry
  int next_id = 0;
};

struct CfgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfg_detail {

inline TermPtr map_vars(const TermPtr& t, const std::function<int(int)>& f, int depth = 0) {
  switch (t->kind) {
    case Term::Kind::Var: return t->var >= depth ? t_var(f(t->var - depth) + depth) : t;
    case Term::Kind::Unit: return t;
    case Term::Kind::Op: return t_op(t->op, map_vars(t->a, f, depth));
    case Term::Kind::Let1: return t_let1(map_vars(t->a, f, depth), map_vars(t->b, f, depth + 1));
    case Term::Kind::Pair: return t_pair(map_vars(t->a, f, depth), map_vars(t->b, f, depth));
    case Term::Kind::Let2: return t_let2(map_vars(t->a, f, depth), map_vars(t->b, f, depth + 2));
    case Term::Kind::Inl: return t_inl(map_vars(t->a, f, depth), t->ann);
    case Term::Kind::Inr: return t_inr(map_vars(t->a, f, depth), t->ann);
    case Term::Kind::Abort: return t_abort(map_vars(t->a, f, depth), t->ann);
    case Term::Kind::Case:
      return t_case(map_vars(t->a, f, depth), map_vars(t->b, f, depth + 1),
                    map_vars(t->c, f, depth + 1));
  }
  return t;
}

struct LabelRef {
  bool is_exit;
  int idx;  // exit index (de Bruijn in Cfg::exits) or block id
};

// label environment with LabelCtx indexing (push at back, index 0 = last)
struct LabelEnv {
  std::vector<LabelRef> entries;
  const LabelRef& lookup(int i) const { return entries[entries.size() - 1 - i]; }
};

struct ToCfg {
  const Signature& sig;
  Cfg out;

  int fresh() { return out.next_id++; }

  int global_of(const std::vector<int>& var_env, int db) const {
    return var_env[var_env.size() - 1 - db];
  }

  TermPtr atom(const TermPtr& t, const std::vector<int>& var_env) const {
    return map_vars(t, [&](int db) { return global_of(var_env, db); });
  }

  CfgTermPtr terminator(const RegionPtr& r, std::vector<int> var_env, const LabelEnv& lenv) {
    if (r->kind == Region::Kind::Br) {
      const LabelRef& ref = lenv.lookup(r->label);
      return cfg_br(ref.idx, ref.is_exit, global_of(var_env, r->term->var));
    }
    if (r->kind == Region::Kind::Case) {
      int s = global_of(var_env, r->term->var);
      int bl = fresh(), br_ = fresh();
      auto venv_l = var_env;
      venv_l.push_back(bl);
      auto venv_r = var_env;
      venv_r.push_back(br_);
      return cfg_case(s, bl, terminator(r->a, venv_l, lenv), br_,
                      terminator(r->b, venv_r, lenv));
    }
    throw CfgError("not a terminator");
  }

  // Converts a strict region into block `slot` of the output, allocating the
  // dominated children as later blocks.
  void block(const RegionPtr& region, std::vector<int> var_env, LabelEnv lenv, int slot) {
    RegionPtr r = region;
    std::vector<CfgBind> binds;
    while (r->kind == Region::Kind::Let1 || r->kind == Region::Kind::Let2) {
      CfgBind b;
      b.rhs = atom(r->term, var_env);
      if (r->kind == Region::Kind::Let1) {
        b.def1 = fresh();
        var_env.push_back(b.def1);
      } else {
        b.binary = true;
        b.def1 = fresh();
        b.def2 = fresh();
        var_env.push_back(b.def1);
        var_env.push_back(b.def2);
      }
      binds.push_back(std::move(b));
      r = r->a;
    }
    if (r->kind != Region::Kind::Where) throw CfgError("region is not strict");
    int n = static_cast<int>(r->blocks.size());
    std::vector<int> child_slots;
    for (int i = 0; i < n; ++i) {
      CfgBlock cb;
      cb.id = static_cast<int>(out.blocks.size());
      cb.has_param = true;
      cb.param = fresh();
      cb.param_ty = r->params[i];
      child_slots.push_back(cb.id);
      out.blocks.push_back(std::move(cb));
    }
    // local label i is child i; entries are pushed outermost-last-first
    for (int i = n - 1; i >= 0; --i)
      lenv.entries.push_back(LabelRef{false, child_slots[i]});
    out.blocks[slot].binds = std::move(binds);
    out.blocks[slot].term = terminator(r->a, var_env, lenv);
    for (int i = 0; i < n; ++i) {
      auto venv = var_env;
      venv.push_back(out.blocks[child_slots[i]].param);
      block(r->blocks[i], venv, lenv, child_slots[i]);
    }
  }
};

}  // namespace cfg_detail

// Removes where-blocks from a strict region, erasing it to standard SSA.
inline Cfg to_cfg(const Signature& sig, const Ctx& ctx, const RegionPtr& r,
                  const LabelCtx& lctx) {
  if (!check_strict(sig, ctx, r, lctx)) throw CfgError("to_cfg requires a strict region");
  cfg_detail::ToCfg conv{sig, {}};
  conv.out.exits = lctx;
  std::vector<int> var_env;
  for (auto& h : ctx.entries) {
    conv.out.ambient.push_back(h);
    var_env.push_back(conv.fresh());
  }
  cfg_detail::LabelEnv lenv;
  for (int i = 0; i < lctx.size(); ++i)
    lenv.entries.push_back(cfg_detail::LabelRef{true, lctx.size() - 1 - i});
  CfgBlock entry;
  entry.id = 0;
  conv.out.blocks.push_back(std::move(entry));
  conv.block(r, var_env, lenv, 0);
  return conv.out;
}

inline std::vector<std::vector<int>> cfg_successors(const Cfg& g) {
  std::vector<std::vector<int>> succ(g.blocks.size());
  for (size_t b = 0; b < g.blocks.size(); ++b) {
    std::set<int> s;
    std::function<void(const CfgTermPtr&)> walk = [&](const CfgTermPtr& t) {
      if (!t) return;
      if (t->is_case) {
        walk(t->l);
        walk(t->r);
      } else if (!t->target_is_exit) {
        s.insert(t->target);
      }
    };
    walk(g.blocks[b].term);
    succ[b].assign(s.begin(), s.end());
  }
  return succ;
}

struct DomTree {
  std::vector<int> parent;                 // -1 for the entry
  std::vector<std::vector<int>> children;  // ordered by block index
};

// Iterative dataflow dominators (intersection to fixpoint). Rejects graphs
// with unreachable blocks.
inline DomTree dominance_tree(const Cfg& g) {
  int n = static_cast<int>(g.blocks.size());
  auto succ = cfg_successors(g);
  std::vector<std::vector<int>> pred(n);
  for (int b = 0; b < n; ++b)
    for (int s : succ[b]) pred[s].push_back(b);
  std::vector<std::set<int>> dom(n);
  std::set<int> all;
  for (int i = 0; i < n; ++i) all.insert(i);
  dom[0] = {0};
  for (int i = 1; i < n; ++i) dom[i] = all;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b = 1; b < n; ++b) {
      std::set<int> nd = all;
      if (pred[b].empty()) nd.clear();
      for (int p : pred[b]) {
        std::set<int> inter;
        for (int x : dom[p])
          if (nd.count(x)) inter.insert(x);
        nd = std::move(inter);
      }
      nd.insert(b);
      if (nd != dom[b]) {
        dom[b] = std::move(nd);
        changed = true;
      }
    }
  }
  // reachability check: unreachable blocks end with dom = {b} but no preds
  {
    std::set<int> reach;
    std::vector<int> work{0};
    reach.insert(0);
    while (!work.empty()) {
      int b = work.back();
      work.pop_back();
      for (int s : succ[b])
        if (reach.insert(s).second) work.push_back(s);
    }
    if (static_cast<int>(reach.size()) != n)
      throw CfgError("dominance_tree: CFG has unreachable blocks");
  }
  DomTree t;
  t.parent.assign(n, -1);
  t.children.assign(n, {});
  for (int b = 1; b < n; ++b) {
    int best = -1;
    for (int d : dom[b]) {
      if (d == b) continue;
      if (best == -1 || dom[d].size() > dom[best].size()) best = d;
    }
    if (best == -1) throw CfgError("dominance_tree: no immediate dominator");
    t.parent[b] = best;
  }
  for (int b = 1; b < n; ++b) t.children[t.parent[b]].push_back(b);
  return t;
}

inline bool cfg_dominates(const DomTree& t, int a, int b) {
  while (b != -1) {
    if (a == b) return true;
    b = t.parent[b];
  }
  return false;
}

namespace cfg_detail {

// Scope and type checking of a CFG: every use must be defined by a strict
// dominator (or earlier in the same block), with matching types.
struct CfgChecker {
  const Signature& sig;
  const Cfg& g;
  const DomTree& dt;
  std::map<int, Hyp> defs;  // global id -> hypothesis, on the current path

  TyPtr use(int id) {
    auto it = defs.find(id);
    if (it == defs.end()) throw CfgError("use of a variable that does not dominate it");
    return it->second.ty;
  }

  TyPtr atom_ty(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var: return use(t->var);
      case Term::Kind::Unit: return ty_unit();
      case Term::Kind::Op: {
        const Instr& f = sig.instrs.at(t->op);
        if (!ty_equal(use(t->a->var), f.dom)) throw CfgError("instruction argument type");
        return f.cod;
      }
      case Term::Kind::Pair: return ty_prod(use(t->a->var), use(t->b->var));
      case Term::Kind::Inl:
        if (!ty_equal(use(t->a->var), t->ann->a)) throw CfgError("inl argument type");
        return t->ann;
      case Term::Kind::Inr:
        if (!ty_equal(use(t->a->var), t->ann->b)) throw CfgError("inr argument type");
        return t->ann;
      case Term::Kind::Abort:
        if (use(t->a->var)->kind != Ty::Kind::Empty) throw CfgError("abort argument type");
        return t->ann;
      default: throw CfgError("block instruction is not atomic");
    }
  }

  void terminator(const CfgTermPtr& t) {
    if (!t->is_case) {
      TyPtr arg = use(t->arg);
      TyPtr want = t->target_is_exit ? g.exits.lookup(t->target)
                                     : g.blocks.at(t->target).param_ty;
      if (!ty_equal(arg, want)) throw CfgError("branch argument type mismatch");
      return;
    }
    TyPtr s = use(t->scrut);
    if (s->kind != Ty::Kind::Sum) throw CfgError("case scrutinee is not a sum");
    defs[t->bind_l] = Hyp{s->a, 0};
    terminator(t->l);
    defs.erase(t->bind_l);
    defs[t->bind_r] = Hyp{s->b, 0};
    terminator(t->r);
    defs.erase(t->bind_r);
  }

  void block(int b) {
    std::vector<int> added;
    const CfgBlock& blk = g.blocks[b];
    if (blk.has_param) {
      defs[blk.param] = Hyp{blk.param_ty, 0};
      added.push_back(blk.param);
    }
    for (auto& bind : blk.binds) {
      TyPtr ty = atom_ty(bind.rhs);
      if (bind.binary) {
        if (ty->kind != Ty::Kind::Prod) throw CfgError("binary bind of non-product");
        defs[bind.def1] = Hyp{ty->a, 0};
        defs[bind.def2] = Hyp{ty->b, 0};
        added.push_back(bind.def1);
        added.push_back(bind.def2);
      } else {
        defs[bind.def1] = Hyp{ty, 0};
        added.push_back(bind.def1);
      }
    }
    terminator(blk.term);
    for (int c : dt.children[b]) block(c);
    for (int id : added) defs.erase(id);
  }
};

struct ToReg {
  const Cfg& g;
  const DomTree& dt;
  std::map<int, int> level;  // global id -> binder level
  int depth = 0;

  int db(int id) const {
    auto it = level.find(id);
    if (it == level.end()) throw CfgError("variable out of scope during reconstruction");
    return depth - it->second - 1;
  }

  void bind(int id) {
    level[id] = depth;
    ++depth;
  }
  void unbind(int id) {
    level.erase(id);
    --depth;
  }

  TermPtr atom(const TermPtr& t) const {
    return map_vars(t, [&](int id) { return db(id); });
  }

  RegionPtr terminator(const CfgTermPtr& t, const LabelEnv& lenv) {
    if (!t->is_case) {
      int lbl = -1;
      for (int i = 0; i < static_cast<int>(lenv.entries.size()); ++i) {
        const LabelRef& ref = lenv.lookup(i);
        if (ref.is_exit == t->target_is_exit && ref.idx == t->target) {
          lbl = i;
          break;
        }
      }
      if (lbl < 0) throw CfgError("branch target not in scope during reconstruction");
      return r_br(lbl, t_var(db(t->arg)));
    }
    TermPtr scrut = t_var(db(t->scrut));
    bind(t->bind_l);
    RegionPtr l = terminator(t->l, lenv);
    unbind(t->bind_l);
    bind(t->bind_r);
    RegionPtr r = terminator(t->r, lenv);
    unbind(t->bind_r);
    return r_case(scrut, l, r);
  }

  RegionPtr block(int b, LabelEnv lenv) {
    const CfgBlock& blk = g.blocks[b];
    // children ordered as they appear in G
    const std::vector<int>& kids = dt.children[b];
    int n = static_cast<int>(kids.size());
    for (int i = n - 1; i >= 0; --i) lenv.entries.push_back(LabelRef{false, kids[i]});
    // bind lets in order, then build the where, then wrap lets in reverse
    std::vector<std::pair<CfgBind, TermPtr>> ordered;
    for (auto& bd : blk.binds) {
      TermPtr rhs = atom(bd.rhs);
      ordered.emplace_back(bd, rhs);
      if (bd.binary) {
        bind(bd.def1);
        bind(bd.def2);
      } else {
        bind(bd.def1);
      }
    }
    RegionPtr term = terminator(blk.term, lenv);
    std::vector<TyPtr> params;
    std::vector<RegionPtr> bodies;
    for (int i = 0; i < n; ++i) {
      const CfgBlock& cb = g.blocks[kids[i]];
      params.push_back(cb.param_ty);
      bind(cb.param);
      bodies.push_back(block(kids[i], lenv));
      unbind(cb.param);
    }
    RegionPtr r = r_where(term, std::move(params), std::move(bodies));
    for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
      if (it->first.binary) {
        unbind(it->first.def2);
        unbind(it->first.def1);
        r = r_let2(it->second, r);
      } else {
        unbind(it->first.def1);
        r = r_let1(it->second, r);
      }
    }
    return r;
  }
};

}  // namespace cfg_detail

// Checks CFG well-formedness: typed atoms and dominance-based scoping.
inline void check_cfg(const Signature& sig, const Cfg& g, const DomTree& dt) {
  cfg_detail::CfgChecker chk{sig, g, dt, {}};
  for (size_t i = 0; i < g.ambient.size(); ++i) chk.defs[static_cast<int>(i)] = g.ambient[i];
  chk.block(0);
}

// Reconstructs a strict region from a well-formed CFG by nesting blocks along
// the dominance tree.
inline RegionPtr from_cfg(const Signature& sig, const Cfg& g) {
  DomTree dt = dominance_tree(g);
  check_cfg(sig, g, dt);
  cfg_detail::ToReg conv{g, dt, {}, 0};
  for (size_t i = 0; i < g.ambient.size(); ++i) conv.bind(static_cast<int>(i));
  cfg_detail::LabelEnv lenv;
  for (int i = 0; i < g.exits.size(); ++i)
    lenv.entries.push_back(cfg_detail::LabelRef{true, g.exits.size() - 1 - i});
  return conv.block(0, lenv);
}

namespace cfg_detail {

// Given a candidate block bijection pi (by block-vector position), derives a
// variable-id correspondence from defs and verifies the whole graph matches.
inline bool cfg_match_under(const Cfg& a, const Cfg& b, const std::vector<int>& pi) {
  int n = static_cast<int>(a.blocks.size());
  std::map<int, int> vm;  // a id -> b id
  std::set<int> vm_img;
  auto pair_vars = [&](int x, int y) {
    auto it = vm.find(x);
    if (it != vm.end()) return it->second == y;
    if (vm_img.count(y)) return false;
    vm[x] = y;
    vm_img.insert(y);
    return true;
  };
  if (a.ambient.size() != b.ambient.size()) return false;
  for (size_t i = 0; i < a.ambient.size(); ++i) {
    if (!ty_equal(a.ambient[i].ty, b.ambient[i].ty) || a.ambient[i].eff != b.ambient[i].eff)
      return false;
    if (!pair_vars(static_cast<int>(i), static_cast<int>(i))) return false;
  }
  // pass 1: collect def correspondences from params and binds
  for (int i = 0; i < n; ++i) {
    const CfgBlock& ba = a.blocks[i];
    const CfgBlock& bb = b.blocks[pi[i]];
    if (ba.has_param != bb.has_param) return false;
    if (ba.has_param) {
      if (!ty_equal(ba.param_ty, bb.param_ty)) return false;
      if (!pair_vars(ba.param, bb.param)) return false;
    }
    if (ba.binds.size() != bb.binds.size()) return false;
    for (size_t k = 0; k < ba.binds.size(); ++k) {
      if (ba.binds[k].binary != bb.binds[k].binary) return false;
      if (!pair_vars(ba.binds[k].def1, bb.binds[k].def1)) return false;
      if (ba.binds[k].binary && !pair_vars(ba.binds[k].def2, bb.binds[k].def2)) return false;
    }
  }
  // pass 2: compare atoms and terminators under the derived maps
  std::function<bool(const TermPtr&, const TermPtr&)> atom_eq = [&](const TermPtr& x,
                                                                    const TermPtr& y) {
    if (x->kind != y->kind) return false;
    switch (x->kind) {
      case Term::Kind::Var: {
        auto it = vm.find(x->var);
        return it != vm.end() && it->second == y->var;
      }
      case Term::Kind::Unit: return true;
      case Term::Kind::Op: return x->op == y->op && atom_eq(x->a, y->a);
      case Term::Kind::Pair: return atom_eq(x->a, y->a) && atom_eq(x->b, y->b);
      case Term::Kind::Inl:
      case Term::Kind::Inr:
      case Term::Kind::Abort: return ty_equal(x->ann, y->ann) && atom_eq(x->a, y->a);
      default: return false;
    }
  };
  std::function<bool(const CfgTermPtr&, const CfgTermPtr&)> term_eq =
      [&](const CfgTermPtr& x, const CfgTermPtr& y) -> bool {
    if (x->is_case != y->is_case) return false;
    if (!x->is_case) {
      if (x->target_is_exit != y->target_is_exit) return false;
      if (x->target_is_exit) {
        if (x->target != y->target) return false;
      } else if (pi[x->target] != y->target) {
        return false;
      }
      auto it = vm.find(x->arg);
      return it != vm.end() && it->second == y->arg;
    }
    auto it = vm.find(x->scrut);
    if (it == vm.end() || it->second != y->scrut) return false;
    bool lok, rok;
    {
      bool fresh_l = pair_vars(x->bind_l, y->bind_l);
      lok = fresh_l && term_eq(x->l, y->l);
      vm_img.erase(vm[x->bind_l]);
      vm.erase(x->bind_l);
    }
    {
      bool fresh_r = pair_vars(x->bind_r, y->bind_r);
      rok = fresh_r && term_eq(x->r, y->r);
      vm_img.erase(vm[x->bind_r]);
      vm.erase(x->bind_r);
    }
    return lok && rok;
  };
  for (int i = 0; i < n; ++i) {
    const CfgBlock& ba = a.blocks[i];
    const CfgBlock& bb = b.blocks[pi[i]];
    for (size_t k = 0; k < ba.binds.size(); ++k)
      if (!atom_eq(ba.binds[k].rhs, bb.binds[k].rhs)) return false;
    if (!term_eq(ba.term, bb.term)) return false;
  }
  return true;
}

}  // namespace cfg_detail

// Whether b is a permutation of a (same entry block), up to renaming of
// variable and block ids.
inline bool cfg_permutation_of(const Cfg& a, const Cfg& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  if (a.exits.size() != b.exits.size()) return false;
  for (int i = 0; i < a.exits.size(); ++i)
    if (!ty_equal(a.exits.lookup(i), b.exits.lookup(i))) return false;
  int n = static_cast<int>(a.blocks.size());
  std::vector<int> pi(n, -1);
  std::vector<bool> used(n, false);
  pi[0] = 0;
  used[0] = true;
  std::function<bool(int)> go = [&](int i) -> bool {
    if (i == n) return cfg_detail::cfg_match_under(a, b, pi);
    for (int j = 1; j < n; ++j) {
      if (used[j]) continue;
      if (!ty_equal(a.blocks[i].param_ty, b.blocks[j].param_ty)) continue;
      if (a.blocks[i].binds.size() != b.blocks[j].binds.size()) continue;
      pi[i] = j;
      used[j] = true;
      if (go(i + 1)) return true;
      used[j] = false;
      pi[i] = -1;
    }
    return false;
  };
  return go(1);
}

}  // namespace lssa
