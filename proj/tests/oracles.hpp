#pragma once

// Independent oracles used by the tests: a named-variable transliteration of
// capture-avoiding substitution (with explicit fresh-name generation), a
// path-enumeration dominance oracle, and bounded unrolling for the powerset
// fixpoint. These stay independent of the de Bruijn implementation paths
// they check.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lssa/cfg.hpp"
#include "lssa/subst.hpp"
#include "lssa/syntax.hpp"

namespace oracle {

using namespace lssa;

struct NTerm;
using NTermPtr = std::shared_ptr<const NTerm>;

struct NTerm {
  Term::Kind kind;
  std::string var;      // Var
  int op = -1;          // Op
  TyPtr ann;
  std::string x, y;     // binder names
  NTermPtr a, b, c;
};

inline NTermPtr nt(Term::Kind k) { return std::make_shared<NTerm>(NTerm{k}); }

struct Fresh {
  int n = 0;
  std::string prefix;
  std::string next() { return prefix + std::to_string(n++); }
};

// de Bruijn -> named, with binder names drawn from `fresh`
inline NTermPtr to_named(const TermPtr& t, std::vector<std::string> env, Fresh& fresh) {
  auto out = std::make_shared<NTerm>();
  auto* m = out.get();
  m->kind = t->kind;
  m->op = t->op;
  m->ann = t->ann;
  switch (t->kind) {
    case Term::Kind::Var: m->var = env[env.size() - 1 - t->var]; break;
    case Term::Kind::Unit: break;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort: m->a = to_named(t->a, env, fresh); break;
    case Term::Kind::Pair:
      m->a = to_named(t->a, env, fresh);
      m->b = to_named(t->b, env, fresh);
      break;
    case Term::Kind::Let1: {
      m->a = to_named(t->a, env, fresh);
      m->x = fresh.next();
      auto env2 = env;
      env2.push_back(m->x);
      m->b = to_named(t->b, env2, fresh);
      break;
    }
    case Term::Kind::Let2: {
      m->a = to_named(t->a, env, fresh);
      m->x = fresh.next();
      m->y = fresh.next();
      auto env2 = env;
      env2.push_back(m->x);
      env2.push_back(m->y);
      m->b = to_named(t->b, env2, fresh);
      break;
    }
    case Term::Kind::Case: {
      m->a = to_named(t->a, env, fresh);
      m->x = fresh.next();
      auto envl = env;
      envl.push_back(m->x);
      m->b = to_named(t->b, envl, fresh);
      m->y = fresh.next();
      auto envr = env;
      envr.push_back(m->y);
      m->c = to_named(t->c, envr, fresh);
      break;
    }
  }
  return out;
}

inline void free_names(const NTermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var: out.insert(t->var); return;
    case Term::Kind::Unit: return;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort: free_names(t->a, out); return;
    case Term::Kind::Pair:
      free_names(t->a, out);
      free_names(t->b, out);
      return;
    case Term::Kind::Let1: {
      free_names(t->a, out);
      std::set<std::string> b;
      free_names(t->b, b);
      b.erase(t->x);
      out.insert(b.begin(), b.end());
      return;
    }
    case Term::Kind::Let2: {
      free_names(t->a, out);
      std::set<std::string> b;
      free_names(t->b, b);
      b.erase(t->x);
      b.erase(t->y);
      out.insert(b.begin(), b.end());
      return;
    }
    case Term::Kind::Case: {
      free_names(t->a, out);
      std::set<std::string> l, r;
      free_names(t->b, l);
      l.erase(t->x);
      free_names(t->c, r);
      r.erase(t->y);
      out.insert(l.begin(), l.end());
      out.insert(r.begin(), r.end());
      return;
    }
  }
}

// renaming of a bound variable (used for alpha-conversion when a binder
// would capture a name free in the substitution image)
inline NTermPtr rename_free(const NTermPtr& t, const std::string& from,
                            const std::string& to) {
  auto out = std::make_shared<NTerm>(*t);
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->var == from) out->var = to;
      return out;
    case Term::Kind::Unit: return out;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort:
      out->a = rename_free(t->a, from, to);
      return out;
    case Term::Kind::Pair:
      out->a = rename_free(t->a, from, to);
      out->b = rename_free(t->b, from, to);
      return out;
    case Term::Kind::Let1:
      out->a = rename_free(t->a, from, to);
      if (t->x != from) out->b = rename_free(t->b, from, to);
      return out;
    case Term::Kind::Let2:
      out->a = rename_free(t->a, from, to);
      if (t->x != from && t->y != from) out->b = rename_free(t->b, from, to);
      return out;
    case Term::Kind::Case:
      out->a = rename_free(t->a, from, to);
      if (t->x != from) out->b = rename_free(t->b, from, to);
      if (t->y != from) out->c = rename_free(t->c, from, to);
      return out;
  }
  return out;
}

// Capture-avoiding named substitution, transliterated clause by clause:
// [g]x = g(x), binders alpha-converted when they appear free in the image.
inline NTermPtr nsubst(const std::map<std::string, NTermPtr>& g, const NTermPtr& t,
                       Fresh& fresh) {
  auto image_frees = [&]() {
    std::set<std::string> s;
    for (auto& [k, v] : g) free_names(v, s);
    return s;
  };
  auto out = std::make_shared<NTerm>(*t);
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = g.find(t->var);
      return it == g.end() ? t : it->second;
    }
    case Term::Kind::Unit: return t;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort:
      out->a = nsubst(g, t->a, fresh);
      return out;
    case Term::Kind::Pair:
      out->a = nsubst(g, t->a, fresh);
      out->b = nsubst(g, t->b, fresh);
      return out;
    case Term::Kind::Let1: {
      out->a = nsubst(g, t->a, fresh);
      NTermPtr body = t->b;
      std::string x = t->x;
      auto fr = image_frees();
      if (fr.count(x)) {
        std::string nx = fresh.next();
        body = rename_free(body, x, nx);
        x = nx;
      }
      out->x = x;
      auto g2 = g;
      g2.erase(x);
      out->b = nsubst(g2, body, fresh);
      return out;
    }
    case Term::Kind::Let2: {
      out->a = nsubst(g, t->a, fresh);
      NTermPtr body = t->b;
      std::string x = t->x, y = t->y;
      auto fr = image_frees();
      if (fr.count(x)) {
        std::string nx = fresh.next();
        body = rename_free(body, x, nx);
        x = nx;
      }
      if (fr.count(y)) {
        std::string ny = fresh.next();
        body = rename_free(body, y, ny);
        y = ny;
      }
      out->x = x;
      out->y = y;
      auto g2 = g;
      g2.erase(x);
      g2.erase(y);
      out->b = nsubst(g2, body, fresh);
      return out;
    }
    case Term::Kind::Case: {
      out->a = nsubst(g, t->a, fresh);
      auto fr = image_frees();
      NTermPtr l = t->b, r = t->c;
      std::string x = t->x, y = t->y;
      if (fr.count(x)) {
        std::string nx = fresh.next();
        l = rename_free(l, x, nx);
        x = nx;
      }
      if (fr.count(y)) {
        std::string ny = fresh.next();
        r = rename_free(r, y, ny);
        y = ny;
      }
      out->x = x;
      out->y = y;
      auto gl = g;
      gl.erase(x);
      out->b = nsubst(gl, l, fresh);
      auto gr = g;
      gr.erase(y);
      out->c = nsubst(gr, r, fresh);
      return out;
    }
  }
  return out;
}

// alpha-normalization: rename binders in traversal order
inline NTermPtr anorm(const NTermPtr& t, std::map<std::string, std::string>& ren,
                      int& counter) {
  auto out = std::make_shared<NTerm>(*t);
  auto bind = [&](const std::string& n) {
    std::string fresh_name = "b" + std::to_string(counter++);
    ren[n] = fresh_name;
    return fresh_name;
  };
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = ren.find(t->var);
      if (it != ren.end()) out->var = it->second;
      return out;
    }
    case Term::Kind::Unit: return out;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort:
      out->a = anorm(t->a, ren, counter);
      return out;
    case Term::Kind::Pair:
      out->a = anorm(t->a, ren, counter);
      out->b = anorm(t->b, ren, counter);
      return out;
    case Term::Kind::Let1: {
      out->a = anorm(t->a, ren, counter);
      auto ren2 = ren;
      out->x = "b" + std::to_string(counter);
      ren2[t->x] = "b" + std::to_string(counter++);
      out->b = anorm(t->b, ren2, counter);
      return out;
    }
    case Term::Kind::Let2: {
      out->a = anorm(t->a, ren, counter);
      auto ren2 = ren;
      out->x = "b" + std::to_string(counter);
      ren2[t->x] = "b" + std::to_string(counter++);
      out->y = "b" + std::to_string(counter);
      ren2[t->y] = "b" + std::to_string(counter++);
      out->b = anorm(t->b, ren2, counter);
      return out;
    }
    case Term::Kind::Case: {
      out->a = anorm(t->a, ren, counter);
      auto renl = ren;
      out->x = "b" + std::to_string(counter);
      renl[t->x] = "b" + std::to_string(counter++);
      out->b = anorm(t->b, renl, counter);
      auto renr = ren;
      out->y = "b" + std::to_string(counter);
      renr[t->y] = "b" + std::to_string(counter++);
      out->c = anorm(t->c, renr, counter);
      return out;
    }
  }
  (void)bind;
  return out;
}

inline NTermPtr anorm(const NTermPtr& t) {
  std::map<std::string, std::string> ren;
  int counter = 0;
  return anorm(t, ren, counter);
}

inline bool nequal(const NTermPtr& a, const NTermPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: return a->var == b->var;
    case Term::Kind::Unit: return true;
    case Term::Kind::Op:
      return a->op == b->op && nequal(a->a, b->a);
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort: return ty_equal(a->ann, b->ann) && nequal(a->a, b->a);
    case Term::Kind::Pair: return nequal(a->a, b->a) && nequal(a->b, b->b);
    case Term::Kind::Let1:
    case Term::Kind::Let2:
      return a->x == b->x && a->y == b->y && nequal(a->a, b->a) && nequal(a->b, b->b);
    case Term::Kind::Case:
      return a->x == b->x && a->y == b->y && nequal(a->a, b->a) && nequal(a->b, b->b) &&
             nequal(a->c, b->c);
  }
  return false;
}

// free de Bruijn variables computed independently via the named conversion
inline std::set<int> free_vars_via_names(const TermPtr& t, int ctx_len) {
  Fresh fresh{0, "bind_"};
  std::vector<std::string> env;
  for (int i = 0; i < ctx_len; ++i) env.push_back("free_" + std::to_string(i));
  NTermPtr n = to_named(t, env, fresh);
  std::set<std::string> names;
  free_names(n, names);
  std::set<int> out;
  for (int i = 0; i < ctx_len; ++i)
    if (names.count("free_" + std::to_string(i))) out.insert(ctx_len - 1 - i);
  return out;
}

// ---- dominance oracle: a dominates b iff removing a disconnects b ----

inline bool dominates_oracle(const Cfg& g, int a, int b) {
  if (a == b) return true;
  auto succ = cfg_successors(g);
  std::set<int> reach;
  std::vector<int> work;
  if (0 != a) {
    work.push_back(0);
    reach.insert(0);
  }
  while (!work.empty()) {
    int x = work.back();
    work.pop_back();
    for (int s : succ[x])
      if (s != a && reach.insert(s).second) work.push_back(s);
  }
  return !reach.count(b);
}

inline std::vector<int> idom_oracle(const Cfg& g) {
  int n = static_cast<int>(g.blocks.size());
  std::vector<int> idom(n, -1);
  for (int b = 1; b < n; ++b) {
    std::vector<int> sdoms;
    for (int a = 0; a < n; ++a)
      if (a != b && dominates_oracle(g, a, b)) sdoms.push_back(a);
    for (int c : sdoms) {
      bool closest = true;
      for (int d : sdoms)
        if (d != c && !dominates_oracle(g, d, c)) closest = false;
      if (closest) idom[b] = c;
    }
  }
  return idom;
}

// ---- bounded unrolling of the powerset fixpoint ----

inline std::vector<ValuePtr> powerset_dagger_unroll(
    const std::function<std::vector<ValuePtr>(const ValuePtr&)>& f, const ValuePtr& a,
    int max_n) {
  // f^0 a = {inr a}; f^{n+1} a = bind (f^n a) [inl, f]
  std::vector<ValuePtr> cur{v_inr(a)};
  std::vector<ValuePtr> exits;
  for (int n = 0; n <= max_n; ++n) {
    std::vector<ValuePtr> next;
    for (auto& s : cur) {
      if (s->kind == Value::Kind::Inl) {
        exits.push_back(s->a);
        next.push_back(s);
      } else {
        for (auto& r : f(s->a)) next.push_back(r);
      }
    }
    canonicalize(next);
    cur = std::move(next);
  }
  canonicalize(exits);
  return exits;
}

}  // namespace oracle
