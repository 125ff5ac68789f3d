#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "lssa/interp.hpp"
#include "lssa/subst.hpp"
#include "lssa/syntax.hpp"
#include "lssa/typing.hpp"
#include "lssa/value.hpp"

namespace lssa {

// Loop state for where-block iteration: which block to run next, with the
// block argument. The denotation of a where-block runs the head, then
// re-dispatches loop states with the captured environment until an outer
// label is reached; this is the set-level reading of the rfix construction.
struct LoopSt {
  int blk = -1;
  ValuePtr v;
};

inline int loopst_compare(const LoopSt& x, const LoopSt& y) {
  if (x.blk != y.blk) return x.blk < y.blk ? -1 : 1;
  if (!x.v || !y.v) return !x.v && !y.v ? 0 : (!x.v ? -1 : 1);
  return value_compare(x.v, y.v);
}
inline bool operator<(const LoopSt& x, const LoopSt& y) { return loopst_compare(x, y) < 0; }

struct LoopRes {
  bool exit = false;
  Outcome out{-1, nullptr};  // when exit
  LoopSt st;                 // when !exit
};

inline int loopres_compare(const LoopRes& x, const LoopRes& y) {
  if (x.exit != y.exit) return x.exit ? -1 : 1;
  if (x.exit) {
    if (x.out.label != y.out.label) return x.out.label < y.out.label ? -1 : 1;
    if (!x.out.v || !y.out.v) return !x.out.v && !y.out.v ? 0 : (!x.out.v ? -1 : 1);
    return value_compare(x.out.v, y.out.v);
  }
  return loopst_compare(x.st, y.st);
}
inline bool operator<(const LoopRes& x, const LoopRes& y) { return loopres_compare(x, y) < 0; }

inline int env_compare(const Env& x, const Env& y) {
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  for (size_t i = 0; i < x.size(); ++i) {
    int c = value_compare(x[i], y[i]);
    if (c != 0) return c;
  }
  return 0;
}

// generic strict ordering used by set-like carriers
inline bool carrier_less(const ValuePtr& a, const ValuePtr& b) { return value_compare(a, b) < 0; }
inline bool carrier_less(const Outcome& a, const Outcome& b) { return a < b; }
inline bool carrier_less(const LoopSt& a, const LoopSt& b) { return a < b; }
inline bool carrier_less(const LoopRes& a, const LoopRes& b) { return a < b; }
inline bool carrier_less(const Env& a, const Env& b) { return env_compare(a, b) < 0; }

template <class T>
void canonicalize(std::vector<T>& xs) {
  std::sort(xs.begin(), xs.end(), [](const T& a, const T& b) { return carrier_less(a, b); });
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](const T& a, const T& b) {
                         return !carrier_less(a, b) && !carrier_less(b, a);
                       }),
           xs.end());
}

// ---- option model ----

struct OptionModel {
  const Signature* sig = nullptr;
  const Interp* interp = nullptr;
  int fuel = 1000;
  // distinguishes fuel exhaustion from computed divergence; both are `none`
  mutable bool fuel_exhausted = false;

  template <class T>
  using C = std::optional<T>;

  template <class T>
  C<T> pure(T v) const {
    return C<T>(std::move(v));
  }

  template <class T, class F>
  auto bind(const C<T>& x, F&& k) const -> decltype(k(*x)) {
    if (!x) return std::nullopt;
    return k(*x);
  }

  C<ValuePtr> instr(int f, const ValuePtr& arg) const {
    const Behavior& b = interp->of(f);
    switch (b.kind) {
      case Behavior::Kind::Pure: return b.fn(arg);
      default: throw std::logic_error("option model does not interpret this instruction");
    }
  }

  C<Outcome> iterate(const C<LoopRes>& init,
                     const std::function<C<LoopRes>(const LoopSt&)>& step) const {
    if (!init) return std::nullopt;
    LoopRes cur = *init;
    for (int used = 0; !cur.exit; ++used) {
      if (used >= fuel) {
        fuel_exhausted = true;
        return std::nullopt;
      }
      auto nxt = step(cur.st);
      if (!nxt) return std::nullopt;
      cur = *nxt;
    }
    return cur.out;
  }

  template <class T>
  bool equal(const C<T>& a, const C<T>& b) const {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return !carrier_less(*a, *b) && !carrier_less(*b, *a);
  }
};

// ---- powerset model ----

struct PowersetModel {
  const Signature* sig = nullptr;
  const Interp* interp = nullptr;

  template <class T>
  using C = std::vector<T>;  // canonically sorted, duplicate-free

  template <class T>
  C<T> pure(T v) const {
    return C<T>{std::move(v)};
  }

  template <class T, class F>
  auto bind(const C<T>& x, F&& k) const -> decltype(k(x.front())) {
    decltype(k(x.front())) out;
    for (const T& v : x) {
      auto ys = k(v);
      out.insert(out.end(), ys.begin(), ys.end());
    }
    canonicalize(out);
    return out;
  }

  C<ValuePtr> instr(int f, const ValuePtr& arg) const {
    const Behavior& b = interp->of(f);
    switch (b.kind) {
      case Behavior::Kind::Pure: return {b.fn(arg)};
      case Behavior::Kind::Nondet: {
        auto out = enumerate_values(*sig, sig->instrs[f].cod);
        canonicalize(out);
        return out;
      }
      default: throw std::logic_error("powerset model does not interpret this instruction");
    }
  }

  // Worklist reachability over loop states; divergence-only paths contribute
  // nothing, matching the union formula of the powerset fixpoint.
  C<Outcome> iterate(const C<LoopRes>& init,
                     const std::function<C<LoopRes>(const LoopSt&)>& step) const {
    std::vector<Outcome> exits;
    std::set<LoopSt> seen;
    std::vector<LoopSt> work;
    auto feed = [&](const LoopRes& r) {
      if (r.exit) {
        exits.push_back(r.out);
      } else if (seen.insert(r.st).second) {
        work.push_back(r.st);
      }
    };
    for (auto& r : init) feed(r);
    while (!work.empty()) {
      LoopSt s = work.back();
      work.pop_back();
      for (auto& r : step(s)) feed(r);
    }
    canonicalize(exits);
    return exits;
  }

  template <class T>
  bool equal(const C<T>& a, const C<T>& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (carrier_less(a[i], b[i]) || carrier_less(b[i], a[i])) return false;
    return true;
  }
};

// ---- denotation ----

template <class M>
auto denote_term(const M& m, const Env& env, const TermPtr& t) ->
    typename M::template C<ValuePtr> {
  using CV = typename M::template C<ValuePtr>;
  switch (t->kind) {
    case Term::Kind::Var: return m.pure(env_lookup(env, t->var));
    case Term::Kind::Unit: return m.pure(v_unit());
    case Term::Kind::Op:
      return m.bind(denote_term(m, env, t->a),
                    [&](const ValuePtr& v) { return m.instr(t->op, v); });
    case Term::Kind::Let1:
      return m.bind(denote_term(m, env, t->a), [&](const ValuePtr& v) {
        return denote_term(m, env_push(env, v), t->b);
      });
    case Term::Kind::Pair:
      return m.bind(denote_term(m, env, t->a), [&](const ValuePtr& va) {
        return m.bind(denote_term(m, env, t->b),
                      [&](const ValuePtr& vb) { return m.pure(v_pair(va, vb)); });
      });
    case Term::Kind::Let2:
      return m.bind(denote_term(m, env, t->a), [&](const ValuePtr& v) {
        return denote_term(m, env_push(env_push(env, v->a), v->b), t->b);
      });
    case Term::Kind::Inl:
      return m.bind(denote_term(m, env, t->a),
                    [&](const ValuePtr& v) { return m.pure(v_inl(v)); });
    case Term::Kind::Inr:
      return m.bind(denote_term(m, env, t->a),
                    [&](const ValuePtr& v) { return m.pure(v_inr(v)); });
    case Term::Kind::Abort:
      return m.bind(denote_term(m, env, t->a), [&](const ValuePtr&) -> CV {
        throw std::logic_error("abort reached at runtime");
      });
    case Term::Kind::Case:
      return m.bind(denote_term(m, env, t->a), [&](const ValuePtr& v) {
        if (v->kind == Value::Kind::Inl)
          return denote_term(m, env_push(env, v->a), t->b);
        return denote_term(m, env_push(env, v->a), t->c);
      });
  }
  throw std::logic_error("malformed term");
}

template <class M>
auto denote_region(const M& m, const Env& env, const RegionPtr& r) ->
    typename M::template C<Outcome> {
  switch (r->kind) {
    case Region::Kind::Br:
      return m.bind(denote_term(m, env, r->term),
                    [&](const ValuePtr& v) { return m.pure(Outcome{r->label, v}); });
    case Region::Kind::Let1:
      return m.bind(denote_term(m, env, r->term), [&](const ValuePtr& v) {
        return denote_region(m, env_push(env, v), r->a);
      });
    case Region::Kind::Let2:
      return m.bind(denote_term(m, env, r->term), [&](const ValuePtr& v) {
        return denote_region(m, env_push(env_push(env, v->a), v->b), r->a);
      });
    case Region::Kind::Case:
      return m.bind(denote_term(m, env, r->term), [&](const ValuePtr& v) {
        if (v->kind == Value::Kind::Inl)
          return denote_region(m, env_push(env, v->a), r->a);
        return denote_region(m, env_push(env, v->a), r->b);
      });
    case Region::Kind::Where: {
      int nb = static_cast<int>(r->blocks.size());
      auto classify = [nb](const Outcome& o) -> LoopRes {
        LoopRes res;
        if (o.label < nb) {
          res.exit = false;
          res.st = LoopSt{o.label, o.v};
        } else {
          res.exit = true;
          res.out = Outcome{o.label - nb, o.v};
        }
        return res;
      };
      std::function<typename M::template C<LoopRes>(const LoopSt&)> step =
          [&m, &env, &r, classify](const LoopSt& s) {
            return m.bind(denote_region(m, env_push(env, s.v), r->blocks[s.blk]),
                          [&](const Outcome& o) { return m.pure(classify(o)); });
          };
      auto init = m.bind(denote_region(m, env, r->a),
                         [&](const Outcome& o) { return m.pure(classify(o)); });
      return m.iterate(init, step);
    }
  }
  throw std::logic_error("malformed region");
}

// Componentwise denotation of a substitution, sequenced outermost-first.
template <class M>
auto denote_subst(const M& m, const Env& env, const Subst& gamma) ->
    typename M::template C<Env> {
  using CE = typename M::template C<Env>;
  std::function<CE(int, Env)> go = [&](int i, Env acc) -> CE {
    if (i < 0) return m.pure(std::move(acc));
    return m.bind(denote_term(m, env, gamma[i]), [&](const ValuePtr& v) {
      Env acc2 = acc;
      acc2.push_back(v);
      return go(i - 1, std::move(acc2));
    });
  };
  return go(static_cast<int>(gamma.size()) - 1, Env{});
}

// ---- standalone daggers (spec ops) ----

// Iterates f up to `fuel` steps: inl exits, inr continues.
inline std::optional<ValuePtr> option_dagger(
    const std::function<std::optional<ValuePtr>(const ValuePtr&)>& f, const ValuePtr& a,
    int fuel, bool* exhausted = nullptr, int* steps = nullptr) {
  ValuePtr cur = a;
  for (int i = 0; i < fuel; ++i) {
    auto r = f(cur);
    if (steps) *steps = i + 1;
    if (!r) return std::nullopt;
    if ((*r)->kind == Value::Kind::Inl) return (*r)->a;
    cur = (*r)->a;
  }
  if (exhausted) *exhausted = true;
  return std::nullopt;
}

struct DomainEscape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All inl-exits reachable in any number of steps by worklist reachability
// over a caller-declared finite domain.
inline std::vector<ValuePtr> powerset_dagger(
    const std::function<std::vector<ValuePtr>(const ValuePtr&)>& f, const ValuePtr& a,
    const std::vector<ValuePtr>& domain) {
  auto in_domain = [&](const ValuePtr& v) {
    for (auto& d : domain)
      if (value_equal(d, v)) return true;
    return false;
  };
  if (!in_domain(a)) throw DomainEscape("powerset dagger: start outside domain");
  std::vector<ValuePtr> exits;
  std::set<ValuePtr, bool (*)(const ValuePtr&, const ValuePtr&)> seen(carrier_less);
  std::vector<ValuePtr> work{a};
  seen.insert(a);
  while (!work.empty()) {
    ValuePtr s = work.back();
    work.pop_back();
    for (auto& r : f(s)) {
      if (r->kind == Value::Kind::Inl) {
        exits.push_back(r->a);
      } else {
        if (!in_domain(r->a)) throw DomainEscape("powerset dagger: continuation left domain");
        if (seen.insert(r->a).second) work.push_back(r->a);
      }
    }
  }
  canonicalize(exits);
  return exits;
}

// ---- denotational equivalence at desk scale ----

struct EquivResult {
  bool equal = false;
  bool budget_exceeded = false;
  std::optional<Env> counterexample;
};

inline std::vector<Env> enumerate_envs(const Signature& sig, const Ctx& ctx,
                                       std::uint64_t budget) {
  std::vector<Env> envs{Env{}};
  for (auto& h : ctx.entries) {  // outermost first
    auto vals = enumerate_values(sig, h.ty, budget);
    std::vector<Env> next;
    if (!vals.empty() && envs.size() * vals.size() > budget)
      throw EnumBudgetExceeded("environment enumeration exceeds budget");
    for (auto& e : envs)
      for (auto& v : vals) next.push_back(env_push(e, v));
    envs = std::move(next);
  }
  return envs;
}

template <class M>
EquivResult denotation_equal_term(const M& m, const Ctx& ctx, const TermPtr& lhs,
                                  const TermPtr& rhs, std::uint64_t budget = 1u << 16) {
  EquivResult res;
  std::vector<Env> envs;
  try {
    envs = enumerate_envs(*m.sig, ctx, budget);
  } catch (const EnumBudgetExceeded&) {
    res.budget_exceeded = true;
    return res;
  }
  for (auto& env : envs) {
    auto l = denote_term(m, env, lhs);
    auto r = denote_term(m, env, rhs);
    if (!m.equal(l, r)) {
      res.counterexample = env;
      return res;
    }
  }
  res.equal = true;
  return res;
}

template <class M>
EquivResult denotation_equal_region(const M& m, const Ctx& ctx, const RegionPtr& lhs,
                                    const RegionPtr& rhs, std::uint64_t budget = 1u << 16) {
  EquivResult res;
  std::vector<Env> envs;
  try {
    envs = enumerate_envs(*m.sig, ctx, budget);
  } catch (const EnumBudgetExceeded&) {
    res.budget_exceeded = true;
    return res;
  }
  for (auto& env : envs) {
    auto l = denote_region(m, env, lhs);
    auto r = denote_region(m, env, rhs);
    if (!m.equal(l, r)) {
      res.counterexample = env;
      return res;
    }
  }
  res.equal = true;
  return res;
}

}  // namespace lssa
