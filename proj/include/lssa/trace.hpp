#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "lssa/model.hpp"

namespace lssa {

// Trace-model semantics shared by the printing, heap and TSO models: a
// computation takes a state and yields a set of branches, each either
// Finished (value, final state, finite trace) or Diverged (a trace prefix,
// with a flag saying whether it was cut off rather than proven periodic).
//
// A policy supplies the state type St, the trace monoid Tr, and the
// instruction interpretations.

template <class P, class T>
struct SBr {
  bool fin = false;
  T v{};
  typename P::St st{};
  typename P::Tr tr{};
  bool truncated = false;
};

template <class P, class T>
int sbr_compare(const P& p, const SBr<P, T>& a, const SBr<P, T>& b) {
  if (a.fin != b.fin) return a.fin ? -1 : 1;
  if (a.fin) {
    if (carrier_less(a.v, b.v)) return -1;
    if (carrier_less(b.v, a.v)) return 1;
    int c = p.st_compare(a.st, b.st);
    if (c != 0) return c;
  }
  int c = p.tr_compare(a.tr, b.tr);
  if (c != 0) return c;
  if (a.truncated != b.truncated) return a.truncated ? 1 : -1;
  return 0;
}

template <class P, class T>
void sbr_canon(const P& p, std::vector<SBr<P, T>>& xs) {
  std::sort(xs.begin(), xs.end(), [&](const SBr<P, T>& a, const SBr<P, T>& b) {
    return sbr_compare(p, a, b) < 0;
  });
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [&](const SBr<P, T>& a, const SBr<P, T>& b) {
                         return sbr_compare(p, a, b) == 0;
                       }),
           xs.end());
}

// Sequencing: feeds finished branches into k, prefixing their traces.
template <class P, class T, class U, class K>
std::vector<SBr<P, U>> sbind(const P& p, const std::vector<SBr<P, T>>& xs, K&& k) {
  std::vector<SBr<P, U>> out;
  for (auto& x : xs) {
    if (!x.fin) {
      SBr<P, U> d;
      d.tr = x.tr;
      d.truncated = x.truncated;
      out.push_back(std::move(d));
      continue;
    }
    std::vector<SBr<P, U>> ys = k(x.v, x.st);
    for (auto& y : ys) {
      y.tr = p.tr_seq(x.tr, y.tr);
      if (!y.fin) y.tr = p.tr_prefix(y.tr);
      out.push_back(std::move(y));
    }
  }
  sbr_canon(p, out);
  return out;
}

template <class P, class T>
std::vector<SBr<P, T>> spure(const P& p, T v, typename P::St st) {
  SBr<P, T> b;
  b.fin = true;
  b.v = std::move(v);
  b.st = std::move(st);
  b.tr = p.tr_empty();
  return {std::move(b)};
}

template <class P>
std::vector<SBr<P, ValuePtr>> sdenote_term(const P& p, const Env& env,
                                           typename P::St st, const TermPtr& t) {
  using R = std::vector<SBr<P, ValuePtr>>;
  switch (t->kind) {
    case Term::Kind::Var: return spure(p, env_lookup(env, t->var), st);
    case Term::Kind::Unit: return spure(p, v_unit(), st);
    case Term::Kind::Op:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& v, const typename P::St& s) { return p.instr(t->op, v, s); });
    case Term::Kind::Let1:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& v, const typename P::St& s) {
            return sdenote_term(p, env_push(env, v), s, t->b);
          });
    case Term::Kind::Pair:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& va, const typename P::St& s) {
            return sbind<P, ValuePtr, ValuePtr>(
                p, sdenote_term(p, env, s, t->b),
                [&](const ValuePtr& vb, const typename P::St& s2) {
                  return spure(p, v_pair(va, vb), s2);
                });
          });
    case Term::Kind::Let2:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& v, const typename P::St& s) {
            return sdenote_term(p, env_push(env_push(env, v->a), v->b), s, t->b);
          });
    case Term::Kind::Inl:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& v, const typename P::St& s) { return spure(p, v_inl(v), s); });
    case Term::Kind::Inr:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& v, const typename P::St& s) { return spure(p, v_inr(v), s); });
    case Term::Kind::Abort:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr&, const typename P::St&) -> R {
            throw std::logic_error("abort reached at runtime");
          });
    case Term::Kind::Case:
      return sbind<P, ValuePtr, ValuePtr>(
          p, sdenote_term(p, env, st, t->a),
          [&](const ValuePtr& v, const typename P::St& s) {
            if (v->kind == Value::Kind::Inl)
              return sdenote_term(p, env_push(env, v->a), s, t->b);
            return sdenote_term(p, env_push(env, v->a), s, t->c);
          });
  }
  throw std::logic_error("malformed term");
}

template <class P>
std::vector<SBr<P, Outcome>> sdenote_region(const P& p, const Env& env,
                                            typename P::St st, const RegionPtr& r);

// Loop engine: a frontier of pending (state, store, trace) triples is stepped
// up to `fuel` times. Deterministic chains detect cycles and report proven
// divergence; everything else is cut off with a truncation marker.
template <class P>
std::vector<SBr<P, Outcome>> strace_dagger(
    const P& p, std::vector<SBr<P, LoopRes>> init,
    const std::function<std::vector<SBr<P, LoopRes>>(const LoopSt&, const typename P::St&)>&
        step) {
  using OutBr = SBr<P, Outcome>;
  struct Pending {
    LoopSt st;
    typename P::St store;
    typename P::Tr tr;
    // trace length at each visit of a state, for cycle detection
    std::map<std::pair<LoopSt, std::string>, typename P::Tr> visited;
  };
  std::vector<OutBr> out;
  std::vector<Pending> frontier;
  auto feed = [&](const SBr<P, LoopRes>& b, const Pending* parent) {
    typename P::Tr tr = parent ? p.tr_seq(parent->tr, b.tr) : b.tr;
    if (!b.fin) {
      OutBr d;
      d.tr = p.tr_prefix(tr);
      d.truncated = b.truncated;
      out.push_back(std::move(d));
      return;
    }
    if (b.v.exit) {
      OutBr o;
      o.fin = true;
      o.v = b.v.out;
      o.st = b.st;
      o.tr = tr;
      out.push_back(std::move(o));
      return;
    }
    Pending nxt;
    nxt.st = b.v.st;
    nxt.store = b.st;
    nxt.tr = tr;
    if (parent) nxt.visited = parent->visited;
    auto key = std::make_pair(b.v.st, p.st_key(b.st));
    auto it = nxt.visited.find(key);
    if (it != nxt.visited.end()) {
      // proven cycle: report the prefix extended periodically up to the bound
      typename P::Tr period = p.tr_since(nxt.tr, it->second);
      typename P::Tr acc = nxt.tr;
      for (int i = 0; i < 8 && !p.tr_at_bound(acc); ++i) acc = p.tr_seq(acc, period);
      OutBr d;
      d.tr = p.tr_prefix(acc);
      d.truncated = false;
      out.push_back(std::move(d));
      return;
    }
    nxt.visited.emplace(key, nxt.tr);
    frontier.push_back(std::move(nxt));
  };
  for (auto& b : init) feed(b, nullptr);
  for (int used = 0; used < p.fuel && !frontier.empty(); ++used) {
    std::vector<Pending> cur;
    cur.swap(frontier);
    for (auto& pend : cur) {
      auto rs = step(pend.st, pend.store);
      for (auto& b : rs) feed(b, &pend);
    }
  }
  for (auto& pend : frontier) {
    OutBr d;
    d.tr = p.tr_prefix(pend.tr);
    d.truncated = true;
    out.push_back(std::move(d));
  }
  sbr_canon(p, out);
  return out;
}

template <class P>
std::vector<SBr<P, Outcome>> sdenote_region(const P& p, const Env& env,
                                            typename P::St st, const RegionPtr& r) {
  switch (r->kind) {
    case Region::Kind::Br:
      return sbind<P, ValuePtr, Outcome>(
          p, sdenote_term(p, env, st, r->term),
          [&](const ValuePtr& v, const typename P::St& s) {
            return spure(p, Outcome{r->label, v}, s);
          });
    case Region::Kind::Let1:
      return sbind<P, ValuePtr, Outcome>(
          p, sdenote_term(p, env, st, r->term),
          [&](const ValuePtr& v, const typename P::St& s) {
            return sdenote_region(p, env_push(env, v), s, r->a);
          });
    case Region::Kind::Let2:
      return sbind<P, ValuePtr, Outcome>(
          p, sdenote_term(p, env, st, r->term),
          [&](const ValuePtr& v, const typename P::St& s) {
            return sdenote_region(p, env_push(env_push(env, v->a), v->b), s, r->a);
          });
    case Region::Kind::Case:
      return sbind<P, ValuePtr, Outcome>(
          p, sdenote_term(p, env, st, r->term),
          [&](const ValuePtr& v, const typename P::St& s) {
            if (v->kind == Value::Kind::Inl)
              return sdenote_region(p, env_push(env, v->a), s, r->a);
            return sdenote_region(p, env_push(env, v->a), s, r->b);
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
      auto lift = [&](std::vector<SBr<P, Outcome>> xs) {
        std::vector<SBr<P, LoopRes>> ys;
        for (auto& x : xs) {
          SBr<P, LoopRes> y;
          y.fin = x.fin;
          if (x.fin) y.v = classify(x.v);
          y.st = x.st;
          y.tr = x.tr;
          y.truncated = x.truncated;
          ys.push_back(std::move(y));
        }
        return ys;
      };
      std::function<std::vector<SBr<P, LoopRes>>(const LoopSt&, const typename P::St&)>
          step = [&](const LoopSt& s, const typename P::St& store) {
            return lift(sdenote_region(p, env_push(env, s.v), store, r->blocks[s.blk]));
          };
      return strace_dagger(p, lift(sdenote_region(p, env, st, r->a)), step);
    }
  }
  throw std::logic_error("malformed region");
}

// ---- the printing model: no state, traces are event words ----

struct PrintPolicy {
  const Signature* sig = nullptr;
  const Interp* interp = nullptr;
  int fuel = 1000;
  size_t trace_prefix = 16;

  using St = std::monostate;
  using Tr = std::vector<std::string>;

  Tr tr_empty() const { return {}; }
  Tr tr_seq(const Tr& a, const Tr& b) const {
    Tr out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
  Tr tr_prefix(const Tr& a) const {
    if (a.size() <= trace_prefix) return a;
    return Tr(a.begin(), a.begin() + trace_prefix);
  }
  Tr tr_since(const Tr& a, const Tr& mark) const {
    return Tr(a.begin() + std::min(a.size(), mark.size()), a.end());
  }
  bool tr_at_bound(const Tr& a) const { return a.size() >= trace_prefix; }
  int tr_compare(const Tr& a, const Tr& b) const {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
  }
  int st_compare(const St&, const St&) const { return 0; }
  std::string st_key(const St&) const { return ""; }

  std::vector<SBr<PrintPolicy, ValuePtr>> instr(int f, const ValuePtr& arg,
                                                const St& st) const {
    const Behavior& b = interp->of(f);
    switch (b.kind) {
      case Behavior::Kind::Pure: return spure(*this, b.fn(arg), st);
      case Behavior::Kind::Nondet: {
        std::vector<SBr<PrintPolicy, ValuePtr>> out;
        for (auto& v : enumerate_values(*sig, sig->instrs[f].cod))
          for (auto& x : spure(*this, v, st)) out.push_back(x);
        sbr_canon(*this, out);
        return out;
      }
      case Behavior::Kind::Print: {
        SBr<PrintPolicy, ValuePtr> o;
        o.fin = true;
        o.v = v_unit();
        o.st = st;
        o.tr = {value_str(*sig, arg)};
        return {std::move(o)};
      }
      default: throw std::logic_error("print model does not interpret this instruction");
    }
  }
};

// ---- the heap model: StateT Heap over the printing model ----

using Heap = std::map<std::uint64_t, std::uint64_t>;

struct HeapPolicy {
  const Signature* sig = nullptr;
  const Interp* interp = nullptr;
  int fuel = 1000;
  size_t trace_prefix = 16;
  std::uint64_t addr_space = 4;  // cells eligible for alloc

  using St = Heap;
  using Tr = std::vector<std::string>;

  Tr tr_empty() const { return {}; }
  Tr tr_seq(const Tr& a, const Tr& b) const {
    Tr out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
  Tr tr_prefix(const Tr& a) const {
    if (a.size() <= trace_prefix) return a;
    return Tr(a.begin(), a.begin() + trace_prefix);
  }
  Tr tr_since(const Tr& a, const Tr& mark) const {
    return Tr(a.begin() + std::min(a.size(), mark.size()), a.end());
  }
  bool tr_at_bound(const Tr& a) const { return a.size() >= trace_prefix; }
  int tr_compare(const Tr& a, const Tr& b) const {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
  }
  int st_compare(const St& a, const St& b) const {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
  }
  std::string st_key(const St& a) const {
    std::string s;
    for (auto& [k, v] : a) s += std::to_string(k) + ":" + std::to_string(v) + ";";
    return s;
  }

  std::vector<SBr<HeapPolicy, ValuePtr>> instr(int f, const ValuePtr& arg,
                                               const St& st) const {
    const Behavior& b = interp->of(f);
    auto one = [&](ValuePtr v, Heap h) { return spure(*this, std::move(v), std::move(h)); };
    switch (b.kind) {
      case Behavior::Kind::Pure: return one(b.fn(arg), st);
      case Behavior::Kind::Nondet: {
        std::vector<SBr<HeapPolicy, ValuePtr>> out;
        for (auto& v : enumerate_values(*sig, sig->instrs[f].cod)) {
          auto o = one(v, st);
          out.push_back(o[0]);
        }
        sbr_canon(*this, out);
        return out;
      }
      case Behavior::Kind::Print: {
        SBr<HeapPolicy, ValuePtr> o;
        o.fin = true;
        o.v = v_unit();
        o.st = st;
        o.tr = {value_str(*sig, arg)};
        return {std::move(o)};
      }
      case Behavior::Kind::HeapSet: {
        Heap h = st;
        h[word_of(arg->a)] = word_of(arg->b);
        return one(v_unit(), std::move(h));
      }
      case Behavior::Kind::HeapGet: {
        std::uint64_t ptr = word_of(arg);
        auto it = st.find(ptr);
        int base = sig->instrs[f].cod->base;
        if (it != st.end()) return one(v_base(base, it->second), st);
        // reading uninitialized memory yields an arbitrary carrier value
        std::vector<SBr<HeapPolicy, ValuePtr>> out;
        for (std::uint64_t v = 0; v < sig->bases[base].carrier; ++v) {
          auto o = one(v_base(base, v), st);
          out.push_back(o[0]);
        }
        sbr_canon(*this, out);
        return out;
      }
      case Behavior::Kind::HeapAlloc: {
        // fills any empty cell of the finite address space
        std::vector<SBr<HeapPolicy, ValuePtr>> out;
        int base = sig->instrs[f].cod->base;
        for (std::uint64_t c = 0; c < addr_space; ++c) {
          if (st.count(c)) continue;
          Heap h = st;
          h[c] = word_of(arg);
          auto o = one(v_base(base, c), std::move(h));
          out.push_back(o[0]);
        }
        sbr_canon(*this, out);
        return out;  // empty when the heap is full: allocation gets stuck
      }
      case Behavior::Kind::HeapFree: {
        Heap h = st;
        h.erase(word_of(arg));
        return one(v_unit(), std::move(h));
      }
      default: throw std::logic_error("heap model does not interpret this instruction");
    }
  }
};

}  // namespace lssa
