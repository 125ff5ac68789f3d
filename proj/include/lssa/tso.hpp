#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "lssa/pomset.hpp"
#include "lssa/trace.hpp"

namespace lssa {

// TSO weak memory: per-thread FIFO write buffers over a pomset trace monoid.
// Reads see local buffered writes first; writes are buffered; a
// nondeterministic partial flush may move buffered writes into the trace at
// any instruction boundary.

using Buffer = std::vector<std::pair<int, std::uint64_t>>;  // oldest first

inline Pomset buffer_pomset(const Buffer& b, size_t from = 0) {
  Pomset p;
  for (size_t i = from; i < b.size(); ++i) {
    Pomset w = pom_single(PomAction{PomAction::Kind::BufWrite, b[i].first, b[i].second});
    p = p.labels.empty() ? w : pom_seq(p, w);
  }
  return p;
}

// Reads from the buffer prioritize the newest entry.
inline std::optional<std::uint64_t> buffer_lookup(const Buffer& b, int loc) {
  for (auto it = b.rbegin(); it != b.rend(); ++it)
    if (it->first == loc) return it->second;
  return std::nullopt;
}

struct TsoPolicy {
  const Signature* sig = nullptr;
  const Interp* interp = nullptr;
  int fuel = 1000;
  size_t trace_prefix = 24;        // pomset node bound for divergence prefixes
  std::uint64_t word_dom = 2;      // value domain for unconstrained reads

  using St = Buffer;
  using Tr = Pomset;

  Tr tr_empty() const { return pom_empty(); }
  Tr tr_seq(const Tr& a, const Tr& b) const {
    if (a.labels.empty()) return b;
    if (b.labels.empty()) return a;
    return pom_seq(a, b);
  }
  Tr tr_prefix(const Tr& a) const { return a; }
  Tr tr_since(const Tr&, const Tr&) const { return pom_empty(); }
  bool tr_at_bound(const Tr& a) const { return a.labels.size() >= trace_prefix; }
  int tr_compare(const Tr& a, const Tr& b) const { return pom_compare(a, b); }
  int st_compare(const St& a, const St& b) const {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
  }
  std::string st_key(const St& a) const {
    std::string s;
    for (auto& [l, v] : a) s += std::to_string(l) + ":" + std::to_string(v) + ";";
    return s;
  }

  using Br = SBr<TsoPolicy, ValuePtr>;

  // pflush: every split of the buffer into a flushed prefix and a retained
  // suffix, including the no-op split and the full flush.
  std::vector<Br> pflush(const ValuePtr& v, const Buffer& buf) const {
    std::vector<Br> out;
    for (size_t k = 0; k <= buf.size(); ++k) {
      Br b;
      b.fin = true;
      b.v = v;
      b.st = Buffer(buf.begin() + k, buf.end());
      Pomset tr;
      for (size_t i = 0; i < k; ++i)
        tr = tr_seq(tr,
                    pom_single(PomAction{PomAction::Kind::BufWrite, buf[i].first, buf[i].second}));
      b.tr = tr;
      out.push_back(std::move(b));
    }
    sbr_canon(*this, out);
    return out;
  }

  std::vector<Br> wrap_pflush(std::vector<Br> mid) const {
    std::vector<Br> out;
    for (auto& m : mid) {
      if (!m.fin) {
        out.push_back(m);
        continue;
      }
      for (auto& f : pflush(m.v, m.st)) {
        Br b = f;
        b.tr = tr_seq(m.tr, f.tr);
        out.push_back(std::move(b));
      }
    }
    sbr_canon(*this, out);
    return out;
  }

  std::vector<Br> instr(int f, const ValuePtr& arg, const St& st) const {
    const Behavior& b = interp->of(f);
    switch (b.kind) {
      case Behavior::Kind::Pure: return spure(*this, b.fn(arg), st);
      case Behavior::Kind::Nondet: {
        std::vector<Br> out;
        for (auto& v : enumerate_values(*sig, sig->instrs[f].cod))
          out.push_back(spure(*this, v, st)[0]);
        sbr_canon(*this, out);
        return out;
      }
      case Behavior::Kind::TsoRead: {
        int base = sig->instrs[f].cod->base;
        auto core = [&](const Buffer& buf) {
          std::vector<Br> mids;
          auto hit = buffer_lookup(buf, b.loc);
          auto mk = [&](std::uint64_t v) {
            Br m;
            m.fin = true;
            m.v = v_base(base, v);
            m.st = buf;
            m.tr = pom_single(PomAction{PomAction::Kind::Read, b.loc, v});
            mids.push_back(std::move(m));
          };
          if (hit) {
            mk(*hit);
          } else {
            for (std::uint64_t v = 0; v < word_dom; ++v) mk(v);
          }
          return mids;
        };
        std::vector<Br> out;
        for (auto& pre : pflush(arg, st))
          for (auto& m : core(pre.st)) {
            Br x = m;
            x.tr = tr_seq(pre.tr, m.tr);
            out.push_back(std::move(x));
          }
        return wrap_pflush(std::move(out));
      }
      case Behavior::Kind::TsoWrite: {
        std::uint64_t v = word_of(arg);
        std::vector<Br> out;
        for (auto& pre : pflush(arg, st)) {
          Br m;
          m.fin = true;
          m.v = v_unit();
          m.st = pre.st;
          m.st.emplace_back(b.loc, v);
          m.tr = tr_seq(pre.tr, pom_single(PomAction{PomAction::Kind::Write, b.loc, v}));
          out.push_back(std::move(m));
        }
        return wrap_pflush(std::move(out));
      }
      case Behavior::Kind::TsoFence: {
        Br m;
        m.fin = true;
        m.v = v_unit();
        m.st = Buffer{};
        m.tr = tr_seq(buffer_pomset(st), pom_tick());
        return {std::move(m)};
      }
      default: throw std::logic_error("tso model does not interpret this instruction");
    }
  }
};

using TsoBr = SBr<TsoPolicy, ValuePtr>;

// The idempotent envelope: pre- and post-compose a computation with pflush,
// giving the PTSO normal form.
inline std::vector<TsoBr> ide_wrap(
    const TsoPolicy& p, const Buffer& buf,
    const std::function<std::vector<TsoBr>(const Buffer&)>& comp) {
  std::vector<TsoBr> out;
  for (auto& pre : p.pflush(v_unit(), buf)) {
    for (auto& m : comp(pre.st)) {
      if (!m.fin) {
        TsoBr d = m;
        d.tr = p.tr_seq(pre.tr, m.tr);
        out.push_back(std::move(d));
        continue;
      }
      for (auto& post : p.pflush(m.v, m.st)) {
        TsoBr b = post;
        b.tr = p.tr_seq(pre.tr, p.tr_seq(m.tr, post.tr));
        out.push_back(std::move(b));
      }
    }
  }
  sbr_canon(p, out);
  return out;
}

// Fork-join parallel composition: flush the caller's buffer completely, run
// both sides with fresh buffers, and keep only executions in which both end
// with an empty buffer.
inline std::vector<TsoBr> tso_par(const TsoPolicy& p, const Buffer& caller,
                                  const std::vector<TsoBr>& f, const std::vector<TsoBr>& g) {
  Pomset prefix = buffer_pomset(caller);
  std::vector<TsoBr> out;
  auto flushed = [](const TsoBr& b) { return b.fin && b.st.empty(); };
  for (auto& a : f) {
    for (auto& b : g) {
      bool a_ok = flushed(a) || !a.fin;
      bool b_ok = flushed(b) || !b.fin;
      if (!a_ok || !b_ok) continue;
      TsoBr r;
      r.tr = p.tr_seq(prefix, pom_par(a.tr, b.tr));
      if (a.fin && b.fin) {
        r.fin = true;
        r.v = v_pair(a.v, b.v);
        r.st = Buffer{};
      } else {
        r.fin = false;
        r.truncated = a.truncated || b.truncated;
      }
      out.push_back(std::move(r));
    }
  }
  sbr_canon(p, out);
  return out;
}

// Execution validity: some linear extension must justify every read, either
// from the latest flushed write to the same location before it, or from
// nothing at all (no flushed write yet).
inline bool tso_valid_execution(const Pomset& pom) {
  auto le = pom_closure(pom);
  std::vector<int> nodes;
  for (size_t i = 0; i < pom.labels.size(); ++i) {
    auto k = pom.labels[i].kind;
    if (k == PomAction::Kind::Read || k == PomAction::Kind::BufWrite)
      nodes.push_back(static_cast<int>(i));
  }
  int n = static_cast<int>(nodes.size());
  if (n > 30) throw std::runtime_error("litmus pomset too large for validity search");
  std::vector<std::uint32_t> preds(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && le[nodes[j]][nodes[i]]) preds[i] |= 1u << j;
  std::set<std::pair<std::uint32_t, std::string>> seen;
  std::function<bool(std::uint32_t, std::map<int, std::uint64_t>)> go =
      [&](std::uint32_t done, std::map<int, std::uint64_t> mem) -> bool {
    if (done == (n == 32 ? ~0u : (1u << n) - 1)) return true;
    std::string key;
    for (auto& [l, v] : mem) key += std::to_string(l) + ":" + std::to_string(v) + ";";
    if (!seen.insert({done, key}).second) return false;
    for (int i = 0; i < n; ++i) {
      if (done & (1u << i)) continue;
      if ((preds[i] & done) != preds[i]) continue;
      const PomAction& a = pom.labels[nodes[i]];
      if (a.kind == PomAction::Kind::Read) {
        auto it = mem.find(a.loc);
        if (it != mem.end() && it->second != a.val) continue;
        if (go(done | (1u << i), mem)) return true;
      } else {
        auto mem2 = mem;
        mem2[a.loc] = a.val;
        if (go(done | (1u << i), std::move(mem2))) return true;
      }
    }
    return false;
  };
  return go(0, {});
}

// ---- litmus harness ----

struct LitmusThread {
  std::string name;
  RegionPtr body;    // |> single exit label
  TyPtr result_ty;
};

struct LitmusOutcome {
  std::vector<ValuePtr> results;  // per thread
  bool operator<(const LitmusOutcome& o) const {
    if (results.size() != o.results.size()) return results.size() < o.results.size();
    for (size_t i = 0; i < results.size(); ++i) {
      int c = value_compare(results[i], o.results[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

// Runs all threads from empty buffers, composes them fork-join style, applies
// the validity post-filter and collects the table of result tuples.
inline std::set<LitmusOutcome> litmus_outcomes(const TsoPolicy& p,
                                               const std::vector<LitmusThread>& threads) {
  std::vector<std::vector<TsoBr>> runs;
  for (auto& th : threads) {
    auto rs = sdenote_region(p, Env{}, Buffer{}, th.body);
    std::vector<TsoBr> vs;
    for (auto& r : rs) {
      TsoBr b;
      b.fin = r.fin;
      if (r.fin) b.v = r.v.v;
      b.st = r.st;
      b.tr = r.tr;
      b.truncated = r.truncated;
      vs.push_back(std::move(b));
    }
    runs.push_back(std::move(vs));
  }
  std::vector<TsoBr> combined;
  if (runs.empty()) return {};
  combined = runs[0];
  if (runs.size() == 1) {
    // single thread: still require a fully flushed final buffer
    std::vector<TsoBr> filtered;
    for (auto& b : combined) {
      if (!b.fin) continue;
      for (auto& post : p.pflush(b.v, b.st)) {
        if (!post.st.empty()) continue;
        TsoBr x = post;
        x.tr = p.tr_seq(b.tr, post.tr);
        filtered.push_back(std::move(x));
      }
    }
    combined = std::move(filtered);
  } else {
    for (size_t i = 1; i < runs.size(); ++i)
      combined = tso_par(p, Buffer{}, combined, runs[i]);
  }
  std::set<LitmusOutcome> table;
  for (auto& b : combined) {
    if (!b.fin) continue;
    if (!tso_valid_execution(b.tr)) continue;
    LitmusOutcome o;
    std::function<void(const ValuePtr&, size_t)> split = [&](const ValuePtr& v, size_t left) {
      if (left == 1) {
        o.results.push_back(v);
        return;
      }
      split(v->a, left - 1);
      o.results.push_back(v->b);
    };
    split(b.v, threads.size());
    table.insert(std::move(o));
  }
  return table;
}

}  // namespace lssa
