#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/signature.hpp"
#include "lssa/value.hpp"

namespace lssa {

// Declarative meaning of an instruction, shared between models. Each model
// supports a subset of behaviors and rejects the rest up front.
struct Behavior {
  enum class Kind {
    Pure,       // deterministic function of the argument
    Nondet,     // any value of the codomain (powerset-like models only)
    Print,      // emit the rendered argument as a trace event
    TsoRead,    // TSO read from location `loc`
    TsoWrite,   // TSO buffered write to location `loc`
    TsoFence,   // flush the whole buffer
    HeapSet,
    HeapGet,
    HeapAlloc,
    HeapFree,
  };
  Kind kind = Kind::Pure;
  std::function<ValuePtr(const ValuePtr&)> fn;  // Pure
  int loc = -1;                                 // TsoRead / TsoWrite
};

struct Interp {
  std::vector<Behavior> by_instr;  // parallel to Signature::instrs

  const Behavior& of(int instr) const {
    if (instr < 0 || instr >= static_cast<int>(by_instr.size()))
      throw std::out_of_range("no interpretation for instruction");
    return by_instr[instr];
  }
};

// ---- builtin word arithmetic ----

inline std::uint64_t word_of(const ValuePtr& v) {
  if (v->kind != Value::Kind::Base) throw std::logic_error("expected base value");
  return v->n;
}

inline Behavior pure_fn(std::function<ValuePtr(const ValuePtr&)> f) {
  Behavior b;
  b.kind = Behavior::Kind::Pure;
  b.fn = std::move(f);
  return b;
}

// Registers add/sub/mul/lt/eq over a base type, wrapping modulo its carrier.
inline void add_word_arith(Signature& sig, Interp& interp, int base) {
  std::uint64_t mod = sig.bases[base].carrier;
  TyPtr w = ty_base(base);
  TyPtr ww = ty_prod(w, w);
  auto bin = [base, mod](std::function<std::uint64_t(std::uint64_t, std::uint64_t)> f) {
    return pure_fn([base, mod, f](const ValuePtr& v) {
      std::uint64_t r = f(word_of(v->a), word_of(v->b));
      return v_base(base, mod == 0 ? r : r % mod);
    });
  };
  auto cmp = [](std::function<bool(std::uint64_t, std::uint64_t)> f) {
    return pure_fn([f](const ValuePtr& v) { return v_bool(f(word_of(v->a), word_of(v->b))); });
  };
  auto add_one = [&](const std::string& name, TyPtr dom, TyPtr cod, Behavior b) {
    sig.add_instr(name, std::move(dom), std::move(cod));
    interp.by_instr.push_back(std::move(b));
  };
  std::string p = sig.bases[base].name;
  add_one("add", ww, w, bin([](std::uint64_t a, std::uint64_t b) { return a + b; }));
  add_one("sub", ww, w, bin([](std::uint64_t a, std::uint64_t b) { return a - b; }));
  add_one("mul", ww, w, bin([](std::uint64_t a, std::uint64_t b) { return a * b; }));
  add_one("lt", ww, ty_bool(), cmp([](std::uint64_t a, std::uint64_t b) { return a < b; }));
  add_one("le", ww, ty_bool(), cmp([](std::uint64_t a, std::uint64_t b) { return a <= b; }));
  add_one("eq", ww, ty_bool(), cmp([](std::uint64_t a, std::uint64_t b) { return a == b; }));
}

// Literal instructions are registered on demand: `lit` of value k at a base
// type is a pure instruction 1 -> base.
inline int add_literal(Signature& sig, Interp& interp, int base, std::uint64_t k) {
  std::string name = "#" + sig.bases[base].name + ":" + std::to_string(k);
  if (auto idx = sig.instr_index(name)) return *idx;
  std::uint64_t mod = sig.bases[base].carrier;
  int idx = sig.add_instr(name, ty_unit(), ty_base(base));
  interp.by_instr.push_back(pure_fn(
      [base, mod, k](const ValuePtr&) { return v_base(base, mod == 0 ? k : k % mod); }));
  return idx;
}

}  // namespace lssa
