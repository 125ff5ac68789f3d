#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/signature.hpp"
#include "lssa/types.hpp"

namespace lssa {

// First-order runtime values. Empty has no values.
struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Value {
  enum class Kind { Unit, Pair, Inl, Inr, Base };
  Kind kind;
  int base = -1;         // Base: base type index
  std::uint64_t n = 0;   // Base: carrier element
  ValuePtr a, b;
};

inline ValuePtr v_unit() {
  static ValuePtr u = std::make_shared<Value>(Value{Value::Kind::Unit});
  return u;
}
inline ValuePtr v_pair(ValuePtr a, ValuePtr b) {
  return std::make_shared<Value>(Value{Value::Kind::Pair, -1, 0, std::move(a), std::move(b)});
}
inline ValuePtr v_inl(ValuePtr a) {
  return std::make_shared<Value>(Value{Value::Kind::Inl, -1, 0, std::move(a)});
}
inline ValuePtr v_inr(ValuePtr a) {
  return std::make_shared<Value>(Value{Value::Kind::Inr, -1, 0, std::move(a)});
}
inline ValuePtr v_base(int base, std::uint64_t n) {
  return std::make_shared<Value>(Value{Value::Kind::Base, base, n});
}
inline ValuePtr v_bool(bool b) { return b ? v_inl(v_unit()) : v_inr(v_unit()); }

inline int value_compare(const ValuePtr& x, const ValuePtr& y) {
  if (x == y) return 0;
  if (static_cast<int>(x->kind) != static_cast<int>(y->kind))
    return static_cast<int>(x->kind) < static_cast<int>(y->kind) ? -1 : 1;
  switch (x->kind) {
    case Value::Kind::Unit: return 0;
    case Value::Kind::Base:
      if (x->base != y->base) return x->base < y->base ? -1 : 1;
      return x->n < y->n ? -1 : (x->n > y->n ? 1 : 0);
    case Value::Kind::Inl:
    case Value::Kind::Inr: return value_compare(x->a, y->a);
    case Value::Kind::Pair: {
      int c = value_compare(x->a, y->a);
      return c != 0 ? c : value_compare(x->b, y->b);
    }
  }
  return 0;
}

inline bool value_equal(const ValuePtr& x, const ValuePtr& y) {
  return value_compare(x, y) == 0;
}

inline std::string value_str(const Signature& sig, const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Unit: return "()";
    case Value::Kind::Base: return std::to_string(v->n);
    case Value::Kind::Inl: return "inl " + value_str(sig, v->a);
    case Value::Kind::Inr: return "inr " + value_str(sig, v->a);
    case Value::Kind::Pair:
      return "(" + value_str(sig, v->a) + ", " + value_str(sig, v->b) + ")";
  }
  return "?";
}

// Exit of a region: which label it branched to, with the argument value.
struct Outcome {
  int label;
  ValuePtr v;
};

inline int outcome_compare(const Outcome& x, const Outcome& y) {
  if (x.label != y.label) return x.label < y.label ? -1 : 1;
  return value_compare(x.v, y.v);
}

inline bool operator<(const Outcome& x, const Outcome& y) { return outcome_compare(x, y) < 0; }
inline bool operator==(const Outcome& x, const Outcome& y) { return outcome_compare(x, y) == 0; }

struct EnumBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All values of a type, deterministically ordered. Throws EnumBudgetExceeded
// if the carrier is larger than `budget`.
inline std::vector<ValuePtr> enumerate_values(const Signature& sig, const TyPtr& ty,
                                              std::uint64_t budget = 1u << 20) {
  switch (ty->kind) {
    case Ty::Kind::Empty: return {};
    case Ty::Kind::Unit: return {v_unit()};
    case Ty::Kind::Base: {
      std::uint64_t n = sig.bases[ty->base].carrier;
      if (n > budget) throw EnumBudgetExceeded("base carrier exceeds enumeration budget");
      std::vector<ValuePtr> out;
      out.reserve(n);
      for (std::uint64_t i = 0; i < n; ++i) out.push_back(v_base(ty->base, i));
      return out;
    }
    case Ty::Kind::Sum: {
      auto ls = enumerate_values(sig, ty->a, budget);
      auto rs = enumerate_values(sig, ty->b, budget);
      if (ls.size() + rs.size() > budget)
        throw EnumBudgetExceeded("sum carrier exceeds enumeration budget");
      std::vector<ValuePtr> out;
      out.reserve(ls.size() + rs.size());
      for (auto& v : ls) out.push_back(v_inl(v));
      for (auto& v : rs) out.push_back(v_inr(v));
      return out;
    }
    case Ty::Kind::Prod: {
      auto ls = enumerate_values(sig, ty->a, budget);
      auto rs = enumerate_values(sig, ty->b, budget);
      if (!ls.empty() && ls.size() * rs.size() > budget)
        throw EnumBudgetExceeded("product carrier exceeds enumeration budget");
      std::vector<ValuePtr> out;
      out.reserve(ls.size() * rs.size());
      for (auto& l : ls)
        for (auto& r : rs) out.push_back(v_pair(l, r));
      return out;
    }
  }
  return {};
}

using Env = std::vector<ValuePtr>;  // env[i] pairs with ctx entry i (outermost first)

// Looks up a de Bruijn index in an environment laid out like a Ctx.
inline const ValuePtr& env_lookup(const Env& env, int i) {
  if (i < 0 || i >= static_cast<int>(env.size()))
    throw std::out_of_range("environment lookup out of range");
  return env[env.size() - 1 - i];
}

inline Env env_push(Env env, ValuePtr v) {
  env.push_back(std::move(v));
  return env;
}

}  // namespace lssa
