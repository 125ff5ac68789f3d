#pragma once

#include <cassert>
#include <memory>
#include <string>

namespace lssa {

// First-order types: base types, unit, empty, binary products and sums.
// Immutable trees shared by pointer; equality is structural.
struct Ty;
using TyPtr = std::shared_ptr<const Ty>;

struct Ty {
  enum class Kind { Base, Unit, Empty, Prod, Sum };
  Kind kind;
  int base = -1;  // index into Signature::bases
  TyPtr a, b;
};

inline TyPtr ty_base(int idx) {
  return std::make_shared<Ty>(Ty{Ty::Kind::Base, idx, nullptr, nullptr});
}
inline TyPtr ty_unit() {
  static TyPtr u = std::make_shared<Ty>(Ty{Ty::Kind::Unit, -1, nullptr, nullptr});
  return u;
}
inline TyPtr ty_empty() {
  static TyPtr e = std::make_shared<Ty>(Ty{Ty::Kind::Empty, -1, nullptr, nullptr});
  return e;
}
inline TyPtr ty_prod(TyPtr a, TyPtr b) {
  return std::make_shared<Ty>(Ty{Ty::Kind::Prod, -1, std::move(a), std::move(b)});
}
inline TyPtr ty_sum(TyPtr a, TyPtr b) {
  return std::make_shared<Ty>(Ty{Ty::Kind::Sum, -1, std::move(a), std::move(b)});
}
inline TyPtr ty_bool() { return ty_sum(ty_unit(), ty_unit()); }

inline bool ty_equal(const TyPtr& x, const TyPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Ty::Kind::Base: return x->base == y->base;
    case Ty::Kind::Unit:
    case Ty::Kind::Empty: return true;
    case Ty::Kind::Prod:
    case Ty::Kind::Sum: return ty_equal(x->a, y->a) && ty_equal(x->b, y->b);
  }
  return false;
}

// Total order on types, used for canonical sets and map keys.
inline int ty_compare(const TyPtr& x, const TyPtr& y) {
  if (x == y) return 0;
  if (static_cast<int>(x->kind) != static_cast<int>(y->kind))
    return static_cast<int>(x->kind) < static_cast<int>(y->kind) ? -1 : 1;
  switch (x->kind) {
    case Ty::Kind::Base: return x->base < y->base ? -1 : (x->base > y->base ? 1 : 0);
    case Ty::Kind::Unit:
    case Ty::Kind::Empty: return 0;
    case Ty::Kind::Prod:
    case Ty::Kind::Sum: {
      int c = ty_compare(x->a, y->a);
      return c != 0 ? c : ty_compare(x->b, y->b);
    }
  }
  return 0;
}

}  // namespace lssa
