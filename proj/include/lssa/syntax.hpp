#pragma once

#include <cassert>
#include <memory>
#include <set>
#include <vector>

#include "lssa/types.hpp"

namespace lssa {

// Terms and regions with de Bruijn indices for variables and labels.
// Index 0 always refers to the most recently bound entry.
//
// Binder counts: Let1 binds 1 variable in its body, Let2 binds 2, each Case
// arm binds 1. A Where with n blocks binds n labels scoped over the head and
// all blocks; block i is the body of label i, and each block binds 1 variable
// (the label's parameter). Inl/Inr carry their full sum type and Abort its
// result type, so inference is syntax-directed.

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Op, Let1, Unit, Pair, Let2, Inl, Inr, Case, Abort };
  Kind kind;
  int var = -1;       // Var
  int op = -1;        // Op: instruction index
  TyPtr ann;          // Inl/Inr: the full sum type; Abort: the result type
  TermPtr a, b, c;    // children (Case: a=scrutinee, b=left arm, c=right arm)
};

inline TermPtr t_var(int i) { return std::make_shared<Term>(Term{Term::Kind::Var, i}); }
inline TermPtr t_op(int f, TermPtr arg) {
  return std::make_shared<Term>(Term{Term::Kind::Op, -1, f, nullptr, std::move(arg)});
}
inline TermPtr t_let1(TermPtr bound, TermPtr body) {
  return std::make_shared<Term>(
      Term{Term::Kind::Let1, -1, -1, nullptr, std::move(bound), std::move(body)});
}
inline TermPtr t_unit() {
  static TermPtr u = std::make_shared<Term>(Term{Term::Kind::Unit});
  return u;
}
inline TermPtr t_pair(TermPtr a, TermPtr b) {
  return std::make_shared<Term>(
      Term{Term::Kind::Pair, -1, -1, nullptr, std::move(a), std::move(b)});
}
inline TermPtr t_let2(TermPtr bound, TermPtr body) {
  return std::make_shared<Term>(
      Term{Term::Kind::Let2, -1, -1, nullptr, std::move(bound), std::move(body)});
}
inline TermPtr t_inl(TermPtr a, TyPtr sum_ty) {
  return std::make_shared<Term>(
      Term{Term::Kind::Inl, -1, -1, std::move(sum_ty), std::move(a)});
}
inline TermPtr t_inr(TermPtr a, TyPtr sum_ty) {
  return std::make_shared<Term>(
      Term{Term::Kind::Inr, -1, -1, std::move(sum_ty), std::move(a)});
}
inline TermPtr t_case(TermPtr scrut, TermPtr l, TermPtr r) {
  return std::make_shared<Term>(Term{Term::Kind::Case, -1, -1, nullptr, std::move(scrut),
                                     std::move(l), std::move(r)});
}
inline TermPtr t_abort(TermPtr a, TyPtr result_ty) {
  return std::make_shared<Term>(
      Term{Term::Kind::Abort, -1, -1, std::move(result_ty), std::move(a)});
}

struct Region;
using RegionPtr = std::shared_ptr<const Region>;

struct Region {
  enum class Kind { Br, Let1, Let2, Case, Where };
  Kind kind;
  int label = -1;                 // Br target
  TermPtr term;                   // Br arg / Let bound / Case scrutinee
  RegionPtr a, b;                 // Let body (a) / Case arms (a, b) / Where head (a)
  std::vector<TyPtr> params;      // Where: parameter type of each block
  std::vector<RegionPtr> blocks;  // Where: block i is the body of label i
};

inline RegionPtr r_br(int label, TermPtr arg) {
  return std::make_shared<Region>(Region{Region::Kind::Br, label, std::move(arg)});
}
inline RegionPtr r_let1(TermPtr bound, RegionPtr body) {
  return std::make_shared<Region>(
      Region{Region::Kind::Let1, -1, std::move(bound), std::move(body)});
}
inline RegionPtr r_let2(TermPtr bound, RegionPtr body) {
  return std::make_shared<Region>(
      Region{Region::Kind::Let2, -1, std::move(bound), std::move(body)});
}
inline RegionPtr r_case(TermPtr scrut, RegionPtr l, RegionPtr r) {
  return std::make_shared<Region>(
      Region{Region::Kind::Case, -1, std::move(scrut), std::move(l), std::move(r)});
}
inline RegionPtr r_where(RegionPtr head, std::vector<TyPtr> params,
                         std::vector<RegionPtr> blocks) {
  assert(params.size() == blocks.size());
  return std::make_shared<Region>(Region{Region::Kind::Where, -1, nullptr, std::move(head),
                                         nullptr, std::move(params), std::move(blocks)});
}

// ---- structural equality ----

inline bool term_equal(const TermPtr& x, const TermPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Term::Kind::Var: return x->var == y->var;
    case Term::Kind::Unit: return true;
    case Term::Kind::Op: return x->op == y->op && term_equal(x->a, y->a);
    case Term::Kind::Let1:
    case Term::Kind::Pair:
    case Term::Kind::Let2: return term_equal(x->a, y->a) && term_equal(x->b, y->b);
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort: return ty_equal(x->ann, y->ann) && term_equal(x->a, y->a);
    case Term::Kind::Case:
      return term_equal(x->a, y->a) && term_equal(x->b, y->b) && term_equal(x->c, y->c);
  }
  return false;
}

inline bool region_equal(const RegionPtr& x, const RegionPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Region::Kind::Br: return x->label == y->label && term_equal(x->term, y->term);
    case Region::Kind::Let1:
    case Region::Kind::Let2: return term_equal(x->term, y->term) && region_equal(x->a, y->a);
    case Region::Kind::Case:
      return term_equal(x->term, y->term) && region_equal(x->a, y->a) &&
             region_equal(x->b, y->b);
    case Region::Kind::Where: {
      if (x->blocks.size() != y->blocks.size()) return false;
      if (!region_equal(x->a, y->a)) return false;
      for (size_t i = 0; i < x->blocks.size(); ++i) {
        if (!ty_equal(x->params[i], y->params[i])) return false;
        if (!region_equal(x->blocks[i], y->blocks[i])) return false;
      }
      return true;
    }
  }
  return false;
}

// ---- shifting ----

// Adds `by` to every free variable index >= cutoff.
inline TermPtr shift_term(const TermPtr& t, int by, int cutoff = 0) {
  if (by == 0) return t;
  switch (t->kind) {
    case Term::Kind::Var:
      return t->var >= cutoff ? t_var(t->var + by) : t;
    case Term::Kind::Unit: return t;
    case Term::Kind::Op: return t_op(t->op, shift_term(t->a, by, cutoff));
    case Term::Kind::Let1:
      return t_let1(shift_term(t->a, by, cutoff), shift_term(t->b, by, cutoff + 1));
    case Term::Kind::Pair:
      return t_pair(shift_term(t->a, by, cutoff), shift_term(t->b, by, cutoff));
    case Term::Kind::Let2:
      return t_let2(shift_term(t->a, by, cutoff), shift_term(t->b, by, cutoff + 2));
    case Term::Kind::Inl: return t_inl(shift_term(t->a, by, cutoff), t->ann);
    case Term::Kind::Inr: return t_inr(shift_term(t->a, by, cutoff), t->ann);
    case Term::Kind::Abort: return t_abort(shift_term(t->a, by, cutoff), t->ann);
    case Term::Kind::Case:
      return t_case(shift_term(t->a, by, cutoff), shift_term(t->b, by, cutoff + 1),
                    shift_term(t->c, by, cutoff + 1));
  }
  return t;
}

inline RegionPtr shift_region_vars(const RegionPtr& r, int by, int cutoff = 0) {
  if (by == 0) return r;
  switch (r->kind) {
    case Region::Kind::Br: return r_br(r->label, shift_term(r->term, by, cutoff));
    case Region::Kind::Let1:
      return r_let1(shift_term(r->term, by, cutoff), shift_region_vars(r->a, by, cutoff + 1));
    case Region::Kind::Let2:
      return r_let2(shift_term(r->term, by, cutoff), shift_region_vars(r->a, by, cutoff + 2));
    case Region::Kind::Case:
      return r_case(shift_term(r->term, by, cutoff), shift_region_vars(r->a, by, cutoff + 1),
                    shift_region_vars(r->b, by, cutoff + 1));
    case Region::Kind::Where: {
      std::vector<RegionPtr> bs;
      bs.reserve(r->blocks.size());
      for (auto& blk : r->blocks) bs.push_back(shift_region_vars(blk, by, cutoff + 1));
      return r_where(shift_region_vars(r->a, by, cutoff), r->params, std::move(bs));
    }
  }
  return r;
}

// Adds `by` to every free label index >= cutoff.
inline RegionPtr shift_region_labels(const RegionPtr& r, int by, int cutoff = 0) {
  if (by == 0) return r;
  switch (r->kind) {
    case Region::Kind::Br:
      return r->label >= cutoff ? r_br(r->label + by, r->term) : r;
    case Region::Kind::Let1: return r_let1(r->term, shift_region_labels(r->a, by, cutoff));
    case Region::Kind::Let2: return r_let2(r->term, shift_region_labels(r->a, by, cutoff));
    case Region::Kind::Case:
      return r_case(r->term, shift_region_labels(r->a, by, cutoff),
                    shift_region_labels(r->b, by, cutoff));
    case Region::Kind::Where: {
      int n = static_cast<int>(r->blocks.size());
      std::vector<RegionPtr> bs;
      bs.reserve(n);
      for (auto& blk : r->blocks) bs.push_back(shift_region_labels(blk, by, cutoff + n));
      return r_where(shift_region_labels(r->a, by, cutoff + n), r->params, std::move(bs));
    }
  }
  return r;
}

// Applies an arbitrary relabeling to the free labels >= cutoff; map(i) receives
// the index relative to the outside of the region (i.e. already un-cutoff).
template <class F>
RegionPtr map_region_labels(const RegionPtr& r, F&& map, int cutoff = 0) {
  switch (r->kind) {
    case Region::Kind::Br:
      return r->label >= cutoff ? r_br(map(r->label - cutoff) + cutoff, r->term) : r;
    case Region::Kind::Let1: return r_let1(r->term, map_region_labels(r->a, map, cutoff));
    case Region::Kind::Let2: return r_let2(r->term, map_region_labels(r->a, map, cutoff));
    case Region::Kind::Case:
      return r_case(r->term, map_region_labels(r->a, map, cutoff),
                    map_region_labels(r->b, map, cutoff));
    case Region::Kind::Where: {
      int n = static_cast<int>(r->blocks.size());
      std::vector<RegionPtr> bs;
      bs.reserve(n);
      for (auto& blk : r->blocks) bs.push_back(map_region_labels(blk, map, cutoff + n));
      return r_where(map_region_labels(r->a, map, cutoff + n), r->params, std::move(bs));
    }
  }
  return r;
}

// ---- free variables and labels ----

inline void free_vars_term(const TermPtr& t, int depth, std::set<int>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->var >= depth) out.insert(t->var - depth);
      return;
    case Term::Kind::Unit: return;
    case Term::Kind::Op:
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::Abort: free_vars_term(t->a, depth, out); return;
    case Term::Kind::Pair:
      free_vars_term(t->a, depth, out);
      free_vars_term(t->b, depth, out);
      return;
    case Term::Kind::Let1:
      free_vars_term(t->a, depth, out);
      free_vars_term(t->b, depth + 1, out);
      return;
    case Term::Kind::Let2:
      free_vars_term(t->a, depth, out);
      free_vars_term(t->b, depth + 2, out);
      return;
    case Term::Kind::Case:
      free_vars_term(t->a, depth, out);
      free_vars_term(t->b, depth + 1, out);
      free_vars_term(t->c, depth + 1, out);
      return;
  }
}

inline std::set<int> free_vars(const TermPtr& t) {
  std::set<int> out;
  free_vars_term(t, 0, out);
  return out;
}

inline void free_vars_region(const RegionPtr& r, int depth, std::set<int>& out) {
  switch (r->kind) {
    case Region::Kind::Br: free_vars_term(r->term, depth, out); return;
    case Region::Kind::Let1:
      free_vars_term(r->term, depth, out);
      free_vars_region(r->a, depth + 1, out);
      return;
    case Region::Kind::Let2:
      free_vars_term(r->term, depth, out);
      free_vars_region(r->a, depth + 2, out);
      return;
    case Region::Kind::Case:
      free_vars_term(r->term, depth, out);
      free_vars_region(r->a, depth + 1, out);
      free_vars_region(r->b, depth + 1, out);
      return;
    case Region::Kind::Where:
      free_vars_region(r->a, depth, out);
      for (auto& blk : r->blocks) free_vars_region(blk, depth + 1, out);
      return;
  }
}

inline std::set<int> free_vars(const RegionPtr& r) {
  std::set<int> out;
  free_vars_region(r, 0, out);
  return out;
}

inline void free_labels_region(const RegionPtr& r, int depth, std::set<int>& out) {
  switch (r->kind) {
    case Region::Kind::Br:
      if (r->label >= depth) out.insert(r->label - depth);
      return;
    case Region::Kind::Let1:
    case Region::Kind::Let2: free_labels_region(r->a, depth, out); return;
    case Region::Kind::Case:
      free_labels_region(r->a, depth, out);
      free_labels_region(r->b, depth, out);
      return;
    case Region::Kind::Where: {
      int n = static_cast<int>(r->blocks.size());
      free_labels_region(r->a, depth + n, out);
      for (auto& blk : r->blocks) free_labels_region(blk, depth + n, out);
      return;
    }
  }
}

inline std::set<int> free_labels(const RegionPtr& r) {
  std::set<int> out;
  free_labels_region(r, 0, out);
  return out;
}

}  // namespace lssa
