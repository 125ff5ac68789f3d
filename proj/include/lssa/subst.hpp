#pragma once

#include <stdexcept>
#include <vector>

#include "lssa/syntax.hpp"
#include "lssa/typing.hpp"

namespace lssa {

// Capture-avoiding substitution over de Bruijn indices. Binders lift the
// substitution instead of alpha-converting: under one new binder the
// replacement for variable 0 is Var 0 and every gamma entry shifts up.

inline Subst subst_id(int n) {
  Subst g;
  g.reserve(n);
  for (int i = 0; i < n; ++i) g.push_back(t_var(i));
  return g;
}

// Appends n identity entries at the low-index end (newly bound variables).
inline Subst subst_extend_right(const Subst& gamma, int n) {
  Subst g;
  g.reserve(gamma.size() + n);
  for (int i = 0; i < n; ++i) g.push_back(t_var(i));
  for (auto& t : gamma) g.push_back(shift_term(t, n));
  return g;
}

// Appends n identity entries at the high-index end; src_len is the length of
// the source context gamma maps from.
inline Subst subst_extend_left(const Subst& gamma, int n, int src_len) {
  Subst g = gamma;
  for (int i = 0; i < n; ++i) g.push_back(t_var(src_len + i));
  return g;
}

inline TermPtr subst_term(const Subst& gamma, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->var < 0 || t->var >= static_cast<int>(gamma.size()))
        throw std::out_of_range("substitution does not cover free variable");
      return gamma[t->var];
    case Term::Kind::Unit: return t;
    case Term::Kind::Op: return t_op(t->op, subst_term(gamma, t->a));
    case Term::Kind::Let1:
      return t_let1(subst_term(gamma, t->a), subst_term(subst_extend_right(gamma, 1), t->b));
    case Term::Kind::Pair: return t_pair(subst_term(gamma, t->a), subst_term(gamma, t->b));
    case Term::Kind::Let2:
      return t_let2(subst_term(gamma, t->a), subst_term(subst_extend_right(gamma, 2), t->b));
    case Term::Kind::Inl: return t_inl(subst_term(gamma, t->a), t->ann);
    case Term::Kind::Inr: return t_inr(subst_term(gamma, t->a), t->ann);
    case Term::Kind::Abort: return t_abort(subst_term(gamma, t->a), t->ann);
    case Term::Kind::Case: {
      Subst g1 = subst_extend_right(gamma, 1);
      return t_case(subst_term(gamma, t->a), subst_term(g1, t->b), subst_term(g1, t->c));
    }
  }
  throw std::logic_error("malformed term");
}

inline RegionPtr subst_region(const Subst& gamma, const RegionPtr& r) {
  switch (r->kind) {
    case Region::Kind::Br: return r_br(r->label, subst_term(gamma, r->term));
    case Region::Kind::Let1:
      return r_let1(subst_term(gamma, r->term),
                    subst_region(subst_extend_right(gamma, 1), r->a));
    case Region::Kind::Let2:
      return r_let2(subst_term(gamma, r->term),
                    subst_region(subst_extend_right(gamma, 2), r->a));
    case Region::Kind::Case: {
      Subst g1 = subst_extend_right(gamma, 1);
      return r_case(subst_term(gamma, r->term), subst_region(g1, r->a),
                    subst_region(g1, r->b));
    }
    case Region::Kind::Where: {
      Subst g1 = subst_extend_right(gamma, 1);
      std::vector<RegionPtr> bs;
      bs.reserve(r->blocks.size());
      for (auto& blk : r->blocks) bs.push_back(subst_region(g1, blk));
      return r_where(subst_region(gamma, r->a), r->params, std::move(bs));
    }
  }
  throw std::logic_error("malformed region");
}

// Pointwise composition [g1](g2).
inline Subst subst_compose(const Subst& g1, const Subst& g2) {
  Subst out;
  out.reserve(g2.size());
  for (auto& t : g2) out.push_back(subst_term(g1, t));
  return out;
}

// Single substitution [a/x] for the innermost variable.
inline Subst subst_single(const TermPtr& a, int rest) {
  Subst g;
  g.push_back(a);
  for (int i = 0; i < rest; ++i) g.push_back(t_var(i));
  return g;
}

// [a/0]t where t has free variables 0..n; the remaining indices shift down.
inline TermPtr subst_beta_term(const TermPtr& body, const TermPtr& a) {
  int max_free = -1;
  for (int v : free_vars(body)) max_free = std::max(max_free, v);
  return subst_term(subst_single(a, max_free), body);
}

inline RegionPtr subst_beta_region(const RegionPtr& body, const TermPtr& a) {
  int max_free = -1;
  for (int v : free_vars(body)) max_free = std::max(max_free, v);
  return subst_region(subst_single(a, max_free), body);
}

// ---- label substitution ----

inline LabelSubst lsubst_id(int n) {
  LabelSubst s;
  s.reserve(n);
  for (int i = 0; i < n; ++i) s.push_back(r_br(i, t_var(0)));
  return s;
}

// Lifts sigma under m new label binders: the bound labels map to themselves
// and every body's free labels shift up by m.
inline LabelSubst lsubst_extend_right(const LabelSubst& sigma, int m) {
  LabelSubst s;
  s.reserve(sigma.size() + m);
  for (int i = 0; i < m; ++i) s.push_back(r_br(i, t_var(0)));
  for (auto& body : sigma) s.push_back(shift_region_labels(body, m));
  return s;
}

// Appends m identity entries at the high-index end; src_labels is the number
// of labels in sigma's target context.
inline LabelSubst lsubst_extend_left(const LabelSubst& sigma, int m, int tgt_labels) {
  LabelSubst s = sigma;
  for (int i = 0; i < m; ++i) s.push_back(r_br(tgt_labels + i, t_var(0)));
  return s;
}

// Lifts sigma's bodies over k new variable binders (each body already binds
// its parameter, hence cutoff 1).
inline LabelSubst lsubst_shift_vars(const LabelSubst& sigma, int k) {
  LabelSubst s;
  s.reserve(sigma.size());
  for (auto& body : sigma) s.push_back(shift_region_vars(body, k, 1));
  return s;
}

inline RegionPtr lsubst_region(const LabelSubst& sigma, const RegionPtr& r) {
  switch (r->kind) {
    case Region::Kind::Br: {
      if (r->label < 0 || r->label >= static_cast<int>(sigma.size()))
        throw std::out_of_range("label substitution does not cover free label");
      // [sigma](br l a) = [a/x] sigma_l
      return subst_beta_region(sigma[r->label], r->term);
    }
    case Region::Kind::Let1:
      return r_let1(r->term, lsubst_region(lsubst_shift_vars(sigma, 1), r->a));
    case Region::Kind::Let2:
      return r_let2(r->term, lsubst_region(lsubst_shift_vars(sigma, 2), r->a));
    case Region::Kind::Case: {
      LabelSubst s1 = lsubst_shift_vars(sigma, 1);
      return r_case(r->term, lsubst_region(s1, r->a), lsubst_region(s1, r->b));
    }
    case Region::Kind::Where: {
      int m = static_cast<int>(r->blocks.size());
      LabelSubst s = lsubst_extend_right(sigma, m);
      LabelSubst sv = lsubst_shift_vars(s, 1);
      std::vector<RegionPtr> bs;
      bs.reserve(m);
      for (auto& blk : r->blocks) bs.push_back(lsubst_region(sv, blk));
      return r_where(lsubst_region(s, r->a), r->params, std::move(bs));
    }
  }
  throw std::logic_error("malformed region");
}

// Pointwise composition [s1]s2.
inline LabelSubst lsubst_compose(const LabelSubst& s1, const LabelSubst& s2) {
  LabelSubst s1v = lsubst_shift_vars(s1, 1);
  LabelSubst out;
  out.reserve(s2.size());
  for (auto& body : s2) out.push_back(lsubst_region(s1v, body));
  return out;
}

// Applies a variable substitution to every body of a label substitution.
inline LabelSubst lsubst_apply_subst(const Subst& gamma, const LabelSubst& sigma) {
  Subst g1 = subst_extend_right(gamma, 1);
  LabelSubst out;
  out.reserve(sigma.size());
  for (auto& body : sigma) out.push_back(subst_region(g1, body));
  return out;
}

}  // namespace lssa
