#pragma once

#include <string>
#include <vector>

#include "lssa/signature.hpp"
#include "lssa/syntax.hpp"

namespace lssa {

// Deterministic pretty-printer. Binders are named by depth (v0, v1, ...), so
// printing is stable across runs and parse(print(x)) == x structurally.

namespace print_detail {

struct Printer {
  const Signature* sig;
  std::vector<std::string> vnames;  // outermost first
  std::vector<std::string> lnames;

  std::string var(int i) const {
    int idx = static_cast<int>(vnames.size()) - 1 - i;
    if (idx < 0) return "?v" + std::to_string(i);
    return vnames[idx];
  }
  std::string label(int i) const {
    int idx = static_cast<int>(lnames.size()) - 1 - i;
    if (idx < 0) return "?l" + std::to_string(i);
    return lnames[idx];
  }
  std::string fresh_var() { return "v" + std::to_string(vnames.size()); }
  std::string fresh_label() { return "L" + std::to_string(lnames.size()); }

  std::string ty(const TyPtr& t, int prec = 0) const {
    // prec 0: sums, 1: products, 2: atoms
    switch (t->kind) {
      case Ty::Kind::Unit: return "1";
      case Ty::Kind::Empty: return "0";
      case Ty::Kind::Base: return sig->bases[t->base].name;
      case Ty::Kind::Prod: {
        std::string s = ty(t->a, 2) + " * " + ty(t->b, 2);
        return prec >= 2 ? "(" + s + ")" : s;
      }
      case Ty::Kind::Sum: {
        std::string s = ty(t->a, 1) + " + " + ty(t->b, 1);
        return prec >= 1 ? "(" + s + ")" : s;
      }
    }
    return "?";
  }

  // prec 0: let/case; 1: application arguments (atoms)
  std::string term(const TermPtr& t, int prec) {
    switch (t->kind) {
      case Term::Kind::Var: return var(t->var);
      case Term::Kind::Unit: return "()";
      case Term::Kind::Pair: {
        std::string s = "(" + term(t->a, 0) + ", " + term(t->b, 0) + ")";
        return s;
      }
      case Term::Kind::Op: {
        const std::string& n = sig->instrs[t->op].name;
        if (!n.empty() && n[0] == '#') {
          // literal instruction: print the number back
          return n.substr(n.find(':') + 1);
        }
        std::string s = n + " " + term(t->a, 1);
        return prec >= 1 ? "(" + s + ")" : s;
      }
      case Term::Kind::Inl:
      case Term::Kind::Inr: {
        std::string k = t->kind == Term::Kind::Inl ? "inl" : "inr";
        std::string s = k + "[" + ty(t->ann) + "] " + term(t->a, 1);
        return prec >= 1 ? "(" + s + ")" : s;
      }
      case Term::Kind::Abort: {
        std::string s = "abort[" + ty(t->ann) + "] " + term(t->a, 1);
        return prec >= 1 ? "(" + s + ")" : s;
      }
      case Term::Kind::Let1: {
        std::string x = fresh_var();
        std::string bound = term(t->a, 0);
        vnames.push_back(x);
        std::string body = term(t->b, 0);
        vnames.pop_back();
        std::string s = "let " + x + " = " + bound + "; " + body;
        return prec >= 1 ? "(" + s + ")" : s;
      }
      case Term::Kind::Let2: {
        std::string x = fresh_var();
        std::string y = "v" + std::to_string(vnames.size() + 1);
        std::string bound = term(t->a, 0);
        vnames.push_back(x);
        vnames.push_back(y);
        std::string body = term(t->b, 0);
        vnames.pop_back();
        vnames.pop_back();
        std::string s = "let (" + x + ", " + y + ") = " + bound + "; " + body;
        return prec >= 1 ? "(" + s + ")" : s;
      }
      case Term::Kind::Case: {
        std::string scrut = term(t->a, 0);
        std::string x = fresh_var();
        vnames.push_back(x);
        std::string l = term(t->b, 0);
        vnames.pop_back();
        vnames.push_back(x);
        std::string r = term(t->c, 0);
        vnames.pop_back();
        std::string s = "case " + scrut + " { inl " + x + " => " + l + ", inr " + x +
                        " => " + r + " }";
        return prec >= 1 ? "(" + s + ")" : s;
      }
    }
    return "?";
  }

  std::string indent(int d) const { return std::string(2 * d, ' '); }

  std::string region(const RegionPtr& r, int d) {
    switch (r->kind) {
      case Region::Kind::Br:
        return indent(d) + "br " + label(r->label) + " " + term(r->term, 1);
      case Region::Kind::Let1: {
        std::string x = fresh_var();
        std::string bound = term(r->term, 0);
        vnames.push_back(x);
        std::string body = region(r->a, d);
        vnames.pop_back();
        return indent(d) + "let " + x + " = " + bound + ";\n" + body;
      }
      case Region::Kind::Let2: {
        std::string x = fresh_var();
        std::string y = "v" + std::to_string(vnames.size() + 1);
        std::string bound = term(r->term, 0);
        vnames.push_back(x);
        vnames.push_back(y);
        std::string body = region(r->a, d);
        vnames.pop_back();
        vnames.pop_back();
        return indent(d) + "let (" + x + ", " + y + ") = " + bound + ";\n" + body;
      }
      case Region::Kind::Case: {
        std::string scrut = term(r->term, 0);
        std::string x = fresh_var();
        vnames.push_back(x);
        std::string l = region(r->a, d + 1);
        vnames.pop_back();
        vnames.push_back(x);
        std::string rr = region(r->b, d + 1);
        vnames.pop_back();
        return indent(d) + "case " + scrut + " {\n" + indent(d + 1) + "inl " + x +
               " =>\n" + l + ",\n" + indent(d + 1) + "inr " + x + " =>\n" + rr + "\n" +
               indent(d) + "}";
      }
      case Region::Kind::Where: {
        int n = static_cast<int>(r->blocks.size());
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i)
          names.push_back("L" + std::to_string(lnames.size() + n - 1 - i));
        // label i is blocks[i]; entries pushed outermost-last-first
        for (int i = n - 1; i >= 0; --i) lnames.push_back(names[i]);
        std::string head = region(r->a, d + 1);
        std::string s = indent(d) + "{\n" + head + "\n" + indent(d) + "} where {";
        for (int i = 0; i < n; ++i) {
          std::string x = fresh_var();
          vnames.push_back(x);
          std::string body = region(r->blocks[i], d + 2);
          vnames.pop_back();
          s += std::string(i > 0 ? "," : "") + "\n" + indent(d + 1) + names[i] + "(" + x +
               ": " + ty(r->params[i]) + "): {\n" + body + "\n" + indent(d + 1) + "}";
        }
        for (int i = 0; i < n; ++i) lnames.pop_back();
        s += "\n" + indent(d) + "}";
        return s;
      }
    }
    return "?";
  }
};

}  // namespace print_detail

inline std::string print_ty(const Signature& sig, const TyPtr& t) {
  print_detail::Printer p{&sig, {}, {}};
  return p.ty(t);
}

inline std::string print_term(const Signature& sig, const TermPtr& t,
                              std::vector<std::string> ctx_names = {}) {
  print_detail::Printer p{&sig, std::move(ctx_names), {}};
  return p.term(t, 0);
}

inline std::string print_region(const Signature& sig, const RegionPtr& r,
                                std::vector<std::string> ctx_names = {},
                                std::vector<std::string> label_names = {}, int indent = 1) {
  print_detail::Printer p{&sig, std::move(ctx_names), std::move(label_names)};
  return p.region(r, indent);
}

}  // namespace lssa
