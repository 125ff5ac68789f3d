#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssa/source.hpp"
#include "lssa/typing.hpp"

namespace lssa {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
        line(l),
        col(c) {}
};

namespace parse_detail {

struct Token {
  enum class Kind { Ident, Int, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  std::uint64_t num = 0;
  int line = 1, col = 1;
};

struct Lexer {
  std::string src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token cur;

  explicit Lexer(std::string s) : src(std::move(s)) { advance(); }

  void bump(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_space() {
    while (pos < src.size()) {
      if (isspace(static_cast<unsigned char>(src[pos]))) {
        bump(src[pos]);
      } else if (src[pos] == '-' && pos + 1 < src.size() && src[pos + 1] == '-') {
        while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_space();
    cur = Token{};
    cur.line = line;
    cur.col = col;
    if (pos >= src.size()) {
      cur.kind = Token::Kind::End;
      return;
    }
    char c = src[pos];
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (pos < src.size() &&
             (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
              src[pos] == '.' || src[pos] == '\'')) {
        s += src[pos];
        bump(src[pos]);
      }
      cur.kind = Token::Kind::Ident;
      cur.text = s;
      return;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t n = 0;
      std::string s;
      while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) {
        n = n * 10 + static_cast<std::uint64_t>(src[pos] - '0');
        s += src[pos];
        bump(src[pos]);
      }
      cur.kind = Token::Kind::Int;
      cur.num = n;
      cur.text = s;
      return;
    }
    // multi-char symbols
    static const char* two[] = {"->", "=>", "<=", "==", "&&", "!="};
    for (auto* t : two) {
      if (src.compare(pos, 2, t) == 0) {
        cur.kind = Token::Kind::Sym;
        cur.text = t;
        bump(src[pos]);
        bump(src[pos]);
        return;
      }
    }
    cur.kind = Token::Kind::Sym;
    cur.text = std::string(1, c);
    bump(c);
  }
};

struct Parser {
  Lexer lx;
  SourceUnit unit;
  std::vector<std::string> vstack;  // parallel to a Ctx
  std::vector<std::string> lstack;  // parallel to a LabelCtx

  explicit Parser(std::string src) : lx(std::move(src)) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(lx.cur.line, lx.cur.col, msg);
  }

  bool at_ident(const std::string& s) {
    return lx.cur.kind == Token::Kind::Ident && lx.cur.text == s;
  }
  bool at_sym(const std::string& s) {
    return lx.cur.kind == Token::Kind::Sym && lx.cur.text == s;
  }
  bool eat_ident(const std::string& s) {
    if (!at_ident(s)) return false;
    lx.advance();
    return true;
  }
  bool eat_sym(const std::string& s) {
    if (!at_sym(s)) return false;
    lx.advance();
    return true;
  }
  void expect_sym(const std::string& s) {
    if (!eat_sym(s)) fail("expected '" + s + "'");
  }
  void expect_ident(const std::string& s) {
    if (!eat_ident(s)) fail("expected '" + s + "'");
  }
  std::string ident() {
    if (lx.cur.kind != Token::Kind::Ident) fail("expected an identifier");
    std::string s = lx.cur.text;
    lx.advance();
    return s;
  }
  std::uint64_t integer() {
    if (lx.cur.kind != Token::Kind::Int) fail("expected an integer");
    std::uint64_t n = lx.cur.num;
    lx.advance();
    return n;
  }

  // ---- types ----

  TyPtr parse_ty() { return parse_sum_ty(); }

  TyPtr parse_sum_ty() {
    TyPtr t = parse_prod_ty();
    while (eat_sym("+")) t = ty_sum(t, parse_prod_ty());
    return t;
  }
  TyPtr parse_prod_ty() {
    TyPtr t = parse_atom_ty();
    while (eat_sym("*")) t = ty_prod(t, parse_atom_ty());
    return t;
  }
  TyPtr parse_atom_ty() {
    if (lx.cur.kind == Token::Kind::Int) {
      std::uint64_t n = integer();
      if (n == 0) return ty_empty();
      if (n == 1) return ty_unit();
      fail("numeric types are only 0 and 1");
    }
    if (eat_sym("(")) {
      TyPtr t = parse_ty();
      expect_sym(")");
      return t;
    }
    std::string n = ident();
    if (n == "bool") return ty_bool();
    auto b = unit.sig.base_index(n);
    if (!b) fail("unknown base type '" + n + "'");
    return ty_base(*b);
  }

  // ---- scoped name resolution ----

  int resolve_var(const std::string& n) {
    for (int i = static_cast<int>(vstack.size()) - 1; i >= 0; --i)
      if (vstack[i] == n) return static_cast<int>(vstack.size()) - 1 - i;
    fail("unbound variable '" + n + "'");
  }
  int resolve_label(const std::string& n) {
    for (int i = static_cast<int>(lstack.size()) - 1; i >= 0; --i)
      if (lstack[i] == n) return static_cast<int>(lstack.size()) - 1 - i;
    fail("unbound label '" + n + "'");
  }

  // ---- terms ----

  bool is_instr_name(const std::string& n) { return unit.sig.instr_index(n).has_value(); }

  TermPtr literal(std::uint64_t n) {
    if (unit.sig.bases.size() != 1)
      fail("numeric literals need exactly one base type in the signature");
    int b = add_literal(unit.sig, unit.interp, 0, n);
    return t_op(b, t_unit());
  }

  TermPtr parse_term() {
    if (at_ident("let")) {
      lx.advance();
      if (eat_sym("(")) {
        std::string x = ident();
        expect_sym(",");
        std::string y = ident();
        expect_sym(")");
        expect_sym("=");
        TermPtr bound = parse_term();
        expect_sym(";");
        vstack.push_back(x);
        vstack.push_back(y);
        TermPtr body = parse_term();
        vstack.pop_back();
        vstack.pop_back();
        return t_let2(bound, body);
      }
      std::string x = ident();
      expect_sym("=");
      TermPtr bound = parse_term();
      expect_sym(";");
      vstack.push_back(x);
      TermPtr body = parse_term();
      vstack.pop_back();
      return t_let1(bound, body);
    }
    if (at_ident("case")) {
      lx.advance();
      TermPtr scrut = parse_term();
      expect_sym("{");
      expect_ident("inl");
      std::string x = ident();
      expect_sym("=>");
      vstack.push_back(x);
      TermPtr l = parse_term();
      vstack.pop_back();
      expect_sym(",");
      expect_ident("inr");
      std::string y = ident();
      expect_sym("=>");
      vstack.push_back(y);
      TermPtr r = parse_term();
      vstack.pop_back();
      expect_sym("}");
      return t_case(scrut, l, r);
    }
    return parse_app();
  }

  bool in_scope(const std::string& n) const {
    for (auto& v : vstack)
      if (v == n) return true;
    return false;
  }

  TermPtr parse_app() {
    if (lx.cur.kind == Token::Kind::Ident) {
      std::string n = lx.cur.text;
      if (n == "inl" || n == "inr" || n == "abort") {
        lx.advance();
        expect_sym("[");
        TyPtr ann = parse_ty();
        expect_sym("]");
        TermPtr a = parse_atom();
        if (n == "inl") return t_inl(a, ann);
        if (n == "inr") return t_inr(a, ann);
        return t_abort(a, ann);
      }
      // local names shadow instruction names
      if (!in_scope(n) && is_instr_name(n)) {
        lx.advance();
        TermPtr a = parse_atom();
        return t_op(*unit.sig.instr_index(n), a);
      }
    }
    return parse_atom();
  }

  TermPtr parse_atom() {
    if (lx.cur.kind == Token::Kind::Int) return literal(integer());
    if (at_ident("true")) {
      lx.advance();
      return t_inl(t_unit(), ty_bool());
    }
    if (at_ident("false")) {
      lx.advance();
      return t_inr(t_unit(), ty_bool());
    }
    if (eat_sym("(")) {
      if (eat_sym(")")) return t_unit();
      TermPtr a = parse_term();
      if (eat_sym(",")) {
        TermPtr b = parse_term();
        expect_sym(")");
        return t_pair(a, b);
      }
      expect_sym(")");
      return a;
    }
    if (lx.cur.kind == Token::Kind::Ident) {
      std::string n = lx.cur.text;
      if (!in_scope(n) && is_instr_name(n)) return parse_app();
      lx.advance();
      return t_var(resolve_var(n));
    }
    fail("expected a term");
  }

  // ---- regions ----

  struct LexState {
    size_t pos;
    int line, col;
    Token cur;
  };
  LexState save() const { return {lx.pos, lx.line, lx.col, lx.cur}; }
  void restore(const LexState& s) {
    lx.pos = s.pos;
    lx.line = s.line;
    lx.col = s.col;
    lx.cur = s.cur;
  }

  void skip_braced() {
    expect_sym("{");
    int depth = 1;
    while (depth > 0) {
      if (lx.cur.kind == Token::Kind::End) fail("unbalanced braces");
      if (at_sym("{")) ++depth;
      if (at_sym("}")) --depth;
      lx.advance();
    }
  }

  RegionPtr parse_region() {
    if (at_ident("let")) {
      lx.advance();
      if (eat_sym("(")) {
        std::string x = ident();
        expect_sym(",");
        std::string y = ident();
        expect_sym(")");
        expect_sym("=");
        TermPtr bound = parse_term();
        expect_sym(";");
        vstack.push_back(x);
        vstack.push_back(y);
        RegionPtr body = parse_region();
        vstack.pop_back();
        vstack.pop_back();
        return r_let2(bound, body);
      }
      std::string x = ident();
      expect_sym("=");
      TermPtr bound = parse_term();
      expect_sym(";");
      vstack.push_back(x);
      RegionPtr body = parse_region();
      vstack.pop_back();
      return r_let1(bound, body);
    }
    return parse_prim_region();
  }

  // A where-block is written '{ head } where { l(x: T): { body }, ... }'.
  // The head's branches may target the block labels, so the block names are
  // scanned before the head is parsed.
  RegionPtr parse_prim_region() {
    if (at_ident("br")) {
      lx.advance();
      std::string l = ident();
      TermPtr a = parse_atom();
      return r_br(resolve_label(l), a);
    }
    if (at_ident("ret")) {
      lx.advance();
      TermPtr a = parse_atom();
      return r_br(resolve_label("ret"), a);
    }
    if (at_ident("case")) {
      lx.advance();
      TermPtr scrut = parse_term();
      expect_sym("{");
      expect_ident("inl");
      std::string x = ident();
      expect_sym("=>");
      vstack.push_back(x);
      RegionPtr l = parse_region();
      vstack.pop_back();
      expect_sym(",");
      expect_ident("inr");
      std::string y = ident();
      expect_sym("=>");
      vstack.push_back(y);
      RegionPtr r = parse_region();
      vstack.pop_back();
      expect_sym("}");
      return r_case(scrut, l, r);
    }
    if (at_sym("{")) {
      LexState head_start = save();
      skip_braced();
      if (!at_ident("where")) {
        restore(head_start);
        lx.advance();  // '{'
        RegionPtr r = parse_region();
        expect_sym("}");
        return r;
      }
      lx.advance();  // 'where'
      // scan block signatures, skipping bodies
      expect_sym("{");
      std::vector<std::string> names, pnames;
      std::vector<TyPtr> params;
      LexState blocks_start = save();
      if (!at_sym("}")) {
        while (true) {
          names.push_back(ident());
          expect_sym("(");
          pnames.push_back(ident());
          expect_sym(":");
          params.push_back(parse_ty());
          expect_sym(")");
          expect_sym(":");
          skip_braced();
          if (!eat_sym(",")) break;
        }
      }
      expect_sym("}");
      RegionPtr next = nullptr;
      LexState after_where = save();
      int n = static_cast<int>(names.size());
      for (int i = n - 1; i >= 0; --i) lstack.push_back(names[i]);
      // parse the head with the labels in scope
      restore(head_start);
      lx.advance();  // '{'
      RegionPtr head = parse_region();
      expect_sym("}");
      // parse the bodies
      restore(blocks_start);
      std::vector<RegionPtr> blocks;
      for (int i = 0; i < n; ++i) {
        ident();
        expect_sym("(");
        ident();
        expect_sym(":");
        parse_ty();
        expect_sym(")");
        expect_sym(":");
        expect_sym("{");
        vstack.push_back(pnames[i]);
        blocks.push_back(parse_region());
        vstack.pop_back();
        expect_sym("}");
        if (i + 1 < n) expect_sym(",");
      }
      for (int i = 0; i < n; ++i) lstack.pop_back();
      restore(after_where);
      (void)next;
      return r_where(head, params, blocks);
    }
    fail("expected a region");
  }

  // ---- declarations ----

  void parse_signature() {
    expect_sym("{");
    bool have_effects = false;
    while (!eat_sym("}")) {
      if (eat_ident("effects")) {
        if (have_effects) fail("duplicate effects declaration");
        have_effects = true;
        // chain: a <= b <= c; extra relations may follow after commas
        std::vector<std::string> names;
        std::vector<std::pair<int, int>> leq;
        auto idx = [&](const std::string& n) {
          for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
          names.push_back(n);
          return static_cast<int>(names.size()) - 1;
        };
        while (true) {
          int a = idx(ident());
          while (eat_sym("<=")) {
            int b = idx(ident());
            leq.emplace_back(a, b);
            a = b;
          }
          if (!eat_sym(",")) break;
        }
        expect_sym(";");
        unit.sig.effects = EffectLattice::from_order(names, leq);
      } else if (eat_ident("base")) {
        std::string n = ident();
        std::uint64_t carrier = integer();
        expect_sym(";");
        unit.sig.add_base(n, carrier);
      } else if (eat_ident("instr")) {
        std::string n = ident();
        expect_sym(":");
        TyPtr dom = parse_ty();
        expect_sym("->");
        TyPtr cod = parse_ty();
        Effect e = 0;
        if (eat_sym("!")) {
          std::string en = ident();
          auto ei = unit.sig.effects.index_of(en);
          if (!ei) fail("unknown effect '" + en + "'");
          e = *ei;
        }
        std::string builtin;
        if (eat_sym("=")) builtin = ident();
        expect_sym(";");
        add_signature_instr(n, dom, cod, e, builtin);
      } else {
        fail("expected 'effects', 'base' or 'instr'");
      }
    }
  }

  void add_signature_instr(const std::string& n, TyPtr dom, TyPtr cod, Effect e,
                           const std::string& builtin) {
    int idx = unit.sig.add_instr(n, dom, cod, e);
    Behavior b;
    const Signature& sig = unit.sig;
    if (builtin == "print") {
      b.kind = Behavior::Kind::Print;
    } else if (builtin == "nondet") {
      b.kind = Behavior::Kind::Nondet;
    } else if (builtin == "add" || builtin == "sub" || builtin == "mul" || builtin == "lt" ||
               builtin == "le" || builtin == "eq") {
      if (dom->kind != Ty::Kind::Prod || dom->a->kind != Ty::Kind::Base)
        fail("arithmetic builtins need a base product domain");
      int base = dom->a->base;
      std::uint64_t mod = sig.bases[base].carrier;
      std::string op = builtin;
      b = pure_fn([base, mod, op](const ValuePtr& v) -> ValuePtr {
        std::uint64_t x = word_of(v->a), y = word_of(v->b);
        if (op == "lt") return v_bool(x < y);
        if (op == "le") return v_bool(x <= y);
        if (op == "eq") return v_bool(x == y);
        std::uint64_t r = op == "add" ? x + y : (op == "sub" ? x - y : x * y);
        return v_base(base, mod == 0 ? r : r % mod);
      });
    } else if (builtin == "set" || builtin == "get" || builtin == "alloc" ||
               builtin == "free") {
      b.kind = builtin == "set"     ? Behavior::Kind::HeapSet
               : builtin == "get"   ? Behavior::Kind::HeapGet
               : builtin == "alloc" ? Behavior::Kind::HeapAlloc
                                    : Behavior::Kind::HeapFree;
    } else if (builtin.empty()) {
      if (e == 0) {
        // uninterpreted pure instruction: a fixed default function
        const Signature* sp = &unit.sig;
        b = pure_fn([sp, idx, cod](const ValuePtr& v) -> ValuePtr {
          auto dom_vals = enumerate_values(*sp, sp->instrs[idx].dom, 1u << 10);
          auto cod_vals = enumerate_values(*sp, cod, 1u << 10);
          if (cod_vals.empty()) throw std::logic_error("instruction into the empty type");
          size_t i = 0;
          for (; i < dom_vals.size(); ++i)
            if (value_equal(dom_vals[i], v)) break;
          return cod_vals[(i + static_cast<size_t>(idx)) % cod_vals.size()];
        });
      } else {
        b.kind = Behavior::Kind::Nondet;
      }
    } else {
      fail("unknown builtin '" + builtin + "'");
    }
    unit.interp.by_instr.push_back(std::move(b));
  }

  void parse_params(Ctx& ctx, std::vector<std::string>& names) {
    expect_sym("(");
    if (eat_sym(")")) return;
    while (true) {
      std::string n = ident();
      expect_sym(":");
      TyPtr t = parse_ty();
      Effect e = 0;
      if (eat_sym("!")) {
        auto ei = unit.sig.effects.index_of(ident());
        if (!ei) fail("unknown effect");
        e = *ei;
      }
      ctx = ctx.push(t, e);
      names.push_back(n);
      if (eat_sym(")")) break;
      expect_sym(",");
    }
  }

  void parse_unit() {
    while (lx.cur.kind != Token::Kind::End) {
      if (eat_ident("signature")) {
        parse_signature();
      } else if (eat_ident("term")) {
        NamedTerm d;
        d.name = ident();
        parse_params(d.ctx, d.param_names);
        Effect e = unit.sig.effects.top();
        expect_sym(":");
        d.ty = parse_ty();
        if (eat_sym("!")) {
          auto ei = unit.sig.effects.index_of(ident());
          if (!ei) fail("unknown effect");
          e = *ei;
        }
        d.eff = e;
        expect_sym("{");
        vstack = d.param_names;
        lstack.clear();
        d.term = parse_term();
        expect_sym("}");
        unit.terms.push_back(std::move(d));
      } else if (eat_ident("region")) {
        NamedRegion d;
        d.name = ident();
        parse_params(d.ctx, d.param_names);
        expect_sym("->");
        if (eat_sym("(")) {
          while (true) {
            std::string l = ident();
            expect_sym(":");
            TyPtr t = parse_ty();
            d.lctx = d.lctx.push(t);
            d.label_names.push_back(l);
            if (eat_sym(")")) break;
            expect_sym(",");
          }
        } else {
          d.lctx = d.lctx.push(parse_ty());
          d.label_names.push_back("ret");
        }
        expect_sym("{");
        vstack = d.param_names;
        lstack = d.label_names;
        d.region = parse_region();
        expect_sym("}");
        unit.regions.push_back(std::move(d));
      } else if (at_ident("word") || at_ident("locations") || at_ident("thread") ||
                 at_ident("allow") || at_ident("forbid") || at_ident("require")) {
        parse_litmus_decl();
      } else {
        fail("expected a declaration");
      }
    }
  }

  // ---- litmus files ----

  void ensure_litmus_sig() {
    if (unit.is_litmus) return;
    unit.is_litmus = true;
    if (!unit.sig.base_index("word")) unit.sig.add_base("word", unit.word_dom);
  }

  void parse_litmus_decl() {
    if (eat_ident("word")) {
      unit.word_dom = integer();
      expect_sym(";");
      ensure_litmus_sig();
      unit.sig.bases[*unit.sig.base_index("word")].carrier = unit.word_dom;
      return;
    }
    if (eat_ident("locations")) {
      ensure_litmus_sig();
      int word = *unit.sig.base_index("word");
      TyPtr w = ty_base(word);
      while (!eat_sym(";")) {
        std::string loc = ident();
        int li = static_cast<int>(unit.locations.size());
        unit.locations.push_back(loc);
        Behavior rb, wb;
        rb.kind = Behavior::Kind::TsoRead;
        rb.loc = li;
        wb.kind = Behavior::Kind::TsoWrite;
        wb.loc = li;
        unit.sig.add_instr("read." + loc, ty_unit(), w, unit.sig.effects.top());
        unit.interp.by_instr.push_back(rb);
        unit.sig.add_instr("write." + loc, w, ty_unit(), unit.sig.effects.top());
        unit.interp.by_instr.push_back(wb);
      }
      if (!unit.sig.instr_index("fence")) {
        Behavior fb;
        fb.kind = Behavior::Kind::TsoFence;
        unit.sig.add_instr("fence", ty_unit(), ty_unit(), unit.sig.effects.top());
        unit.interp.by_instr.push_back(fb);
      }
      return;
    }
    if (eat_ident("thread")) {
      ensure_litmus_sig();
      NamedRegion d;
      d.name = ident();
      expect_sym(":");
      TyPtr t = parse_ty();
      d.lctx = d.lctx.push(t);
      d.label_names.push_back("ret");
      expect_sym("{");
      vstack.clear();
      lstack = d.label_names;
      d.region = parse_region();
      expect_sym("}");
      unit.threads.push_back(std::move(d));
      return;
    }
    LitmusCond c;
    if (eat_ident("allow")) {
      c.mode = LitmusCond::Mode::Allow;
    } else if (eat_ident("forbid")) {
      c.mode = LitmusCond::Mode::Forbid;
    } else {
      expect_ident("require");
      c.mode = LitmusCond::Mode::Require;
    }
    while (true) {
      std::string th = ident();
      int ti = -1;
      for (size_t i = 0; i < unit.threads.size(); ++i)
        if (unit.threads[i].name == th) ti = static_cast<int>(i);
      if (ti < 0) fail("unknown thread '" + th + "'");
      expect_sym("==");
      c.eqs.emplace_back(ti, parse_value());
      if (!eat_sym("&&")) break;
    }
    for (auto& [ti, v] : c.eqs) {
      if (!c.text.empty()) c.text += " && ";
      c.text += unit.threads[ti].name + " == " + value_str(unit.sig, v);
    }
    expect_sym(";");
    unit.conds.push_back(std::move(c));
  }

  ValuePtr parse_value() {
    if (lx.cur.kind == Token::Kind::Int) {
      std::uint64_t n = integer();
      int word = unit.sig.base_index("word") ? *unit.sig.base_index("word") : 0;
      return v_base(word, n);
    }
    if (eat_sym("(")) {
      if (eat_sym(")")) return v_unit();
      ValuePtr a = parse_value();
      expect_sym(",");
      ValuePtr b = parse_value();
      expect_sym(")");
      return v_pair(a, b);
    }
    if (eat_ident("inl")) return v_inl(parse_value());
    if (eat_ident("inr")) return v_inr(parse_value());
    fail("expected a value literal");
  }
};

}  // namespace parse_detail

inline SourceUnit parse_source(const std::string& text) {
  parse_detail::Parser p(text);
  p.parse_unit();
  return std::move(p.unit);
}

}  // namespace lssa
