// lssa: command-line front end for the SSA calculus library.
//
// Subcommands: check, rewrite, normalize, interpret, equiv, litmus.
// Exit codes: 0 success, 1 semantic failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lssa/fuzz.hpp"
#include "lssa/model.hpp"
#include "lssa/normalize.hpp"
#include "lssa/parser.hpp"
#include "lssa/printer.hpp"
#include "lssa/rewrite.hpp"
#include "lssa/trace.hpp"
#include "lssa/tso.hpp"

using json = nlohmann::json;
using namespace lssa;

namespace {

constexpr int kSchemaVersion = 1;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json base_report(const std::string& cmd) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = cmd;
  return j;
}

void emit(const json& j, bool as_json, const std::string& text) {
  if (as_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

struct Judgment {
  bool on_term = false;
  Ctx ctx;
  Effect eff = 0;
  TyPtr ty;
  LabelCtx lctx;
  TermPtr term;
  RegionPtr region;
  std::vector<std::string> param_names, label_names;
};

Judgment find_program(const SourceUnit& u, const std::string& name) {
  if (auto* r = u.find_region(name)) {
    Judgment j;
    j.on_term = false;
    j.ctx = r->ctx;
    j.lctx = r->lctx;
    j.region = r->region;
    j.param_names = r->param_names;
    j.label_names = r->label_names;
    return j;
  }
  if (auto* t = u.find_term(name)) {
    Judgment j;
    j.on_term = true;
    j.ctx = t->ctx;
    j.eff = t->eff;
    j.ty = t->ty;
    j.term = t->term;
    j.param_names = t->param_names;
    return j;
  }
  throw std::runtime_error("no program named '" + name + "'");
}

std::string default_program(const SourceUnit& u) {
  if (!u.regions.empty()) return u.regions.front().name;
  if (!u.terms.empty()) return u.terms.front().name;
  throw std::runtime_error("the file declares no programs");
}

int check_unit(const SourceUnit& u, bool as_json) {
  json j = base_report("check");
  j["programs"] = json::array();
  bool all_ok = true;
  std::string text;
  for (auto& t : u.terms) {
    std::string err;
    bool ok = infer_term(u.sig, t.ctx, t.eff, t.term, &err).has_value() &&
              check_term(u.sig, t.ctx, t.eff, t.term, t.ty);
    if (ok) err.clear();
    if (!ok && err.empty()) err = "type mismatch against the declared type";
    all_ok = all_ok && ok;
    j["programs"].push_back({{"name", t.name}, {"kind", "term"}, {"ok", ok}, {"error", err}});
    text += t.name + ": " + (ok ? "ok" : "type error: " + err) + "\n";
  }
  auto check_regions = [&](const std::vector<NamedRegion>& rs, const char* kind) {
    for (auto& r : rs) {
      std::string err;
      bool ok = check_region(u.sig, r.ctx, r.region, r.lctx, &err);
      all_ok = all_ok && ok;
      j["programs"].push_back(
          {{"name", r.name}, {"kind", kind}, {"ok", ok}, {"error", err}});
      text += r.name + ": " + (ok ? "ok" : "type error: " + err) + "\n";
    }
  };
  check_regions(u.regions, "region");
  check_regions(u.threads, "thread");
  j["ok"] = all_ok;
  emit(j, as_json, text);
  return all_ok ? 0 : 1;
}

json value_json(const Signature& sig, const ValuePtr& v) { return value_str(sig, v); }

template <class M>
json run_region_simple(const M& m, const Signature& sig, const Judgment& prog,
                       std::string* text) {
  auto out = denote_region(m, {}, prog.region);
  json r = json::array();
  if constexpr (std::is_same_v<M, OptionModel>) {
    if (out) {
      std::string lbl = prog.label_names.empty()
                            ? "l" + std::to_string(out->label)
                            : prog.label_names[prog.label_names.size() - 1 - out->label];
      r.push_back({{"label", lbl}, {"value", value_json(sig, out->v)}});
      *text += lbl + " " + value_str(sig, out->v) + "\n";
    } else {
      *text += m.fuel_exhausted ? "no result (fuel exhausted)\n" : "no result (diverges)\n";
      r.push_back({{"diverged", true}, {"fuel_exhausted", m.fuel_exhausted}});
    }
  } else {
    for (auto& o : out) {
      std::string lbl = prog.label_names.empty()
                            ? "l" + std::to_string(o.label)
                            : prog.label_names[prog.label_names.size() - 1 - o.label];
      r.push_back({{"label", lbl}, {"value", value_json(sig, o.v)}});
      *text += lbl + " " + value_str(sig, o.v) + "\n";
    }
    if (out.empty()) *text += "no results (all paths diverge)\n";
  }
  return r;
}

int cmd_interpret(const SourceUnit& u, const std::string& name, const std::string& model,
                  int fuel, bool as_json) {
  Judgment prog = find_program(u, name);
  json j = base_report("interpret");
  j["program"] = name;
  j["model"] = model;
  std::string text;
  if (prog.ctx.size() != 0)
    throw std::runtime_error("interpret needs a closed program (no parameters)");
  if (prog.on_term) {
    if (model == "option") {
      OptionModel m{&u.sig, &u.interp, fuel};
      auto out = denote_term(m, {}, prog.term);
      if (out) text += value_str(u.sig, *out) + "\n";
      else text += "no result\n";
      j["results"] = out ? json::array({value_json(u.sig, *out)}) : json::array();
    } else if (model == "powerset") {
      PowersetModel m{&u.sig, &u.interp};
      auto out = denote_term(m, {}, prog.term);
      j["results"] = json::array();
      for (auto& v : out) {
        j["results"].push_back(value_json(u.sig, v));
        text += value_str(u.sig, v) + "\n";
      }
    } else if (model == "trace") {
      HeapPolicy p{&u.sig, &u.interp, fuel};
      auto out = sdenote_term(p, {}, Heap{}, prog.term);
      j["results"] = json::array();
      for (auto& b : out) {
        json e;
        e["finished"] = b.fin;
        if (b.fin) e["value"] = value_json(u.sig, b.v);
        e["trace"] = b.tr;
        e["truncated"] = b.truncated;
        j["results"].push_back(e);
        text += (b.fin ? value_str(u.sig, b.v) : std::string("(diverges)")) + "  trace[";
        for (size_t i = 0; i < b.tr.size(); ++i)
          text += (i ? " " : "") + b.tr[i];
        text += b.truncated ? "...]\n" : "]\n";
      }
    } else {
      throw std::runtime_error("interpret: unsupported model '" + model + "'");
    }
  } else {
    if (model == "option") {
      OptionModel m{&u.sig, &u.interp, fuel};
      j["results"] = run_region_simple(m, u.sig, prog, &text);
    } else if (model == "powerset") {
      PowersetModel m{&u.sig, &u.interp};
      j["results"] = run_region_simple(m, u.sig, prog, &text);
    } else if (model == "trace") {
      HeapPolicy p{&u.sig, &u.interp, fuel};
      auto out = sdenote_region(p, {}, Heap{}, prog.region);
      j["results"] = json::array();
      for (auto& b : out) {
        json e;
        e["finished"] = b.fin;
        if (b.fin) e["value"] = value_json(u.sig, b.v.v);
        e["trace"] = b.tr;
        e["truncated"] = b.truncated;
        j["results"].push_back(e);
        text += (b.fin ? value_str(u.sig, b.v.v) : std::string("(diverges)")) + "  trace[";
        for (size_t i = 0; i < b.tr.size(); ++i) text += (i ? " " : "") + b.tr[i];
        text += b.truncated ? "...]\n" : "]\n";
      }
    } else if (model == "tso") {
      TsoPolicy p{&u.sig, &u.interp, fuel};
      if (!u.sig.bases.empty()) p.word_dom = u.sig.bases[0].carrier;
      auto out = sdenote_region(p, {}, Buffer{}, prog.region);
      j["results"] = json::array();
      for (auto& b : out) {
        json e;
        e["finished"] = b.fin;
        if (b.fin) e["value"] = value_json(u.sig, b.v.v);
        e["trace"] = pom_str(b.tr, u.locations);
        j["results"].push_back(e);
        text += (b.fin ? value_str(u.sig, b.v.v) : std::string("(diverges)")) + "  " +
                pom_str(b.tr, u.locations) + "\n";
      }
    } else {
      throw std::runtime_error("interpret: unsupported model '" + model + "'");
    }
  }
  emit(j, as_json, text);
  return 0;
}

void require_same_judgment(const Judgment& a, const Judgment& b) {
  if (a.on_term != b.on_term) throw std::runtime_error("programs have different kinds");
  if (a.ctx.size() != b.ctx.size()) throw std::runtime_error("contexts differ");
  for (int i = 0; i < a.ctx.size(); ++i)
    if (!ty_equal(a.ctx.lookup(i).ty, b.ctx.lookup(i).ty) ||
        a.ctx.lookup(i).eff != b.ctx.lookup(i).eff)
      throw std::runtime_error("contexts differ");
  if (a.on_term) {
    if (!ty_equal(a.ty, b.ty) || a.eff != b.eff)
      throw std::runtime_error("term judgments differ");
  } else {
    if (a.lctx.size() != b.lctx.size()) throw std::runtime_error("label contexts differ");
    for (int i = 0; i < a.lctx.size(); ++i)
      if (!ty_equal(a.lctx.lookup(i), b.lctx.lookup(i)))
        throw std::runtime_error("label contexts differ");
  }
}

int cmd_equiv(const SourceUnit& ua, const SourceUnit& ub, const std::string& left,
              const std::string& right, const std::string& model, int fuel, bool as_json) {
  // instruction tables must agree for cross-file comparisons
  if (ua.sig.instrs.size() != ub.sig.instrs.size())
    throw std::runtime_error("signatures differ between the two files");
  for (size_t i = 0; i < ua.sig.instrs.size(); ++i)
    if (ua.sig.instrs[i].name != ub.sig.instrs[i].name)
      throw std::runtime_error("signatures differ between the two files");
  Judgment a = find_program(ua, left);
  Judgment b = find_program(ub, right);
  require_same_judgment(a, b);
  json j = base_report("equiv");
  j["left"] = left;
  j["right"] = right;
  j["model"] = model;
  EquivResult res;
  if (model == "option") {
    OptionModel m{&ua.sig, &ua.interp, fuel};
    res = a.on_term ? denotation_equal_term(m, a.ctx, a.term, b.term)
                    : denotation_equal_region(m, a.ctx, a.region, b.region);
  } else if (model == "powerset") {
    PowersetModel m{&ua.sig, &ua.interp};
    res = a.on_term ? denotation_equal_term(m, a.ctx, a.term, b.term)
                    : denotation_equal_region(m, a.ctx, a.region, b.region);
  } else if (model == "trace" || model == "tso") {
    // enumerate environments, compare branch sets from the empty state
    auto envs = enumerate_envs(ua.sig, a.ctx, 1u << 16);
    res.equal = true;
    for (auto& env : envs) {
      bool eq;
      if (model == "trace") {
        HeapPolicy p{&ua.sig, &ua.interp, fuel};
        if (a.on_term) {
          auto x = sdenote_term(p, env, Heap{}, a.term);
          auto y = sdenote_term(p, env, Heap{}, b.term);
          eq = x.size() == y.size();
          for (size_t i = 0; eq && i < x.size(); ++i)
            eq = sbr_compare(p, x[i], y[i]) == 0;
        } else {
          auto x = sdenote_region(p, env, Heap{}, a.region);
          auto y = sdenote_region(p, env, Heap{}, b.region);
          eq = x.size() == y.size();
          for (size_t i = 0; eq && i < x.size(); ++i)
            eq = sbr_compare(p, x[i], y[i]) == 0;
        }
      } else {
        TsoPolicy p{&ua.sig, &ua.interp, fuel};
        if (!ua.sig.bases.empty()) p.word_dom = ua.sig.bases[0].carrier;
        if (a.on_term) {
          auto x = sdenote_term(p, env, Buffer{}, a.term);
          auto y = sdenote_term(p, env, Buffer{}, b.term);
          eq = x.size() == y.size();
          for (size_t i = 0; eq && i < x.size(); ++i)
            eq = sbr_compare(p, x[i], y[i]) == 0;
        } else {
          auto x = sdenote_region(p, env, Buffer{}, a.region);
          auto y = sdenote_region(p, env, Buffer{}, b.region);
          eq = x.size() == y.size();
          for (size_t i = 0; eq && i < x.size(); ++i)
            eq = sbr_compare(p, x[i], y[i]) == 0;
        }
      }
      if (!eq) {
        res.equal = false;
        res.counterexample = env;
        break;
      }
    }
  } else {
    throw std::runtime_error("equiv: unsupported model '" + model + "'");
  }
  j["equal"] = res.equal;
  j["budget_exceeded"] = res.budget_exceeded;
  std::string text = res.equal ? "equivalent\n" : "NOT equivalent\n";
  if (res.counterexample) {
    json env = json::array();
    std::string es;
    for (auto& v : *res.counterexample) {
      env.push_back(value_json(ua.sig, v));
      es += " " + value_str(ua.sig, v);
    }
    j["counterexample"] = env;
    text += "counterexample environment:" + es + "\n";
  }
  emit(j, as_json, text);
  if (res.budget_exceeded) throw std::runtime_error("environment enumeration budget exceeded");
  return res.equal ? 0 : 1;
}

int cmd_normalize(const SourceUnit& u, const std::string& name, const std::string& pass,
                  bool verify, bool as_json) {
  Judgment prog = find_program(u, name);
  if (prog.on_term) throw std::runtime_error("normalize operates on regions");
  json j = base_report("normalize");
  j["program"] = name;
  j["pass"] = pass;
  RegionPtr out;
  bool postcondition = false;
  if (pass == "anf") {
    out = to_anf(prog.region);
    postcondition = check_anf(u.sig, prog.ctx, out, prog.lctx);
  } else if (pass == "strict") {
    out = to_strict(u.sig, prog.ctx, prog.region);
    postcondition = check_strict(u.sig, prog.ctx, out, prog.lctx);
  } else if (pass == "structured") {
    out = to_structured(u.sig, prog.ctx, prog.region, prog.lctx);
    postcondition = check_structured(u.sig, prog.ctx, out, prog.lctx);
  } else if (pass == "cfg-roundtrip") {
    RegionPtr strict = to_strict(u.sig, prog.ctx, prog.region);
    Cfg g = to_cfg(u.sig, prog.ctx, strict, prog.lctx);
    out = from_cfg(u.sig, g);
    postcondition = check_strict(u.sig, prog.ctx, out, prog.lctx) &&
                    cfg_permutation_of(g, to_cfg(u.sig, prog.ctx, out, prog.lctx));
  } else {
    throw std::runtime_error("unknown pass '" + pass + "'");
  }
  j["postcondition"] = postcondition;
  bool verified = true;
  if (verify) {
    PowersetModel m{&u.sig, &u.interp};
    auto res = denotation_equal_region(m, prog.ctx, prog.region, out);
    verified = res.equal;
    j["denotation_preserved"] = res.equal;
    if (res.budget_exceeded) j["denotation_preserved"] = "budget exceeded";
  }
  std::string printed = print_region(u.sig, out, prog.param_names, prog.label_names);
  j["region"] = printed;
  std::string text = printed + "\n";
  if (!postcondition) text += "-- WARNING: pass postcondition failed\n";
  if (verify) text += verified ? "-- denotation preserved\n" : "-- DENOTATION CHANGED\n";
  emit(j, as_json, text);
  return postcondition && verified ? 0 : 1;
}

RuleInstance parse_script_line(const std::string& line, bool* ok) {
  *ok = true;
  std::istringstream ss(line);
  std::string rule_name;
  ss >> rule_name;
  RuleInstance inst;
  auto rid = rule_by_name(rule_name);
  if (!rid) throw std::runtime_error("unknown rule '" + rule_name + "'");
  inst.rule = *rid;
  std::string tok;
  bool saw_at = false;
  while (ss >> tok) {
    if (tok == "rev") {
      inst.backward = true;
    } else if (tok == "@") {
      std::string path;
      ss >> path;
      saw_at = true;
      if (path != "-") {
        std::istringstream ps(path);
        std::string part;
        while (std::getline(ps, part, '.')) inst.path.push_back(std::stoi(part));
      }
    } else if (tok.rfind("k=", 0) == 0) {
      inst.k = std::stoi(tok.substr(2));
    } else if (tok.rfind("m=", 0) == 0) {
      inst.m = std::stoi(tok.substr(2));
    } else if (tok.rfind("perm=", 0) == 0) {
      std::istringstream ps(tok.substr(5));
      std::string part;
      while (std::getline(ps, part, ',')) inst.perm.push_back(std::stoi(part));
    } else if (tok == "verify") {
      inst.verify_premise = true;
    } else {
      throw std::runtime_error("unknown script parameter '" + tok + "'");
    }
  }
  if (!saw_at) throw std::runtime_error("script line needs '@ <path>'");
  return inst;
}

int cmd_rewrite(const SourceUnit& u, const std::string& name, const std::string& script_path,
                bool as_json) {
  Judgment prog = find_program(u, name);
  json j = base_report("rewrite");
  j["program"] = name;
  j["steps"] = json::array();
  std::string text;
  std::istringstream script(slurp(script_path));
  std::string line;
  UniVerifier verifier = [&](const Ctx& c, const RegionPtr& l, const RegionPtr& r,
                             const LabelCtx& k) {
    (void)k;
    PowersetModel m{&u.sig, &u.interp};
    auto res = denotation_equal_region(m, c, l, r);
    return res.equal;
  };
  int lineno = 0;
  while (std::getline(script, line)) {
    ++lineno;
    // strip comments and blanks
    auto cut = line.find("--");
    if (cut != std::string::npos) line = line.substr(0, cut);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    bool ok = false;
    RuleInstance inst = parse_script_line(line, &ok);
    try {
      if (prog.on_term) {
        prog.term = apply_term_rule(u.sig, prog.ctx, prog.eff, prog.term, prog.ty, inst);
      } else {
        prog.region = apply_region_rule(u.sig, prog.ctx, prog.region, prog.lctx, inst,
                                        verifier);
      }
      j["steps"].push_back({{"line", lineno}, {"rule", rule_info(inst.rule).name},
                            {"ok", true}});
      text += "step " + std::to_string(lineno) + ": " + rule_info(inst.rule).name + " ok\n";
    } catch (const RewriteError& e) {
      j["steps"].push_back({{"line", lineno}, {"rule", rule_info(inst.rule).name},
                            {"ok", false}, {"error", e.what()}});
      j["ok"] = false;
      text += "step " + std::to_string(lineno) + ": FAILED: " + e.what() + "\n";
      emit(j, as_json, text);
      return 1;
    }
  }
  j["ok"] = true;
  std::string printed = prog.on_term
                            ? print_term(u.sig, prog.term, prog.param_names)
                            : print_region(u.sig, prog.region, prog.param_names,
                                           prog.label_names);
  j["result"] = printed;
  text += printed + "\n";
  emit(j, as_json, text);
  return 0;
}

int cmd_litmus(const SourceUnit& u, int fuel, std::uint64_t word_domain, bool as_json) {
  if (!u.is_litmus) throw std::runtime_error("not a litmus file");
  TsoPolicy p{&u.sig, &u.interp, fuel};
  p.word_dom = word_domain != 0 ? word_domain : u.word_dom;
  std::vector<LitmusThread> threads;
  for (auto& t : u.threads) {
    std::string err;
    if (!check_region(u.sig, t.ctx, t.region, t.lctx, &err))
      throw std::runtime_error("thread " + t.name + ": " + err);
    threads.push_back(LitmusThread{t.name, t.region, t.lctx.lookup(0)});
  }
  auto table = litmus_outcomes(p, threads);
  json j = base_report("litmus");
  j["threads"] = json::array();
  for (auto& t : u.threads) j["threads"].push_back(t.name);
  j["outcomes"] = json::array();
  std::string text = "outcomes (" + std::to_string(table.size()) + "):\n";
  for (auto& o : table) {
    json row = json::array();
    text += " ";
    for (size_t i = 0; i < o.results.size(); ++i) {
      row.push_back(value_json(u.sig, o.results[i]));
      text += " " + u.threads[i].name + "=" + value_str(u.sig, o.results[i]);
    }
    text += "\n";
    j["outcomes"].push_back(row);
  }
  bool all_ok = true;
  j["conditions"] = json::array();
  for (auto& c : u.conds) {
    auto matches = [&](const LitmusOutcome& o) {
      for (auto& [ti, v] : c.eqs)
        if (!value_equal(o.results[ti], v)) return false;
      return true;
    };
    int count = 0;
    for (auto& o : table)
      if (matches(o)) ++count;
    bool ok = false;
    const char* mode = "";
    switch (c.mode) {
      case LitmusCond::Mode::Allow:
        ok = count > 0;
        mode = "allow";
        break;
      case LitmusCond::Mode::Forbid:
        ok = count == 0;
        mode = "forbid";
        break;
      case LitmusCond::Mode::Require:
        ok = count == static_cast<int>(table.size()) && !table.empty();
        mode = "require";
        break;
    }
    all_ok = all_ok && ok;
    j["conditions"].push_back(
        {{"mode", mode}, {"cond", c.text}, {"matches", count}, {"ok", ok}});
    text += std::string(mode) + " " + c.text + ": " + (ok ? "ok" : "VIOLATED") + "\n";
  }
  j["ok"] = all_ok;
  emit(j, as_json, text);
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lssa: typed SSA calculus tools"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string model = "powerset";
  int fuel = 1000;
  bool as_json = false;
  std::uint64_t seed = 0;
  std::uint64_t word_domain = 0;
  app.add_option("--model", model, "option|powerset|trace|tso")->capture_default_str();
  app.add_option("--fuel", fuel, "iteration budget for fixpoints")->capture_default_str();
  app.add_flag("--json", as_json, "machine-readable report");
  app.add_option("--seed", seed, "random seed (reserved for reproducibility)");
  app.add_option("--word-domain", word_domain, "word carrier size for litmus runs");

  std::string file, file_b, program, left, right, pass = "anf", script;
  auto* c_check = app.add_subcommand("check", "typecheck all programs in a file");
  c_check->add_option("file", file)->required();

  auto* c_interp = app.add_subcommand("interpret", "evaluate a closed program");
  c_interp->add_option("file", file)->required();
  c_interp->add_option("--program", program, "program name (default: first)");

  auto* c_equiv = app.add_subcommand("equiv", "denotational equivalence of two programs");
  c_equiv->add_option("file", file)->required();
  c_equiv->add_option("file_b", file_b, "second file (default: same file)");
  c_equiv->add_option("--left", left, "left program name");
  c_equiv->add_option("--right", right, "right program name");

  auto* c_norm = app.add_subcommand("normalize", "run a normalization pass");
  c_norm->add_option("file", file)->required();
  c_norm->add_option("--program", program);
  c_norm->add_option("--pass", pass, "anf|strict|structured|cfg-roundtrip")
      ->capture_default_str();
  bool verify = false;
  c_norm->add_flag("--verify", verify, "check denotation preservation (powerset)");

  auto* c_rw = app.add_subcommand("rewrite", "apply a rewrite script");
  c_rw->add_option("file", file)->required();
  c_rw->add_option("--program", program);
  c_rw->add_option("--script", script, "rewrite script")->required();

  auto* c_litmus = app.add_subcommand("litmus", "run a TSO litmus test");
  c_litmus->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    SourceUnit u = parse_source(slurp(file));
    if (c_check->parsed()) return check_unit(u, as_json);
    if (c_interp->parsed())
      return cmd_interpret(u, program.empty() ? default_program(u) : program, model, fuel,
                           as_json);
    if (c_equiv->parsed()) {
      if (left.empty() && right.empty() && file_b.empty())
        throw std::runtime_error("equiv needs --left/--right or a second file");
      SourceUnit ub = file_b.empty() ? parse_source(slurp(file)) : parse_source(slurp(file_b));
      std::string l = left.empty() ? default_program(u) : left;
      std::string r = right.empty() ? default_program(ub) : right;
      return cmd_equiv(u, ub, l, r, model, fuel, as_json);
    }
    if (c_norm->parsed())
      return cmd_normalize(u, program.empty() ? default_program(u) : program, pass, verify,
                           as_json);
    if (c_rw->parsed())
      return cmd_rewrite(u, program.empty() ? default_program(u) : program, script, as_json);
    if (c_litmus->parsed()) return cmd_litmus(u, fuel, word_domain, as_json);
  } catch (const ParseError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
