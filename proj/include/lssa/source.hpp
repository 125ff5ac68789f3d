#pragma once

#include <string>
#include <vector>

#include "lssa/context.hpp"
#include "lssa/interp.hpp"
#include "lssa/signature.hpp"
#include "lssa/syntax.hpp"

namespace lssa {

struct NamedTerm {
  std::string name;
  Ctx ctx;
  std::vector<std::string> param_names;
  Effect eff = 0;
  TyPtr ty;
  TermPtr term;
};

struct NamedRegion {
  std::string name;
  Ctx ctx;
  std::vector<std::string> param_names;
  LabelCtx lctx;
  std::vector<std::string> label_names;  // outermost first, parallel to lctx.entries
  RegionPtr region;
};

// Litmus condition: a conjunction of per-thread value equations, checked
// against the valid-outcome table.
struct LitmusCond {
  enum class Mode { Allow, Forbid, Require };
  Mode mode = Mode::Allow;
  std::vector<std::pair<int, ValuePtr>> eqs;  // thread index, expected value
  std::string text;
};

struct SourceUnit {
  Signature sig;
  Interp interp;
  std::vector<NamedTerm> terms;
  std::vector<NamedRegion> regions;
  // litmus files only:
  bool is_litmus = false;
  std::vector<std::string> locations;
  std::vector<NamedRegion> threads;
  std::vector<LitmusCond> conds;
  std::uint64_t word_dom = 2;

  const NamedTerm* find_term(const std::string& n) const {
    for (auto& t : terms)
      if (t.name == n) return &t;
    return nullptr;
  }
  const NamedRegion* find_region(const std::string& n) const {
    for (auto& r : regions)
      if (r.name == n) return &r;
    return nullptr;
  }
};

}  // namespace lssa
