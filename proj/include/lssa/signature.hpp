#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lssa/effects.hpp"
#include "lssa/types.hpp"

namespace lssa {

// A base type with a finite value carrier {0, .., carrier-1}.
struct BaseTy {
  std::string name;
  std::uint64_t carrier = 2;
};

// A primitive instruction with its least effect. The paper's indexed family
// I_eps is recovered as {f | f.effect <= eps}.
struct Instr {
  std::string name;
  TyPtr dom, cod;
  Effect effect = 0;
};

struct Signature {
  EffectLattice effects = EffectLattice::two_point();
  std::vector<BaseTy> bases;
  std::vector<Instr> instrs;

  int add_base(const std::string& name, std::uint64_t carrier) {
    bases.push_back(BaseTy{name, carrier});
    return static_cast<int>(bases.size()) - 1;
  }

  int add_instr(const std::string& name, TyPtr dom, TyPtr cod, Effect e = 0) {
    instrs.push_back(Instr{name, std::move(dom), std::move(cod), e});
    return static_cast<int>(instrs.size()) - 1;
  }

  std::optional<int> base_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(bases.size()); ++i)
      if (bases[i].name == name) return i;
    return std::nullopt;
  }

  std::optional<int> instr_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(instrs.size()); ++i)
      if (instrs[i].name == name) return i;
    return std::nullopt;
  }

  bool ty_wf(const TyPtr& t) const {
    switch (t->kind) {
      case Ty::Kind::Base: return t->base >= 0 && t->base < static_cast<int>(bases.size());
      case Ty::Kind::Unit:
      case Ty::Kind::Empty: return true;
      case Ty::Kind::Prod:
      case Ty::Kind::Sum: return ty_wf(t->a) && ty_wf(t->b);
    }
    return false;
  }
};

}  // namespace lssa
