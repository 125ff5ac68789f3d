#include <catch2/catch_amalgamated.hpp>

#include "lssa/context.hpp"
#include "lssa/effects.hpp"
#include "lssa/fuzz.hpp"
#include "lssa/syntax.hpp"
#include "oracles.hpp"

using namespace lssa;

TEST_CASE("effect join on the two-point lattice") {
  EffectLattice e = EffectLattice::two_point();
  CHECK(e.join(0, 0) == 0);
  CHECK(e.join(0, 1) == 1);
  CHECK(e.join(1, 0) == 1);
  CHECK(e.top() == 1);
  CHECK(e.leq(0, 1));
  CHECK_FALSE(e.leq(1, 0));
}

TEST_CASE("three point chain joins") {
  EffectLattice e = EffectLattice::from_order({"bot", "io", "top"}, {{0, 1}, {1, 2}});
  int io = *e.index_of("io");
  CHECK(e.join(io, io) == io);
  CHECK(e.join(0, io) == io);
  CHECK(e.join(io, 2) == 2);
}

TEST_CASE("semilattice laws for declared lattices up to size 5") {
  std::vector<EffectLattice> lattices;
  lattices.push_back(EffectLattice::two_point());
  lattices.push_back(EffectLattice::from_order({"b", "m", "t"}, {{0, 1}, {1, 2}}));
  // diamond
  lattices.push_back(
      EffectLattice::from_order({"b", "l", "r", "t"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
  // 5-point: diamond plus an extra top
  lattices.push_back(EffectLattice::from_order(
      {"b", "l", "r", "t", "tt"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}}));
  for (auto& e : lattices) {
    for (int a = 0; a < e.size(); ++a) {
      CHECK(e.join(a, a) == a);
      CHECK(e.join(0, a) == a);
      for (int b = 0; b < e.size(); ++b) {
        CHECK(e.join(a, b) == e.join(b, a));
        for (int c = 0; c < e.size(); ++c)
          CHECK(e.join(e.join(a, b), c) == e.join(a, e.join(b, c)));
      }
    }
    // the induced order is a partial order
    for (int a = 0; a < e.size(); ++a)
      for (int b = 0; b < e.size(); ++b) {
        if (e.leq(a, b) && e.leq(b, a)) CHECK(a == b);
        for (int c = 0; c < e.size(); ++c)
          if (e.leq(a, b) && e.leq(b, c)) CHECK(e.leq(a, c));
      }
  }
}

TEST_CASE("a poset without joins is rejected") {
  // two incomparable elements with two incomparable upper bounds
  CHECK_THROWS_AS(EffectLattice::from_order({"b", "x", "y", "u", "v"},
                                            {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}}),
                  std::invalid_argument);
}

TEST_CASE("ctx lookup follows de Bruijn order") {
  Ctx ctx;
  ctx = ctx.push(ty_unit(), 0);
  CHECK(ty_equal(ctx.lookup(0).ty, ty_unit()));
  Ctx ctx2 = ctx.push(ty_prod(ty_unit(), ty_unit()), 1);
  CHECK(ty_equal(ctx2.lookup(1).ty, ty_unit()));
  CHECK(ctx2.lookup(0).eff == 1);
  Ctx empty;
  CHECK_THROWS_AS(empty.lookup(0), std::out_of_range);
}

TEST_CASE("ctx weakening witnesses") {
  EffectLattice e = EffectLattice::two_point();
  TyPtr a = ty_unit(), b = ty_bool();
  SECTION("wk-nil: empty weakens empty") {
    Ctx g, d;
    auto w = ctx_weakens(e, g, d);
    REQUIRE(w);
    CHECK(w->ren.empty());
  }
  SECTION("wk-skip: extra entries are dropped") {
    Ctx g, d;
    g = g.push(a).push(b);
    d = d.push(a);
    auto w = ctx_weakens(e, g, d);
    REQUIRE(w);
    CHECK(w->ren == std::vector<int>{1});  // d index 0 -> g index 1
  }
  SECTION("wk-cons: effect coercion bot <= top") {
    Ctx g, d;
    g = g.push(a, 0);
    d = d.push(a, 1);
    REQUIRE(ctx_weakens(e, g, d));
    CHECK_FALSE(ctx_weakens(e, d, g));
  }
  SECTION("identity witness on equal contexts") {
    Ctx g;
    g = g.push(a).push(b).push(a, 1);
    auto w = ctx_weakens(e, g, g);
    REQUIRE(w);
    CHECK(w->ren == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("weakening witnesses compose as function composition") {
  EffectLattice e = EffectLattice::two_point();
  std::vector<TyPtr> tys = {ty_unit(), ty_bool()};
  // contexts of length <= 3 over 2 types at 2 effects
  std::vector<Ctx> ctxs{Ctx{}};
  for (int len = 1; len <= 3; ++len) {
    std::vector<Ctx> next;
    for (auto& c : ctxs)
      if (c.size() == len - 1)
        for (auto& t : tys)
          for (int eff = 0; eff < 2; ++eff) next.push_back(c.push(t, eff));
    ctxs.insert(ctxs.end(), next.begin(), next.end());
  }
  int composed = 0;
  for (auto& g : ctxs)
    for (auto& gp : ctxs) {
      if (gp.size() > g.size()) continue;
      auto w1 = ctx_weakens(e, g, gp);
      if (!w1) continue;
      for (auto& d : ctxs) {
        if (d.size() > gp.size()) continue;
        auto w2 = ctx_weakens(e, gp, d);
        if (!w2) continue;
        WkWitness w = wk_compose(*w1, *w2);
        REQUIRE(static_cast<int>(w.ren.size()) == d.size());
        for (int i = 0; i < d.size(); ++i) {
          CHECK(ty_equal(g.lookup(w.ren[i]).ty, d.lookup(i).ty));
          CHECK(e.leq(g.lookup(w.ren[i]).eff, d.lookup(i).eff));
          CHECK(w.ren[i] == w1->ren[w2->ren[i]]);
        }
        ++composed;
      }
    }
  CHECK(composed > 100);
}

TEST_CASE("label context weakening is flipped") {
  TyPtr a = ty_unit(), b = ty_bool();
  LabelCtx l, k;
  SECTION("identity") { REQUIRE(lctx_weakens(l, k)); }
  SECTION("lwk-skip: fewer labels weaken more") {
    l = l.push(a);
    k = k.push(a).push(b);
    auto w = lctx_weakens(l, k);
    REQUIRE(w);
    CHECK(w->ren == std::vector<int>{1});
    CHECK_FALSE(lctx_weakens(k, l));
  }
  SECTION("mismatched types have no witness") {
    l = l.push(a);
    k = k.push(b);
    CHECK_FALSE(lctx_weakens(l, k));
  }
}

TEST_CASE("free variables") {
  CHECK(free_vars(t_var(0)) == std::set<int>{0});
  CHECK(free_vars(t_let1(t_var(0), t_var(0))) == std::set<int>{0});
  CHECK(free_vars(t_let1(t_var(1), t_var(2))) == std::set<int>{1});
  CHECK(free_vars(t_let2(t_var(0), t_pair(t_var(0), t_var(1)))) == std::set<int>{0});
  RegionPtr r = r_where(r_br(0, t_var(2)), {ty_unit()}, {r_br(0, t_var(0))});
  CHECK(free_vars(r) == std::set<int>{2});
  CHECK(free_labels(r) == std::set<int>{});
  CHECK(free_labels(r_br(3, t_unit())) == std::set<int>{3});
}

TEST_CASE("free variables agree with the named conversion oracle") {
  Interp interp;
  Signature sig = fuzz_signature(interp);
  Gen g(sig, 11);
  for (int i = 0; i < 200; ++i) {
    Ctx ctx = g.gen_ctx(3);
    TyPtr ty = g.gen_ty(1);
    TermPtr t;
    try {
      t = g.gen_term(ctx, sig.effects.top(), ty, 5);
    } catch (...) {
      continue;
    }
    CHECK(free_vars(t) == oracle::free_vars_via_names(t, ctx.size()));
  }
}
