#include <gtest/gtest.h>

#include <algorithm>

#include "cmtt/cmtt.hpp"
#include "support/enumerate.hpp"

using namespace cmtt;

namespace {

Type tau() { return base("t"); }

// Occurrence walk with an explicit stack of binding frames, one per level.
// Each frame records its level relative to the root (root object level is
// 1, a quotation opens level 0, -1, ...). Unquotation pops frames and
// materialises outer root levels on demand.
struct Frame {
  int level;
  NameSet bound;
};

void walk(const Term& m, std::vector<Frame> frames, std::set<std::pair<Name, int>>& out);

void walk_seq(const TermSeq& seq, const std::vector<Frame>& frames, std::set<std::pair<Name, int>>& out) {
  for (const auto& n : seq) walk(n, frames, out);
}

void walk(const Term& m, std::vector<Frame> frames, std::set<std::pair<Name, int>>& out) {
  if (const auto* v = m.as<Var>()) {
    const Frame& top = frames.back();
    if (!top.bound.contains(v->name) && top.level >= 1) out.insert({v->name, top.level});
  } else if (const auto* l = m.as<Lam>()) {
    frames.back().bound.insert(l->var);
    walk(l->body, frames, out);
  } else if (const auto* a = m.as<App>()) {
    walk(a->fun, frames, out);
    walk(a->arg, frames, out);
  } else if (const auto* q = m.as<Quo>()) {
    NameSet b;
    for (const auto& x : dom(q->ctx)) b.insert(x);
    frames.push_back({frames.back().level - 1, b});
    walk(q->body, frames, out);
  } else if (const auto* u = m.as<Unq>()) {
    walk_seq(u->args, frames, out);
    auto inner = frames;
    for (unsigned k = 0; k < u->level; ++k) {
      int lv = inner.back().level;
      inner.pop_back();
      if (inner.empty()) inner.push_back({lv + 1, {}});
    }
    walk(u->code, inner, out);
  } else if (const auto* c = m.as<CAbs>()) {
    walk(c->body, frames, out);
  } else if (const auto* c = m.as<CApp>()) {
    walk(c->code, frames, out);
  }
}

NameSet oracle_free_vars(const Term& m, int level) {
  std::set<std::pair<Name, int>> occ;
  walk(m, {{1, {}}}, occ);
  NameSet out;
  for (const auto& [x, l] : occ)
    if (l == level) out.insert(x);
  return out;
}

}  // namespace

TEST(FreshName, SmallestSuffixNotInAvoidSet) {
  EXPECT_EQ(fresh_name("x", {"x"}), "x0");
  EXPECT_EQ(fresh_name("x", {"x", "x0", "x1"}), "x2");
  EXPECT_EQ(fresh_name("x12", {"x12"}), "x0");
  EXPECT_EQ(fresh_name("y", {}), "y0");
}

TEST(FreeVars, AppendixExamples) {
  EXPECT_EQ(free_vars(var("x"), 1), NameSet{"x"});
  EXPECT_TRUE(free_vars(lam("x", tau(), var("x")), 1).empty());
  Term m = quo({term_binding("x", tau())}, unq(1, var("y"), {var("x")}));
  EXPECT_EQ(free_vars(m, 1), NameSet{"y"});
  EXPECT_EQ(free_vars(m, 1), oracle_free_vars(m, 1));
}

TEST(FreeVars, HigherLevels) {
  // y sits two levels above the quotation body.
  Term m = quo({}, quo({}, unq(2, var("y"), {})));
  EXPECT_EQ(free_vars(m, 1), NameSet{"y"});
  Term n = unq(1, var("z"), {var("w")});
  EXPECT_EQ(free_vars(n, 1), NameSet{"w"});
  EXPECT_EQ(free_vars(n, 2), NameSet{"z"});
}

TEST(FreeVars, QuotationStartsAFreshContext) {
  // The second quotation does not see the first quotation's binder y.
  Term m = quo({}, lam("y", tau(), unq(1, quo({}, var("y")), {})));
  EXPECT_EQ(free_vars(m, 1), oracle_free_vars(m, 1));
  EXPECT_TRUE(free_vars(m, 1).empty());
}

TEST(FreeVars, AgreesWithOccurrenceWalkOnEnumeration) {
  cmtt::testing::Enumerator e(cmtt::testing::base_config());
  ContextStack open{Context{term_binding("f", arrow(tau(), tau()))}, Context{term_binding("a", tau())}};
  std::size_t checked = 0;
  for (const auto& t : e.up_to({Context{}}, 6)) {
    for (int l = 1; l <= 3; ++l) ASSERT_EQ(free_vars(t.term, l), oracle_free_vars(t.term, l)) << format(t.term);
    ++checked;
  }
  // Open terms with a free variable at each of two levels.
  for (Term m : {parse_term("\\x:t. ~1{f}() a"), parse_term("`{} ~2{f}()"), parse_term("`{a:t} ~1{`{} a}()")})
    for (int l = 1; l <= 3; ++l) EXPECT_EQ(free_vars(m, l), oracle_free_vars(m, l)) << format(m);
  EXPECT_GT(checked, 1000u);
}

TEST(FreeVars, InvariantUnderBinderRenaming) {
  cmtt::testing::Enumerator e(cmtt::testing::base_config());
  for (const auto& t : e.up_to({Context{}}, 5)) {
    NameSet avoid = all_names(t.term);
    Term r = refresh_binders(t.term, avoid);
    ASSERT_TRUE(alpha_equal(r, t.term)) << format(t.term);
    for (unsigned l = 1; l <= 2; ++l) ASSERT_EQ(free_vars(r, l), free_vars(t.term, l));
  }
}

TEST(FreeContextVars, Examples) {
  Type boxed = modal({CVar{"g"}}, tau());
  EXPECT_TRUE(free_context_vars(forall("g", boxed)).empty());
  EXPECT_EQ(free_context_vars(arrow(boxed, forall("g", boxed))), NameSet{"g"});
  Term m = cabs("g", quo({weak_binding("i", "g"), weak_binding("j", "d")}, var("x")));
  EXPECT_EQ(free_context_vars(m), NameSet{"d"});
}

TEST(FreeContextVars, StacksAndSequences) {
  ContextStack s{Context{weak_binding("i", "g")}, Context{term_binding("x", modal({CVar{"d"}}, tau()))}};
  EXPECT_EQ(free_context_vars(s), (NameSet{"d", "g"}));
  EXPECT_EQ(free_context_vars(TypeSeq{CVar{"a"}, tau()}), NameSet{"a"});
  Term c = capp(var("f"), {CVar{"h"}});
  EXPECT_EQ(free_context_vars(c), NameSet{"h"});
}

TEST(AlphaEqual, Examples) {
  EXPECT_TRUE(alpha_equal(lam("x", tau(), var("x")), lam("y", tau(), var("y"))));
  EXPECT_TRUE(alpha_equal(quo({term_binding("x", tau())}, var("x")), quo({term_binding("y", tau())}, var("y"))));
  EXPECT_FALSE(alpha_equal(lam("x", tau(), var("y")), lam("x", tau(), var("z"))));
}

TEST(AlphaEqual, BinderKinds) {
  EXPECT_TRUE(alpha_equal(parse_type("forall g. [g]t"), parse_type("forall h. [h]t")));
  EXPECT_FALSE(alpha_equal(parse_type("forall g. [g]t", {"d"}), parse_type("forall h. [d]t", {"d"})));
  EXPECT_TRUE(alpha_equal(parse_term("/\\g. `{i:g} x"), parse_term("/\\h. `{j:h} x")));
  EXPECT_FALSE(alpha_equal(parse_term("`{i:t, j:t} i"), parse_term("`{i:t, j:t} j")));
  // The unquotation returns to the outer level, where x is the lambda's binder.
  EXPECT_TRUE(alpha_equal(parse_term("\\x:[]t. `{y:t} ~1{x}()"), parse_term("\\z:[]t. `{w:t} ~1{z}()")));
  EXPECT_FALSE(alpha_equal(parse_term("\\x:[]t. `{x:t} ~1{x}()"), parse_term("\\z:[]t. `{x:t} ~1{x}()")));
}

TEST(AlphaEqual, IsAnEquivalenceOnEnumeratedTerms) {
  cmtt::testing::Enumerator e(cmtt::testing::base_config());
  auto terms = e.up_to({Context{}}, 4);
  for (const auto& a : terms) {
    ASSERT_TRUE(alpha_equal(a.term, a.term));
    NameSet avoid = all_names(a.term);
    Term r = refresh_binders(a.term, avoid);
    EXPECT_TRUE(alpha_equal(a.term, r) && alpha_equal(r, a.term));
    EXPECT_EQ(canonical_key(a.term), canonical_key(r));
  }
  // Distinct enumerated terms are distinct classes, and the canonical key agrees.
  for (std::size_t i = 0; i < std::min<std::size_t>(terms.size(), 150); ++i)
    for (std::size_t j = 0; j < std::min<std::size_t>(terms.size(), 150); ++j) {
      bool eq = alpha_equal(terms[i].term, terms[j].term);
      EXPECT_EQ(eq, alpha_equal(terms[j].term, terms[i].term));
      EXPECT_EQ(eq, canonical_key(terms[i].term) == canonical_key(terms[j].term));
    }
}

TEST(ContextProject, Examples) {
  auto p = context_project({term_binding("x", base("S")), term_binding("y", base("T"))});
  EXPECT_EQ(p.dom, (std::vector<Name>{"x", "y"}));
  EXPECT_TRUE(alpha_equal(p.rg, TypeSeq{base("S"), base("T")}));
  auto e = context_project({});
  EXPECT_TRUE(e.dom.empty());
  EXPECT_TRUE(e.rg.empty());
  auto w = context_project({weak_binding("i", "g"), term_binding("x", base("S"))});
  EXPECT_EQ(w.dom, (std::vector<Name>{"i", "x"}));
  EXPECT_TRUE(alpha_equal(w.rg, TypeSeq{CVar{"g"}, base("S")}));
}

TEST(Lookup, RightmostBindingWins) {
  Context c{term_binding("x", base("a")), term_binding("x", base("b"))};
  ASSERT_NE(lookup(c, "x"), nullptr);
  EXPECT_TRUE(alpha_equal(std::get<Type>(lookup(c, "x")->sort), base("b")));
  EXPECT_EQ(lookup(c, "y"), nullptr);
  EXPECT_FALSE(has_distinct_domain(c));
}
