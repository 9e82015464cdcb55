#include <gtest/gtest.h>

#include "cmtt/cmtt.hpp"
#include "support/corpus.hpp"
#include "support/enumerate.hpp"

using namespace cmtt;
namespace s = cmtt::stlc;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Unsupported;
}

s::Type sb(const char* n) { return s::base(n); }

}  // namespace

TEST(Erase, Types) {
  EXPECT_TRUE(s::erase(parse_type("[S, T]U")) == s::arrow(sb("S"), s::arrow(sb("T"), sb("U"))));
  EXPECT_TRUE(s::erase(parse_type("[]U")) == sb("U"));
  EXPECT_TRUE(s::erase(parse_type("([S]T -> U) -> V")) ==
              s::arrow(s::arrow(s::arrow(sb("S"), sb("T")), sb("U")), sb("V")));
  EXPECT_EQ(kind_of([] { s::erase(parse_type("forall g. [g]t")); }), ErrorKind::NotErasable);
  EXPECT_EQ(kind_of([] { s::erase(parse_type("[g]t", {"g"})); }), ErrorKind::NotErasable);
}

TEST(Erase, Terms) {
  EXPECT_TRUE(s::alpha_equal(s::erase(parse_term("`{x:S} x")), s::lam("x", sb("S"), s::var("x"))));
  s::Term e = s::erase(parse_term("~1{`{z:S} z}(y)"));
  EXPECT_TRUE(s::alpha_equal(e, s::app(s::lam("z", sb("S"), s::var("z")), s::var("y"))));
  EXPECT_TRUE(s::alpha_equal(s::normalize(e), s::var("y")));
  EXPECT_TRUE(s::alpha_equal(s::erase(parse_term("`{a:S, b:T} a")),
                             s::lam("a", sb("S"), s::lam("b", sb("T"), s::var("a")))));
  EXPECT_EQ(kind_of([] { s::erase(parse_term("/\\g. x")); }), ErrorKind::NotErasable);
  EXPECT_EQ(kind_of([] { s::erase(parse_term("f @ ()")); }), ErrorKind::NotErasable);
  EXPECT_EQ(kind_of([] { s::erase(parse_term("`{i:g} x", {"g"})); }), ErrorKind::NotErasable);
}

TEST(Erase, StacksNeedDisjointDomains) {
  ContextStack ok{Context{term_binding("x", base("S"))}, Context{term_binding("y", parse_type("[S]T"))}};
  s::Context flat = s::erase(ok);
  ASSERT_EQ(flat.size(), 2u);
  EXPECT_EQ(flat[0].name, "x");
  EXPECT_TRUE(flat[1].type == s::arrow(sb("S"), sb("T")));
  ContextStack bad{Context{term_binding("x", base("S"))}, Context{term_binding("x", base("T"))}};
  EXPECT_EQ(kind_of([&] { s::erase(bad); }), ErrorKind::StackDomainsOverlap);
}

TEST(StlcSynth, Examples) {
  EXPECT_TRUE(s::stlc_synth({}, s::lam("x", sb("S"), s::var("x"))) == s::arrow(sb("S"), sb("S")));
  s::Context ctx{{"f", s::arrow(sb("S"), sb("T"))}, {"a", sb("S")}};
  EXPECT_TRUE(s::stlc_synth(ctx, s::app(s::var("f"), s::var("a"))) == sb("T"));
  EXPECT_EQ(kind_of([&] { s::stlc_synth(ctx, s::app(s::var("a"), s::var("a"))); }), ErrorKind::NotAFunction);
  EXPECT_EQ(kind_of([&] { s::stlc_synth(ctx, s::app(s::var("f"), s::var("f"))); }), ErrorKind::TypeMismatch);
  EXPECT_EQ(kind_of([&] { s::stlc_synth(ctx, s::var("q")); }), ErrorKind::UnboundVariable);
}

TEST(StlcSynth, ErasedCorpusJudgments) {
  std::size_t checked = 0;
  for (const auto& d : cmtt::testing::accepted_corpus()) {
    if (d.calculus != Calculus::Box || !d.term) continue;
    Variant v = d.variant.value_or(Variant::S4);
    Type t = synth(v, d.stack, *d.term);
    s::Judgment j = s::erase(Judgment{d.stack, *d.term, t});
    EXPECT_TRUE(s::stlc_synth(j.ctx, j.term) == j.type) << d.name;
    ++checked;
  }
  EXPECT_GE(checked, 6u);
}

TEST(StlcSynth, ErasedEnumeratedJudgments) {
  cmtt::testing::Enumerator e(cmtt::testing::base_config());
  for (const auto& t : e.up_to({Context{}}, 6)) {
    s::Judgment j = s::erase(Judgment{{Context{}}, t.term, t.type});
    ASSERT_TRUE(s::stlc_synth(j.ctx, j.term) == j.type) << format(t.term);
  }
}

TEST(StepsTo, Examples) {
  s::Term id_y = s::app(s::lam("x", sb("t"), s::var("x")), s::var("y"));
  EXPECT_TRUE(s::stlc_steps_to(id_y, s::var("y"), 1));
  EXPECT_TRUE(s::stlc_steps_to(id_y, id_y, 0));
  EXPECT_FALSE(s::stlc_steps_to(s::var("y"), id_y, 5));
  s::Term two = s::app(s::lam("x", sb("t"), s::var("x")), id_y);
  EXPECT_FALSE(s::stlc_steps_to(two, s::var("y"), 1));
  EXPECT_TRUE(s::stlc_steps_to(two, s::var("y"), 2));
  EXPECT_TRUE(s::joinable(two, id_y));
}

TEST(StepsTo, SourceStepsMapToErasedSteps) {
  cmtt::testing::Enumerator e(cmtt::testing::base_config());
  std::size_t steps = 0;
  for (const auto& t : e.up_to({Context{}}, 6))
    for (const auto& r : beta_redexes(t.term)) {
      Term next = replace_at(t.term, r.path, r.reduct);
      s::Term a = s::normalize(s::erase_refreshed(t.term));
      s::Term b = s::normalize(s::erase_refreshed(next));
      ASSERT_TRUE(s::alpha_equal(a, b)) << format(t.term) << " -> " << format(next);
      ++steps;
    }
  EXPECT_GT(steps, 100u);
}

TEST(Substitution, AvoidsCapture) {
  s::Term m = s::lam("x", sb("t"), s::var("y"));
  s::Term out = s::subst(m, "y", s::var("x"));
  const auto* l = out.as<s::Lam>();
  ASSERT_NE(l, nullptr);
  EXPECT_NE(l->var, "x");
  EXPECT_EQ(s::free_vars(out), NameSet{"x"});
}
