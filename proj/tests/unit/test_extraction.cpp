#include <gtest/gtest.h>

#include "cmtt/cmtt.hpp"
#include "support/corpus.hpp"

using namespace cmtt;
using namespace cmtt::extract;
namespace c = cmtt::circ;

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

c::Type cty(std::string_view s) { return parse_circ_type(s); }
Type ty(std::string_view s, const std::vector<Name>& cvars = {}) { return parse_type(s, cvars); }

const c::Type tau = c::base("t");

// Allocators with up to three stages, each drawn from a small pool.
std::vector<ContextAllocator> sample_allocators() {
  const std::vector<Context> pool{{}, {term_binding("a", base("A"))}, {weak_binding("i", "g"), term_binding("b", base("B"))}};
  std::vector<ContextAllocator> out;
  for (const auto& x : pool)
    for (const auto& y : pool)
      for (const auto& z : pool) out.emplace_back(std::vector<Context>{x, y, z});
  return out;
}

// Closed type of a builder term, checked under an empty stack.
Type builder_type(const Term& m) { return synth(Variant::K, {Context{}}, m); }

}  // namespace

TEST(Allocators, Laws) {
  auto all = sample_allocators();
  ContextAllocator eps;
  for (const auto& p : all) {
    EXPECT_TRUE(same_allocator(p + eps, p));
    EXPECT_TRUE(same_allocator(eps + p, p));
    EXPECT_TRUE(same_allocator(p.pushed(p.at(0)).shifted(), p));
    for (std::size_t n = 0; n <= 3; ++n) EXPECT_TRUE(same_allocator(p.below(n) + p.from(n), p));
    EXPECT_TRUE(same_allocator(p.range().shifted(), p.shifted().range()));
  }
  for (std::size_t x = 0; x < all.size(); x += 5)
    for (std::size_t y = 0; y < all.size(); y += 7) {
      const auto& p = all[x];
      const auto& q = all[y];
      EXPECT_TRUE(same_allocator((p + q).shifted(), p.shifted() + q.shifted()));
      EXPECT_TRUE(same_allocator((p + q).range(), p.range() + q.range()));
      for (std::size_t z = 0; z < all.size(); z += 11) EXPECT_TRUE(same_allocator((p + q) + all[z], p + (q + all[z])));
    }
}

TEST(Allocators, TrailingEmptyStagesAreTrimmed) {
  ContextAllocator p(std::vector<Context>{{term_binding("a", base("A"))}, {}, {}});
  EXPECT_EQ(p.support(), 1u);
  EXPECT_TRUE(p.at(7).empty());
  EXPECT_TRUE(same_allocator(p, ContextAllocator(std::vector<Context>{{term_binding("a", base("A"))}})));
}

TEST(CtxDepth, Examples) {
  EXPECT_EQ(ctx_depth(tau), 0u);
  EXPECT_EQ(ctx_depth(cty("next next t")), 2u);
  EXPECT_EQ(ctx_depth(cty("next t -> t")), 0u);
  EXPECT_EQ(ctx_depth(cty("t -> next (t -> next t)")), 2u);
}

TEST(GenCa, StagesAreZeroBased) {
  GenState st;
  GenCa zero = gen_ca(st, 0);
  EXPECT_EQ(zero.alloc.support(), 0u);
  EXPECT_TRUE(zero.cvars.empty());

  GenCa one = gen_ca(st, 1);
  ASSERT_EQ(one.cvars.size(), 1u);
  ASSERT_EQ(one.alloc.at(0).size(), 1u);
  EXPECT_TRUE(one.alloc.at(0)[0].is_weakening());
  EXPECT_EQ(std::get<CVar>(one.alloc.at(0)[0].sort).name, one.cvars[0]);
  EXPECT_TRUE(one.alloc.at(1).empty());

  GenCa two = gen_ca(st, 2);
  EXPECT_EQ(two.alloc.support(), 2u);
  EXPECT_EQ(two.alloc.at(0).size(), 1u);
  EXPECT_EQ(two.alloc.at(1).size(), 1u);
  EXPECT_TRUE(two.alloc.at(2).empty());
  EXPECT_NE(two.cvars[0], two.cvars[1]);
  EXPECT_NE(one.cvars[0], two.cvars[0]);
}

TEST(ExtractType, Examples) {
  GenState st;
  ContextAllocator any(std::vector<Context>{{term_binding("a", base("A"))}});
  EXPECT_TRUE(alpha_equal(extract_type(any, tau, st), base("t")));
  TypeSeqAllocator g(std::vector<TypeSeq>{{CVar{"g"}}});
  EXPECT_TRUE(alpha_equal(extract_type(g, cty("next t"), st), ty("[g]t", {"g"})));
  Type davies = extract_type(ContextAllocator{}, cty("(next S -> next T) -> next (S -> T)"), st);
  EXPECT_TRUE(alpha_equal(davies, ty("forall g. (forall d. [d]S -> [g, d]T) -> [g](S -> T)"))) << format(davies);
  Type k = extract_type(ContextAllocator{}, cty("next (S -> T) -> next S -> next T"), st);
  EXPECT_TRUE(alpha_equal(k, ty("forall g. [g](S -> T) -> forall d. [d]S -> [g, d]T"))) << format(k);
}

TEST(ExtractContext, Examples) {
  GenState st;
  ContextGT empty = extract_context({}, st);
  EXPECT_TRUE(empty.context().empty());
  EXPECT_EQ(empty.alloc().support(), 0u);

  ContextGT plain = extract_context({{"x", tau}}, st);
  EXPECT_TRUE(same_context(plain.context(), {term_binding("x", base("t"))}));
  EXPECT_EQ(plain.alloc().support(), 0u);

  ContextGT boxed = extract_context({{"x", cty("next t")}}, st);
  ASSERT_EQ(boxed.bindings.size(), 1u);
  const Name g = boxed.bindings[0].cvars.at(0);
  EXPECT_TRUE(alpha_equal(std::get<Type>(boxed.context()[0].sort), modal({CVar{g}}, base("t"))));
  ASSERT_EQ(boxed.alloc().at(0).size(), 1u);
  EXPECT_EQ(std::get<CVar>(boxed.alloc().at(0)[0].sort).name, g);

  EXPECT_EQ(kind_of([&] { extract_context({{"x", tau}, {"x", tau}}, st); }), ErrorKind::DuplicateBinder);
}

TEST(ExtractPast, Examples) {
  GenState st;
  EXPECT_TRUE(extract_past({}, st).stack().empty());
  PastGT one = extract_past({{{"x", tau}}}, st);
  ASSERT_EQ(one.stack().size(), 1u);
  EXPECT_TRUE(same_context(one.stack()[0], {term_binding("x", base("t"))}));
  EXPECT_EQ(one.alloc().support(), 0u);

  PastGT two = extract_past({{{"x", cty("next t")}}, {}}, st);
  ContextStack s = two.stack();
  ASSERT_EQ(s.size(), 2u);
  ASSERT_EQ(s[1].size(), 1u);
  EXPECT_TRUE(s[1][0].is_weakening());
  EXPECT_EQ(two.alloc().support(), 0u);
}

TEST(ExtractFuture, Examples) {
  GenState st;
  EXPECT_EQ(extract_future({}, st).alloc().support(), 0u);
  ContextAllocator r = extract_future({{{"y", tau}}}, st).alloc();
  EXPECT_TRUE(same_context(r.at(0), {term_binding("y", base("t"))}));
  EXPECT_EQ(r.support(), 1u);

  ContextAllocator rn = extract_future({{{"y", cty("next t")}}}, st).alloc();
  ASSERT_EQ(rn.at(0).size(), 1u);
  ASSERT_EQ(rn.at(1).size(), 1u);
  EXPECT_TRUE(rn.at(1)[0].is_weakening());
  const Name g = std::get<CVar>(rn.at(1)[0].sort).name;
  EXPECT_TRUE(alpha_equal(std::get<Type>(rn.at(0)[0].sort), modal({CVar{g}}, base("t"))));
}

TEST(Builders, BaseTypesGiveTheIdentity) {
  GenState st;
  ContextAllocator p(std::vector<Context>{{term_binding("a", base("A"))}});
  for (const Term& m : {build_weak(tau, {}, p, st), build_contr(tau, p, p, st), build_exchg(tau, p, p, p, p, st)})
    EXPECT_TRUE(alpha_equal(m, lam("x", base("t"), var("x")))) << format(m);
}

TEST(Builders, WeakOnNext) {
  GenState st;
  ContextAllocator q(std::vector<Context>{{term_binding("y", base("t"))}});
  Term w = build_weak(cty("next t"), {}, q, st);
  Term expected = lam("x", modal({}, base("t")),
                      quo({term_binding("y", base("t"))}, app(lam("z", base("t"), var("z")), unq(1, var("x"), {}))));
  EXPECT_TRUE(alpha_equal(w, expected)) << format(w);
  EXPECT_TRUE(alpha_equal(builder_type(w), ty("[]t -> [t]t")));
}

TEST(Builders, ContrAndExchgOnNext) {
  GenState st;
  ContextAllocator p(std::vector<Context>{{term_binding("y", base("t"))}});
  Term c = build_contr(cty("next t"), p, {}, st);
  EXPECT_TRUE(alpha_equal(builder_type(c), ty("[t, t]t -> [t]t"))) << format(c);
  EXPECT_TRUE(alpha_equal(builder_type(c), contr_type(cty("next t"), p, {}, st)));

  ContextAllocator a(std::vector<Context>{{term_binding("a", base("A"))}});
  ContextAllocator b(std::vector<Context>{{term_binding("b", base("B"))}});
  Term e = build_exchg(cty("next t"), a, b, {}, {}, st);
  EXPECT_TRUE(alpha_equal(builder_type(e), ty("[A, B]t -> [A, B]t")));
  Term e2 = build_exchg(cty("next t"), {}, a, b, {}, st);
  EXPECT_TRUE(alpha_equal(builder_type(e2), ty("[A, B]t -> [B, A]t")));
}

TEST(Builders, ArrowClauseQuantifiesTheFreshAllocator) {
  GenState st;
  ContextAllocator a(std::vector<Context>{{term_binding("a", base("A"))}});
  ContextAllocator b(std::vector<Context>{{term_binding("b", base("B"))}});
  const c::Type t = cty("next S -> next T");
  Term e = build_exchg(t, {}, a, b, {}, st);
  EXPECT_TRUE(alpha_equal(builder_type(e), exchg_type(t, {}, a, b, {}, st))) << format(e);
  Term w = build_weak(t, {}, a, st);
  EXPECT_TRUE(alpha_equal(builder_type(w), weak_type(t, {}, a, st)));
}

TEST(Builders, WeakRequiresSublists) {
  GenState st;
  ContextAllocator a(std::vector<Context>{{term_binding("a", base("A"))}});
  EXPECT_EQ(kind_of([&] { build_weak(tau, a, {}, st); }), ErrorKind::PreconditionViolated);
}

TEST(ExtractTerm, VariableIsWrappedInWeakening) {
  c::PastStack past{{{"x", tau}}};
  auto s = c::circ_synth(past, {}, c::var("x"));
  Translation tr = extract_judgment(past, {}, s.annotated);
  ASSERT_NE(tr.judgment.term.as<App>(), nullptr);
  EXPECT_TRUE(alpha_equal(tr.judgment.term, app(lam("y", base("t"), var("y")), var("x"))));
  EXPECT_TRUE(alpha_equal(normalize(tr.judgment.term), var("x")));
}

TEST(ExtractTerm, NeedsAnnotations) {
  EXPECT_EQ(kind_of([] { extract_judgment({{}}, {}, parse_circ_term("\\x:t. x")); }), ErrorKind::MalformedAnnotation);
}

TEST(ExtractJudgment, DaviesAndKAxiom) {
  auto check_one = [](std::string_view src, std::string_view expected) {
    c::Term m = parse_circ_term(src);
    auto s = c::circ_synth({{}}, c::default_future(m), m);
    Translation tr = extract_judgment({{}}, c::default_future(m), s.annotated);
    Type got = synth(Variant::K, tr.judgment.stack, tr.judgment.term);
    EXPECT_TRUE(alpha_equal(got, tr.judgment.type)) << format(got);
    EXPECT_TRUE(alpha_equal(got, ty(expected))) << format(got);
  };
  check_one("\\x:next S -> next T. `(\\y:S. ~(x `y))", "forall g. (forall d. [d]S -> [g, d]T) -> [g](S -> T)");
  check_one("\\x:next (S -> T). \\y:next S. `(~x ~y)", "forall g. [g](S -> T) -> forall d. [d]S -> [g, d]T");
  check_one("\\x:t. x", "t -> t");
}

TEST(ExtractJudgment, DeterministicOnTheCorpus) {
  auto sf = cmtt::testing::load_corpus("temporal.cmtt");
  for (const auto& d : sf.decls) {
    c::FutureStack f = d.future ? *d.future : c::default_future(*d.circ_term);
    auto s = c::circ_synth(d.past, f, *d.circ_term);
    Translation a = extract_judgment(d.past, f, s.annotated);
    Translation b = extract_judgment(d.past, f, s.annotated);
    EXPECT_EQ(format(a.judgment), format(b.judgment)) << d.name;
    auto got = try_synth(Variant::K, a.judgment.stack, a.judgment.term);
    EXPECT_TRUE(got && alpha_equal(*got, a.judgment.type)) << d.name;
  }
}

TEST(ExtractJudgment, LiteralApplicationContractionIsIllTyped) {
  // Function S -> T with D(S) = 1 and a two-stage allocator A. After
  // instantiating the quantified context with rg A(0), the result type is
  // translated at A + A.below(1). Contracting with A and the empty allocator
  // expects A + A instead; splitting A at D(S) matches.
  GenState st;
  ContextAllocator A(std::vector<Context>{{weak_binding("i", "g")}, {weak_binding("j", "h")}});
  const c::Type S = cty("next b");
  const c::Type T = cty("next next b");
  Type fun = extract_type(A, c::arrow(S, T), st);
  ContextStack stack{Context{term_binding("f", fun)}};
  Type applied = synth(Variant::K, stack, capp(var("f"), A.range().at(0)));
  const auto* arr = applied.as<ArrowType>();
  ASSERT_NE(arr, nullptr);

  const Type literal = contr_type(T, A, {}, st);
  const Type split = contr_type(T, A.below(1), A.from(1), st);
  EXPECT_FALSE(alpha_equal(literal.as<ArrowType>()->dom, arr->cod)) << format(literal);
  EXPECT_TRUE(alpha_equal(split.as<ArrowType>()->dom, arr->cod)) << format(split);
  EXPECT_TRUE(alpha_equal(split.as<ArrowType>()->cod, extract_type(A, T, st)));
}
