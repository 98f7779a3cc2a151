#include "support.hpp"

using namespace schemakern;

namespace {

ErrorCode code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  throw std::runtime_error("no error raised");
}

std::vector<std::string> rows(const WitnessTable &t) {
  std::vector<std::string> out;
  for (const auto &row : t) {
    std::string s;
    for (const Term &x : row)
      s += (s.empty() ? "" : ",") + pretty(x);
    out.push_back(s);
  }
  return out;
}

WitnessTable harvested(const Document &doc, std::size_t gamma, std::size_t arity) {
  EqTheory th = doc.theory();
  auto axioms = doc.axiom_map();
  UnfoldOptions o;
  o.theory = &th;
  o.theory_axioms = &axioms;
  o.fuel = 100000;
  Subst sigma;
  for (const Parameter &p : parameters_of(doc.schema->end_sequent(), ParamKind::Passive))
    sigma[p.key()] = numeral(gamma);
  UnfoldReport r = unfold(*doc.schema, sigma, o);
  EXPECT_TRUE(verify_unfolded(r));
  return normalize_table(harvest_witnesses(r.proof, arity), th);
}

} // namespace

TEST(Herbrand, IterationFixture) {
  Document doc = sktest::load("it.psk");
  HerbrandSystem h = extract_herbrand_system(doc);
  EXPECT_EQ(h.rules.size(), 2u);
  EXPECT_EQ(h.params.size(), 1u);
  EXPECT_EQ(h.vars.size(), 1u);
  EXPECT_EQ(rows(normalize_witnesses(h, {2})), (std::vector<std::string>{"f(f(a))"}));
  EXPECT_EQ(rows(normalize_witnesses(h, {0})), (std::vector<std::string>{"a"}));

  EXPECT_TRUE(verify_herbrand_disjunction(h, {2}, normalize_witnesses(h, {2})));
  EXPECT_FALSE(verify_herbrand_disjunction(h, {2}, {}));
  EXPECT_FALSE(verify_herbrand_disjunction(h, {2}, {{sktest::T("a")}}));
}

TEST(Herbrand, TwoWitnessesPerStep) {
  Document doc = sktest::load("pairs.psk");
  HerbrandSystem h = extract_herbrand_system(doc);
  WitnessTable t = normalize_witnesses(h, {3});
  EXPECT_EQ(t.size(), 7u);
  EXPECT_TRUE(verify_herbrand_disjunction(h, {3}, t));
  EXPECT_LE(h.rules.size(), 2 * doc.schema->size());
}

TEST(Herbrand, CrossValidationWithUnfolding) {
  for (const char *file : {"it.psk", "pairs.psk"}) {
    Document doc = sktest::load(file);
    HerbrandSystem h = extract_herbrand_system(doc);
    EXPECT_LE(h.rules.size(), 2 * doc.schema->size()) << file;
    for (std::size_t g = 0; g <= 5; ++g) {
      WitnessTable t = normalize_witnesses(h, std::vector<std::size_t>(h.params.size(), g));
      EXPECT_TRUE(same_witnesses(t, harvested(doc, g, h.vars.size()))) << file << " at " << g;
      EXPECT_TRUE(verify_herbrand_disjunction(h, std::vector<std::size_t>(h.params.size(), g), t)) << file;
    }
  }
}

TEST(Herbrand, RightHandSidesStayLinear) {
  for (const char *file : {"it.psk", "pairs.psk"}) {
    Document doc = sktest::load(file);
    HerbrandSystem h = extract_herbrand_system(doc);
    std::size_t schema_size = 0;
    for (const Component &c : doc.schema->components)
      schema_size += tree_size(c.base) + tree_size(c.step);
    EXPECT_LE(rhs_size(h), 4 * schema_size) << file;
  }
}

TEST(Herbrand, MoreWitnessesKeepValidity) {
  Document doc = sktest::load("it.psk");
  HerbrandSystem h = extract_herbrand_system(doc);
  WitnessTable t = normalize_witnesses(h, {3});
  ASSERT_TRUE(verify_herbrand_disjunction(h, {3}, t));
  for (const char *extra : {"a", "(f a)", "(f (f (f (f a))))"}) {
    t.push_back({sktest::T(extra)});
    EXPECT_TRUE(verify_herbrand_disjunction(h, {3}, t)) << extra;
  }
}

TEST(Herbrand, SameWitnessesIsMultisetEquality) {
  WitnessTable a = {{sktest::T("a")}, {sktest::T("(f a)")}, {sktest::T("a")}};
  WitnessTable b = {{sktest::T("(f a)")}, {sktest::T("a")}, {sktest::T("a")}};
  WitnessTable c = {{sktest::T("(f a)")}, {sktest::T("a")}};
  EXPECT_TRUE(same_witnesses(a, b));
  EXPECT_FALSE(same_witnesses(a, c));
}

TEST(Herbrand, TextRoundTrip) {
  for (const char *file : {"it.psk", "pairs.psk"}) {
    HerbrandSystem h = extract_herbrand_system(sktest::load(file));
    std::string text = print_hrs(h);
    HerbrandSystem back = parse_hrs(text);
    EXPECT_EQ(print_hrs(back), text) << file;
    EXPECT_EQ(rows(normalize_witnesses(back, {4})), rows(normalize_witnesses(h, {4}))) << file;
  }
}

TEST(Herbrand, ExtractionPreconditions) {
  EXPECT_EQ(code_of([] { extract_herbrand_system(sktest::load("assoc.psk")); }), ErrorCode::WrongEndSequentShape);
  EXPECT_EQ(code_of([] { extract_herbrand_system(sktest::load("nonstrict.psk")); }), ErrorCode::NotStrict);
  EXPECT_EQ(code_of([] { extract_herbrand_system(sktest::load("eelim.psk")); }), ErrorCode::EmptySchema);

  // Route the top component of pairs through a cut on its own end formula.
  Document doc = sktest::load("pairs.psk");
  Component &top = doc.schema->components.front();
  Formula e = top.es.suc.front();
  top.base = build::cut(top.base, build::ax(e), e);
  top.step = build::cut(top.step, build::ax(e), e);
  EXPECT_EQ(code_of([&] { extract_herbrand_system(doc); }), ErrorCode::QuantifiedCut);
}

TEST(Herbrand, EvaluationErrors) {
  HerbrandSystem h = extract_herbrand_system(sktest::load("it.psk"));
  EXPECT_EQ(code_of([&] { normalize_witnesses(h, {1, 2}); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([&] { normalize_witnesses(h, {50}, 5); }), ErrorCode::FuelExhausted);

  HerbrandSystem partial = h;
  partial.rules.pop_back();
  EXPECT_EQ(code_of([&] { normalize_witnesses(partial, {2}); }), ErrorCode::NonConstructorNormalForm);
}
