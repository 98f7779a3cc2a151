#include "support.hpp"

using namespace schemakern;

namespace {

struct Loaded {
  Document doc;
  EqTheory th;
  std::map<std::string, Sequent> axioms;
  TranslateOptions opts;

  explicit Loaded(const std::string &name) : doc(sktest::load(name)), th(doc.theory()), axioms(doc.axiom_map()) {
    opts.theory = &th;
    opts.theory_axioms = &axioms;
  }

  CheckReport check(const Proof &p, Profile prof) const {
    CheckOptions co;
    co.profile = prof;
    co.theory = &th;
    co.theory_axioms = &axioms;
    return check_derivation(p, co);
  }
};

ErrorCode code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  throw std::runtime_error("no error raised");
}

bool unfolds_soundly(const PSchema &s, const Loaded &l, unsigned max) {
  std::vector<Parameter> ps;
  for (const Parameter &p : parameters_of(s.end_sequent(), ParamKind::Passive))
    ps.push_back(p);
  std::size_t combos = 1;
  for (std::size_t i = 0; i < ps.size(); ++i)
    combos *= max + 1;
  UnfoldOptions o;
  o.theory = &l.th;
  o.theory_axioms = &l.axioms;
  o.fuel = 100000;
  for (std::size_t c = 0; c < combos; ++c) {
    Subst sigma;
    std::size_t x = c;
    for (const Parameter &p : ps) {
      sigma[p.key()] = numeral(x % (max + 1));
      x /= max + 1;
    }
    if (!verify_unfolded(unfold(s, sigma, o)))
      return false;
  }
  return true;
}

// Every node sequent with fresh induction names renamed by `rename`.
std::set<std::string> sequents(const Proof &p, const Subst &rename) {
  std::set<std::string> out;
  for_each_node(p, [&](const ProofNode &n, const auto &) { out.insert(to_sexpr(substitute(n.conclusion, rename))); });
  return out;
}

} // namespace

TEST(Translate, SchemaRoundTrips) {
  for (const char *file : {"assoc.psk", "comm.psk", "ex2_zero_commute.psk", "twolemma.psk", "pairs.psk", "it.psk"}) {
    Loaded l(file);
    const PSchema &s = *l.doc.schema;
    Proof p = schema_to_mvlkie(s, l.opts);
    CheckReport r = l.check(p, Profile::mvlkie());
    EXPECT_TRUE(r.valid) << file;
    EXPECT_TRUE(r.proof) << file;
    EXPECT_TRUE(p->conclusion.same_as(s.end_sequent())) << file;
    EXPECT_EQ(count_rule(p, Rule::Link), 0u);

    PSchema back = mvlkie_to_schema(p, l.opts);
    SchemaCheckOptions so;
    so.theory = &l.th;
    so.theory_axioms = &l.axioms;
    SchemaReport rep = validate_schema(back, so);
    EXPECT_TRUE(rep.valid && rep.strict) << file << ": " << rep.summary();
    EXPECT_TRUE(back.end_sequent().same_as(s.end_sequent())) << file;
    EXPECT_EQ(back.components.size(), count_rule(p, Rule::MvInd) + 1) << file;
    EXPECT_TRUE(unfolds_soundly(back, l, 2)) << file;
  }
}

TEST(Translate, InductionCounts) {
  Loaded assoc("assoc.psk");
  EXPECT_EQ(count_rule(schema_to_mvlkie(*assoc.doc.schema, assoc.opts), Rule::MvInd), 1u);
  Loaded comm("comm.psk");
  EXPECT_EQ(count_rule(schema_to_mvlkie(*comm.doc.schema, comm.opts), Rule::MvInd), 4u);
  Loaded two("twolemma.psk");
  EXPECT_EQ(count_rule(schema_to_mvlkie(*two.doc.schema, two.opts), Rule::MvInd), 2u);
}

TEST(Translate, CommutativityProofToSchema) {
  Loaded l("comm_mvlkie.psk");
  Proof p = sktest::proof_of(l.doc, "commutativity");
  ASSERT_TRUE(l.check(p, Profile::mvlkie()).valid);
  PSchema s = mvlkie_to_schema(p, l.opts);
  std::vector<std::string> names;
  for (const Component &c : s.components)
    names.push_back(c.symbol);
  EXPECT_EQ(names, (std::vector<std::string>{"top", "ind0", "ind1", "ind2"}));
  EXPECT_TRUE(s.end_sequent().same_as(p->conclusion));
  EXPECT_TRUE(unfolds_soundly(s, l, 3));
}

TEST(Translate, EEliminationOnFixtures) {
  Loaded l("eelim.psk");
  std::map<std::string, std::size_t> cuts = {
      {"add_zero", 2}, {"under_succ", 3}, {"antecedent", 4}, {"mul_zero", 4}, {"succ_step", 4}};
  ASSERT_EQ(l.doc.proofs.size(), cuts.size());
  for (const NamedProof &np : l.doc.proofs) {
    std::size_t es = count_rule(np.proof, Rule::ERule);
    ASSERT_LE(es, 5u);
    EElimReport r = eliminate_e_rule(np.proof, l.th);
    EXPECT_EQ(count_rule(r.proof, Rule::ERule), 0u) << np.name;
    EXPECT_EQ(r.eliminated, es) << np.name;
    EXPECT_TRUE(l.check(r.proof, Profile::mvlkie()).valid) << np.name;
    EXPECT_TRUE(r.proof->conclusion.same_as(np.proof->conclusion)) << np.name;
    EXPECT_LE(r.cuts_added, 4 * r.eliminated) << np.name;
    EXPECT_EQ(r.cuts_added, cuts.at(np.name)) << np.name;
  }
}

TEST(Translate, EEliminationOnCommutativity) {
  Loaded l("comm_mvlkie.psk");
  Proof p = sktest::proof_of(l.doc, "commutativity");
  EElimReport r = eliminate_e_rule(p, l.th);
  EXPECT_EQ(r.eliminated, count_rule(p, Rule::ERule));
  EXPECT_EQ(count_rule(r.proof, Rule::ERule), 0u);
  EXPECT_TRUE(l.check(r.proof, Profile::mvlkie()).valid);
  EXPECT_EQ(count_rule(r.proof, Rule::MvInd), 3u);
}

TEST(Translate, EEliminationNeedsArithmeticRules) {
  Loaded l("it.psk");
  Proof p = schema_to_mvlkie(*l.doc.schema, l.opts);
  ASSERT_GT(count_rule(p, Rule::ERule), 0u);
  EXPECT_EQ(code_of([&] { eliminate_e_rule(p, l.th); }), ErrorCode::NonPaRule);
}

TEST(Translate, PraOfCommutativity) {
  Loaded l("comm_mvlkie.psk");
  Proof p = eliminate_e_rule(sktest::proof_of(l.doc, "commutativity"), l.th).proof;
  Proof pra = to_pra(p, l.opts);
  EXPECT_TRUE(l.check(pra, Profile::pra_profile()).valid);
  EXPECT_EQ(count_rule(pra, Rule::Ind), 3u);
  EXPECT_EQ(count_rule(pra, Rule::MvInd), 0u);
  bool clean = true;
  for_each_node(pra, [&](const ProofNode &n, const auto &) {
    clean = clean && parameters_of(n.conclusion, ParamKind::Active).empty() &&
            parameters_of(n.conclusion, ParamKind::Internal).empty();
  });
  EXPECT_TRUE(clean);

  // The displayed commutativity proof, with the outer fresh name read as gamma.
  std::set<std::string> got = sequents(pra, single(sktest::T("p:_v0"), sktest::T("p:gamma")));
  for (const char *want : {
           "(seq (ant (= (^a 0 (^a 1 p:gamma)) (^a (^a 0 1) p:gamma))) "
           "(suc (= (^a p:alpha (^a 1 p:gamma)) (^a (^a p:alpha 1) p:gamma))))",
           "(seq (ant (= (^a 0 1) (^a 1 0))) (suc (= (^a p:alpha 1) (^a 1 p:alpha))))",
           "(seq (ant (= (^a p:alpha 0) (^a 0 p:alpha))) (suc (= (^a p:alpha p:beta) (^a p:beta p:alpha))))",
           "(seq (ant (= (^a p:alpha p:gamma) (^a p:gamma p:alpha))) "
           "(suc (= (^a p:alpha (s p:gamma)) (^a (s p:gamma) p:alpha))))",
           "(seq (ant (= (^a p:alpha p:gamma) (^a p:gamma p:alpha))) "
           "(suc (= (^a p:alpha (^a 1 p:gamma)) (^a (s p:gamma) p:alpha))))",
       }) {
    EXPECT_TRUE(got.count(to_sexpr(read_sequent(want)))) << want;
  }
}

TEST(Translate, PraBackTranslation) {
  Loaded l("comm_pra.psk");
  Proof pra = sktest::proof_of(l.doc, "pra");
  Proof back = from_pra(pra, l.opts);
  EXPECT_TRUE(l.check(back, Profile::mvlkie()).valid);
  EXPECT_TRUE(back->conclusion.same_as(pra->conclusion));
  EXPECT_EQ(count_rule(back, Rule::MvInd), count_rule(pra, Rule::Ind));
  EXPECT_EQ(count_rule(back, Rule::Ind), 0u);
  Proof again = to_pra(back, l.opts);
  EXPECT_EQ(count_rule(again, Rule::Ind), 3u);
  EXPECT_EQ(tree_size(again), tree_size(pra));
}

TEST(Translate, PraFromSchemaPipeline) {
  for (const char *file : {"assoc.psk", "comm.psk", "twolemma.psk", "ex2_zero_commute.psk"}) {
    Loaded l(file);
    Proof mv = schema_to_mvlkie(*l.doc.schema, l.opts);
    Proof pra = to_pra(eliminate_e_rule(mv, l.th).proof, l.opts);
    EXPECT_TRUE(l.check(pra, Profile::pra_profile()).valid) << file;
    EXPECT_EQ(count_rule(pra, Rule::Ind), count_rule(mv, Rule::MvInd)) << file;
  }
}

TEST(Translate, Errors) {
  Loaded ns("nonstrict.psk");
  EXPECT_EQ(code_of([&] { schema_to_mvlkie(*ns.doc.schema, ns.opts); }), ErrorCode::NotStrict);
  TranslateOptions general = ns.opts;
  general.general = true;
  Proof p = schema_to_mvlkie(*ns.doc.schema, general);
  EXPECT_EQ(count_rule(p, Rule::TheoryAxiom), 1u);

  Loaded comm("comm_mvlkie.psk");
  Proof ef = eliminate_e_rule(sktest::proof_of(comm.doc, "commutativity"), comm.th).proof;
  Proof clash = substitute(ef, single(sktest::T("p:beta"), sktest::T("p:_v7")));
  EXPECT_EQ(code_of([&] { to_pra(clash, comm.opts); }), ErrorCode::FreshNameClash);

  // E inferences are not part of the PRA calculus
  EXPECT_EQ(code_of([&] { to_pra(sktest::proof_of(comm.doc, "commutativity"), comm.opts); }), ErrorCode::CheckFailed);

  Loaded ex2("ex2_zero_commute.psk");
  Proof nu = sktest::proof_of(ex2.doc, "nu");
  EXPECT_EQ(code_of([&] { to_pra(nu, ex2.opts); }), ErrorCode::NotStrict);
  EXPECT_EQ(code_of([&] { mvlkie_to_schema(build::refl(sktest::T("n:n")), ex2.opts); }), ErrorCode::NotStrict);
  Proof two = build::wl(build::refl(sktest::T("n:n")), sktest::F("(= n:m n:m)"));
  EXPECT_EQ(code_of([&] { mvlkie_to_schema(two, ex2.opts); }), ErrorCode::CheckFailed);
}

TEST(Translate, Generalize) {
  Loaded l("comm_pra.psk");
  Proof g = generalize(sktest::proof_of(l.doc, "pra"));
  EXPECT_EQ(pretty(g->conclusion), "^a(alpha, 0) = ^a(0, alpha) |- forall beta. ^a(alpha, beta) = ^a(beta, alpha)");
  EXPECT_TRUE(l.check(g, Profile::pra_profile()).valid);

  Loaded assoc("assoc.psk");
  Proof a = generalize(schema_to_mvlkie(*assoc.doc.schema, assoc.opts));
  EXPECT_EQ(pretty(a->conclusion),
            "|- forall alpha. forall beta. forall gamma. ^a(alpha, ^a(beta, gamma)) = ^a(^a(alpha, beta), gamma)");
  EXPECT_TRUE(assoc.check(a, Profile::mvlkie()).valid);
}
