#include "support.hpp"

#include <functional>

using namespace schemakern;
using sktest::F;
using sktest::T;

namespace {

struct Fixture {
  Document doc;
  EqTheory th;
  std::map<std::string, Sequent> axioms;

  explicit Fixture(const std::string &name) : doc(sktest::load(name)), th(doc.theory()), axioms(doc.axiom_map()) {}

  CheckOptions options(Profile prof = Profile::any()) const {
    CheckOptions o;
    o.profile = prof;
    o.theory = &th;
    o.theory_axioms = &axioms;
    if (doc.schema)
      o.resolver = schema_resolver(*doc.schema);
    return o;
  }
};

Proof mutate(const Proof &p, const std::vector<std::size_t> &path, const std::function<void(ProofNode &)> &f) {
  ProofNode copy = *node_at(p, path);
  f(copy);
  return replace_at_path(p, path, 0, build::node(std::move(copy)));
}

std::vector<std::size_t> first_node(const Proof &p, Rule r) {
  std::vector<std::size_t> found;
  bool done = false;
  for_each_node(p, [&](const ProofNode &n, const std::vector<std::size_t> &path) {
    if (!done && n.rule == r) {
      found = path;
      done = true;
    }
  });
  if (!done)
    throw std::runtime_error(std::string("no ") + rule_tag(r) + " node");
  return found;
}

bool has_code_at(const CheckReport &r, const std::string &code, const std::vector<std::size_t> &path) {
  for (const Violation &v : r.violations)
    if (v.code == code && v.path == path)
      return true;
  return false;
}

std::string codes(const CheckReport &r) {
  std::string s;
  for (const Violation &v : r.violations)
    s += v.code + path_string(v.path) + " ";
  return s;
}

} // namespace

TEST(Calculus, FixtureProofsAreValid) {
  for (const char *name : {"ex2_zero_commute.psk", "comm_mvlkie.psk", "eelim.psk", "comm_pra.psk"}) {
    Fixture fx(name);
    for (const NamedProof &p : fx.doc.proofs) {
      Profile prof = p.profile ? *profile_from_name(*p.profile) : Profile::any();
      CheckReport r = check_derivation(p.proof, fx.options(prof));
      EXPECT_TRUE(r.valid) << name << " " << p.name << ": " << codes(r);
    }
  }
}

TEST(Calculus, Classification) {
  Fixture fx("ex2_zero_commute.psk");
  CheckReport pi = check_derivation(sktest::proof_of(fx.doc, "pi"), fx.options());
  CheckReport nu = check_derivation(sktest::proof_of(fx.doc, "nu"), fx.options());
  EXPECT_EQ(pi.classification(), "inactive, proof");
  EXPECT_EQ(nu.classification(), "{n}-active, derivation");
  EXPECT_EQ(nu.nodes, 4u);
}

TEST(Calculus, PropositionalRules) {
  Formula A = F("(P a)"), B = F("(Q a)");
  Proof and_r = build::andr(build::ax(A), build::ax(B), A, B);
  Proof and_l = build::andl(and_r, A, B);
  Proof imp_r = build::impr(and_l, Formula::conj(A, B), Formula::conj(A, B));
  CheckOptions o;
  CheckReport r = check_derivation(imp_r, o);
  EXPECT_TRUE(r.valid) << codes(r);
  EXPECT_EQ(pretty(imp_r->conclusion), "|- ((P(a) & Q(a)) -> (P(a) & Q(a)))");

  Proof nl = build::notl(build::ax(A), A);
  Proof nr = build::notr(nl, Formula::neg(A));
  EXPECT_TRUE(check_derivation(nr, o).valid);
  Proof weak = build::wl(build::wr(build::ax(A), B), B);
  EXPECT_TRUE(check_derivation(build::cl(build::wl(weak, B), B), o).valid);
}

TEST(Calculus, CutAndQuantifiers) {
  Formula Px = F("(all p:x (P p:x))"), Pa = F("(P p:alpha)");
  Proof inst = build::quant(Rule::ForAllL, build::ax(Pa), Px, T("p:alpha"));
  Proof gen = build::quant(Rule::ForAllR, inst, Px, T("p:alpha"));
  CheckOptions o;
  EXPECT_TRUE(check_derivation(gen, o).valid);
  EXPECT_EQ(pretty(gen->conclusion), "forall x. P(x) |- forall x. P(x)");
  Proof c = build::cut(gen, build::ax(Px), Px);
  EXPECT_TRUE(check_derivation(c, o).valid);
}

TEST(Calculus, EqualityAxiomSchemes) {
  CheckOptions o;
  EXPECT_TRUE(check_derivation(build::refl(T("(^a 0 p:alpha)")), o).valid);
  Sequent succ{{F("(= p:alpha p:beta)")}, {F("(= (s p:alpha) (s p:beta))")}};
  EXPECT_TRUE(check_derivation(build::eqax(EqScheme::Succ, succ), o).valid);
  Sequent wrong{{F("(= p:alpha p:beta)")}, {F("(= (s p:beta) (s p:beta))")}};
  CheckReport r = check_derivation(build::eqax(EqScheme::Succ, wrong), o);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code_at(r, "BadSchemeInstance", {}));
}

// Each case corrupts exactly one node of a valid fixture proof.
struct Mutation {
  const char *name;
  const char *fixture;
  const char *proof;
  std::function<std::vector<std::size_t>(const Proof &)> where;
  std::function<void(ProofNode &)> change;
  const char *code;
};

TEST(Calculus, SingleNodeMutationsAreRejected) {
  auto at = [](std::vector<std::size_t> p) { return [p](const Proof &) { return p; }; };
  auto first = [](Rule r) { return [r](const Proof &p) { return first_node(p, r); }; };
  std::vector<Mutation> cases = {
      {"refl scheme replaced by succ", "ex2_zero_commute.psk", "pi", at({0, 0}),
       [](ProofNode &n) { n.scheme = EqScheme::Succ; }, "BadSchemeInstance"},
      {"E conclusion changed", "ex2_zero_commute.psk", "pi", at({}),
       [](ProofNode &n) { n.conclusion = read_sequent("(seq (ant) (suc (= (^a 0 0) 1)))"); }, "NotJoinable"},
      {"cut formula changed", "ex2_zero_commute.psk", "nu", at({0}),
       [](ProofNode &n) { n.cut_formula = read_formula("(= (^a n:n 0) 0)"); }, "PrincipalMissing"},
      {"cut premise dropped", "ex2_zero_commute.psk", "nu", at({0}),
       [](ProofNode &n) { n.premises.pop_back(); }, "ArityMismatch"},
      {"link argument changed", "ex2_zero_commute.psk", "nu", first(Rule::Link),
       [](ProofNode &n) { n.link->arg = read_term("(s n:n)"); }, "LinkMismatch"},
      {"link target renamed", "ex2_zero_commute.psk", "nu", first(Rule::Link),
       [](ProofNode &n) { n.link->target = "zz"; }, "UnknownLink"},
      {"axiom succedent changed", "comm_mvlkie.psk", "commutativity", first(Rule::Axiom),
       [](ProofNode &n) { n.conclusion.suc[0] = read_formula("(= n:n n:n)"); }, "BadAxiom"},
      {"induction formula changed", "comm_mvlkie.psk", "commutativity", at({}),
       [](ProofNode &n) { n.induction->formula = read_formula("(= (^a n:n 0) n:n)"); }, "PrincipalMissing"},
      {"induction target changed", "comm_mvlkie.psk", "commutativity", at({}),
       [](ProofNode &n) { n.induction->target = read_term("p:alpha"); }, "ContextMismatch"},
      {"induction parameter made passive", "comm_mvlkie.psk", "commutativity", at({}),
       [](ProofNode &n) { n.induction->param = read_term("p:n"); }, "BadInduction"},
      {"eqax pred antecedent dropped", "comm_mvlkie.psk", "commutativity",
       [](const Proof &p) {
         std::vector<std::size_t> found;
         for_each_node(p, [&](const ProofNode &n, const std::vector<std::size_t> &path) {
           if (found.empty() && n.rule == Rule::EqAxiom && n.scheme == EqScheme::Pred)
             found = path;
         });
         return found;
       },
       [](ProofNode &n) { n.conclusion.ant.pop_back(); }, "BadSchemeInstance"},
      {"theory axiom label unknown", "comm_pra.psk", "pra", first(Rule::TheoryAxiom),
       [](ProofNode &n) { n.label = "pa:nothing"; }, "UnknownTheoryAxiom"},
      {"theory axiom sequent changed", "comm_pra.psk", "pra", first(Rule::TheoryAxiom),
       [](ProofNode &n) { n.conclusion.suc[0] = read_formula("(= 0 (s 0))"); }, "TheoryAxiomMismatch"},
      {"mvind under the PRA profile", "comm_pra.psk", "pra", first(Rule::Ind),
       [](ProofNode &n) { n.rule = Rule::MvInd; }, "MvIndNotAllowed"},
  };
  std::size_t rejected = 0;
  for (const Mutation &m : cases) {
    Fixture fx(m.fixture);
    const NamedProof *np = fx.doc.find_proof(m.proof);
    ASSERT_NE(np, nullptr) << m.name;
    Profile prof = np->profile ? *profile_from_name(*np->profile) : Profile::any();
    ASSERT_TRUE(check_derivation(np->proof, fx.options(prof)).valid) << m.name;
    std::vector<std::size_t> path = m.where(np->proof);
    Proof bad = mutate(np->proof, path, m.change);
    CheckReport r = check_derivation(bad, fx.options(prof));
    EXPECT_FALSE(r.valid) << m.name;
    EXPECT_TRUE(has_code_at(r, m.code, path)) << m.name << ": got " << codes(r);
    rejected += !r.valid;
  }
  EXPECT_EQ(rejected, cases.size());
  EXPECT_GE(cases.size(), 10u);
}

TEST(Calculus, EigenvariableConditions) {
  Formula Px = F("(all p:x (P p:x))"), Pa = F("(P p:alpha)");
  CheckOptions o;
  // alpha stays free in the antecedent
  Proof captured = build::quant(Rule::ForAllR, build::ax(Pa), Px, T("p:alpha"));
  CheckReport r = check_derivation(captured, o);
  EXPECT_TRUE(has_code_at(r, "EigenvariableCaptured", {})) << codes(r);

  Formula Pn = F("(P n:n)");
  Proof active = build::quant(Rule::ForAllR, build::wl(build::refl(T("0")), Pn), F("(all p:x (= 0 0))"), T("n:n"));
  r = check_derivation(active, o);
  EXPECT_TRUE(has_code_at(r, "ActiveQuantified", {})) << codes(r);

  Proof no_term = build::quant(Rule::ForAllL, build::ax(Pa), Px, T("p:alpha"));
  ProofNode copy = *no_term;
  copy.term.reset();
  r = check_derivation(build::node(copy), o);
  EXPECT_TRUE(has_code_at(r, "MissingPayload", {}));
}

TEST(Calculus, ContextMismatch) {
  Formula A = F("(P a)"), B = F("(Q a)");
  Proof w = build::wl(build::ax(A), B);
  ProofNode copy = *w;
  copy.conclusion.suc.push_back(B);
  CheckReport r = check_derivation(build::node(copy), CheckOptions{});
  EXPECT_TRUE(has_code_at(r, "ContextMismatch", {})) << codes(r);
}

TEST(Calculus, ProfilesRestrictRules) {
  Fixture ex2("ex2_zero_commute.psk");
  Proof nu = sktest::proof_of(ex2.doc, "nu");
  CheckReport r = check_derivation(nu, ex2.options(Profile::mvlkie()));
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code_at(r, "LinkNotAllowed", first_node(nu, Rule::Link)));
  r = check_derivation(sktest::proof_of(ex2.doc, "pi"), ex2.options(Profile::pra_profile()));
  EXPECT_TRUE(has_code_at(r, "ERuleNotAllowed", {})) << codes(r);

  Fixture comm("comm_mvlkie.psk");
  r = check_derivation(sktest::proof_of(comm.doc, "commutativity"), comm.options(Profile::lks()));
  EXPECT_TRUE(has_code_at(r, "MvIndNotAllowed", {}));
  r = check_derivation(sktest::proof_of(comm.doc, "commutativity"), comm.options(Profile::pra_profile()));
  EXPECT_FALSE(r.valid);
}

TEST(Calculus, PraProfileRejectsActiveParameters) {
  Proof p = build::refl(T("n:n"));
  CheckReport r = check_derivation(p, CheckOptions{Profile::pra_profile(), nullptr, kDefaultFuel, {}, nullptr});
  EXPECT_TRUE(has_code_at(r, "NonPassiveParameter", {})) << codes(r);
}

TEST(Calculus, MultipleActiveParameters) {
  Proof p = build::wl(build::refl(T("n:n")), F("(= n:m n:m)"));
  CheckReport r = check_derivation(p, CheckOptions{});
  EXPECT_TRUE(has_code_at(r, "MultipleActiveParams", {})) << codes(r);
}

TEST(Calculus, SubstituteProof) {
  Fixture fx("ex2_zero_commute.psk");
  Proof nu = sktest::proof_of(fx.doc, "nu");
  Proof at3 = substitute(nu, single(T("n:n"), numeral(3)));
  EXPECT_EQ(pretty(at3->conclusion), "|- ^a(4, 0) = ^a(0, 4)");
  EXPECT_EQ(tree_size(at3), tree_size(nu));
  EXPECT_EQ(node_at(at3, first_node(at3, Rule::Link))->link->arg, numeral(3));
}
