#include "support.hpp"

using namespace schemakern;

namespace {

struct Loaded {
  Document doc;
  EqTheory th;
  std::map<std::string, Sequent> axioms;

  explicit Loaded(const std::string &name) : doc(sktest::load(name)), th(doc.theory()), axioms(doc.axiom_map()) {}

  SchemaReport validate(const PSchema &s) const {
    SchemaCheckOptions o;
    o.theory = &th;
    o.theory_axioms = &axioms;
    return validate_schema(s, o);
  }
  SchemaReport validate() const { return validate(*doc.schema); }
};

bool has_code(const SchemaReport &r, const std::string &code) {
  for (const Violation &v : r.diagnostics)
    if (v.code == code)
      return true;
  return false;
}

std::string codes(const SchemaReport &r) {
  std::string s;
  for (const Violation &v : r.diagnostics)
    s += v.code + "(" + v.where + ": " + v.message + ") ";
  return s;
}

Component &component(PSchema &s, const std::string &sym) {
  for (Component &c : s.components)
    if (c.symbol == sym)
      return c;
  throw std::runtime_error("no component " + sym);
}

} // namespace

TEST(Schema, BundledSchemataValidate) {
  struct Want {
    const char *file;
    std::size_t components;
    bool complete;
    bool strict;
  };
  for (const Want &w : {Want{"assoc.psk", 2, true, true}, Want{"comm.psk", 5, true, true},
                        Want{"ex2_zero_commute.psk", 2, true, true}, Want{"it.psk", 1, true, true},
                        Want{"pairs.psk", 2, true, true}, Want{"twolemma.psk", 3, true, true},
                        Want{"nonstrict.psk", 2, false, false}}) {
    Loaded l(w.file);
    ASSERT_TRUE(l.doc.schema) << w.file;
    SchemaReport r = l.validate();
    EXPECT_TRUE(r.valid) << w.file << ": " << codes(r);
    EXPECT_EQ(r.components, w.components) << w.file;
    EXPECT_EQ(r.complete, w.complete) << w.file;
    EXPECT_EQ(r.strict, w.strict) << w.file;
    // strict => complete => valid
    EXPECT_TRUE(!r.strict || r.complete);
    EXPECT_TRUE(!r.complete || r.valid);
  }
}

TEST(Schema, Summaries) {
  EXPECT_EQ(Loaded("assoc.psk").validate().summary(), "valid, complete P-schema, 2 components (strict)");
  EXPECT_EQ(Loaded("it.psk").validate().summary(), "valid, complete P-schema, 1 component (strict)");
  EXPECT_EQ(Loaded("nonstrict.psk").validate().summary(), "valid, general P-schema, 2 components");
}

TEST(Schema, LinkabilityInCommutativity) {
  Loaded l("comm.psk");
  const PSchema &s = *l.doc.schema;
  EXPECT_EQ(linkable(s.at("xi"), s.at("phi")).value, Linkability::StrictlyLinkable);
  EXPECT_EQ(linkable(s.at("xi"), s.at("psi")).value, Linkability::StrictlyLinkable);
  EXPECT_EQ(linkable(s.at("top"), s.at("xi")).value, Linkability::StrictlyLinkable);
  EXPECT_EQ(linkable(s.at("phi"), s.at("psi")).value, Linkability::None);
  EXPECT_EQ(linkable(s.at("chi"), s.at("phi")).value, Linkability::None);
}

TEST(Schema, LinkMissingPassiveIsNotLinkable) {
  Loaded l("assoc.psk");
  PSchema s = *l.doc.schema;
  // es(phi) mentions gamma; a link sequent with gamma replaced by 2 cannot target it.
  Component &chi = component(s, "chi");
  std::vector<std::size_t> path = link_sites(chi).back().path;
  ProofNode leaf = *node_at(chi.step, path);
  leaf.conclusion = substitute(leaf.conclusion, single(sktest::T("p:gamma"), numeral(2)));
  chi.step = replace_at_path(chi.step, path, 0, build::node(leaf));
  EXPECT_EQ(linkable(l.doc.schema->at("chi"), s.at("phi")).value, Linkability::StrictlyLinkable);
  LinkabilityResult r = linkable(chi, s.at("phi"));
  EXPECT_EQ(r.value, Linkability::None);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_NE(r.diagnostics[0].find("gamma"), std::string::npos);
}

TEST(Schema, LinkSitesOfAssociativity) {
  Loaded l("assoc.psk");
  const Component &phi = l.doc.schema->at("phi");
  std::vector<LinkSite> sites = link_sites(phi);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_TRUE(sites[0].in_step);
  EXPECT_EQ(sites[0].data.target, "phi");
}

TEST(Schema, SubSchemata) {
  Loaded assoc("assoc.psk");
  auto subs = sub_schemata(*assoc.doc.schema);
  // chi calls phi at alpha, a passive of the end-sequent, so {phi} alone does not qualify.
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_EQ(subs[0].members, (std::vector<std::string>{"chi", "phi"}));
  EXPECT_FALSE(subs[0].computational);

  Loaded comm("comm.psk");
  for (const SubSchema &s : sub_schemata(*comm.doc.schema))
    EXPECT_FALSE(s.computational);

  Loaded ns("nonstrict.psk");
  bool computational = false;
  for (const SubSchema &s : sub_schemata(*ns.doc.schema))
    computational = computational || s.computational;
  EXPECT_TRUE(computational);
}

TEST(Schema, MutualLinksAreCyclic) {
  Loaded l("comm.psk");
  PSchema s = *l.doc.schema;
  // chi's base links back to xi at a ground argument
  Component &chi = component(s, "chi");
  Sequent want = s.at("xi").instance(LinkData{"xi", Term::zero(), {}, {}});
  ProofNode leaf;
  leaf.rule = Rule::Link;
  leaf.conclusion = want;
  leaf.link = LinkData{"xi", Term::zero(), {}, {}};
  chi.base = build::erule(build::node(leaf), chi.base->conclusion);
  SchemaReport r = l.validate(s);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "CyclicLinks") || has_code(r, "OrderViolation")) << codes(r);
}

TEST(Schema, AnyReversedEdgeIsCyclic) {
  for (const char *file : {"assoc.psk", "comm.psk", "twolemma.psk", "pairs.psk", "ex2_zero_commute.psk"}) {
    Loaded l(file);
    const PSchema &base = *l.doc.schema;
    auto reach = order_closure(base);
    std::size_t tried = 0;
    for (const auto &[a, below] : reach)
      for (const std::string &b : below) {
        if (a == b)
          continue;
        PSchema s = base;
        s.order.emplace_back(b, a);
        SchemaReport r = l.validate(s);
        EXPECT_FALSE(r.valid) << file << " " << b << " < " << a;
        EXPECT_TRUE(has_code(r, "CyclicLinks")) << file << " " << b << " < " << a << ": " << codes(r);
        ++tried;
      }
    EXPECT_GT(tried, 0u) << file;
  }
}

TEST(Schema, DuplicateSymbol) {
  Loaded l("assoc.psk");
  PSchema s = *l.doc.schema;
  s.components.push_back(s.components.back());
  SchemaReport r = l.validate(s);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "SymbolClash")) << codes(r);
}

TEST(Schema, MissingStep) {
  Loaded l("assoc.psk");
  PSchema s = *l.doc.schema;
  component(s, "phi").step = nullptr;
  SchemaReport r = l.validate(s);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "MissingInductivePair")) << codes(r);
}

TEST(Schema, OrderEdges) {
  Loaded l("comm.psk");
  PSchema unknown = *l.doc.schema;
  unknown.order.emplace_back("xi", "nosuch");
  EXPECT_TRUE(has_code(l.validate(unknown), "OrderViolation"));

  PSchema missing = *l.doc.schema;
  std::erase(missing.order, std::pair<std::string, std::string>{"xi", "phi"});
  SchemaReport r = l.validate(missing);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "OrderViolation")) << codes(r);

  PSchema reflexive = *l.doc.schema;
  reflexive.order.emplace_back("phi", "phi");
  EXPECT_TRUE(has_code(l.validate(reflexive), "CyclicLinks"));
}

TEST(Schema, SelfLinkMustDescend) {
  Loaded l("assoc.psk");
  PSchema s = *l.doc.schema;
  Component &phi = component(s, "phi");
  std::vector<std::size_t> path = link_sites(phi).front().path;
  ProofNode leaf = *node_at(phi.step, path);
  Term n = *phi.recursion;
  leaf.link->arg = Term::succ(n);
  leaf.conclusion = phi.instance(*leaf.link);
  phi.step = replace_at_path(phi.step, path, 0, build::node(leaf));
  SchemaReport r = l.validate(s);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "BadSelfLink") || has_code(r, "CyclicLinks")) << codes(r);
}

TEST(Schema, BrokenStepDerivationIsReported) {
  Loaded l("ex2_zero_commute.psk");
  PSchema s = *l.doc.schema;
  Component &chi = component(s, "chi");
  ProofNode root = *chi.step;
  root.conclusion = read_sequent("(seq (ant) (suc (= (^a (s n:n) 0) (s 0))))");
  chi.step = build::node(root);
  SchemaReport r = l.validate(s);
  EXPECT_FALSE(r.valid);
  EXPECT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.summary().rfind("invalid P-schema", 0), 0u);
}

TEST(Schema, EmptySchema) {
  SchemaReport r = validate_schema(PSchema{});
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(has_code(r, "EmptySchema"));
}
