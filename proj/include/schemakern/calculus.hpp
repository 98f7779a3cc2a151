#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "rewrite.hpp"
#include "terms.hpp"

namespace schemakern {

// ---------------------------------------------------------------- sequents

using Multiset = std::vector<std::string>; // sorted canonical keys

inline Multiset multiset_of(const std::vector<Formula> &fs) {
  Multiset m;
  m.reserve(fs.size());
  for (const Formula &f : fs)
    m.push_back(canonical(f));
  std::sort(m.begin(), m.end());
  return m;
}

inline Multiset ms_plus(Multiset m, const std::string &k) {
  m.insert(std::upper_bound(m.begin(), m.end(), k), k);
  return m;
}

inline std::optional<Multiset> ms_minus(Multiset m, const std::string &k) {
  auto it = std::lower_bound(m.begin(), m.end(), k);
  if (it == m.end() || *it != k)
    return std::nullopt;
  m.erase(it);
  return m;
}

inline Multiset ms_sum(const Multiset &a, const Multiset &b) {
  Multiset out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool ms_contains(const Multiset &m, const std::string &k) {
  return std::binary_search(m.begin(), m.end(), k);
}

struct Sequent {
  std::vector<Formula> ant;
  std::vector<Formula> suc;

  // Multiset equality up to alpha-equivalence.
  bool same_as(const Sequent &o) const {
    return ant.size() == o.ant.size() && suc.size() == o.suc.size() &&
           multiset_of(ant) == multiset_of(o.ant) && multiset_of(suc) == multiset_of(o.suc);
  }
  std::vector<Formula> all() const {
    std::vector<Formula> out = ant;
    out.insert(out.end(), suc.begin(), suc.end());
    return out;
  }
};

inline void collect_free(const Sequent &s, std::set<std::string> &out) {
  for (const Formula &f : s.ant)
    collect_free(f, out);
  for (const Formula &f : s.suc)
    collect_free(f, out);
}

inline Sequent substitute(const Sequent &s, const Subst &sub) {
  Sequent out;
  for (const Formula &f : s.ant)
    out.ant.push_back(substitute(f, sub));
  for (const Formula &f : s.suc)
    out.suc.push_back(substitute(f, sub));
  return out;
}

inline Sequent normalize(const Sequent &s, const EqTheory &th, std::size_t fuel = kDefaultFuel) {
  Sequent out;
  for (const Formula &f : s.ant)
    out.ant.push_back(normalize(f, th, fuel));
  for (const Formula &f : s.suc)
    out.suc.push_back(normalize(f, th, fuel));
  return out;
}

inline std::string to_sexpr(const Sequent &s) {
  std::string out = "(seq (ant";
  for (const Formula &f : s.ant)
    out += " " + to_sexpr(f);
  out += ") (suc";
  for (const Formula &f : s.suc)
    out += " " + to_sexpr(f);
  return out + "))";
}

inline std::string pretty(const Sequent &s) {
  std::string out;
  for (std::size_t i = 0; i < s.ant.size(); ++i)
    out += (i ? ", " : "") + pretty(s.ant[i]);
  out += out.empty() ? "|- " : " |- ";
  for (std::size_t i = 0; i < s.suc.size(); ++i)
    out += (i ? ", " : "") + pretty(s.suc[i]);
  return out;
}

// ---------------------------------------------------------------- proof trees

enum class Rule {
  Axiom, EqAxiom, WeakL, WeakR, ContrL, ContrR, AndL, AndR, OrL, OrR, ImpL, ImpR, NotL, NotR,
  ForAllL, ForAllR, ExistsL, ExistsR, Cut, ERule, Link, MvInd, Ind, TheoryAxiom
};

struct RuleInfo {
  Rule rule;
  const char *tag;
  int premises;
};

inline const std::vector<RuleInfo> &rule_table() {
  static const std::vector<RuleInfo> t = {
      {Rule::Axiom, "ax", 0},       {Rule::EqAxiom, "eqax", 0},   {Rule::WeakL, "wl", 1},
      {Rule::WeakR, "wr", 1},       {Rule::ContrL, "cl", 1},      {Rule::ContrR, "cr", 1},
      {Rule::AndL, "andl", 1},      {Rule::AndR, "andr", 2},      {Rule::OrL, "orl", 2},
      {Rule::OrR, "orr", 1},        {Rule::ImpL, "impl", 2},      {Rule::ImpR, "impr", 1},
      {Rule::NotL, "notl", 1},      {Rule::NotR, "notr", 1},      {Rule::ForAllL, "alll", 1},
      {Rule::ForAllR, "allr", 1},   {Rule::ExistsL, "exl", 1},    {Rule::ExistsR, "exr", 1},
      {Rule::Cut, "cut", 2},        {Rule::ERule, "e", 1},        {Rule::Link, "link", 0},
      {Rule::MvInd, "mvind", 1},    {Rule::Ind, "ind", 1},        {Rule::TheoryAxiom, "thax", 0},
  };
  return t;
}

inline const char *rule_tag(Rule r) { return rule_table()[static_cast<std::size_t>(r)].tag; }
inline int premise_count(Rule r) { return rule_table()[static_cast<std::size_t>(r)].premises; }

inline std::optional<Rule> rule_from_tag(const std::string &tag) {
  for (const RuleInfo &i : rule_table())
    if (tag == i.tag)
      return i.rule;
  return std::nullopt;
}

enum class EqScheme { Refl, Succ, Fun, Pred };

inline const char *scheme_name(EqScheme s) {
  switch (s) {
  case EqScheme::Refl: return "refl";
  case EqScheme::Succ: return "succ";
  case EqScheme::Fun: return "fun";
  case EqScheme::Pred: return "pred";
  }
  return "?";
}

inline std::optional<EqScheme> scheme_from_name(const std::string &s) {
  for (EqScheme e : {EqScheme::Refl, EqScheme::Succ, EqScheme::Fun, EqScheme::Pred})
    if (s == scheme_name(e))
      return e;
  return std::nullopt;
}

struct LinkData {
  std::string target;
  std::optional<Term> arg;
  std::vector<Term> iargs;
  std::vector<Term> rargs;
};

struct InductionData {
  Formula formula;
  Term param;
  Term target;
  std::vector<std::pair<Term, Term>> inst; // internal parameter (or iota var) -> term
};

struct EPosition {
  bool succedent = true;
  std::size_t index = 0;
  std::vector<int> path;
};

struct ProofNode;
using Proof = std::shared_ptr<const ProofNode>;

struct ProofNode {
  Rule rule = Rule::Axiom;
  Sequent conclusion;
  std::vector<Proof> premises;
  std::optional<Formula> cut_formula;
  std::optional<Term> term; // eigenvariable or witness
  std::optional<EqScheme> scheme;
  std::optional<LinkData> link;
  std::optional<InductionData> induction;
  std::optional<EPosition> position;
  std::string label;
  SourceSpan span;
};

inline const Sequent &end_sequent(const Proof &p) { return p->conclusion; }

// ---------------------------------------------------------------- smart constructors

namespace build {

inline Proof node(ProofNode n) { return std::make_shared<const ProofNode>(std::move(n)); }

inline Proof leaf(Rule r, Sequent s) {
  ProofNode n;
  n.rule = r;
  n.conclusion = std::move(s);
  return node(std::move(n));
}

inline Proof ax(const Formula &a) { return leaf(Rule::Axiom, Sequent{{a}, {a}}); }

inline Proof eqax(EqScheme s, Sequent seq) {
  ProofNode n;
  n.rule = Rule::EqAxiom;
  n.scheme = s;
  n.conclusion = std::move(seq);
  return node(std::move(n));
}

inline Proof refl(const Term &t) { return eqax(EqScheme::Refl, Sequent{{}, {Formula::eq(t, t)}}); }

inline Proof thax(const std::string &label, Sequent seq) {
  ProofNode n;
  n.rule = Rule::TheoryAxiom;
  n.label = label;
  n.conclusion = std::move(seq);
  return node(std::move(n));
}

inline Proof unary(Rule r, const Proof &p, Sequent concl) {
  ProofNode n;
  n.rule = r;
  n.conclusion = std::move(concl);
  n.premises = {p};
  return node(std::move(n));
}

inline std::vector<Formula> without(std::vector<Formula> fs, const Formula &a) {
  std::string k = canonical(a);
  for (auto it = fs.begin(); it != fs.end(); ++it)
    if (*it == a || canonical(*it) == k) {
      fs.erase(it);
      return fs;
    }
  throw Error(ErrorCode::CheckFailed, "formula not present: " + pretty(a));
}

inline std::vector<Formula> with(std::vector<Formula> fs, const Formula &a) {
  fs.push_back(a);
  return fs;
}

inline std::vector<Formula> concat(std::vector<Formula> a, const std::vector<Formula> &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Proof wl(const Proof &p, const Formula &a) {
  const Sequent &s = p->conclusion;
  return unary(Rule::WeakL, p, Sequent{with(s.ant, a), s.suc});
}
inline Proof wr(const Proof &p, const Formula &a) {
  const Sequent &s = p->conclusion;
  return unary(Rule::WeakR, p, Sequent{s.ant, with(s.suc, a)});
}
inline Proof cl(const Proof &p, const Formula &a) {
  const Sequent &s = p->conclusion;
  return unary(Rule::ContrL, p, Sequent{without(s.ant, a), s.suc});
}
inline Proof cr(const Proof &p, const Formula &a) {
  const Sequent &s = p->conclusion;
  return unary(Rule::ContrR, p, Sequent{s.ant, without(s.suc, a)});
}

// Multiplicative cut.
inline Proof cut(const Proof &l, const Proof &r, const Formula &a) {
  ProofNode n;
  n.rule = Rule::Cut;
  n.cut_formula = a;
  n.premises = {l, r};
  n.conclusion = Sequent{concat(l->conclusion.ant, without(r->conclusion.ant, a)),
                         concat(without(l->conclusion.suc, a), r->conclusion.suc)};
  return node(std::move(n));
}

// A, B in the premise antecedent become A & B.
inline Proof andl(const Proof &p, const Formula &a, const Formula &b) {
  const Sequent &s = p->conclusion;
  return unary(Rule::AndL, p, Sequent{with(without(without(s.ant, a), b), Formula::conj(a, b)), s.suc});
}
inline Proof andr(const Proof &l, const Proof &r, const Formula &a, const Formula &b) {
  ProofNode n;
  n.rule = Rule::AndR;
  n.premises = {l, r};
  n.conclusion = Sequent{concat(l->conclusion.ant, r->conclusion.ant),
                         with(concat(without(l->conclusion.suc, a), without(r->conclusion.suc, b)),
                              Formula::conj(a, b))};
  return node(std::move(n));
}
inline Proof orl(const Proof &l, const Proof &r, const Formula &a, const Formula &b) {
  ProofNode n;
  n.rule = Rule::OrL;
  n.premises = {l, r};
  n.conclusion = Sequent{with(concat(without(l->conclusion.ant, a), without(r->conclusion.ant, b)),
                              Formula::disj(a, b)),
                         concat(l->conclusion.suc, r->conclusion.suc)};
  return node(std::move(n));
}
// A, B in the premise succedent become A | B.
inline Proof orr(const Proof &p, const Formula &a, const Formula &b) {
  const Sequent &s = p->conclusion;
  return unary(Rule::OrR, p, Sequent{s.ant, with(without(without(s.suc, a), b), Formula::disj(a, b))});
}
// Single-component variant: A in the succedent becomes A | B (or B | A).
inline Proof orr1(const Proof &p, const Formula &disjunction, const Formula &component) {
  const Sequent &s = p->conclusion;
  return unary(Rule::OrR, p, Sequent{s.ant, with(without(s.suc, component), disjunction)});
}
inline Proof andl1(const Proof &p, const Formula &conjunction, const Formula &component) {
  const Sequent &s = p->conclusion;
  return unary(Rule::AndL, p, Sequent{with(without(s.ant, component), conjunction), s.suc});
}
inline Proof impl(const Proof &l, const Proof &r, const Formula &a, const Formula &b) {
  ProofNode n;
  n.rule = Rule::ImpL;
  n.premises = {l, r};
  n.conclusion = Sequent{with(concat(l->conclusion.ant, without(r->conclusion.ant, b)),
                              Formula::imp(a, b)),
                         concat(without(l->conclusion.suc, a), r->conclusion.suc)};
  return node(std::move(n));
}
inline Proof impr(const Proof &p, const Formula &a, const Formula &b) {
  const Sequent &s = p->conclusion;
  return unary(Rule::ImpR, p, Sequent{without(s.ant, a), with(without(s.suc, b), Formula::imp(a, b))});
}
inline Proof notl(const Proof &p, const Formula &a) {
  const Sequent &s = p->conclusion;
  return unary(Rule::NotL, p, Sequent{with(s.ant, Formula::neg(a)), without(s.suc, a)});
}
inline Proof notr(const Proof &p, const Formula &a) {
  const Sequent &s = p->conclusion;
  return unary(Rule::NotR, p, Sequent{without(s.ant, a), with(s.suc, Formula::neg(a))});
}

// q is the quantified principal formula; t the witness or eigenvariable.
inline Proof quant(Rule r, const Proof &p, const Formula &q, const Term &t) {
  const Sequent &s = p->conclusion;
  Formula inst = substitute(q.body(), single(q.binder(), t));
  ProofNode n;
  n.rule = r;
  n.term = t;
  n.premises = {p};
  if (r == Rule::ForAllL || r == Rule::ExistsL)
    n.conclusion = Sequent{with(without(s.ant, inst), q), s.suc};
  else
    n.conclusion = Sequent{s.ant, with(without(s.suc, inst), q)};
  return node(std::move(n));
}

inline Proof erule(const Proof &p, Sequent concl) { return unary(Rule::ERule, p, std::move(concl)); }

inline Proof link(Sequent s, LinkData d) {
  ProofNode n;
  n.rule = Rule::Link;
  n.conclusion = std::move(s);
  n.link = std::move(d);
  return node(std::move(n));
}

} // namespace build

// ---------------------------------------------------------------- checker

struct Violation {
  std::string code;
  std::string message;
  std::vector<std::size_t> path;
  SourceSpan span;
  std::string where; // owning proof or component part, when known
};

inline std::string path_string(const std::vector<std::size_t> &path) {
  std::string out = "/";
  for (std::size_t i = 0; i < path.size(); ++i)
    out += (i ? "/" : "") + std::to_string(path[i]);
  return out;
}

struct Profile {
  bool allow_links = true;
  bool allow_mvind = true;
  bool allow_ind = false;
  bool allow_erule = true;
  bool pra = false; // no active or internal parameters anywhere

  static Profile lks() { return {true, false, false, true, false}; }
  static Profile mvlkie() { return {false, true, false, true, false}; }
  static Profile lk() { return {false, false, false, true, false}; }
  static Profile pra_profile() { return {false, false, true, false, true}; }
  static Profile any() { return {true, true, true, true, false}; }
};

inline std::optional<Profile> profile_from_name(const std::string &s) {
  if (s == "lks")
    return Profile::lks();
  if (s == "mvlkie")
    return Profile::mvlkie();
  if (s == "lk")
    return Profile::lk();
  if (s == "pra")
    return Profile::pra_profile();
  if (s == "any")
    return Profile::any();
  return std::nullopt;
}

// Returns the expected sequent for a link or sets `why`.
using LinkResolver = std::function<std::optional<Sequent>(const LinkData &, std::string &why)>;

struct CheckOptions {
  Profile profile = Profile::any();
  const EqTheory *theory = nullptr;
  std::size_t fuel = kDefaultFuel;
  LinkResolver resolver;
  const std::map<std::string, Sequent> *theory_axioms = nullptr;
};

struct CheckReport {
  bool valid = true;
  std::vector<Violation> violations;
  std::set<std::string> actives; // active parameter names occurring anywhere
  bool proof = false;            // end-sequent free of active/internal parameters
  std::size_t nodes = 0;

  std::string classification() const {
    std::string c;
    if (actives.empty())
      c = "inactive";
    else {
      c = "{";
      bool first = true;
      for (const std::string &a : actives) {
        c += (first ? "" : ",") + a;
        first = false;
      }
      c += "}-active";
    }
    return c + (proof ? ", proof" : ", derivation");
  }
};

namespace detail {

struct Ctx {
  std::vector<Violation> out;
  void fail(const char *code, std::string msg) { out.push_back({code, std::move(msg), {}, {}, {}}); }
};

inline const EqTheory &empty_theory() {
  static const EqTheory t("empty");
  return t;
}

inline bool same_ms(const std::vector<Formula> &a, const std::vector<Formula> &b) {
  return a.size() == b.size() && multiset_of(a) == multiset_of(b);
}

// Candidate principal formulas of a given connective on one side.
inline std::vector<std::size_t> candidates(const std::vector<Formula> &side, Formula::Kind k) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < side.size(); ++i)
    if (side[i].kind() == k)
      out.push_back(i);
  return out;
}

inline std::vector<Formula> erase_at(std::vector<Formula> v, std::size_t i) {
  v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
  return v;
}

inline Multiset keys_plus(const std::vector<Formula> &base, std::initializer_list<Formula> extra) {
  Multiset m = multiset_of(base);
  for (const Formula &f : extra)
    m = ms_plus(std::move(m), canonical(f));
  return m;
}

inline bool weak_or_contr(const ProofNode &n, Ctx &c) {
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  bool left = n.rule == Rule::WeakL || n.rule == Rule::ContrL;
  const auto &cs = left ? C.ant : C.suc;
  const auto &ps = left ? P.ant : P.suc;
  const auto &co = left ? C.suc : C.ant;
  const auto &po = left ? P.suc : P.ant;
  if (!same_ms(co, po)) {
    c.fail("ContextMismatch", "side context changed");
    return false;
  }
  bool weak = n.rule == Rule::WeakL || n.rule == Rule::WeakR;
  const auto &bigger = weak ? cs : ps;
  const auto &smaller = weak ? ps : cs;
  if (bigger.size() != smaller.size() + 1) {
    c.fail("ContextMismatch", "expected exactly one formula difference");
    return false;
  }
  Multiset mb = multiset_of(bigger), msm = multiset_of(smaller);
  for (std::size_t i = 0; i < bigger.size(); ++i) {
    auto rest = ms_minus(mb, canonical(bigger[i]));
    if (rest && *rest == msm) {
      if (!weak && !ms_contains(msm, canonical(bigger[i]))) {
        c.fail("PrincipalMissing", "contracted formula has no remaining copy");
        return false;
      }
      return true;
    }
  }
  c.fail("ContextMismatch", "contexts differ beyond one formula");
  return false;
}

// Shared shape of AndL/OrR (one premise, principal on side `left`).
inline bool one_premise_binary(const ProofNode &n, Ctx &c, bool left, Formula::Kind k) {
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  const auto &cs = left ? C.ant : C.suc;
  const auto &ps = left ? P.ant : P.suc;
  if (!same_ms(left ? C.suc : C.ant, left ? P.suc : P.ant)) {
    c.fail("ContextMismatch", "side context changed");
    return false;
  }
  auto cand = candidates(cs, k);
  if (cand.empty()) {
    c.fail("PrincipalMissing", "no principal formula of the required shape");
    return false;
  }
  Multiset pm = multiset_of(ps);
  for (std::size_t i : cand) {
    std::vector<Formula> rest = erase_at(cs, i);
    const Formula &a = cs[i].sub(0), &b = cs[i].sub(1);
    if (pm == keys_plus(rest, {a}) || pm == keys_plus(rest, {b}) || pm == keys_plus(rest, {a, b}))
      return true;
  }
  c.fail("ContextMismatch", "premise does not decompose the principal formula");
  return false;
}

// AndR / OrL: two premises, additive or multiplicative contexts.
inline bool two_premise_binary(const ProofNode &n, Ctx &c, bool left, Formula::Kind k) {
  const Sequent &C = n.conclusion;
  const Sequent &P1 = n.premises[0]->conclusion;
  const Sequent &P2 = n.premises[1]->conclusion;
  const auto &cs = left ? C.ant : C.suc;
  const auto &co = left ? C.suc : C.ant;
  auto cand = candidates(cs, k);
  if (cand.empty()) {
    c.fail("PrincipalMissing", "no principal formula of the required shape");
    return false;
  }
  const auto &p1s = left ? P1.ant : P1.suc, &p1o = left ? P1.suc : P1.ant;
  const auto &p2s = left ? P2.ant : P2.suc, &p2o = left ? P2.suc : P2.ant;
  Multiset mco = multiset_of(co);
  for (std::size_t i : cand) {
    std::vector<Formula> rest = erase_at(cs, i);
    const Formula &a = cs[i].sub(0), &b = cs[i].sub(1);
    auto r1 = ms_minus(multiset_of(p1s), canonical(a));
    auto r2 = ms_minus(multiset_of(p2s), canonical(b));
    if (!r1 || !r2)
      continue;
    Multiset mrest = multiset_of(rest);
    // additive
    if (*r1 == mrest && *r2 == mrest && multiset_of(p1o) == mco && multiset_of(p2o) == mco)
      return true;
    // multiplicative
    if (ms_sum(*r1, *r2) == mrest && ms_sum(multiset_of(p1o), multiset_of(p2o)) == mco)
      return true;
  }
  c.fail("ContextMismatch", "premise contexts do not combine to the conclusion");
  return false;
}

inline bool check_impl(const ProofNode &n, Ctx &c) {
  const Sequent &C = n.conclusion;
  const Sequent &P1 = n.premises[0]->conclusion;
  const Sequent &P2 = n.premises[1]->conclusion;
  auto cand = candidates(C.ant, Formula::Kind::Imp);
  if (cand.empty()) {
    c.fail("PrincipalMissing", "no implication in the antecedent");
    return false;
  }
  for (std::size_t i : cand) {
    std::vector<Formula> gamma = erase_at(C.ant, i);
    const Formula &a = C.ant[i].sub(0), &b = C.ant[i].sub(1);
    auto d1 = ms_minus(multiset_of(P1.suc), canonical(a));
    auto g2 = ms_minus(multiset_of(P2.ant), canonical(b));
    if (!d1 || !g2)
      continue;
    Multiset mg = multiset_of(gamma), md = multiset_of(C.suc);
    if (multiset_of(P1.ant) == mg && *g2 == mg && *d1 == md && multiset_of(P2.suc) == md)
      return true;
    if (ms_sum(multiset_of(P1.ant), *g2) == mg && ms_sum(*d1, multiset_of(P2.suc)) == md)
      return true;
  }
  c.fail("ContextMismatch", "premise contexts do not combine to the conclusion");
  return false;
}

inline bool check_impr(const ProofNode &n, Ctx &c) {
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  auto cand = candidates(C.suc, Formula::Kind::Imp);
  if (cand.empty()) {
    c.fail("PrincipalMissing", "no implication in the succedent");
    return false;
  }
  for (std::size_t i : cand) {
    const Formula &a = C.suc[i].sub(0), &b = C.suc[i].sub(1);
    if (multiset_of(P.ant) == keys_plus(C.ant, {a}) &&
        multiset_of(P.suc) == keys_plus(erase_at(C.suc, i), {b}))
      return true;
  }
  c.fail("ContextMismatch", "premise does not decompose the implication");
  return false;
}

inline bool check_not(const ProofNode &n, Ctx &c, bool left) {
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  const auto &cs = left ? C.ant : C.suc;
  const auto &co = left ? C.suc : C.ant;
  const auto &ps = left ? P.ant : P.suc;
  const auto &po = left ? P.suc : P.ant;
  auto cand = candidates(cs, Formula::Kind::Not);
  if (cand.empty()) {
    c.fail("PrincipalMissing", "no negation on the principal side");
    return false;
  }
  for (std::size_t i : cand)
    if (multiset_of(ps) == multiset_of(erase_at(cs, i)) &&
        multiset_of(po) == keys_plus(co, {cs[i].sub(0)}))
      return true;
  c.fail("ContextMismatch", "premise does not decompose the negation");
  return false;
}

inline bool binder_sort_ok(const Term &binder, const Term &t) {
  return binder.is_var() ? t.sort() == Sort::Iota : t.sort() == Sort::Omega;
}

inline bool has_active_or_internal(const Term &t) {
  return !parameters_of(t, ParamKind::Active).empty() ||
         !parameters_of(t, ParamKind::Internal).empty();
}

inline bool check_quantifier(const ProofNode &n, Ctx &c) {
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  bool left = n.rule == Rule::ForAllL || n.rule == Rule::ExistsL;
  Formula::Kind k = (n.rule == Rule::ForAllL || n.rule == Rule::ForAllR) ? Formula::Kind::ForAll
                                                                         : Formula::Kind::Exists;
  bool eigen = n.rule == Rule::ForAllR || n.rule == Rule::ExistsL;
  if (!n.term) {
    c.fail("MissingPayload", eigen ? "eigenvariable not given" : "witness term not given");
    return false;
  }
  const Term &t = *n.term;
  if (eigen) {
    if (t.is_param(ParamKind::Active) || t.is_param(ParamKind::Internal)) {
      c.fail("ActiveQuantified", "eigenvariable " + t.name() + " is not passive");
      return false;
    }
    if (!t.is_variable()) {
      c.fail("BadEigenvariable", "eigenvariable must be a variable or passive parameter");
      return false;
    }
  }
  const auto &cs = left ? C.ant : C.suc;
  const auto &co = left ? C.suc : C.ant;
  const auto &ps = left ? P.ant : P.suc;
  const auto &po = left ? P.suc : P.ant;
  if (!same_ms(co, po)) {
    c.fail("ContextMismatch", "side context changed");
    return false;
  }
  auto cand = candidates(cs, k);
  if (cand.empty()) {
    c.fail("PrincipalMissing", "no quantifier of the required kind");
    return false;
  }
  Multiset pm = multiset_of(ps);
  for (std::size_t i : cand) {
    const Formula &q = cs[i];
    if (!binder_sort_ok(q.binder(), t))
      continue;
    Formula inst;
    try {
      inst = substitute(q.body(), single(q.binder(), t));
    } catch (const Error &) {
      continue;
    }
    std::vector<Formula> rest = erase_at(cs, i);
    if (pm != keys_plus(rest, {inst}))
      continue;
    if (eigen) {
      std::set<std::string> fv = free_keys(C);
      if (fv.count(t.var_key())) {
        c.fail("EigenvariableCaptured", "eigenvariable " + t.name() + " occurs in the conclusion");
        return false;
      }
    } else if (!q.binder().is_var() && has_active_or_internal(t)) {
      c.fail("ActiveQuantified", "numeric witness " + pretty(t) + " contains an active or internal parameter");
      return false;
    }
    return true;
  }
  c.fail("ContextMismatch", "premise is not an instance of the principal formula");
  return false;
}

inline bool check_cut(const ProofNode &n, Ctx &c) {
  if (!n.cut_formula) {
    c.fail("MissingPayload", "cut formula not given");
    return false;
  }
  const Sequent &C = n.conclusion;
  const Sequent &P1 = n.premises[0]->conclusion;
  const Sequent &P2 = n.premises[1]->conclusion;
  std::string a = canonical(*n.cut_formula);
  auto d1 = ms_minus(multiset_of(P1.suc), a);
  auto g2 = ms_minus(multiset_of(P2.ant), a);
  if (!d1 || !g2) {
    c.fail("PrincipalMissing", "cut formula absent from a premise");
    return false;
  }
  Multiset mg = multiset_of(C.ant), md = multiset_of(C.suc);
  if (ms_sum(multiset_of(P1.ant), *g2) == mg && ms_sum(*d1, multiset_of(P2.suc)) == md)
    return true;
  if (multiset_of(P1.ant) == mg && *g2 == mg && *d1 == md && multiset_of(P2.suc) == md)
    return true;
  c.fail("ContextMismatch", "premise contexts do not combine to the conclusion");
  return false;
}

// Equation u=v from argument lists: every ant formula must be one of them and every
// differing position must be covered.
inline bool equations_cover(const std::vector<Formula> &eqs, const std::vector<Term> &u,
                            const std::vector<Term> &v) {
  if (u.size() != v.size())
    return false;
  Multiset allowed;
  Multiset required;
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::string k = canonical(Formula::eq(u[i], v[i]));
    allowed.push_back(k);
    if (u[i] != v[i])
      required.push_back(k);
  }
  std::sort(allowed.begin(), allowed.end());
  std::sort(required.begin(), required.end());
  Multiset have = multiset_of(eqs);
  if (!std::includes(allowed.begin(), allowed.end(), have.begin(), have.end()))
    return false;
  std::set<std::string> hs(have.begin(), have.end());
  for (const std::string &r : required)
    if (!hs.count(r))
      return false;
  return true;
}

inline bool scheme_instance(EqScheme s, const Sequent &q) {
  if (q.suc.size() != 1)
    return false;
  const Formula &g = q.suc[0];
  switch (s) {
  case EqScheme::Refl:
    return q.ant.empty() && g.is_eq() && g.args()[0] == g.args()[1];
  case EqScheme::Succ: {
    if (q.ant.size() != 1 || !g.is_eq() || !q.ant[0].is_eq())
      return false;
    const Term &l = g.args()[0], &r = g.args()[1];
    return l.is_succ() && r.is_succ() && q.ant[0].args()[0] == l.arg(0) &&
           q.ant[0].args()[1] == r.arg(0);
  }
  case EqScheme::Fun: {
    if (!g.is_eq())
      return false;
    const Term &l = g.args()[0], &r = g.args()[1];
    if (!l.is_fun() || !r.is_fun() || l.name() != r.name() || l.args().size() != r.args().size())
      return false;
    for (const Formula &e : q.ant)
      if (!e.is_eq())
        return false;
    return equations_cover(q.ant, l.args(), r.args());
  }
  case EqScheme::Pred: {
    if (!g.is_atom())
      return false;
    for (std::size_t i = 0; i < q.ant.size(); ++i) {
      const Formula &h = q.ant[i];
      if (!h.is_atom() || h.pred() != g.pred() || h.args().size() != g.args().size())
        continue;
      std::vector<Formula> rest = erase_at(q.ant, i);
      bool all_eq = std::all_of(rest.begin(), rest.end(), [](const Formula &f) { return f.is_eq(); });
      if (all_eq && equations_cover(rest, h.args(), g.args()))
        return true;
    }
    return false;
  }
  }
  return false;
}

inline std::optional<Expr> subexpr_at(const Formula &f, const std::vector<int> &path) {
  Expr cur = f;
  for (int step : path) {
    if (step < 0)
      return std::nullopt;
    auto i = static_cast<std::size_t>(step);
    if (const Formula *g = std::get_if<Formula>(&cur)) {
      if (g->is_atom()) {
        if (i >= g->args().size())
          return std::nullopt;
        cur = g->args()[i];
      } else {
        if (i >= g->subs().size())
          return std::nullopt;
        cur = g->sub(i);
      }
    } else {
      const Term &t = std::get<Term>(cur);
      if (i >= t.args().size())
        return std::nullopt;
      cur = t.arg(i);
    }
  }
  return cur;
}

inline Term replace_in_term(const Term &t, const std::vector<int> &path, std::size_t from,
                            const Term &with) {
  if (from == path.size())
    return with;
  auto i = static_cast<std::size_t>(path[from]);
  return t.with_arg(i, replace_in_term(t.arg(i), path, from + 1, with));
}

inline Formula replace_at(const Formula &f, const std::vector<int> &path, std::size_t from,
                          const Expr &with) {
  if (from == path.size())
    return std::get<Formula>(with);
  auto i = static_cast<std::size_t>(path[from]);
  if (f.is_atom()) {
    std::vector<Term> a = f.args();
    a.at(i) = replace_in_term(a.at(i), path, from + 1, std::get<Term>(with));
    return f.with_args(std::move(a));
  }
  std::vector<Formula> s = f.subs();
  s.at(i) = replace_at(s.at(i), path, from + 1, with);
  return f.with_subs(std::move(s));
}

inline bool check_erule(const ProofNode &n, Ctx &c, const CheckOptions &o) {
  const EqTheory &th = o.theory ? *o.theory : empty_theory();
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  if (C.ant.size() != P.ant.size() || C.suc.size() != P.suc.size()) {
    c.fail("ContextMismatch", "E inference changes the number of formulas");
    return false;
  }
  try {
    if (n.position) {
      const EPosition &pos = *n.position;
      const auto &cs = pos.succedent ? C.suc : C.ant;
      const auto &ps = pos.succedent ? P.suc : P.ant;
      if (pos.index >= cs.size()) {
        c.fail("NotJoinable", "rewrite position outside the sequent");
        return false;
      }
      if (!same_ms(erase_at(cs, pos.index), erase_at(ps, pos.index)) ||
          !same_ms(pos.succedent ? C.ant : C.suc, pos.succedent ? P.ant : P.suc)) {
        c.fail("ContextMismatch", "formulas outside the rewrite position changed");
        return false;
      }
      auto a = subexpr_at(ps[pos.index], pos.path);
      auto b = subexpr_at(cs[pos.index], pos.path);
      if (!a || !b || a->index() != b->index()) {
        c.fail("NotJoinable", "rewrite path does not exist in both formulas");
        return false;
      }
      if (!alpha_equal(replace_at(cs[pos.index], pos.path, 0, *a), ps[pos.index])) {
        c.fail("NotJoinable", "formulas differ outside the rewrite position");
        return false;
      }
      if (!joinable(*a, *b, th, o.fuel)) {
        c.fail("NotJoinable", "subterms at the rewrite position are not joinable");
        return false;
      }
      return true;
    }
    if (multiset_of(normalize(C, th, o.fuel).ant) != multiset_of(normalize(P, th, o.fuel).ant) ||
        multiset_of(normalize(C, th, o.fuel).suc) != multiset_of(normalize(P, th, o.fuel).suc)) {
      c.fail("NotJoinable", "premise and conclusion have different normal forms");
      return false;
    }
  } catch (const Error &e) {
    c.fail(error_code_name(e.code()), e.detail());
    return false;
  }
  return true;
}

// Matches a concrete sequent against an axiom pattern, trying formula orders.
inline bool match_sequent(const Sequent &pat, const Sequent &s) {
  if (pat.ant.size() != s.ant.size() || pat.suc.size() != s.suc.size())
    return false;
  std::vector<Formula> target = s.ant;
  target.insert(target.end(), s.suc.begin(), s.suc.end());
  std::vector<Formula> pf = pat.ant;
  pf.insert(pf.end(), pat.suc.begin(), pat.suc.end());
  std::size_t na = pat.ant.size();
  std::vector<std::size_t> perm_a(na), perm_s(pat.suc.size());
  for (std::size_t i = 0; i < na; ++i)
    perm_a[i] = i;
  for (std::size_t i = 0; i < perm_s.size(); ++i)
    perm_s[i] = na + i;
  if (pf.size() > 8)
    return false;
  do {
    std::vector<std::size_t> ps = perm_s;
    do {
      Subst b;
      bool ok = true;
      for (std::size_t i = 0; i < na && ok; ++i)
        ok = match(pf[i], target[perm_a[i]], b);
      for (std::size_t i = 0; i < ps.size() && ok; ++i)
        ok = match(pf[na + i], target[ps[i]], b);
      if (ok)
        return true;
    } while (std::next_permutation(ps.begin(), ps.end()));
  } while (std::next_permutation(perm_a.begin(), perm_a.end()));
  return false;
}

inline bool check_induction(const ProofNode &n, Ctx &c, const CheckOptions &o) {
  bool mv = n.rule == Rule::MvInd;
  if (mv && !o.profile.allow_mvind) {
    c.fail("MvIndNotAllowed", "mvIND inference outside the mvLKIE profile");
    return false;
  }
  if (!mv && !o.profile.allow_ind) {
    c.fail("IndNotAllowed", "IND inference outside the PRA profile");
    return false;
  }
  if (!n.induction) {
    c.fail("MissingPayload", "induction data not given");
    return false;
  }
  const InductionData &d = *n.induction;
  if (!d.param.is_param()) {
    c.fail("BadInduction", "induction variable must be a parameter");
    return false;
  }
  if (mv && !d.param.is_param(ParamKind::Active)) {
    c.fail("BadInduction", "mvIND recurses on an active parameter");
    return false;
  }
  if (!mv && (!d.param.is_param(ParamKind::Passive) || !d.inst.empty())) {
    c.fail("BadInduction", "IND recurses on a passive parameter without instantiation");
    return false;
  }
  Subst inst;
  for (const auto &[m, a] : d.inst) {
    if (!m.is_param(ParamKind::Internal) && !m.is_var()) {
      c.fail("BadInduction", "instantiated symbol " + m.name() + " is not internal");
      return false;
    }
    inst[m.var_key()] = a;
  }
  const Sequent &C = n.conclusion;
  const Sequent &P = n.premises[0]->conclusion;
  const Formula &F = d.formula;
  Formula fn = F;
  Formula fs = substitute(F, single(d.param, Term::succ(d.param)));
  auto gamma = ms_minus(multiset_of(P.ant), canonical(fn));
  auto delta = ms_minus(multiset_of(P.suc), canonical(fs));
  if (!gamma || !delta) {
    c.fail("PrincipalMissing", "premise is not F(n) |- F(n')");
    return false;
  }
  Subst base = inst, top = inst;
  base[d.param.var_key()] = Term::zero();
  top[d.param.var_key()] = d.target;
  Formula f0 = substitute(F, base);
  Formula ft = substitute(F, top);
  if (ms_plus(*gamma, canonical(f0)) != multiset_of(C.ant) ||
      ms_plus(*delta, canonical(ft)) != multiset_of(C.suc)) {
    c.fail("ContextMismatch", "conclusion is not F(0) |- F(t) over the premise context");
    return false;
  }
  // Eigen condition on the context.
  Sequent ctx = P;
  ctx.ant = build::without(ctx.ant, fn);
  ctx.suc = build::without(ctx.suc, fs);
  std::set<std::string> fv = free_keys(ctx);
  if (fv.count(d.param.var_key())) {
    c.fail("EigenvariableCaptured", "induction variable occurs in the context");
    return false;
  }
  for (const auto &[m, a] : d.inst)
    if (fv.count(m.var_key())) {
      c.fail("EigenvariableCaptured", "instantiated parameter " + m.name() + " occurs in the context");
      return false;
    }
  return true;
}

} // namespace detail

inline std::vector<Violation> check_inference(const ProofNode &n, const CheckOptions &o) {
  detail::Ctx c;
  if (static_cast<int>(n.premises.size()) != premise_count(n.rule)) {
    c.fail("ArityMismatch", std::string(rule_tag(n.rule)) + " expects " +
                                std::to_string(premise_count(n.rule)) + " premises");
    return c.out;
  }
  const Sequent &C = n.conclusion;
  switch (n.rule) {
  case Rule::Axiom:
    if (C.ant.size() != 1 || C.suc.size() != 1 || !alpha_equal(C.ant[0], C.suc[0]))
      c.fail("BadAxiom", "axiom must have the form A |- A");
    break;
  case Rule::EqAxiom: {
    bool ok = false;
    if (n.scheme)
      ok = detail::scheme_instance(*n.scheme, C);
    else
      for (EqScheme s : {EqScheme::Refl, EqScheme::Succ, EqScheme::Fun, EqScheme::Pred})
        ok = ok || detail::scheme_instance(s, C);
    if (!ok)
      c.fail("BadSchemeInstance", "sequent is not an instance of the " +
                                      std::string(n.scheme ? scheme_name(*n.scheme) : "any") +
                                      " equality scheme");
    break;
  }
  case Rule::WeakL:
  case Rule::WeakR:
  case Rule::ContrL:
  case Rule::ContrR: detail::weak_or_contr(n, c); break;
  case Rule::AndL: detail::one_premise_binary(n, c, true, Formula::Kind::And); break;
  case Rule::OrR: detail::one_premise_binary(n, c, false, Formula::Kind::Or); break;
  case Rule::AndR: detail::two_premise_binary(n, c, false, Formula::Kind::And); break;
  case Rule::OrL: detail::two_premise_binary(n, c, true, Formula::Kind::Or); break;
  case Rule::ImpL: detail::check_impl(n, c); break;
  case Rule::ImpR: detail::check_impr(n, c); break;
  case Rule::NotL: detail::check_not(n, c, true); break;
  case Rule::NotR: detail::check_not(n, c, false); break;
  case Rule::ForAllL:
  case Rule::ForAllR:
  case Rule::ExistsL:
  case Rule::ExistsR: detail::check_quantifier(n, c); break;
  case Rule::Cut: detail::check_cut(n, c); break;
  case Rule::ERule:
    if (!o.profile.allow_erule)
      c.fail("ERuleNotAllowed", "E inference outside the profile");
    else
      detail::check_erule(n, c, o);
    break;
  case Rule::Link: {
    if (!o.profile.allow_links) {
      c.fail("LinkNotAllowed", "proof link outside the mvLKS profile");
      break;
    }
    if (!n.link) {
      c.fail("MissingPayload", "link data not given");
      break;
    }
    if (o.resolver) {
      std::string why;
      auto expected = o.resolver(*n.link, why);
      if (!expected)
        c.fail("UnknownLink", why.empty() ? "unknown link target " + n.link->target : why);
      else if (!expected->same_as(C))
        c.fail("LinkMismatch", "link sequent differs from " + pretty(*expected));
    }
    break;
  }
  case Rule::TheoryAxiom: {
    const Sequent *pat = nullptr;
    if (o.theory_axioms) {
      auto it = o.theory_axioms->find(n.label);
      if (it != o.theory_axioms->end())
        pat = &it->second;
    }
    if (!pat)
      c.fail("UnknownTheoryAxiom", "no theory axiom labelled " + n.label);
    else if (!detail::match_sequent(*pat, C))
      c.fail("TheoryAxiomMismatch", "sequent is not an instance of " + n.label);
    break;
  }
  case Rule::MvInd:
  case Rule::Ind: detail::check_induction(n, c, o); break;
  }
  return c.out;
}

namespace detail {

inline std::size_t distinct_actives(const Sequent &s, std::set<std::string> &names) {
  std::set<std::string> local;
  for (const Parameter &p : parameters_of(s, ParamKind::Active))
    local.insert(p.name);
  names.insert(local.begin(), local.end());
  return local.size();
}

} // namespace detail

inline CheckReport check_derivation(const Proof &root, const CheckOptions &o) {
  CheckReport r;
  std::unordered_set<const ProofNode *> seen;
  std::map<const ProofNode *, std::size_t> sizes;
  struct Item {
    const ProofNode *n;
    std::vector<std::size_t> path;
  };
  std::vector<Item> stack{{root.get(), {}}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(it.n).second)
      continue;
    const ProofNode &n = *it.n;
    for (Violation v : check_inference(n, o)) {
      v.path = it.path;
      v.span = n.span;
      r.violations.push_back(std::move(v));
    }
    if (detail::distinct_actives(n.conclusion, r.actives) > 1)
      r.violations.push_back({"MultipleActiveParams",
                              "more than one active parameter in " + pretty(n.conclusion),
                              it.path, n.span, {}});
    if (o.profile.pra) {
      std::set<std::string> fv = free_keys(n.conclusion);
      for (const std::string &k : fv)
        if (k[0] == 'n' || k[0] == 'i') {
          r.violations.push_back(
              {"NonPassiveParameter", "parameter " + k + " in the PRA calculus", it.path, n.span, {}});
          break;
        }
    }
    for (std::size_t i = n.premises.size(); i-- > 0;) {
      std::vector<std::size_t> p = it.path;
      p.push_back(i);
      stack.push_back({n.premises[i].get(), std::move(p)});
    }
  }
  std::function<std::size_t(const ProofNode *)> size = [&](const ProofNode *n) -> std::size_t {
    auto f = sizes.find(n);
    if (f != sizes.end())
      return f->second;
    std::size_t s = 1;
    for (const Proof &p : n->premises)
      s += size(p.get());
    sizes[n] = s;
    return s;
  };
  r.nodes = size(root.get());
  std::sort(r.violations.begin(), r.violations.end(),
            [](const Violation &a, const Violation &b) { return a.path < b.path; });
  r.valid = r.violations.empty();
  const Sequent &es = root->conclusion;
  r.proof = parameters_of(es, ParamKind::Active).empty() &&
            parameters_of(es, ParamKind::Internal).empty();
  return r;
}

// ---------------------------------------------------------------- tree utilities

inline std::size_t tree_size(const Proof &p) {
  std::size_t n = 1;
  for (const Proof &q : p->premises)
    n += tree_size(q);
  return n;
}

template <class F> void for_each_node(const Proof &p, F &&f, std::vector<std::size_t> &path) {
  f(*p, path);
  for (std::size_t i = 0; i < p->premises.size(); ++i) {
    path.push_back(i);
    for_each_node(p->premises[i], f, path);
    path.pop_back();
  }
}

template <class F> void for_each_node(const Proof &p, F &&f) {
  std::vector<std::size_t> path;
  for_each_node(p, f, path);
}

inline std::size_t count_rule(const Proof &p, Rule r) {
  std::size_t n = 0;
  for_each_node(p, [&](const ProofNode &x, const auto &) { n += x.rule == r; });
  return n;
}

inline Proof replace_at_path(const Proof &p, const std::vector<std::size_t> &path, std::size_t from,
                             const Proof &with) {
  if (from == path.size())
    return with;
  ProofNode copy = *p;
  copy.premises.at(path[from]) = replace_at_path(p->premises.at(path[from]), path, from + 1, with);
  return build::node(std::move(copy));
}

inline Proof node_at(const Proof &p, const std::vector<std::size_t> &path) {
  Proof cur = p;
  for (std::size_t i : path)
    cur = cur->premises.at(i);
  return cur;
}

// Applies a substitution to every sequent and payload of a proof.
inline Proof substitute(const Proof &p, const Subst &s) {
  if (s.empty())
    return p;
  ProofNode n = *p;
  n.conclusion = substitute(p->conclusion, s);
  if (n.cut_formula)
    n.cut_formula = substitute(*n.cut_formula, s);
  if (n.term)
    n.term = substitute(*n.term, s);
  if (n.link) {
    if (n.link->arg)
      n.link->arg = substitute(*n.link->arg, s);
    for (Term &t : n.link->iargs)
      t = substitute(t, s);
    for (Term &t : n.link->rargs)
      t = substitute(t, s);
  }
  Subst inner = s;
  if (n.induction) {
    // The induction variable is bound in the premise; only outer data changes.
    Subst outer = s;
    outer.erase(n.induction->param.var_key());
    for (auto &[m, a] : n.induction->inst) {
      outer.erase(m.var_key());
      a = substitute(a, s);
    }
    n.induction->formula = substitute(n.induction->formula, outer);
    n.induction->target = substitute(n.induction->target, s);
    inner = std::move(outer);
  }
  for (Proof &q : n.premises)
    q = substitute(q, inner);
  return build::node(std::move(n));
}

} // namespace schemakern
