#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evaluation.hpp"
#include "schema.hpp"

namespace schemakern {

struct TranslateOptions {
  const EqTheory *theory = nullptr;
  const std::map<std::string, Sequent> *theory_axioms = nullptr;
  std::size_t fuel = kDefaultFuel;
  // Links into computational sub-schemata become theory axioms "schema:<sym>"
  // instead of raising NotStrict.
  bool general = false;
};

namespace detail {

inline CheckOptions check_options(const TranslateOptions &o, Profile prof) {
  CheckOptions co;
  co.profile = prof;
  co.theory = o.theory;
  co.fuel = o.fuel;
  co.theory_axioms = o.theory_axioms;
  return co;
}

inline void require_valid(const Proof &p, const CheckOptions &co, const std::string &what) {
  CheckReport r = check_derivation(p, co);
  if (!r.valid) {
    const Violation &v = r.violations.front();
    throw Error(ErrorCode::CheckFailed, what + " rejected at " + path_string(v.path) + ": " + v.code + ": " +
                                            v.message);
  }
}

// ---------------------------------------------------------------- packing

inline Formula big_and(const std::vector<Formula> &fs) {
  Formula f = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;)
    f = Formula::conj(fs[i], f);
  return f;
}

inline Formula big_or(const std::vector<Formula> &fs) {
  Formula f = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;)
    f = Formula::disj(fs[i], f);
  return f;
}

// Single formula equivalent to a sequent.
inline Formula pack(const Sequent &s) {
  if (s.ant.empty() && s.suc.empty())
    throw Error(ErrorCode::NotTranslatable, "the empty sequent has no induction formula");
  if (s.ant.empty())
    return big_or(s.suc);
  if (s.suc.empty())
    return Formula::neg(big_and(s.ant));
  return Formula::imp(big_and(s.ant), big_or(s.suc));
}

// From a proof whose conclusion contains s, derive the same with s packed.
inline Proof pack_proof(Proof p, const Sequent &s) {
  if (!s.suc.empty()) {
    Formula cur = s.suc.back();
    for (std::size_t i = s.suc.size() - 1; i-- > 0;) {
      p = build::orr(p, s.suc[i], cur);
      cur = Formula::disj(s.suc[i], cur);
    }
  }
  if (!s.ant.empty()) {
    Formula cur = s.ant.back();
    for (std::size_t i = s.ant.size() - 1; i-- > 0;) {
      p = build::andl(p, s.ant[i], cur);
      cur = Formula::conj(s.ant[i], cur);
    }
    p = s.suc.empty() ? build::notr(p, cur) : build::impr(p, cur, big_or(s.suc));
  }
  return p;
}

inline Proof conj_intro(const std::vector<Formula> &g, std::size_t i = 0) {
  if (i + 1 == g.size())
    return build::ax(g[i]);
  std::vector<Formula> rest(g.begin() + static_cast<std::ptrdiff_t>(i) + 1, g.end());
  return build::andr(build::ax(g[i]), conj_intro(g, i + 1), g[i], big_and(rest));
}

inline Proof disj_elim(const std::vector<Formula> &d, std::size_t i = 0) {
  if (i + 1 == d.size())
    return build::ax(d[i]);
  std::vector<Formula> rest(d.begin() + static_cast<std::ptrdiff_t>(i) + 1, d.end());
  return build::orl(build::ax(d[i]), disj_elim(d, i + 1), d[i], big_or(rest));
}

// pack(s), s.ant |- s.suc
inline Proof unpack_proof(const Sequent &s) {
  if (s.ant.empty())
    return disj_elim(s.suc);
  if (s.suc.empty())
    return build::notl(conj_intro(s.ant), big_and(s.ant));
  return build::impl(conj_intro(s.ant), disj_elim(s.suc), big_and(s.ant), big_or(s.suc));
}

inline bool bare(const Sequent &s) { return s.ant.empty() && s.suc.size() == 1; }

// ---------------------------------------------------------------- schema -> mvLKIE

class ToMvlkie {
public:
  ToMvlkie(const PSchema &s, const TranslateOptions &o) : s_(s), o_(o), co_(check_options(o, Profile::any())) {
    if (o.general)
      for (const SubSchema &sub : sub_schemata(s))
        if (sub.computational)
          computational_.insert(sub.members.begin(), sub.members.end());
  }

  // Closed derivation of es(c) with the parameters of c left free.
  Proof generic(const Component &c) {
    auto it = gen_.find(c.symbol);
    if (it != gen_.end())
      return it->second;
    if (!busy_.insert(c.symbol).second)
      throw Error(ErrorCode::NotTranslatable, "cyclic links through " + c.symbol);
    Proof out;
    bool shifted = c.recursion && c.step->conclusion.same_as(c.step_sequent());
    if (!c.recursion) {
      out = closed(c.base);
    } else if (c.recursive_passive() && !shifted) {
      out = closed(c.step);
    } else {
      if (!shifted)
        throw Error(ErrorCode::NotTranslatable, "step of " + c.symbol + " does not prove the successor case");
      if (!(c.base_value == Term::zero()))
        throw Error(ErrorCode::NotTranslatable, "base case of " + c.symbol + " is not at 0");
      out = induction(c);
    }
    busy_.erase(c.symbol);
    gen_[c.symbol] = out;
    return out;
  }

private:
  const PSchema &s_;
  const TranslateOptions &o_;
  CheckOptions co_;
  std::set<std::string> computational_;
  std::map<std::string, Proof> gen_;
  std::set<std::string> busy_;
  std::map<const ProofNode *, Proof> closed_;

  Proof instance(const ProofNode &leaf) {
    const LinkData &d = *leaf.link;
    if (computational_.count(d.target))
      return build::thax("schema:" + d.target, leaf.conclusion);
    const Component &c = s_.at(d.target);
    Proof p = substitute(generic(c), c.link_binding(d));
    if (!p->conclusion.same_as(leaf.conclusion))
      p = build::erule(p, leaf.conclusion);
    return p;
  }

  Proof closed(const Proof &p) {
    auto it = closed_.find(p.get());
    if (it != closed_.end())
      return it->second;
    Proof out = p;
    if (p->rule == Rule::Link) {
      out = instance(*p);
    } else if (!p->premises.empty()) {
      std::vector<Proof> prem;
      bool changed = false;
      for (const Proof &q : p->premises) {
        prem.push_back(closed(q));
        changed = changed || prem.back() != q;
      }
      if (changed) {
        ProofNode m = *p;
        m.premises = std::move(prem);
        out = build::node(std::move(m));
      }
    }
    closed_[p.get()] = out;
    return out;
  }

  struct Lift {
    const Component &c;
    Term n;
    Formula F;
    Sequent es_n;
    std::map<const ProofNode *, std::pair<Proof, std::size_t>> memo;
  };

  Proof try_node(const ProofNode &orig, std::vector<Proof> prem, std::size_t extra, const Formula &F) {
    ProofNode m = orig;
    m.premises = std::move(prem);
    for (std::size_t i = 0; i < extra; ++i)
      m.conclusion.ant.push_back(F);
    if (!check_inference(m, co_).empty())
      return nullptr;
    return build::node(std::move(m));
  }

  // Replaces self-links by F(n), es(n) |- ... leaves and carries the extra
  // F(n) occurrences down to the root. Returns the number carried.
  std::pair<Proof, std::size_t> lift(const Proof &p, Lift &L) {
    auto it = L.memo.find(p.get());
    if (it != L.memo.end())
      return it->second;
    std::pair<Proof, std::size_t> out{p, 0};
    if (p->rule == Rule::Link && p->link->target == L.c.symbol) {
      const LinkData &d = *p->link;
      if (!d.arg || !(*d.arg == L.n) || d.iargs != L.c.internals || d.rargs != L.c.rvars)
        throw Error(ErrorCode::NotTranslatable,
                    "self-link of " + L.c.symbol + " changes its arguments; not a simple induction");
      Proof u = bare(L.es_n) ? build::ax(L.F) : unpack_proof(L.es_n);
      if (!u->conclusion.same_as(Sequent{build::with(p->conclusion.ant, L.F), p->conclusion.suc}))
        u = build::erule(u, Sequent{build::with(p->conclusion.ant, L.F), p->conclusion.suc});
      out = {u, 1};
    } else if (p->rule == Rule::Link) {
      out = {instance(*p), 0};
    } else if (!p->premises.empty()) {
      std::vector<std::pair<Proof, std::size_t>> kids;
      std::size_t total = 0, most = 0;
      bool changed = false;
      for (const Proof &q : p->premises) {
        kids.push_back(lift(q, L));
        total += kids.back().second;
        most = std::max(most, kids.back().second);
        changed = changed || kids.back().first != q;
      }
      std::vector<Proof> prem;
      for (auto &k : kids)
        prem.push_back(k.first);
      if (total == 0) {
        if (changed) {
          ProofNode m = *p;
          m.premises = std::move(prem);
          out = {build::node(std::move(m)), 0};
        }
      } else if (Proof q = try_node(*p, prem, total, L.F)) {
        out = {q, total};
      } else {
        for (std::size_t i = 0; i < kids.size(); ++i)
          for (std::size_t j = kids[i].second; j < most; ++j)
            prem[i] = build::wl(prem[i], L.F);
        Proof r = try_node(*p, prem, most, L.F);
        if (!r)
          throw Error(ErrorCode::NotTranslatable, std::string("cannot carry the induction hypothesis through ") +
                                                      rule_tag(p->rule) + " in " + L.c.symbol);
        out = {r, most};
      }
    }
    L.memo[p.get()] = out;
    return out;
  }

  Proof induction(const Component &c) {
    Term r = *c.recursion;
    Term n = c.recursive_passive() ? Term::active(r.name()) : r;
    Subst rn = single(r, n);
    Sequent es_n = substitute(c.es, rn);
    Formula F = pack(es_n);
    Proof step = c.recursive_passive() ? substitute(c.step, rn) : c.step;
    Lift L{c, n, F, es_n, {}};
    auto [p, k] = lift(step, L);
    if (k == 0)
      p = build::wl(p, F);
    for (std::size_t i = 1; i < k; ++i)
      p = build::cl(p, F);
    p = pack_proof(p, substitute(c.es, single(r, Term::succ(n))));

    InductionData d;
    d.formula = F;
    d.param = n;
    d.target = r;
    for (const Term &m : c.internals)
      d.inst.emplace_back(m, m);
    for (const Term &v : c.rvars)
      d.inst.emplace_back(v, v);
    Formula f0 = substitute(F, single(n, Term::zero()));
    Formula fr = substitute(F, single(n, r));
    ProofNode mv;
    mv.rule = Rule::MvInd;
    mv.premises = {p};
    mv.induction = std::move(d);
    mv.conclusion = Sequent{{f0}, {fr}};

    Proof base = pack_proof(closed(c.base), c.base_sequent());
    Proof t = build::cut(base, build::node(std::move(mv)), f0);
    if (bare(c.es))
      return t;
    return build::cut(t, unpack_proof(c.es), fr);
  }
};

// ---------------------------------------------------------------- mvLKIE -> schema

inline void require_strict_proof(const Proof &p) {
  if (!parameters_of(p->conclusion, ParamKind::Active).empty() ||
      !parameters_of(p->conclusion, ParamKind::Internal).empty())
    throw Error(ErrorCode::NotStrict, "end-sequent contains active or internal parameters");
  std::set<Parameter> top = parameters_of(p->conclusion, ParamKind::Passive);
  std::set<const ProofNode *> seen;
  std::function<void(const Proof &)> walk = [&](const Proof &q) {
    if (!seen.insert(q.get()).second)
      return;
    for (const Parameter &x : parameters_of(q->conclusion, ParamKind::Passive))
      if (!top.count(x))
        throw Error(ErrorCode::NotStrict, "passive parameter " + x.name + " does not occur in the end-sequent");
    if (parameters_of(q->conclusion, ParamKind::Active).size() > 1)
      throw Error(ErrorCode::MultipleActive, "sequent " + pretty(q->conclusion) + " has several active parameters");
    for (const Proof &r : q->premises)
      walk(r);
  };
  walk(p);
}

class ToSchema {
public:
  explicit ToSchema(PSchema &out) : out_(out) {}

  Proof rewrite(const Proof &p, const std::string &owner) {
    auto it = done_.find(p.get());
    if (it != done_.end())
      return it->second;
    Proof res = p;
    if (p->rule == Rule::MvInd) {
      res = component(*p, owner);
    } else if (!p->premises.empty()) {
      std::vector<Proof> prem;
      bool changed = false;
      for (const Proof &q : p->premises) {
        prem.push_back(rewrite(q, owner));
        changed = changed || prem.back() != q;
      }
      if (changed) {
        ProofNode m = *p;
        m.premises = std::move(prem);
        res = build::node(std::move(m));
      }
    }
    done_[p.get()] = res;
    return res;
  }

private:
  PSchema &out_;
  std::map<const ProofNode *, Proof> done_;
  std::size_t counter_ = 0;

  Proof component(const ProofNode &n, const std::string &owner) {
    const InductionData &d = *n.induction;
    std::string name = "ind" + std::to_string(counter_++);
    out_.order.emplace_back(owner, name);
    Component c;
    c.symbol = name;
    c.recursion = d.param;
    LinkData self;
    self.target = name;
    self.arg = d.param;
    LinkData call;
    call.target = name;
    call.arg = d.target;
    for (const auto &[m, a] : d.inst) {
      if (m.is_var()) {
        c.rvars.push_back(m);
        self.rargs.push_back(m);
        call.rargs.push_back(a);
      } else {
        c.internals.push_back(m);
        self.iargs.push_back(m);
        call.iargs.push_back(a);
      }
    }
    const Sequent &P = n.premises[0]->conclusion;
    const Formula &F = d.formula;
    Formula f0 = substitute(F, single(d.param, Term::zero()));
    Formula fs = substitute(F, single(d.param, Term::succ(d.param)));
    std::vector<Formula> gamma = build::without(P.ant, F);
    std::vector<Formula> delta = build::without(P.suc, fs);
    c.es = Sequent{build::concat({f0}, gamma), build::concat(delta, {F})};

    Proof base = build::ax(f0);
    for (const Formula &g : gamma)
      base = build::wl(base, g);
    for (const Formula &g : delta)
      base = build::wr(base, g);
    c.base = base;

    // Reserve the slot so that the preorder numbering is kept.
    std::size_t slot = out_.components.size();
    out_.components.push_back(Component{});
    Proof xi = rewrite(n.premises[0], name);
    Proof step = build::cut(build::link(c.es, self), xi, F);
    for (const Formula &g : gamma)
      step = build::cl(step, g);
    for (const Formula &g : delta)
      step = build::cr(step, g);
    c.step = step;
    out_.components[slot] = std::move(c);
    return build::link(n.conclusion, call);
  }
};

// ---------------------------------------------------------------- E elimination

inline bool is_pa_rule(const RewriteRule &r) {
  static const EqTheory pa = theory_pa();
  for (const RewriteRule &q : pa.rules())
    if (q.name == r.name && to_sexpr(q.lhs) == to_sexpr(r.lhs) && to_sexpr(q.rhs) == to_sexpr(r.rhs))
      return true;
  return false;
}

class EEliminator {
public:
  EEliminator(const EqTheory &th, std::size_t fuel) : th_(th), norm_(th, fuel), fuel_(fuel) {}

  std::size_t eliminated = 0;

  Proof run(const Proof &p) {
    auto it = done_.find(p.get());
    if (it != done_.end())
      return it->second;
    std::vector<Proof> prem;
    bool changed = false;
    for (const Proof &q : p->premises) {
      prem.push_back(run(q));
      changed = changed || prem.back() != q;
    }
    Proof out = p;
    if (p->rule == Rule::ERule) {
      out = replace(*p, prem[0]);
      ++eliminated;
    } else if (changed) {
      ProofNode m = *p;
      m.premises = std::move(prem);
      out = build::node(std::move(m));
    }
    done_[p.get()] = out;
    return out;
  }

  // A |- B for formulas with the same normal form.
  Proof equiv(const Formula &a, const Formula &b) {
    if (alpha_equal(a, b))
      return build::ax(a);
    if (a.is_atom() && b.is_atom())
      return atom_chain(a, b);
    if (a.kind() != b.kind())
      throw Error(ErrorCode::NonPaRule, "E inference changes the shape of " + pretty(a));
    switch (a.kind()) {
    case Formula::Kind::Not:
      return build::notr(build::notl(equiv(b.sub(0), a.sub(0)), a.sub(0)), b.sub(0));
    case Formula::Kind::And:
      return build::andl(build::andr(equiv(a.sub(0), b.sub(0)), equiv(a.sub(1), b.sub(1)), b.sub(0), b.sub(1)),
                         a.sub(0), a.sub(1));
    case Formula::Kind::Or:
      return build::orr(build::orl(equiv(a.sub(0), b.sub(0)), equiv(a.sub(1), b.sub(1)), a.sub(0), a.sub(1)),
                        b.sub(0), b.sub(1));
    case Formula::Kind::Imp:
      return build::impr(build::impl(equiv(b.sub(0), a.sub(0)), equiv(a.sub(1), b.sub(1)), a.sub(0), a.sub(1)),
                         b.sub(0), b.sub(1));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
      Term e = fresh(a.binder());
      Formula ai = substitute(a.body(), single(a.binder(), e));
      Formula bi = substitute(b.body(), single(b.binder(), e));
      Proof q = equiv(ai, bi);
      if (a.kind() == Formula::Kind::ForAll)
        return build::quant(Rule::ForAllR, build::quant(Rule::ForAllL, q, a, e), b, e);
      return build::quant(Rule::ExistsL, build::quant(Rule::ExistsR, q, b, e), a, e);
    }
    default:
      break;
    }
    throw Error(ErrorCode::NonPaRule, "cannot relate " + pretty(a) + " and " + pretty(b));
  }

private:
  const EqTheory &th_;
  Normalizer norm_;
  std::size_t fuel_;
  std::map<const ProofNode *, Proof> done_;
  std::size_t fresh_ = 0;

  Term fresh(const Term &like) {
    std::string name = "_e" + std::to_string(fresh_++);
    return like.is_var() ? Term::var(name) : Term::passive(name);
  }

  // |- r = l from |- l = r
  static Proof sym(const Proof &eq, const Term &l, const Term &r) {
    Formula lr = Formula::eq(l, r), ll = Formula::eq(l, l);
    Proof pred = build::eqax(EqScheme::Pred, Sequent{{ll, lr}, {Formula::eq(r, l)}});
    return build::cut(build::refl(l), build::cut(eq, pred, lr), ll);
  }

  // f |- g for one rewrite step f -> g, or g |- f when reverse is set.
  Proof step_proof(const Formula &f, const RewriteStep<Formula> &st, bool reverse) {
    const RewriteRule &rule = th_.rules()[st.rule];
    if (st.path.empty() || !rule.is_term_rule() || !is_pa_rule(rule))
      throw Error(ErrorCode::NonPaRule, "rewrite by " + rule.name + " is outside E_PA");
    std::size_t argi = static_cast<std::size_t>(st.path[0]);
    std::vector<Term> ctx{f.args()[argi]};
    for (std::size_t j = 1; j < st.path.size(); ++j)
      ctx.push_back(ctx.back().arg(static_cast<std::size_t>(st.path[j])));
    Term l = ctx.back();
    Term r = substitute(std::get<Term>(rule.rhs), st.matcher);
    Proof eq = build::thax("pa:" + rule.name, Sequent{{}, {Formula::eq(l, r)}});
    if (reverse)
      eq = sym(eq, l, r);
    for (std::size_t j = ctx.size() - 1; j-- > 0;) {
      std::size_t idx = static_cast<std::size_t>(st.path[j + 1]);
      Term nl = ctx[j], nr = ctx[j].with_arg(idx, r);
      Formula fact = reverse ? Formula::eq(r, l) : Formula::eq(l, r);
      Formula concl = reverse ? Formula::eq(nr, nl) : Formula::eq(nl, nr);
      Proof cong = build::eqax(ctx[j].is_succ() ? EqScheme::Succ : EqScheme::Fun, Sequent{{fact}, {concl}});
      eq = build::cut(eq, cong, fact);
      l = nl;
      r = nr;
    }
    std::vector<Term> args = f.args();
    args[argi] = r;
    Formula g = f.with_args(std::move(args));
    Formula fact = reverse ? Formula::eq(r, l) : Formula::eq(l, r);
    Proof pred = reverse ? build::eqax(EqScheme::Pred, Sequent{{g, fact}, {f}})
                         : build::eqax(EqScheme::Pred, Sequent{{f, fact}, {g}});
    return build::cut(eq, pred, fact);
  }

  std::vector<std::pair<Formula, RewriteStep<Formula>>> chain(Formula f) {
    std::vector<std::pair<Formula, RewriteStep<Formula>>> out;
    while (auto st = rewrite_step(f, th_)) {
      if (out.size() >= fuel_)
        throw Error(ErrorCode::FuelExhausted, "normalizing " + pretty(f));
      out.emplace_back(f, *st);
      f = st->result;
    }
    return out;
  }

  Proof atom_chain(const Formula &a, const Formula &b) {
    auto fa = chain(a), fb = chain(b);
    Formula na = fa.empty() ? a : fa.back().second.result;
    Formula nb = fb.empty() ? b : fb.back().second.result;
    if (!alpha_equal(na, nb))
      throw Error(ErrorCode::CheckFailed, pretty(a) + " and " + pretty(b) + " are not joinable");
    Proof cur;
    for (const auto &[f, st] : fa) {
      Proof s = step_proof(f, st, false);
      cur = cur ? build::cut(cur, s, f) : s;
    }
    for (std::size_t j = fb.size(); j-- > 0;) {
      Proof s = step_proof(fb[j].first, fb[j].second, true);
      cur = cur ? build::cut(cur, s, fb[j].second.result) : s;
    }
    return cur ? cur : build::ax(a);
  }

  // Pairs the formulas an E inference changed: identical ones first, then by normal form.
  std::vector<std::pair<Formula, Formula>> pair_up(std::vector<Formula> from, std::vector<Formula> to) {
    std::vector<std::pair<Formula, Formula>> out;
    for (auto it = to.begin(); it != to.end();) {
      auto m = std::find_if(from.begin(), from.end(), [&](const Formula &f) { return alpha_equal(f, *it); });
      if (m != from.end()) {
        from.erase(m);
        it = to.erase(it);
      } else {
        ++it;
      }
    }
    for (const Formula &b : to) {
      std::string nb = canonical(norm_(b));
      auto m = std::find_if(from.begin(), from.end(), [&](const Formula &f) { return canonical(norm_(f)) == nb; });
      if (m == from.end())
        throw Error(ErrorCode::CheckFailed, "E inference: no premise formula rewrites to " + pretty(b));
      out.emplace_back(*m, b);
      from.erase(m);
    }
    return out;
  }

  Proof replace(const ProofNode &n, Proof p) {
    const Sequent &P = n.premises[0]->conclusion;
    const Sequent &C = n.conclusion;
    for (const auto &[a, b] : pair_up(P.suc, C.suc))
      p = build::cut(p, equiv(a, b), a);
    for (const auto &[a, b] : pair_up(P.ant, C.ant))
      p = build::cut(equiv(b, a), p, a);
    return p;
  }
};

// ---------------------------------------------------------------- PRA

class ToPra {
public:
  Proof run(const Proof &p, const Subst &rho) {
    std::string key = std::to_string(reinterpret_cast<std::uintptr_t>(p.get())) + "|" + subst_key(rho);
    auto it = done_.find(key);
    if (it != done_.end())
      return it->second;
    if (p->rule == Rule::Link)
      throw Error(ErrorCode::CheckFailed, "proof links must be translated before the PRA pass");
    if (p->rule == Rule::ERule)
      throw Error(ErrorCode::CheckFailed, "E inferences must be eliminated before the PRA pass");
    ProofNode m = *p;
    m.conclusion = substitute(p->conclusion, rho);
    if (m.cut_formula)
      m.cut_formula = substitute(*m.cut_formula, rho);
    if (m.term)
      m.term = substitute(*m.term, rho);
    Subst inner = rho;
    if (p->rule == Rule::MvInd) {
      const InductionData &d = *p->induction;
      Term v = Term::passive("_v" + std::to_string(counter_++));
      inner[d.param.var_key()] = v;
      for (const auto &[k, a] : d.inst)
        inner[k.var_key()] = substitute(a, rho);
      InductionData nd;
      nd.formula = substitute(d.formula, inner);
      nd.param = v;
      nd.target = substitute(d.target, rho);
      m.induction = std::move(nd);
      m.rule = Rule::Ind;
    } else if (p->rule == Rule::Ind) {
      inner.erase(p->induction->param.var_key());
      m.induction->formula = substitute(p->induction->formula, inner);
      m.induction->target = substitute(p->induction->target, rho);
    }
    for (Proof &q : m.premises)
      q = run(q, inner);
    Proof out = build::node(std::move(m));
    done_[key] = out;
    return out;
  }

private:
  std::size_t counter_ = 0;
  std::map<std::string, Proof> done_;

  static std::string subst_key(const Subst &s) {
    std::string k;
    for (const auto &[v, t] : s)
      k += v + "=" + canonical(t) + ";";
    return k;
  }
};

class FromPra {
public:
  Proof run(const Proof &p, const Subst &env) {
    ProofNode m = *p;
    m.conclusion = substitute(p->conclusion, env);
    if (m.cut_formula)
      m.cut_formula = substitute(*m.cut_formula, env);
    if (m.term)
      m.term = substitute(*m.term, env);
    Subst inner = env;
    if (p->rule == Rule::Ind) {
      const InductionData &d = *p->induction;
      InductionData nd;
      Term n = Term::active(d.param.name());
      for (const auto &[k, t] : env) {
        auto par = parse_param_key(k);
        if (!par || !occurs_free(k, d.formula))
          continue;
        Term internal = Term::internal(par->name);
        inner[k] = internal;
        nd.inst.emplace_back(internal, t);
      }
      inner[d.param.var_key()] = n;
      nd.formula = substitute(d.formula, inner);
      nd.param = n;
      nd.target = substitute(d.target, env);
      m.induction = std::move(nd);
      m.rule = Rule::MvInd;
    }
    for (Proof &q : m.premises)
      q = run(q, inner);
    return build::node(std::move(m));
  }
};

} // namespace detail

inline Proof schema_to_mvlkie(const PSchema &s, const TranslateOptions &o = {}) {
  if (s.components.empty())
    throw Error(ErrorCode::EmptySchema, "schema has no components");
  SchemaCheckOptions so;
  so.theory = o.theory;
  so.fuel = o.fuel;
  so.theory_axioms = o.theory_axioms;
  SchemaReport rep = validate_schema(s, so);
  if (!rep.valid)
    throw Error(ErrorCode::CheckFailed, "schema does not validate: " + rep.summary());
  if (!rep.strict && !o.general)
    throw Error(ErrorCode::NotStrict, "schema contains computational sub-schemata");
  detail::ToMvlkie t(s, o);
  Proof p = t.generic(s.components.front());
  std::map<std::string, Sequent> axioms;
  if (o.theory_axioms)
    axioms = *o.theory_axioms;
  for (const Component &c : s.components)
    axioms["schema:" + c.symbol] = c.es;
  TranslateOptions co = o;
  co.theory_axioms = &axioms;
  detail::require_valid(p, detail::check_options(co, Profile::mvlkie()), "translated derivation");
  return p;
}

inline PSchema mvlkie_to_schema(const Proof &p, const TranslateOptions &o = {}) {
  detail::require_valid(p, detail::check_options(o, Profile::mvlkie()), "mvLKIE derivation");
  detail::require_strict_proof(p);
  PSchema s;
  s.components.push_back(Component{});
  detail::ToSchema t(s);
  Proof body = t.rewrite(p, "top");
  Component &top = s.components.front();
  top.symbol = "top";
  top.es = p->conclusion;
  top.base = body;
  top.step = body;
  SchemaCheckOptions so;
  so.theory = o.theory;
  so.fuel = o.fuel;
  so.theory_axioms = o.theory_axioms;
  SchemaReport rep = validate_schema(s, so);
  if (!rep.valid)
    throw Error(ErrorCode::CheckFailed, "constructed schema does not validate: " + rep.summary());
  return s;
}

struct EElimReport {
  Proof proof;
  std::size_t eliminated = 0;
  std::size_t cuts_added = 0;
};

inline EElimReport eliminate_e_rule(const Proof &p, const EqTheory &th, std::size_t fuel = kDefaultFuel) {
  detail::EEliminator e(th, fuel);
  EElimReport r;
  r.proof = e.run(p);
  r.eliminated = e.eliminated;
  std::size_t before = count_rule(p, Rule::Cut), after = count_rule(r.proof, Rule::Cut);
  r.cuts_added = after > before ? after - before : 0;
  return r;
}

// Axiom labels introduced by eliminate_e_rule.
inline std::map<std::string, Sequent> pa_axioms() {
  std::map<std::string, Sequent> m;
  EqTheory pa = theory_pa();
  for (const RewriteRule &r : pa.rules())
    m["pa:" + r.name] = Sequent{{}, {Formula::eq(std::get<Term>(r.lhs), std::get<Term>(r.rhs))}};
  return m;
}

inline Proof to_pra(const Proof &p, const TranslateOptions &o = {}) {
  std::set<const ProofNode *> seen;
  std::function<void(const Proof &)> scan = [&](const Proof &q) {
    if (!seen.insert(q.get()).second)
      return;
    for (const Parameter &x : parameters_of(q->conclusion, ParamKind::Passive))
      if (x.name.rfind("_v", 0) == 0)
        throw Error(ErrorCode::FreshNameClash, "passive parameter " + x.name + " uses the reserved prefix _v");
    for (const Proof &r : q->premises)
      scan(r);
  };
  scan(p);
  detail::require_strict_proof(p);
  detail::ToPra t;
  Proof out = t.run(p, {});
  detail::require_valid(out, detail::check_options(o, Profile::pra_profile()), "PRA derivation");
  return out;
}

inline Proof from_pra(const Proof &p, const TranslateOptions &o = {}) {
  detail::FromPra f;
  Proof out = f.run(p, {});
  detail::require_valid(out, detail::check_options(o, Profile::mvlkie()), "back-translated derivation");
  return out;
}

// Universally closes the single succedent formula over its passive parameters.
inline Proof generalize(const Proof &p) {
  const Sequent &s = p->conclusion;
  if (s.suc.size() != 1)
    return p;
  std::set<std::string> in_ant;
  for (const Formula &f : s.ant)
    collect_free(f, in_ant);
  std::vector<Parameter> ps;
  for (const Parameter &x : parameters_of(s.suc[0], ParamKind::Passive))
    if (!in_ant.count(x.key()))
      ps.push_back(x);
  Proof out = p;
  Formula cur = s.suc[0];
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
    Term v = Term::passive(it->name);
    cur = Formula::forall(v, cur);
    out = build::quant(Rule::ForAllR, out, cur, v);
  }
  return out;
}

} // namespace schemakern
