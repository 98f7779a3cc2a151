#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "schema.hpp"

namespace schemakern {

// psi^(base_value, I, r) -> pi and psi^(s(n), I, r) -> nu.
struct LinkRule {
  std::string component;
  bool step = false;
  Term lhs; // recursion argument pattern
  Proof rhs;
};

struct LinkRuleSet {
  std::vector<LinkRule> rules;

  const LinkRule *find(const std::string &sym, bool step) const {
    for (const LinkRule &r : rules)
      if (r.component == sym && r.step == step)
        return &r;
    return nullptr;
  }
  std::size_t size() const { return rules.size(); }
};

inline LinkRuleSet link_rules(const PSchema &s) {
  if (s.components.empty())
    throw Error(ErrorCode::EmptySchema, "schema has no components");
  LinkRuleSet out;
  for (const Component &c : s.components) {
    Term r = c.recursion ? *c.recursion : Term::zero();
    out.rules.push_back({c.symbol, false, c.recursion ? c.base_value : r, c.base});
    bool shifted = c.recursion && c.step && c.step->conclusion.same_as(c.step_sequent());
    out.rules.push_back({c.symbol, true, shifted ? Term::succ(r) : r, c.step});
  }
  return out;
}

struct UnfoldOptions {
  std::size_t fuel = 100000;
  std::optional<unsigned> seed; // randomizes the expansion order
  bool expand_computational = false;
  const EqTheory *theory = nullptr;
  const std::map<std::string, Sequent> *theory_axioms = nullptr;
};

struct UnfoldReport {
  Proof proof;
  Sequent expected; // es(Psi) sigma
  std::size_t steps = 0;
  std::size_t size = 0;
  std::map<std::string, Sequent> theory; // axioms introduced at computational boundaries
  EqTheory eq{"unfold"};
  std::map<std::string, Sequent> axioms; // all axioms admitted when re-checking
  CheckReport verdict;
  std::size_t fuel = kDefaultFuel;
};

namespace detail {

inline std::string instance_key(const LinkData &d) {
  std::string k = d.target + "|";
  if (d.arg)
    k += canonical(*d.arg);
  for (const Term &t : d.iargs)
    k += "|" + canonical(t);
  k += "#";
  for (const Term &t : d.rargs)
    k += "|" + canonical(t);
  return k;
}

class Unfolder {
public:
  Unfolder(const PSchema &s, const Subst &sigma, const UnfoldOptions &o, const EqTheory &th)
      : s_(s), sigma_(sigma), o_(o), th_(th), norm_(th, o.fuel) {
    auto subs = sub_schemata(s);
    for (const SubSchema &sub : subs)
      if (sub.computational)
        for (const std::string &m : sub.members)
          computational_.insert(m);
    if (o.seed)
      rng_.emplace(*o.seed);
  }

  Proof run(const LinkData &top, const Sequent &concl) {
    Proof root = build::link(concl, top);
    pending_.push_back(root.get());
    owners_.push_back(root);
    while (!pending_.empty()) {
      std::size_t pick = pending_.size() - 1;
      if (rng_)
        pick = std::uniform_int_distribution<std::size_t>(0, pending_.size() - 1)(*rng_);
      const ProofNode *leaf = pending_[pick];
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
      expand(*leaf);
    }
    std::map<const ProofNode *, Proof> done;
    return assemble(root, done);
  }

  std::size_t steps = 0;
  std::map<std::string, Sequent> boundary;

private:
  const PSchema &s_;
  const Subst &sigma_;
  const UnfoldOptions &o_;
  const EqTheory &th_;
  Normalizer norm_;
  std::set<std::string> computational_;
  std::optional<std::mt19937> rng_;
  std::vector<const ProofNode *> pending_;
  std::vector<Proof> owners_;
  std::map<const ProofNode *, Proof> expansion_; // link leaf -> replacement
  std::map<std::string, Proof> memo_;

  Proof instantiate(const Component &c, const LinkData &d, const Sequent &want) {
    Subst b = sigma_;
    Subst bind = c.link_binding(d);
    bool use_step = false;
    if (c.recursion) {
      Term v = norm_(*d.arg);
      std::string key = c.recursion->var_key();
      bool shifted = c.step->conclusion.same_as(c.step_sequent());
      if (v == norm_(c.base_value)) {
        bind[key] = c.base_value;
      } else if (shifted && v.is_succ()) {
        use_step = true;
        bind[key] = v.arg(0);
      } else if (!shifted && is_ground(v)) {
        use_step = true;
        bind[key] = v;
      } else {
        throw Error(ErrorCode::StuckLink, "argument " + pretty(*d.arg) + " of link to " + c.symbol +
                                              " normalizes to " + pretty(v));
      }
    }
    for (auto &[k, v] : bind)
      b[k] = v;
    if (++steps > o_.fuel)
      throw Error(ErrorCode::FuelExhausted, "unfolding exceeded " + std::to_string(o_.fuel) + " steps");
    Proof p = substitute(use_step ? c.step : c.base, b);
    if (!p->conclusion.same_as(want))
      p = build::erule(p, want);
    return p;
  }

  void expand(const ProofNode &leaf) {
    const LinkData &d = *leaf.link;
    const Component &c = s_.at(d.target);
    bool boundary_link = computational_.count(c.symbol) &&
                         (!o_.expand_computational || (d.arg && !is_ground(*d.arg)));
    if (d.arg && !is_ground(*d.arg) && !boundary_link)
      throw Error(ErrorCode::StuckLink, "link to " + c.symbol + " has non-ground argument " + pretty(*d.arg));
    if (boundary_link) {
      std::string label = "schema:" + c.symbol;
      boundary[label] = c.es;
      expansion_[&leaf] = build::thax(label, leaf.conclusion);
      return;
    }
    std::string key = instance_key(d) + "@" + to_sexpr(leaf.conclusion);
    auto m = memo_.find(key);
    if (m != memo_.end()) {
      expansion_[&leaf] = m->second;
      return;
    }
    Proof p = instantiate(c, d, leaf.conclusion);
    memo_[key] = p;
    expansion_[&leaf] = p;
    owners_.push_back(p);
    for_each_node(p, [&](const ProofNode &n, const auto &) {
      if (n.rule == Rule::Link)
        pending_.push_back(&n);
    });
  }

  Proof assemble(const Proof &p, std::map<const ProofNode *, Proof> &done) {
    auto f = done.find(p.get());
    if (f != done.end())
      return f->second;
    Proof out;
    if (p->rule == Rule::Link) {
      auto e = expansion_.find(p.get());
      if (e == expansion_.end())
        throw Error(ErrorCode::CheckFailed, "unexpanded link to " + p->link->target);
      out = e->second->rule == Rule::TheoryAxiom ? e->second : assemble(e->second, done);
    } else {
      bool changed = false;
      std::vector<Proof> prem;
      for (const Proof &q : p->premises) {
        prem.push_back(assemble(q, done));
        changed = changed || prem.back() != q;
      }
      if (changed) {
        ProofNode copy = *p;
        copy.premises = std::move(prem);
        out = build::node(std::move(copy));
      } else {
        out = p;
      }
    }
    done[p.get()] = out;
    return out;
  }
};

inline Subst restrict_sigma(const PSchema &s, const Subst &sigma) {
  Subst out;
  for (const Parameter &p : parameters_of(s.end_sequent(), ParamKind::Passive)) {
    auto it = sigma.find(p.key());
    if (it == sigma.end())
      throw Error(ErrorCode::MissingSubstitution, "no value for passive parameter " + p.name);
    if (!is_ground(it->second))
      throw Error(ErrorCode::MissingSubstitution, "value for " + p.name + " is not ground");
    out[p.key()] = it->second;
  }
  return out;
}

} // namespace detail

// Unfolds the instance of component `sym` called with `call` (recursion argument,
// internals, iota terms), under the passive substitution sigma.
inline UnfoldReport unfold_at(const PSchema &s, const std::string &sym, LinkData call, const Subst &sigma,
                              const UnfoldOptions &o = {}) {
  const Component &c = s.at(sym);
  call.target = sym;
  UnfoldReport r;
  r.eq = o.theory ? *o.theory : EqTheory("empty");
  r.fuel = o.fuel;
  Subst sg;
  for (const auto &[k, v] : sigma)
    if (k.rfind("p:", 0) == 0)
      sg[k] = v;
  if (c.recursion && !call.arg) {
    auto it = sigma.find(c.recursion->var_key());
    if (it == sigma.end())
      throw Error(ErrorCode::MissingSubstitution, "no argument for the recursion parameter of " + sym);
    call.arg = it->second;
  }
  Sequent concl = substitute(c.instance(call), sg);
  r.expected = concl;
  detail::Unfolder u(s, sg, o, r.eq);
  r.proof = u.run(call, concl);
  r.steps = u.steps;
  r.theory = u.boundary;
  if (o.theory_axioms)
    r.axioms = *o.theory_axioms;
  for (const auto &[k, v] : r.theory)
    r.axioms[k] = v;
  r.size = tree_size(r.proof);
  CheckOptions co;
  co.profile = Profile::lk();
  co.theory = &r.eq;
  co.fuel = o.fuel;
  co.theory_axioms = &r.axioms;
  r.verdict = check_derivation(r.proof, co);
  return r;
}

inline UnfoldReport unfold(const PSchema &s, const Subst &sigma, const UnfoldOptions &o = {}) {
  if (s.components.empty())
    throw Error(ErrorCode::EmptySchema, "schema has no components");
  Subst sg = detail::restrict_sigma(s, sigma);
  const Component &top = s.components.front();
  LinkData call;
  if (top.recursion) {
    auto it = sigma.find(top.recursion->var_key());
    if (it == sigma.end())
      throw Error(ErrorCode::MissingSubstitution, "no value for " + top.recursion->name());
    call.arg = it->second;
  }
  for (const Term &i : top.internals) {
    auto it = sigma.find(i.var_key());
    if (it == sigma.end())
      throw Error(ErrorCode::MissingSubstitution, "no value for internal " + i.name());
    call.iargs.push_back(it->second);
  }
  for (const Term &v : top.rvars)
    call.rargs.push_back(v);
  UnfoldReport r = unfold_at(s, top.symbol, call, sg, o);
  r.expected = substitute(s.end_sequent(), sg);
  return r;
}

inline bool verify_unfolded(const UnfoldReport &r) {
  if (!r.proof)
    return false;
  CheckOptions co;
  co.profile = Profile::lk();
  co.theory = &r.eq;
  co.fuel = r.fuel;
  co.theory_axioms = &r.axioms;
  CheckReport cr = check_derivation(r.proof, co);
  if (!cr.valid)
    return false;
  try {
    return normalize(r.proof->conclusion, r.eq, r.fuel).same_as(normalize(r.expected, r.eq, r.fuel));
  } catch (const Error &) {
    return false;
  }
}

// Parses "alpha=3,beta=2" into passive bindings p:alpha, p:beta.
inline Subst parse_assignment(const std::string &text) {
  Subst s;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t comma = text.find(',', i);
    std::string item = text.substr(i, comma == std::string::npos ? std::string::npos : comma - i);
    i = comma == std::string::npos ? text.size() : comma + 1;
    if (item.empty())
      continue;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::SyntaxError, "expected name=value in " + item);
    std::string name = item.substr(0, eq), val = item.substr(eq + 1);
    if (name.find(':') == std::string::npos)
      name = "p:" + name;
    if (val.empty() || val.size() > 6 ||
        !std::all_of(val.begin(), val.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorCode::SyntaxError, "value of " + name + " is not a natural number below 10^6");
    s[name] = numeral(std::stoul(val));
  }
  return s;
}

} // namespace schemakern
