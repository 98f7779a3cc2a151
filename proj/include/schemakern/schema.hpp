#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "calculus.hpp"

namespace schemakern {

struct Component {
  std::string symbol;
  std::optional<Term> recursion; // active or passive parameter
  std::vector<Term> internals;
  std::vector<Term> rvars;
  Term base_value = Term::zero();
  Sequent es;
  Proof base;
  Proof step;
  SourceSpan span;

  bool recursive_passive() const {
    return recursion && recursion->is_param(ParamKind::Passive);
  }

  // Binding of the component's parameters by a link; throws on arity mismatch.
  Subst link_binding(const LinkData &d) const {
    Subst s;
    if (recursion) {
      if (!d.arg)
        throw Error(ErrorCode::CheckFailed, "link to " + symbol + " lacks a numeric argument");
      s[recursion->var_key()] = *d.arg;
    } else if (d.arg) {
      throw Error(ErrorCode::CheckFailed, "link to " + symbol + " has an unexpected numeric argument");
    }
    if (d.iargs.size() != internals.size())
      throw Error(ErrorCode::CheckFailed, "link to " + symbol + " expects " +
                                              std::to_string(internals.size()) + " internal arguments");
    if (d.rargs.size() != rvars.size())
      throw Error(ErrorCode::CheckFailed, "link to " + symbol + " expects " +
                                              std::to_string(rvars.size()) + " iota arguments");
    for (std::size_t i = 0; i < internals.size(); ++i)
      s[internals[i].var_key()] = d.iargs[i];
    for (std::size_t i = 0; i < rvars.size(); ++i)
      s[rvars[i].var_key()] = d.rargs[i];
    return s;
  }

  Sequent instance(const LinkData &d) const { return substitute(es, link_binding(d)); }

  Sequent base_sequent() const {
    return recursion ? substitute(es, single(*recursion, base_value)) : es;
  }
  Sequent step_sequent() const {
    return recursion ? substitute(es, single(*recursion, Term::succ(*recursion))) : es;
  }
};

struct PSchema {
  std::vector<Component> components;
  std::vector<std::pair<std::string, std::string>> order;

  const Component *find(const std::string &sym) const {
    for (const Component &c : components)
      if (c.symbol == sym)
        return &c;
    return nullptr;
  }
  const Component &at(const std::string &sym) const {
    if (const Component *c = find(sym))
      return *c;
    throw Error(ErrorCode::UnknownComponent, "no component " + sym);
  }
  const Sequent &end_sequent() const {
    if (components.empty())
      throw Error(ErrorCode::EmptySchema, "schema has no components");
    return components.front().es;
  }
  std::size_t size() const { return components.size(); }
};

inline LinkResolver schema_resolver(const PSchema &s) {
  return [&s](const LinkData &d, std::string &why) -> std::optional<Sequent> {
    const Component *c = s.find(d.target);
    if (!c) {
      why = "unknown link target " + d.target;
      return std::nullopt;
    }
    try {
      return c->instance(d);
    } catch (const Error &e) {
      why = e.detail();
      return std::nullopt;
    }
  };
}

struct LinkSite {
  std::string from;
  bool in_step = false;
  std::vector<std::size_t> path;
  LinkData data;
  Sequent sequent;
};

inline std::vector<LinkSite> link_sites(const Component &c) {
  std::vector<LinkSite> out;
  for (bool step : {false, true}) {
    const Proof &p = step ? c.step : c.base;
    if (!p)
      continue;
    for_each_node(p, [&](const ProofNode &n, const std::vector<std::size_t> &path) {
      if (n.rule == Rule::Link && n.link)
        out.push_back({c.symbol, step, path, *n.link, n.conclusion});
    });
  }
  return out;
}

// ---------------------------------------------------------------- ordering

// Reflexive-transitive closure of the declared order, as a reachability table.
inline std::map<std::string, std::set<std::string>> order_closure(const PSchema &s) {
  std::map<std::string, std::set<std::string>> reach;
  for (const Component &c : s.components)
    reach[c.symbol].insert(c.symbol);
  bool changed = true;
  for (const auto &[a, b] : s.order)
    reach[a].insert(b);
  while (changed) {
    changed = false;
    for (auto &[a, succ] : reach) {
      std::set<std::string> add;
      for (const std::string &b : succ)
        for (const std::string &c : reach[b])
          if (!succ.count(c))
            add.insert(c);
      if (!add.empty()) {
        succ.insert(add.begin(), add.end());
        changed = true;
      }
    }
  }
  return reach;
}

enum class Linkability { None, Linkable, StrictlyLinkable };

inline const char *linkability_name(Linkability l) {
  switch (l) {
  case Linkability::None: return "none";
  case Linkability::Linkable: return "linkable";
  case Linkability::StrictlyLinkable: return "strictly-linkable";
  }
  return "?";
}

struct LinkabilityResult {
  Linkability value = Linkability::None;
  std::vector<std::string> diagnostics;
};

inline LinkabilityResult linkable(const Component &c, const Component &d) {
  LinkabilityResult r;
  auto vd = parameters_of(d.es, ParamKind::Passive);
  auto vc = parameters_of(c.es, ParamKind::Passive);
  bool any = false;
  for (const LinkSite &s : link_sites(c)) {
    if (s.data.target != d.symbol)
      continue;
    any = true;
    auto vs = parameters_of(s.sequent, ParamKind::Passive);
    for (const Parameter &p : vd)
      if (!vs.count(p))
        r.diagnostics.push_back("passive " + p.name + " of es(" + d.symbol +
                                ") is absent from the link sequent at " + path_string(s.path));
  }
  if (!any || !r.diagnostics.empty())
    return r;
  bool strict = std::includes(vc.begin(), vc.end(), vd.begin(), vd.end());
  r.value = strict ? Linkability::StrictlyLinkable : Linkability::Linkable;
  return r;
}

// ---------------------------------------------------------------- sub-schemata

struct SubSchema {
  std::vector<std::string> members;
  bool computational = false;
};

inline std::vector<SubSchema> sub_schemata(const PSchema &s) {
  std::vector<SubSchema> out;
  std::size_t k = s.components.size();
  if (k == 0 || k > 16)
    return out;
  auto reach = order_closure(s);
  auto es_passives = parameters_of(s.end_sequent(), ParamKind::Passive);
  std::vector<std::vector<LinkSite>> sites;
  for (const Component &c : s.components)
    sites.push_back(link_sites(c));
  for (std::size_t mask = 1; mask < (std::size_t(1) << k); ++mask) {
    std::set<std::string> in;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (std::size_t(1) << i))
        in.insert(s.components[i].symbol);
    bool closed = true;
    for (const std::string &m : in)
      for (const std::string &r : reach[m])
        closed = closed && in.count(r);
    for (std::size_t i = 0; i < k && closed; ++i)
      if (in.count(s.components[i].symbol))
        for (const LinkSite &l : sites[i])
          closed = closed && in.count(l.data.target);
    if (!closed)
      continue;
    bool least = false;
    for (const std::string &m : in) {
      bool below_all = true;
      for (const std::string &o : in)
        below_all = below_all && reach[m].count(o);
      least = least || below_all;
    }
    if (!least)
      continue;
    bool ok = true, computational = false;
    for (std::size_t i = 0; i < k && ok; ++i) {
      if (in.count(s.components[i].symbol))
        continue;
      for (const LinkSite &l : sites[i]) {
        if (!in.count(l.data.target))
          continue;
        const Component &target = s.at(l.data.target);
        if (!target.recursion || !l.data.arg)
          continue;
        const Term &t = *l.data.arg;
        bool bad = !parameters_of(t, ParamKind::Active).empty() ||
                   !parameters_of(t, ParamKind::Internal).empty();
        for (const Parameter &p : parameters_of(t, ParamKind::Passive))
          bad = bad || es_passives.count(p);
        if (bad) {
          ok = false;
          break;
        }
        if (!is_ground(t))
          computational = true;
      }
    }
    if (!ok)
      continue;
    SubSchema sub;
    for (const Component &c : s.components)
      if (in.count(c.symbol))
        sub.members.push_back(c.symbol);
    sub.computational = computational;
    out.push_back(std::move(sub));
  }
  std::sort(out.begin(), out.end(), [](const SubSchema &a, const SubSchema &b) {
    return a.members.size() != b.members.size() ? a.members.size() < b.members.size()
                                                : a.members < b.members;
  });
  return out;
}

// ---------------------------------------------------------------- validation

struct SchemaReport {
  bool valid = true;
  bool complete = false;
  bool strict = false;
  std::size_t components = 0;
  std::vector<Violation> diagnostics;
  std::vector<SubSchema> subs;

  std::string classification() const {
    if (!valid)
      return "invalid";
    return complete ? "complete" : "general";
  }
  std::string summary() const {
    if (!valid)
      return "invalid P-schema, " + std::to_string(diagnostics.size()) + " diagnostic(s)";
    return "valid, " + classification() + " P-schema, " + std::to_string(components) +
           " component" + (components == 1 ? "" : "s") + (strict ? " (strict)" : "");
  }
};

struct SchemaCheckOptions {
  const EqTheory *theory = nullptr;
  std::size_t fuel = kDefaultFuel;
  const std::map<std::string, Sequent> *theory_axioms = nullptr;
};

inline SchemaReport validate_schema(const PSchema &s, const SchemaCheckOptions &o = {}) {
  SchemaReport r;
  r.components = s.components.size();
  auto diag = [&](const char *code, std::string msg, std::string where = {}, SourceSpan span = {},
                  std::vector<std::size_t> path = {}) {
    r.diagnostics.push_back({code, std::move(msg), std::move(path), span, std::move(where)});
  };
  if (s.components.empty()) {
    diag("EmptySchema", "schema has no components");
    r.valid = false;
    return r;
  }
  std::set<std::string> names;
  for (const Component &c : s.components)
    if (!names.insert(c.symbol).second)
      diag("SymbolClash", "component symbol " + c.symbol + " is declared twice", c.symbol, c.span);

  CheckOptions co;
  co.profile = Profile::lks();
  co.theory = o.theory;
  co.fuel = o.fuel;
  co.resolver = schema_resolver(s);
  co.theory_axioms = o.theory_axioms;

  for (const Component &c : s.components) {
    if (!c.base || !c.step) {
      diag("MissingInductivePair", "component lacks a base or step derivation", c.symbol, c.span);
      continue;
    }
    auto actives = parameters_of(c.es, ParamKind::Active);
    if (actives.size() > 1)
      diag("MultipleActiveParams", "end-sequent has more than one active parameter", c.symbol, c.span);
    for (const Parameter &p : actives)
      if (!c.recursion || c.recursion->parameter() != p)
        diag("MissingInductivePair", "active parameter " + p.name + " is not the recursion parameter",
             c.symbol, c.span);
    std::set<Parameter> declared;
    for (const Term &i : c.internals)
      declared.insert(i.parameter());
    for (const Parameter &p : parameters_of(c.es, ParamKind::Internal))
      if (!declared.count(p))
        diag("UndeclaredInternal", "internal parameter " + p.name + " is not declared", c.symbol, c.span);
    if (c.recursion && !is_numeral(c.base_value))
      diag("MissingInductivePair", "base value is not a numeral", c.symbol, c.span);

    for (bool step : {false, true}) {
      const Proof &p = step ? c.step : c.base;
      std::string where = c.symbol + (step ? "/step" : "/base");
      CheckReport cr = check_derivation(p, co);
      for (Violation v : cr.violations) {
        v.where = where;
        r.diagnostics.push_back(std::move(v));
      }
      if (!step && !cr.actives.empty())
        diag("MissingInductivePair", "base derivation is not inactive", where, p->span);
      if (step) {
        for (const std::string &a : cr.actives)
          if (!c.recursion || !c.recursion->is_param(ParamKind::Active) || c.recursion->name() != a)
            diag("MultipleActiveParams", "step derivation uses active parameter " + a, where, p->span);
      }
      const Sequent &got = p->conclusion;
      bool ok;
      if (!step)
        ok = got.same_as(c.base_sequent());
      else
        ok = got.same_as(c.step_sequent()) || (c.recursive_passive() && got.same_as(c.es));
      if (!ok)
        diag("MissingInductivePair",
             std::string(step ? "step" : "base") + " end-sequent " + pretty(got) + " does not match " +
                 pretty(step ? c.step_sequent() : c.base_sequent()),
             where, p->span);
    }

    bool shifted = c.recursion && c.step->conclusion.same_as(c.step_sequent());
    for (const LinkSite &l : link_sites(c)) {
      if (l.data.target != c.symbol)
        continue;
      std::string where = c.symbol + (l.in_step ? "/step" : "/base");
      if (!l.in_step) {
        diag("CyclicLinks", "base derivation links to its own component", where, {}, l.path);
      } else if (!shifted || !l.data.arg || *l.data.arg != *c.recursion) {
        diag("BadSelfLink", "self-link must call the predecessor of the recursion parameter", where,
             {}, l.path);
      }
    }
  }

  // Cross-component link graph must be acyclic.
  std::map<std::string, std::set<std::string>> graph;
  for (const Component &c : s.components)
    for (const LinkSite &l : link_sites(c))
      if (l.data.target != c.symbol && s.find(l.data.target))
        graph[c.symbol].insert(l.data.target);
  {
    std::map<std::string, int> color;
    bool cyclic = false;
    std::function<void(const std::string &)> dfs = [&](const std::string &v) {
      color[v] = 1;
      for (const std::string &w : graph[v]) {
        if (color[w] == 1)
          cyclic = true;
        else if (color[w] == 0)
          dfs(w);
      }
      color[v] = 2;
    };
    for (const Component &c : s.components)
      if (color[c.symbol] == 0)
        dfs(c.symbol);
    if (cyclic)
      diag("CyclicLinks", "components link to each other cyclically");
  }

  // Declared order: known symbols, well founded, linkable, C1 least, covers links.
  bool order_ok = true;
  for (const auto &[a, b] : s.order) {
    if (!s.find(a) || !s.find(b)) {
      diag("OrderViolation", "order edge " + a + " < " + b + " names an unknown component");
      order_ok = false;
    } else if (a == b) {
      diag("CyclicLinks", "order edge " + a + " < " + b + " is reflexive");
      order_ok = false;
    }
  }
  auto reach = order_closure(s);
  if (order_ok) {
    for (const auto &[a, succ] : reach)
      for (const std::string &b : succ)
        if (a != b && reach[b].count(a)) {
          diag("CyclicLinks", "declared order is cyclic through " + a + " and " + b);
          order_ok = false;
        }
  }
  if (order_ok) {
    for (const auto &[a, b] : s.order) {
      const Component &ca = s.at(a), &cb = s.at(b);
      auto lr = linkable(ca, cb);
      for (const std::string &d : lr.diagnostics)
        diag("OrderViolation", a + " < " + b + ": " + d, a);
    }
    for (const auto &[a, targets] : graph)
      for (const std::string &b : targets)
        if (!reach[a].count(b))
          diag("OrderViolation", a + " links to " + b + " but " + a + " < " + b + " is not declared", a);
    const std::string &top = s.components.front().symbol;
    for (const Component &c : s.components)
      if (!reach[top].count(c.symbol))
        diag("OrderViolation", "first component " + top + " is not below " + c.symbol, top);
  }

  r.valid = r.diagnostics.empty();
  if (!r.valid)
    return r;

  r.subs = sub_schemata(s);
  r.complete = std::none_of(r.subs.begin(), r.subs.end(),
                            [](const SubSchema &x) { return x.computational; });
  bool strict = r.complete;
  auto es_passives = parameters_of(s.end_sequent(), ParamKind::Passive);
  for (const Component &c : s.components) {
    for (const LinkSite &l : link_sites(c))
      if (l.data.target != c.symbol &&
          linkable(c, s.at(l.data.target)).value != Linkability::StrictlyLinkable)
        strict = false;
    for (const Proof &p : {c.base, c.step})
      for_each_node(p, [&](const ProofNode &n, const auto &) {
        for (const Parameter &q : parameters_of(n.conclusion, ParamKind::Passive))
          if (!es_passives.count(q))
            strict = false;
      });
  }
  r.strict = strict;
  return r;
}

} // namespace schemakern
