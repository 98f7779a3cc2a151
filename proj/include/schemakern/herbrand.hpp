#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psk.hpp"
#include "schema.hpp"

namespace schemakern {

// List expressions on the right of W rules: nil, cons(tuple, tail), append(W(..), tail).
struct WExpr;
using WPtr = std::shared_ptr<const WExpr>;

struct WExpr {
  enum class Kind { Nil, Cons, Append };
  Kind kind = Kind::Nil;
  std::vector<Term> tuple;
  std::string call;
  std::vector<Term> args;
  WPtr tail;

  static WPtr nil() { return std::make_shared<const WExpr>(); }
  static WPtr cons(std::vector<Term> t, WPtr tail) {
    WExpr e;
    e.kind = Kind::Cons;
    e.tuple = std::move(t);
    e.tail = std::move(tail);
    return std::make_shared<const WExpr>(std::move(e));
  }
  static WPtr append(std::string call, std::vector<Term> args, WPtr tail) {
    WExpr e;
    e.kind = Kind::Append;
    e.call = std::move(call);
    e.args = std::move(args);
    e.tail = std::move(tail);
    return std::make_shared<const WExpr>(std::move(e));
  }
};

struct WRule {
  std::string head;
  std::vector<Term> lhs;
  WPtr rhs;
};

using WitnessTable = std::vector<std::vector<Term>>;

struct HerbrandSystem {
  std::string head;
  std::vector<Term> params; // n_1 .. n_beta
  std::vector<Term> vars;   // x_1 .. x_alpha
  Formula matrix;
  std::vector<WRule> rules;
  Document context; // signature and theory only

  EqTheory theory() const { return context.theory(); }
};

namespace detail {

inline std::size_t wexpr_size(const WPtr &e) {
  std::size_t n = 0;
  for (const WExpr *p = e.get(); p; p = p->tail.get()) {
    ++n;
    for (const Term &t : p->tuple)
      n += term_size(t);
    for (const Term &t : p->args)
      n += term_size(t);
  }
  return n;
}

// The existential principal of an ExistsR node and its instance in the premise.
inline std::optional<std::pair<Formula, Formula>> exists_principal(const ProofNode &n) {
  if (n.rule != Rule::ExistsR || !n.term || n.premises.size() != 1)
    return std::nullopt;
  Multiset pm = multiset_of(n.premises[0]->conclusion.suc);
  const auto &cs = n.conclusion.suc;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i].kind() != Formula::Kind::Exists)
      continue;
    Formula inst;
    try {
      inst = substitute(cs[i].body(), single(cs[i].binder(), *n.term));
    } catch (const Error &) {
      continue;
    }
    std::vector<Formula> rest = cs;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    rest.push_back(inst);
    if (multiset_of(rest) == pm)
      return std::make_pair(cs[i], inst);
  }
  return std::nullopt;
}

// Preorder walk: innermost ExistsR chains become tuples, links become calls.
struct WitnessItem {
  bool is_call = false;
  std::vector<Term> tuple;
  LinkData link;
};

inline void collect_items(const Proof &p, std::vector<const ProofNode *> &anc, std::size_t arity,
                          std::vector<WitnessItem> &out) {
  const ProofNode &n = *p;
  if (n.rule == Rule::Link && n.link) {
    WitnessItem it;
    it.is_call = true;
    it.link = *n.link;
    out.push_back(std::move(it));
  } else if (auto pr = exists_principal(n); pr && pr->second.kind() != Formula::Kind::Exists) {
    std::vector<Term> tuple{*n.term};
    Formula cur = pr->first;
    for (std::size_t i = anc.size(); i-- > 0;) {
      auto up = exists_principal(*anc[i]);
      if (!up || !alpha_equal(up->second, cur))
        break;
      tuple.insert(tuple.begin(), *anc[i]->term);
      cur = up->first;
    }
    if (tuple.size() != arity)
      throw Error(ErrorCode::WrongEndSequentShape,
                  "witness chain of length " + std::to_string(tuple.size()) + " for " +
                      std::to_string(arity) + " existential slots");
    WitnessItem it;
    it.tuple = std::move(tuple);
    out.push_back(std::move(it));
  }
  anc.push_back(&n);
  for (const Proof &q : n.premises)
    collect_items(q, anc, arity, out);
  anc.pop_back();
}

inline std::vector<WitnessItem> witness_items(const Proof &p, std::size_t arity) {
  std::vector<const ProofNode *> anc;
  std::vector<WitnessItem> out;
  collect_items(p, anc, arity, out);
  return out;
}

inline std::string w_name(const std::string &sym) { return "W_" + sym; }

} // namespace detail

// Strips the existential prefix of the end-sequent's single succedent formula.
inline std::pair<std::vector<Term>, Formula> split_existential(const Sequent &es) {
  if (!es.ant.empty() || es.suc.size() != 1)
    throw Error(ErrorCode::WrongEndSequentShape, "end-sequent must be |- exists x. F");
  std::vector<Term> vars;
  Formula f = es.suc[0];
  while (f.kind() == Formula::Kind::Exists) {
    vars.push_back(f.binder());
    f = f.body();
  }
  if (vars.empty() || !f.quantifier_free())
    throw Error(ErrorCode::WrongEndSequentShape, "end-sequent must be |- exists x. F with F quantifier-free");
  return {vars, f};
}

inline HerbrandSystem extract_herbrand_system(const Document &doc) {
  if (!doc.schema || doc.schema->components.empty())
    throw Error(ErrorCode::EmptySchema, "document has no schema");
  const PSchema &s = *doc.schema;
  EqTheory th = doc.theory();
  auto axioms = doc.axiom_map();
  SchemaCheckOptions so;
  so.theory = &th;
  so.theory_axioms = &axioms;
  SchemaReport rep = validate_schema(s, so);
  if (!rep.valid)
    throw Error(ErrorCode::CheckFailed, "schema is invalid: " + rep.summary());
  if (!rep.strict)
    throw Error(ErrorCode::NotStrict, "Herbrand extraction needs a strict schema");
  for (const Component &c : s.components)
    for (const Proof &p : {c.base, c.step})
      for_each_node(p, [&](const ProofNode &n, const auto &path) {
        if (n.rule == Rule::Cut && n.cut_formula && !n.cut_formula->quantifier_free())
          throw Error(ErrorCode::QuantifiedCut,
                      "cut on " + pretty(*n.cut_formula) + " in " + c.symbol + " at " + path_string(path));
      });

  HerbrandSystem h;
  auto [vars, matrix] = split_existential(s.end_sequent());
  h.vars = vars;
  h.matrix = matrix;
  for (const Parameter &p : parameters_of(s.end_sequent(), ParamKind::Passive))
    h.params.push_back(Term::passive(p.name));
  h.context.declared = doc.declared;
  h.context.builtins = doc.builtins;
  h.context.custom_rules = doc.custom_rules;
  h.head = detail::w_name(s.components.front().symbol);

  // Argument slots of W_psi: recursion, internals, iota vars, remaining passives of es(Psi).
  std::map<std::string, std::vector<Term>> slots;
  for (std::size_t i = 0; i < s.components.size(); ++i) {
    const Component &c = s.components[i];
    std::vector<Term> a;
    if (i == 0 && (!c.recursion || c.recursive_passive())) {
      a = h.params;
    } else {
      if (c.recursion)
        a.push_back(*c.recursion);
      for (const Term &p : h.params)
        if (!c.recursion || p != *c.recursion)
          a.push_back(p);
    }
    a.insert(a.end(), c.internals.begin(), c.internals.end());
    a.insert(a.end(), c.rvars.begin(), c.rvars.end());
    slots[c.symbol] = a;
  }

  auto call_args = [&](const LinkData &d) {
    const Component &t = s.at(d.target);
    Subst b = t.link_binding(d);
    std::vector<Term> out;
    for (const Term &x : slots[d.target])
      out.push_back(substitute(x, b));
    return out;
  };
  auto rhs_of = [&](const Proof &p, const Subst &b) {
    auto items = detail::witness_items(substitute(p, b), h.vars.size());
    WPtr e = WExpr::nil();
    for (std::size_t i = items.size(); i-- > 0;) {
      if (items[i].is_call)
        e = WExpr::append(detail::w_name(items[i].link.target), call_args(items[i].link), e);
      else
        e = WExpr::cons(items[i].tuple, e);
    }
    return e;
  };

  for (const Component &c : s.components) {
    const std::vector<Term> &a = slots[c.symbol];
    std::string w = detail::w_name(c.symbol);
    if (!c.recursion) {
      h.rules.push_back({w, a, rhs_of(c.base, {})});
      continue;
    }
    auto with_rec = [&](const Term &v) {
      std::vector<Term> l = a;
      for (Term &x : l)
        if (x == *c.recursion)
          x = v;
      return l;
    };
    h.rules.push_back({w, with_rec(c.base_value), rhs_of(c.base, single(*c.recursion, c.base_value))});
    bool shifted = c.step->conclusion.same_as(c.step_sequent());
    if (shifted) {
      h.rules.push_back({w, with_rec(Term::succ(*c.recursion)), rhs_of(c.step, {})});
    } else {
      Term pred = Term::passive("_pred");
      Term v = Term::succ(pred);
      h.rules.push_back({w, with_rec(v), rhs_of(c.step, single(*c.recursion, v))});
    }
  }

  // Witnesses may only mention the rule's own variables.
  for (const WRule &r : h.rules) {
    std::set<std::string> bound;
    for (const Term &t : r.lhs)
      collect_free(t, bound);
    for (const WExpr *e = r.rhs.get(); e; e = e->tail.get()) {
      std::set<std::string> fv;
      for (const Term &t : e->tuple)
        collect_free(t, fv);
      for (const Term &t : e->args)
        collect_free(t, fv);
      for (const std::string &k : fv)
        if (!bound.count(k))
          throw Error(ErrorCode::FreeWitnessVariable, "witness in " + r.head + " mentions " + k);
    }
  }
  return h;
}

inline std::size_t rhs_size(const HerbrandSystem &h) {
  std::size_t n = 0;
  for (const WRule &r : h.rules)
    n += detail::wexpr_size(r.rhs);
  return n;
}

inline WitnessTable normalize_witnesses(const HerbrandSystem &h, const std::vector<std::size_t> &gamma,
                                        std::size_t fuel = kDefaultFuel) {
  if (gamma.size() != h.params.size())
    throw Error(ErrorCode::SyntaxError, h.head + " expects " + std::to_string(h.params.size()) +
                                            " parameter values, got " + std::to_string(gamma.size()));
  EqTheory th = h.theory();
  Normalizer norm(th, fuel);
  std::size_t steps = 0;
  WitnessTable out;
  std::function<void(const std::string &, const std::vector<Term> &)> call;
  std::function<void(const WPtr &, const Subst &)> eval = [&](const WPtr &e, const Subst &b) {
    for (const WExpr *p = e.get(); p; p = p->tail.get()) {
      if (p->kind == WExpr::Kind::Cons) {
        std::vector<Term> t;
        for (const Term &x : p->tuple)
          t.push_back(norm(substitute(x, b)));
        out.push_back(std::move(t));
      } else if (p->kind == WExpr::Kind::Append) {
        std::vector<Term> args;
        for (const Term &x : p->args)
          args.push_back(norm(substitute(x, b)));
        call(p->call, args);
      }
    }
  };
  call = [&](const std::string &w, const std::vector<Term> &args) {
    if (++steps > fuel)
      throw Error(ErrorCode::FuelExhausted, "W evaluation exceeded " + std::to_string(fuel) + " steps");
    for (const WRule &r : h.rules) {
      if (r.head != w || r.lhs.size() != args.size())
        continue;
      Subst b;
      bool ok = true;
      for (std::size_t i = 0; i < args.size() && ok; ++i)
        ok = match(r.lhs[i], args[i], b);
      if (ok) {
        eval(r.rhs, b);
        return;
      }
    }
    std::string shown = w + "(";
    for (std::size_t i = 0; i < args.size(); ++i)
      shown += (i ? ", " : "") + pretty(args[i]);
    throw Error(ErrorCode::NonConstructorNormalForm, "no W rule applies to " + shown + ")");
  };
  std::vector<Term> args;
  for (std::size_t g : gamma)
    args.push_back(numeral(g));
  call(h.head, args);
  return out;
}

// ---------------------------------------------------------------- ground validity

namespace detail {

class Congruence {
public:
  int id(const Term &t) {
    std::string k = canonical(t);
    auto f = ids_.find(k);
    if (f != ids_.end())
      return f->second;
    std::vector<int> kids;
    for (const Term &a : t.args())
      kids.push_back(id(a));
    int i = static_cast<int>(parent_.size());
    parent_.push_back(i);
    nodes_.push_back({t.is_fun() ? t.name() : t.is_succ() ? "s" : k, kids});
    ids_[k] = i;
    return i;
  }
  int find(int x) {
    while (parent_[x] != x)
      x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void merge(int a, int b) { parent_[find(a)] = find(b); }
  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
          const Node &a = nodes_[i], &b = nodes_[j];
          if (a.kids.empty() || a.head != b.head || a.kids.size() != b.kids.size())
            continue;
          if (find(int(i)) == find(int(j)))
            continue;
          bool same = true;
          for (std::size_t k = 0; k < a.kids.size() && same; ++k)
            same = find(a.kids[k]) == find(b.kids[k]);
          if (same) {
            merge(int(i), int(j));
            changed = true;
          }
        }
    }
  }

private:
  struct Node {
    std::string head;
    std::vector<int> kids;
  };
  std::map<std::string, int> ids_;
  std::vector<int> parent_;
  std::vector<Node> nodes_;
};

class GroundValidity {
public:
  explicit GroundValidity(std::vector<Formula> disjuncts) : d_(std::move(disjuncts)) {
    for (const Formula &f : d_)
      collect(f);
    val_.assign(atoms_.size(), -1);
  }

  bool valid() { return d_.empty() ? false : !countermodel(0); }

private:
  std::vector<Formula> d_;
  std::vector<Formula> atoms_;
  std::map<std::string, std::size_t> index_;
  std::vector<int> val_;

  void collect(const Formula &f) {
    if (f.is_atom()) {
      std::string k = canonical(f);
      if (!index_.count(k)) {
        index_[k] = atoms_.size();
        atoms_.push_back(f);
      }
      return;
    }
    for (const Formula &g : f.subs())
      collect(g);
  }

  int eval(const Formula &f) const {
    switch (f.kind()) {
    case Formula::Kind::Atom: return val_[index_.at(canonical(f))];
    case Formula::Kind::Not: {
      int v = eval(f.sub(0));
      return v < 0 ? -1 : 1 - v;
    }
    case Formula::Kind::And: {
      int a = eval(f.sub(0)), b = eval(f.sub(1));
      return (a == 0 || b == 0) ? 0 : (a == 1 && b == 1) ? 1 : -1;
    }
    case Formula::Kind::Or: {
      int a = eval(f.sub(0)), b = eval(f.sub(1));
      return (a == 1 || b == 1) ? 1 : (a == 0 && b == 0) ? 0 : -1;
    }
    case Formula::Kind::Imp: {
      int a = eval(f.sub(0)), b = eval(f.sub(1));
      return (a == 0 || b == 1) ? 1 : (a == 1 && b == 0) ? 0 : -1;
    }
    default: throw Error(ErrorCode::WrongEndSequentShape, "quantifier in a Herbrand disjunct");
    }
  }

  int eval_all() const {
    int r = 0;
    for (const Formula &f : d_) {
      int v = eval(f);
      if (v == 1)
        return 1;
      if (v < 0)
        r = -1;
    }
    return r;
  }

  bool consistent() const {
    Congruence cc;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (val_[i] >= 0)
        for (const Term &t : atoms_[i].args())
          cc.id(t);
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (val_[i] == 1 && atoms_[i].is_eq())
        cc.merge(cc.id(atoms_[i].args()[0]), cc.id(atoms_[i].args()[1]));
    cc.close();
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (val_[i] != 0)
        continue;
      const Formula &a = atoms_[i];
      if (a.is_eq()) {
        if (cc.find(cc.id(a.args()[0])) == cc.find(cc.id(a.args()[1])))
          return false;
        continue;
      }
      for (std::size_t j = 0; j < atoms_.size(); ++j) {
        const Formula &b = atoms_[j];
        if (val_[j] != 1 || b.is_eq() || b.pred() != a.pred() || b.args().size() != a.args().size())
          continue;
        bool same = true;
        for (std::size_t k = 0; k < a.args().size() && same; ++k)
          same = cc.find(cc.id(a.args()[k])) == cc.find(cc.id(b.args()[k]));
        if (same)
          return false;
      }
    }
    return true;
  }

  bool countermodel(std::size_t i) {
    int v = eval_all();
    if (v == 1 || !consistent())
      return false;
    if (i == atoms_.size())
      return v == 0;
    for (int b : {0, 1}) {
      val_[i] = b;
      if (countermodel(i + 1))
        return true;
    }
    val_[i] = -1;
    return false;
  }
};

} // namespace detail

// Decides ground validity of a quantifier-free disjunction after E-normalization.
inline bool ground_valid(const std::vector<Formula> &disjuncts, const EqTheory &th,
                         std::size_t fuel = kDefaultFuel) {
  std::vector<Formula> d;
  for (const Formula &f : disjuncts)
    d.push_back(normalize(f, th, fuel));
  return detail::GroundValidity(std::move(d)).valid();
}

inline std::vector<Formula> herbrand_disjuncts(const HerbrandSystem &h, const std::vector<std::size_t> &gamma,
                                               const WitnessTable &table) {
  std::vector<Formula> out;
  for (const std::vector<Term> &row : table) {
    if (row.size() != h.vars.size())
      throw Error(ErrorCode::WrongEndSequentShape, "witness list has the wrong length");
    Subst s;
    for (std::size_t i = 0; i < h.params.size(); ++i)
      s[h.params[i].var_key()] = numeral(gamma.at(i));
    for (std::size_t i = 0; i < row.size(); ++i)
      s[h.vars[i].var_key()] = row[i];
    out.push_back(substitute(h.matrix, s));
  }
  return out;
}

inline bool verify_herbrand_disjunction(const HerbrandSystem &h, const std::vector<std::size_t> &gamma,
                                        const WitnessTable &table, std::size_t fuel = kDefaultFuel) {
  return ground_valid(herbrand_disjuncts(h, gamma, table), h.theory(), fuel);
}

// Witness tuples of an unfolded proof, read off its ExistsR chains in preorder.
inline WitnessTable harvest_witnesses(const Proof &p, std::size_t arity) {
  WitnessTable out;
  for (const detail::WitnessItem &it : detail::witness_items(p, arity))
    if (!it.is_call)
      out.push_back(it.tuple);
  return out;
}

inline WitnessTable normalize_table(const WitnessTable &t, const EqTheory &th, std::size_t fuel = kDefaultFuel) {
  WitnessTable out;
  Normalizer norm(th, fuel);
  for (const auto &row : t) {
    std::vector<Term> r;
    for (const Term &x : row)
      r.push_back(norm(x));
    out.push_back(std::move(r));
  }
  return out;
}

// Multiset equality of two witness tables.
inline bool same_witnesses(const WitnessTable &a, const WitnessTable &b) {
  auto keys = [](const WitnessTable &t) {
    std::vector<std::string> k;
    for (const auto &row : t) {
      std::string s;
      for (const Term &x : row)
        s += canonical(x) + ";";
      k.push_back(s);
    }
    std::sort(k.begin(), k.end());
    return k;
  };
  return keys(a) == keys(b);
}

// ---------------------------------------------------------------- .hrs files

namespace detail {

inline std::string print_wexpr(const WPtr &e) {
  switch (e->kind) {
  case WExpr::Kind::Nil: return "nil";
  case WExpr::Kind::Cons: {
    std::string t = "(";
    for (std::size_t i = 0; i < e->tuple.size(); ++i)
      t += (i ? " " : "") + to_sexpr(e->tuple[i]);
    return "(cons " + t + ") " + print_wexpr(e->tail) + ")";
  }
  case WExpr::Kind::Append: {
    std::string c = "(" + e->call;
    for (const Term &a : e->args)
      c += " " + to_sexpr(a);
    return "(append " + c + ") " + print_wexpr(e->tail) + ")";
  }
  }
  return "nil";
}

} // namespace detail

inline std::string print_hrs(const HerbrandSystem &h) {
  std::string out = print_psk(h.context);
  if (!out.empty())
    out += "\n";
  out += "(herbrand " + h.head + "\n  (params";
  for (const Term &p : h.params)
    out += " " + to_sexpr(p);
  out += ")\n  (vars";
  for (const Term &v : h.vars)
    out += " " + to_sexpr(v);
  out += ")\n  (matrix " + to_sexpr(h.matrix) + ")";
  for (const WRule &r : h.rules) {
    out += "\n  (wrule " + r.head + " (";
    for (std::size_t i = 0; i < r.lhs.size(); ++i)
      out += (i ? " " : "") + to_sexpr(r.lhs[i]);
    out += ")\n    " + detail::print_wexpr(r.rhs) + ")";
  }
  return out + ")\n";
}

inline HerbrandSystem parse_hrs(std::string_view text) {
  std::vector<SExpr> forms = read_sexprs(text);
  std::string ctx;
  const SExpr *sys = nullptr;
  for (const SExpr &f : forms) {
    if (f.is_form("herbrand"))
      sys = &f;
    else
      ctx += std::string(text.substr(f.span.begin, f.span.end - f.span.begin)) + "\n";
  }
  if (!sys)
    throw Error(ErrorCode::SyntaxError, "no herbrand form");
  ParseResult pr = parse_psk(ctx);
  if (!pr.ok()) {
    const Diagnostic &d = pr.diagnostics.front();
    throw Error(ErrorCode::SyntaxError, d.message);
  }
  HerbrandSystem h;
  h.context = pr.doc;
  h.context.schema.reset();
  h.context.proofs.clear();
  Signature sig = h.context.signature();
  detail::Parser p(sig);
  auto fail = [](const SExpr &e, const std::string &m) { throw Error(ErrorCode::SyntaxError, m, e.span); };
  if (sys->items.size() < 2 || !sys->items[1].is_atom())
    fail(*sys, "herbrand form needs a head symbol");
  h.head = sys->items[1].atom;
  std::function<WPtr(const SExpr &)> wexpr = [&](const SExpr &e) -> WPtr {
    if (e.is_atom("nil"))
      return WExpr::nil();
    if (e.is_form("cons") && e.items.size() == 3 && e.items[1].is_list) {
      std::vector<Term> t;
      for (const SExpr &x : e.items[1].items)
        t.push_back(p.term(x));
      return WExpr::cons(std::move(t), wexpr(e.items[2]));
    }
    if (e.is_form("append") && e.items.size() == 3 && e.items[1].is_list && !e.items[1].items.empty() &&
        e.items[1].items[0].is_atom()) {
      std::vector<Term> a;
      for (std::size_t i = 1; i < e.items[1].items.size(); ++i)
        a.push_back(p.term(e.items[1].items[i]));
      return WExpr::append(e.items[1].items[0].atom, std::move(a), wexpr(e.items[2]));
    }
    fail(e, "expected nil, cons or append");
    return nullptr;
  };
  bool have_matrix = false;
  for (std::size_t i = 2; i < sys->items.size(); ++i) {
    const SExpr &f = sys->items[i];
    if (f.is_form("params")) {
      for (std::size_t j = 1; j < f.items.size(); ++j)
        h.params.push_back(p.term(f.items[j]));
    } else if (f.is_form("vars")) {
      for (std::size_t j = 1; j < f.items.size(); ++j)
        h.vars.push_back(p.term(f.items[j]));
    } else if (f.is_form("matrix") && f.items.size() == 2) {
      h.matrix = p.formula(f.items[1]);
      have_matrix = true;
    } else if (f.is_form("wrule") && f.items.size() == 4 && f.items[1].is_atom() && f.items[2].is_list) {
      WRule r;
      r.head = f.items[1].atom;
      for (const SExpr &x : f.items[2].items)
        r.lhs.push_back(p.term(x));
      r.rhs = wexpr(f.items[3]);
      h.rules.push_back(std::move(r));
    } else {
      fail(f, "unexpected form in herbrand system");
    }
  }
  if (!have_matrix)
    fail(*sys, "herbrand system lacks a matrix");
  return h;
}

} // namespace schemakern
