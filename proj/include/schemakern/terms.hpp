#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace schemakern {

enum class Sort { Omega, Iota, Bool };
enum class ParamKind { Active, Passive, Internal };

inline const char *sort_name(Sort s) {
  switch (s) {
  case Sort::Omega: return "omega";
  case Sort::Iota: return "iota";
  case Sort::Bool: return "o";
  }
  return "?";
}

inline const char *kind_prefix(ParamKind k) {
  switch (k) {
  case ParamKind::Active: return "n:";
  case ParamKind::Passive: return "p:";
  case ParamKind::Internal: return "i:";
  }
  return "?:";
}

struct Parameter {
  std::string name;
  ParamKind kind = ParamKind::Passive;

  std::string key() const { return kind_prefix(kind) + name; }
  auto operator<=>(const Parameter &) const = default;
};

inline std::size_t hash_mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

inline bool is_defined_symbol(const std::string &name) {
  return !name.empty() && name[0] == '^';
}

class Term {
public:
  enum class Kind { Zero, Succ, Param, Var, Fun };

  Term() : Term(zero()) {}

  static Term zero() {
    static const Term z(std::make_shared<const Node>(Node{Kind::Zero, Sort::Omega, "0",
                                                          ParamKind::Passive, {}, 17}));
    return z;
  }
  static Term succ(const Term &t) {
    if (t.sort() != Sort::Omega)
      throw Error(ErrorCode::SortError, "s(.) applied to a non-numeric term");
    return make(Kind::Succ, Sort::Omega, "s", ParamKind::Passive, {t});
  }
  static Term param(const Parameter &p) {
    return make(Kind::Param, Sort::Omega, p.name, p.kind, {});
  }
  static Term param(const std::string &name, ParamKind kind) { return param(Parameter{name, kind}); }
  static Term active(const std::string &name) { return param(name, ParamKind::Active); }
  static Term passive(const std::string &name) { return param(name, ParamKind::Passive); }
  static Term internal(const std::string &name) { return param(name, ParamKind::Internal); }
  static Term var(const std::string &name) {
    return make(Kind::Var, Sort::Iota, name, ParamKind::Passive, {});
  }
  static Term fun(const std::string &name, std::vector<Term> args, Sort sort) {
    return make(Kind::Fun, sort, name, ParamKind::Passive, std::move(args));
  }
  // Defined symbols default to the numeric sort, everything else to iota.
  static Term fun(const std::string &name, std::vector<Term> args) {
    return fun(name, std::move(args), is_defined_symbol(name) ? Sort::Omega : Sort::Iota);
  }

  Kind kind() const { return n_->kind; }
  Sort sort() const { return n_->sort; }
  const std::string &name() const { return n_->name; }
  ParamKind param_kind() const { return n_->pkind; }
  const std::vector<Term> &args() const { return n_->args; }
  const Term &arg(std::size_t i) const { return n_->args.at(i); }
  std::size_t hash() const { return n_->hash; }

  bool is_zero() const { return kind() == Kind::Zero; }
  bool is_succ() const { return kind() == Kind::Succ; }
  bool is_param() const { return kind() == Kind::Param; }
  bool is_param(ParamKind k) const { return is_param() && param_kind() == k; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_fun() const { return kind() == Kind::Fun; }
  bool is_defined() const { return is_fun() && is_defined_symbol(name()); }
  // Parameters and variables: the things a substitution can bind.
  bool is_variable() const { return is_param() || is_var(); }
  Parameter parameter() const { return Parameter{name(), param_kind()}; }

  // Binding key: "n:x", "p:x", "i:x" or "v:x".
  std::string var_key() const {
    if (is_var())
      return "v:" + name();
    if (is_param())
      return kind_prefix(param_kind()) + name();
    return {};
  }

  Term with_arg(std::size_t i, const Term &t) const {
    std::vector<Term> a = args();
    a.at(i) = t;
    if (is_succ())
      return succ(t);
    return make(kind(), sort(), name(), param_kind(), std::move(a));
  }
  Term with_args(std::vector<Term> a) const {
    if (is_succ())
      return succ(a.at(0));
    return make(kind(), sort(), name(), param_kind(), std::move(a));
  }

  bool same_node(const Term &o) const { return n_ == o.n_; }

  friend bool operator==(const Term &a, const Term &b) {
    if (a.n_ == b.n_)
      return true;
    const Node &x = *a.n_;
    const Node &y = *b.n_;
    return x.hash == y.hash && x.kind == y.kind && x.sort == y.sort && x.name == y.name &&
           x.pkind == y.pkind && x.args == y.args;
  }
  friend bool operator!=(const Term &a, const Term &b) { return !(a == b); }

private:
  struct Node {
    Kind kind;
    Sort sort;
    std::string name;
    ParamKind pkind;
    std::vector<Term> args;
    std::size_t hash;
  };
  std::shared_ptr<const Node> n_;

  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  static Term make(Kind k, Sort s, std::string name, ParamKind pk, std::vector<Term> args) {
    std::size_t h = hash_mix(static_cast<std::size_t>(k) * 31 + static_cast<std::size_t>(pk),
                             std::hash<std::string>{}(name));
    for (const Term &a : args)
      h = hash_mix(h, a.hash());
    return Term(std::make_shared<const Node>(Node{k, s, std::move(name), pk, std::move(args), h}));
  }
};

class Formula {
public:
  enum class Kind { Atom, Not, And, Or, Imp, ForAll, Exists };

  Formula() : Formula(atom("true", {})) {}

  static Formula atom(const std::string &pred, std::vector<Term> args) {
    return make(Kind::Atom, pred, std::move(args), {}, std::nullopt);
  }
  static Formula eq(const Term &a, const Term &b) { return atom("=", {a, b}); }
  static Formula neg(const Formula &f) { return make(Kind::Not, "", {}, {f}, std::nullopt); }
  static Formula conj(const Formula &a, const Formula &b) {
    return make(Kind::And, "", {}, {a, b}, std::nullopt);
  }
  static Formula disj(const Formula &a, const Formula &b) {
    return make(Kind::Or, "", {}, {a, b}, std::nullopt);
  }
  static Formula imp(const Formula &a, const Formula &b) {
    return make(Kind::Imp, "", {}, {a, b}, std::nullopt);
  }
  static Formula forall(const Term &binder, const Formula &body) {
    check_binder(binder);
    return make(Kind::ForAll, "", {}, {body}, binder);
  }
  static Formula exists(const Term &binder, const Formula &body) {
    check_binder(binder);
    return make(Kind::Exists, "", {}, {body}, binder);
  }
  static Formula binary(Kind k, const Formula &a, const Formula &b) {
    return make(k, "", {}, {a, b}, std::nullopt);
  }
  static Formula quantifier(Kind k, const Term &binder, const Formula &body) {
    return k == Kind::ForAll ? forall(binder, body) : exists(binder, body);
  }

  Kind kind() const { return n_->kind; }
  const std::string &pred() const { return n_->pred; }
  const std::vector<Term> &args() const { return n_->args; }
  const std::vector<Formula> &subs() const { return n_->subs; }
  const Formula &sub(std::size_t i) const { return n_->subs.at(i); }
  const Formula &body() const { return n_->subs.at(0); }
  const Term &binder() const { return *n_->binder; }
  std::size_t hash() const { return n_->hash; }

  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_eq() const { return is_atom() && pred() == "=" && args().size() == 2; }
  bool is_defined() const { return is_atom() && is_defined_symbol(pred()); }
  bool is_quantifier() const { return kind() == Kind::ForAll || kind() == Kind::Exists; }
  bool is_binary() const {
    return kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Imp;
  }

  Formula with_args(std::vector<Term> a) const {
    return make(Kind::Atom, pred(), std::move(a), {}, std::nullopt);
  }
  Formula with_subs(std::vector<Formula> s) const {
    return make(kind(), pred(), args(), std::move(s), n_->binder);
  }

  bool quantifier_free() const {
    if (is_quantifier())
      return false;
    for (const Formula &s : subs())
      if (!s.quantifier_free())
        return false;
    return true;
  }

  // Syntactic identity; alpha-equivalence lives in canonical().
  friend bool operator==(const Formula &a, const Formula &b) {
    if (a.n_ == b.n_)
      return true;
    const Node &x = *a.n_;
    const Node &y = *b.n_;
    return x.hash == y.hash && x.kind == y.kind && x.pred == y.pred && x.args == y.args &&
           x.subs == y.subs && x.binder == y.binder;
  }
  friend bool operator!=(const Formula &a, const Formula &b) { return !(a == b); }

private:
  struct Node {
    Kind kind;
    std::string pred;
    std::vector<Term> args;
    std::vector<Formula> subs;
    std::optional<Term> binder;
    std::size_t hash;
  };
  std::shared_ptr<const Node> n_;

  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  static void check_binder(const Term &b) {
    if (b.is_var() || b.is_param(ParamKind::Passive))
      return;
    if (b.is_param())
      throw Error(ErrorCode::ActiveQuantified,
                  "cannot quantify the " +
                      std::string(b.param_kind() == ParamKind::Active ? "active" : "internal") +
                      " parameter " + b.name());
    throw Error(ErrorCode::SortError, "binder must be a variable or passive parameter");
  }

  static Formula make(Kind k, std::string pred, std::vector<Term> args, std::vector<Formula> subs,
                      std::optional<Term> binder) {
    std::size_t h = hash_mix(static_cast<std::size_t>(k) + 101, std::hash<std::string>{}(pred));
    for (const Term &a : args)
      h = hash_mix(h, a.hash());
    for (const Formula &s : subs)
      h = hash_mix(h, s.hash());
    if (binder)
      h = hash_mix(h, binder->hash());
    return Formula(std::make_shared<const Node>(
        Node{k, std::move(pred), std::move(args), std::move(subs), std::move(binder), h}));
  }
};

// ---------------------------------------------------------------- signatures

struct FunSig {
  std::vector<Sort> args;
  Sort result = Sort::Iota;
  bool operator==(const FunSig &) const = default;
};

struct Signature {
  std::map<std::string, FunSig> funs;
  std::map<std::string, std::vector<Sort>> preds;

  void merge(const Signature &o) {
    for (const auto &[k, v] : o.funs)
      funs[k] = v;
    for (const auto &[k, v] : o.preds)
      preds[k] = v;
  }
  Sort result_sort(const std::string &f) const {
    auto it = funs.find(f);
    if (it != funs.end())
      return it->second.result;
    return is_defined_symbol(f) ? Sort::Omega : Sort::Iota;
  }
};

// ---------------------------------------------------------------- numerals

inline Term numeral(std::uint64_t k) {
  Term t = Term::zero();
  for (std::uint64_t i = 0; i < k; ++i)
    t = Term::succ(t);
  return t;
}

inline std::optional<std::uint64_t> try_value(const Term &t) {
  std::uint64_t v = 0;
  const Term *cur = &t;
  while (cur->is_succ()) {
    ++v;
    cur = &cur->arg(0);
  }
  if (!cur->is_zero())
    return std::nullopt;
  return v;
}

inline std::uint64_t value_of(const Term &t) {
  if (auto v = try_value(t))
    return *v;
  throw Error(ErrorCode::NotANumeral, "term is not a {0,s} numeral");
}

inline bool is_numeral(const Term &t) { return try_value(t).has_value(); }

// ---------------------------------------------------------------- free symbols

inline void collect_free(const Term &t, std::set<std::string> &out) {
  if (t.is_variable()) {
    out.insert(t.var_key());
    return;
  }
  for (const Term &a : t.args())
    collect_free(a, out);
}

inline void collect_free(const Formula &f, std::set<std::string> &out) {
  if (f.is_atom()) {
    for (const Term &a : f.args())
      collect_free(a, out);
    return;
  }
  if (f.is_quantifier()) {
    std::set<std::string> inner;
    collect_free(f.body(), inner);
    inner.erase(f.binder().var_key());
    out.insert(inner.begin(), inner.end());
    return;
  }
  for (const Formula &s : f.subs())
    collect_free(s, out);
}

template <class E> std::set<std::string> free_keys(const E &e) {
  std::set<std::string> out;
  collect_free(e, out);
  return out;
}

inline bool occurs_free(const std::string &key, const Term &t) {
  if (t.is_variable())
    return t.var_key() == key;
  for (const Term &a : t.args())
    if (occurs_free(key, a))
      return true;
  return false;
}

inline bool occurs_free(const std::string &key, const Formula &f) {
  if (f.is_atom()) {
    for (const Term &a : f.args())
      if (occurs_free(key, a))
        return true;
    return false;
  }
  if (f.is_quantifier() && f.binder().var_key() == key)
    return false;
  for (const Formula &s : f.subs())
    if (occurs_free(key, s))
      return true;
  return false;
}

inline std::optional<Parameter> parse_param_key(const std::string &key) {
  if (key.size() < 3 || key[1] != ':')
    return std::nullopt;
  switch (key[0]) {
  case 'n': return Parameter{key.substr(2), ParamKind::Active};
  case 'p': return Parameter{key.substr(2), ParamKind::Passive};
  case 'i': return Parameter{key.substr(2), ParamKind::Internal};
  default: return std::nullopt;
  }
}

template <class E> std::set<Parameter> parameters_of(const E &e, ParamKind kind) {
  std::set<Parameter> out;
  for (const std::string &k : free_keys(e))
    if (auto p = parse_param_key(k); p && p->kind == kind)
      out.insert(*p);
  return out;
}

inline bool is_ground(const Term &t) {
  if (t.is_variable())
    return false;
  for (const Term &a : t.args())
    if (!is_ground(a))
      return false;
  return true;
}

inline bool contains_defined(const Term &t) {
  if (t.is_defined())
    return true;
  for (const Term &a : t.args())
    if (contains_defined(a))
      return true;
  return false;
}

inline std::size_t term_size(const Term &t) {
  std::size_t n = 1;
  for (const Term &a : t.args())
    n += term_size(a);
  return n;
}

// ---------------------------------------------------------------- substitution

// Keys are binding keys ("n:x", "p:x", "i:x", "v:x").
using Subst = std::map<std::string, Term>;

inline void check_binding_sort(const std::string &key, const Term &t) {
  bool numeric_key = key.size() > 1 && key[0] != 'v';
  bool numeric_term = t.sort() == Sort::Omega;
  if (numeric_key != numeric_term)
    throw Error(ErrorCode::SortError, "binding for " + key + " has sort " + sort_name(t.sort()));
}

inline Term substitute(const Term &t, const Subst &s) {
  if (s.empty())
    return t;
  if (t.is_variable()) {
    auto it = s.find(t.var_key());
    if (it == s.end())
      return t;
    check_binding_sort(it->first, it->second);
    return it->second;
  }
  if (t.args().empty())
    return t;
  std::vector<Term> a;
  a.reserve(t.args().size());
  bool changed = false;
  for (const Term &x : t.args()) {
    a.push_back(substitute(x, s));
    changed = changed || !a.back().same_node(x);
  }
  return changed ? t.with_args(std::move(a)) : t;
}

inline Formula substitute(const Formula &f, const Subst &s) {
  if (s.empty())
    return f;
  if (f.is_atom()) {
    std::vector<Term> a;
    a.reserve(f.args().size());
    for (const Term &x : f.args())
      a.push_back(substitute(x, s));
    return f.with_args(std::move(a));
  }
  if (f.is_quantifier()) {
    std::string b = f.binder().var_key();
    Subst inner;
    for (const auto &[k, v] : s) {
      if (k == b || !occurs_free(k, f.body()))
        continue;
      if (occurs_free(b, v))
        throw Error(ErrorCode::CaptureError, "substituting for " + k + " would be captured by " + b);
      inner.emplace(k, v);
    }
    if (inner.empty())
      return f;
    return f.with_subs({substitute(f.body(), inner)});
  }
  std::vector<Formula> subs;
  subs.reserve(f.subs().size());
  for (const Formula &x : f.subs())
    subs.push_back(substitute(x, s));
  return f.with_subs(std::move(subs));
}

inline Subst single(const Term &var, const Term &value) { return Subst{{var.var_key(), value}}; }

// ---------------------------------------------------------------- printing

inline std::string to_sexpr(const Term &t) {
  if (auto v = try_value(t)) {
    if (*v <= 20)
      return std::to_string(*v);
    std::string out;
    for (std::uint64_t i = 0; i < *v; ++i)
      out += "(s ";
    return out + "0" + std::string(*v, ')');
  }
  switch (t.kind()) {
  case Term::Kind::Zero: return "0";
  case Term::Kind::Succ: return "(s " + to_sexpr(t.arg(0)) + ")";
  case Term::Kind::Param:
  case Term::Kind::Var: return t.var_key();
  case Term::Kind::Fun: {
    if (t.args().empty())
      return t.name();
    std::string out = "(" + t.name();
    for (const Term &a : t.args())
      out += " " + to_sexpr(a);
    return out + ")";
  }
  }
  return "?";
}

inline std::string to_sexpr(const Formula &f) {
  switch (f.kind()) {
  case Formula::Kind::Atom: {
    std::string out = "(" + f.pred();
    for (const Term &a : f.args())
      out += " " + to_sexpr(a);
    return out + ")";
  }
  case Formula::Kind::Not: return "(not " + to_sexpr(f.sub(0)) + ")";
  case Formula::Kind::And: return "(and " + to_sexpr(f.sub(0)) + " " + to_sexpr(f.sub(1)) + ")";
  case Formula::Kind::Or: return "(or " + to_sexpr(f.sub(0)) + " " + to_sexpr(f.sub(1)) + ")";
  case Formula::Kind::Imp: return "(imp " + to_sexpr(f.sub(0)) + " " + to_sexpr(f.sub(1)) + ")";
  case Formula::Kind::ForAll:
    return "(all " + f.binder().var_key() + " " + to_sexpr(f.body()) + ")";
  case Formula::Kind::Exists:
    return "(ex " + f.binder().var_key() + " " + to_sexpr(f.body()) + ")";
  }
  return "?";
}

// Human-readable infix form used in diagnostics.
inline std::string pretty(const Term &t) {
  if (auto v = try_value(t))
    return std::to_string(*v);
  switch (t.kind()) {
  case Term::Kind::Zero: return "0";
  case Term::Kind::Succ: return pretty(t.arg(0)) + "'";
  case Term::Kind::Param:
  case Term::Kind::Var: return t.name();
  case Term::Kind::Fun: {
    if (t.args().empty())
      return t.name();
    std::string out = t.name() + "(";
    for (std::size_t i = 0; i < t.args().size(); ++i)
      out += (i ? ", " : "") + pretty(t.arg(i));
    return out + ")";
  }
  }
  return "?";
}

inline std::string pretty(const Formula &f) {
  switch (f.kind()) {
  case Formula::Kind::Atom: {
    if (f.is_eq())
      return pretty(f.args()[0]) + " = " + pretty(f.args()[1]);
    if (f.args().empty())
      return f.pred();
    std::string out = f.pred() + "(";
    for (std::size_t i = 0; i < f.args().size(); ++i)
      out += (i ? ", " : "") + pretty(f.args()[i]);
    return out + ")";
  }
  case Formula::Kind::Not: return "~" + pretty(f.sub(0));
  case Formula::Kind::And: return "(" + pretty(f.sub(0)) + " & " + pretty(f.sub(1)) + ")";
  case Formula::Kind::Or: return "(" + pretty(f.sub(0)) + " | " + pretty(f.sub(1)) + ")";
  case Formula::Kind::Imp: return "(" + pretty(f.sub(0)) + " -> " + pretty(f.sub(1)) + ")";
  case Formula::Kind::ForAll: return "forall " + f.binder().name() + ". " + pretty(f.body());
  case Formula::Kind::Exists: return "exists " + f.binder().name() + ". " + pretty(f.body());
  }
  return "?";
}

// ---------------------------------------------------------------- alpha-equivalence

namespace detail {

inline void canon(const Term &t, const std::vector<std::string> &bound, std::string &out) {
  switch (t.kind()) {
  case Term::Kind::Zero: out += '0'; return;
  case Term::Kind::Succ:
    out += "s(";
    canon(t.arg(0), bound, out);
    out += ')';
    return;
  case Term::Kind::Param:
  case Term::Kind::Var: {
    std::string k = t.var_key();
    for (std::size_t i = bound.size(); i-- > 0;)
      if (bound[i] == k) {
        out += '#' + std::to_string(bound.size() - 1 - i) + (t.is_var() ? "v" : "p");
        return;
      }
    out += k;
    return;
  }
  case Term::Kind::Fun:
    out += t.name();
    out += '(';
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      if (i)
        out += ',';
      canon(t.arg(i), bound, out);
    }
    out += ')';
    return;
  }
}

inline void canon(const Formula &f, std::vector<std::string> &bound, std::string &out) {
  switch (f.kind()) {
  case Formula::Kind::Atom:
    out += f.pred();
    out += '[';
    for (std::size_t i = 0; i < f.args().size(); ++i) {
      if (i)
        out += ',';
      canon(f.args()[i], bound, out);
    }
    out += ']';
    return;
  case Formula::Kind::Not:
    out += "~(";
    canon(f.sub(0), bound, out);
    out += ')';
    return;
  case Formula::Kind::And:
  case Formula::Kind::Or:
  case Formula::Kind::Imp:
    out += f.kind() == Formula::Kind::And ? "&(" : f.kind() == Formula::Kind::Or ? "|(" : ">(";
    canon(f.sub(0), bound, out);
    out += ',';
    canon(f.sub(1), bound, out);
    out += ')';
    return;
  case Formula::Kind::ForAll:
  case Formula::Kind::Exists:
    out += f.kind() == Formula::Kind::ForAll ? "A" : "E";
    out += f.binder().is_var() ? "v(" : "p(";
    bound.push_back(f.binder().var_key());
    canon(f.body(), bound, out);
    bound.pop_back();
    out += ')';
    return;
  }
}

} // namespace detail

// De Bruijn canonical key: equal iff alpha-equivalent.
inline std::string canonical(const Formula &f) {
  std::string out;
  std::vector<std::string> bound;
  detail::canon(f, bound, out);
  return out;
}

inline std::string canonical(const Term &t) {
  std::string out;
  detail::canon(t, {}, out);
  return out;
}

inline bool alpha_equal(const Formula &a, const Formula &b) {
  return a == b || canonical(a) == canonical(b);
}

} // namespace schemakern
