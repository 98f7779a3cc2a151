#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "terms.hpp"

namespace schemakern {

inline constexpr std::size_t kDefaultFuel = 10000;

using Expr = std::variant<Term, Formula>;

inline std::string to_sexpr(const Expr &e) {
  return std::visit([](const auto &x) { return to_sexpr(x); }, e);
}

struct RewriteRule {
  std::string name;
  Expr lhs;
  Expr rhs;

  bool is_term_rule() const { return std::holds_alternative<Term>(lhs); }
  const std::string &head() const {
    return is_term_rule() ? std::get<Term>(lhs).name() : std::get<Formula>(lhs).pred();
  }
};

// Validates the shape of a rule; require_defined_head enforces the E-theory form.
inline void validate_rule(const RewriteRule &r, bool require_defined_head = true) {
  auto fail = [&](const std::string &why) {
    throw Error(ErrorCode::InvalidRule, "rule " + r.name + ": " + why);
  };
  if (r.lhs.index() != r.rhs.index())
    fail("lhs and rhs differ in kind");
  const std::vector<Term> *args = nullptr;
  if (const Term *t = std::get_if<Term>(&r.lhs)) {
    if (!t->is_fun())
      fail("lhs must be a function application");
    if (require_defined_head && !t->is_defined())
      fail("lhs head is not a defined symbol");
    if (t->sort() != std::get<Term>(r.rhs).sort())
      fail("lhs and rhs sorts differ");
    args = &t->args();
  } else {
    const Formula &f = std::get<Formula>(r.lhs);
    if (!f.is_atom() || !f.is_defined())
      fail("lhs must be a defined predicate atom");
    args = &f.args();
  }
  for (const Term &a : *args)
    if (contains_defined(a))
      fail("lhs arguments contain a defined symbol");
  auto lv = std::visit([](const auto &x) { return free_keys(x); }, r.lhs);
  auto rv = std::visit([](const auto &x) { return free_keys(x); }, r.rhs);
  for (const std::string &k : rv)
    if (!lv.count(k))
      fail("rhs variable " + k + " does not occur in lhs");
}

class EqTheory {
public:
  EqTheory() = default;
  explicit EqTheory(std::string name) : name_(std::move(name)) {}

  const std::string &name() const { return name_; }
  const std::vector<RewriteRule> &rules() const { return rules_; }
  const Signature &signature() const { return sig_; }
  Signature &signature() { return sig_; }
  bool empty() const { return rules_.empty(); }

  void add(RewriteRule r, bool require_defined_head = true) {
    validate_rule(r, require_defined_head);
    for (const RewriteRule &o : rules_)
      if (o.name == r.name)
        throw Error(ErrorCode::InvalidRule, "duplicate rule name " + r.name);
    index_[r.head()].push_back(rules_.size());
    rules_.push_back(std::move(r));
  }

  void merge(const EqTheory &o) {
    for (const RewriteRule &r : o.rules_)
      add(r, false);
    sig_.merge(o.sig_);
  }

  const std::vector<std::size_t> &rules_for(const std::string &head) const {
    static const std::vector<std::size_t> none;
    auto it = index_.find(head);
    return it == index_.end() ? none : it->second;
  }

  const RewriteRule *find(const std::string &rule_name) const {
    for (const RewriteRule &r : rules_)
      if (r.name == rule_name)
        return &r;
    return nullptr;
  }

private:
  std::string name_;
  std::vector<RewriteRule> rules_;
  std::map<std::string, std::vector<std::size_t>> index_;
  Signature sig_;
};

// ---------------------------------------------------------------- builtins

inline EqTheory theory_pa() {
  EqTheory th("pa");
  Term x = Term::passive("x"), y = Term::passive("y");
  auto a = [](Term l, Term r) { return Term::fun("^a", {l, r}, Sort::Omega); };
  auto m = [](Term l, Term r) { return Term::fun("^m", {l, r}, Sort::Omega); };
  th.add({"add-zero", a(Term::zero(), y), y});
  th.add({"add-succ", a(Term::succ(x), y), Term::succ(a(x, y))});
  th.add({"mul-zero", m(Term::zero(), y), Term::zero()});
  th.add({"mul-succ", m(Term::succ(x), y), a(m(x, y), y)});
  th.signature().funs["^a"] = {{Sort::Omega, Sort::Omega}, Sort::Omega};
  th.signature().funs["^m"] = {{Sort::Omega, Sort::Omega}, Sort::Omega};
  return th;
}

// ^bigor(y) stands for P(0) | ... | P(y); ^bigand likewise.
inline EqTheory theory_iterated(const std::string &pred = "P") {
  EqTheory th("iter");
  Term y = Term::passive("y");
  auto P = [&](Term t) { return Formula::atom(pred, {t}); };
  auto big = [](const char *s, Term t) { return Formula::atom(s, {t}); };
  th.add({"bigor-zero", big("^bigor", Term::zero()), P(Term::zero())});
  th.add({"bigor-succ", big("^bigor", Term::succ(y)),
          Formula::disj(big("^bigor", y), P(Term::succ(y)))});
  th.add({"bigand-zero", big("^bigand", Term::zero()), P(Term::zero())});
  th.add({"bigand-succ", big("^bigand", Term::succ(y)),
          Formula::conj(big("^bigand", y), P(Term::succ(y)))});
  th.signature().preds[pred] = {Sort::Omega};
  th.signature().preds["^bigor"] = {Sort::Omega};
  th.signature().preds["^bigand"] = {Sort::Omega};
  return th;
}

// ^it(0,x) = x, ^it(s(n),x) = f(^it(n,x)).
inline EqTheory theory_it(const std::string &f = "f") {
  EqTheory th("it");
  Term n = Term::passive("n"), x = Term::var("x");
  auto it = [](Term k, Term v) { return Term::fun("^it", {k, v}, Sort::Iota); };
  th.add({"it-zero", it(Term::zero(), x), x});
  th.add({"it-succ", it(Term::succ(n), x), Term::fun(f, {it(n, x)}, Sort::Iota)});
  th.signature().funs["^it"] = {{Sort::Omega, Sort::Iota}, Sort::Iota};
  th.signature().funs[f] = {{Sort::Iota}, Sort::Iota};
  return th;
}

inline std::optional<EqTheory> builtin_theory(const std::string &name) {
  if (name == "pa")
    return theory_pa();
  if (name == "iter")
    return theory_iterated();
  if (name == "it")
    return theory_it();
  return std::nullopt;
}

// ---------------------------------------------------------------- matching

// Every parameter or variable of the pattern is a pattern variable.
inline bool match(const Term &pat, const Term &t, Subst &b) {
  if (pat.is_variable()) {
    std::string k = pat.var_key();
    auto it = b.find(k);
    if (it != b.end())
      return it->second == t;
    if (pat.sort() != t.sort())
      return false;
    b.emplace(std::move(k), t);
    return true;
  }
  if (pat.kind() != t.kind() || pat.name() != t.name() || pat.args().size() != t.args().size())
    return false;
  for (std::size_t i = 0; i < pat.args().size(); ++i)
    if (!match(pat.arg(i), t.arg(i), b))
      return false;
  return true;
}

inline bool match(const Formula &pat, const Formula &f, Subst &b) {
  if (pat.kind() != f.kind())
    return false;
  if (pat.is_atom()) {
    if (pat.pred() != f.pred() || pat.args().size() != f.args().size())
      return false;
    for (std::size_t i = 0; i < pat.args().size(); ++i)
      if (!match(pat.args()[i], f.args()[i], b))
        return false;
    return true;
  }
  if (pat.is_quantifier()) {
    // Binders must coincide literally; good enough for axiom patterns.
    if (pat.binder() != f.binder())
      return false;
  }
  for (std::size_t i = 0; i < pat.subs().size(); ++i)
    if (!match(pat.sub(i), f.sub(i), b))
      return false;
  return true;
}

// ---------------------------------------------------------------- single steps

template <class E> struct RewriteStep {
  E result;
  std::vector<int> path; // child indices from the root to the redex
  std::size_t rule = 0;
  Subst matcher;
};

namespace detail {

inline std::optional<RewriteStep<Term>> root_step(const Term &t, const EqTheory &th) {
  if (!t.is_fun())
    return std::nullopt;
  for (std::size_t idx : th.rules_for(t.name())) {
    const RewriteRule &r = th.rules()[idx];
    if (!r.is_term_rule())
      continue;
    Subst b;
    if (match(std::get<Term>(r.lhs), t, b))
      return RewriteStep<Term>{substitute(std::get<Term>(r.rhs), b), {}, idx, b};
  }
  return std::nullopt;
}

inline std::optional<RewriteStep<Formula>> root_step(const Formula &f, const EqTheory &th) {
  if (!f.is_atom())
    return std::nullopt;
  for (std::size_t idx : th.rules_for(f.pred())) {
    const RewriteRule &r = th.rules()[idx];
    if (r.is_term_rule())
      continue;
    Subst b;
    if (match(std::get<Formula>(r.lhs), f, b))
      return RewriteStep<Formula>{substitute(std::get<Formula>(r.rhs), b), {}, idx, b};
  }
  return std::nullopt;
}

} // namespace detail

// Leftmost-innermost single step with its position.
inline std::optional<RewriteStep<Term>> rewrite_step(const Term &t, const EqTheory &th) {
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (auto r = rewrite_step(t.arg(i), th)) {
      r->result = t.with_arg(i, r->result);
      r->path.insert(r->path.begin(), static_cast<int>(i));
      return r;
    }
  }
  return detail::root_step(t, th);
}

inline std::optional<RewriteStep<Formula>> rewrite_step(const Formula &f, const EqTheory &th) {
  if (f.is_atom()) {
    for (std::size_t i = 0; i < f.args().size(); ++i) {
      if (auto r = rewrite_step(f.args()[i], th)) {
        std::vector<Term> a = f.args();
        a[i] = r->result;
        r->path.insert(r->path.begin(), static_cast<int>(i));
        return RewriteStep<Formula>{f.with_args(std::move(a)), std::move(r->path), r->rule,
                                    std::move(r->matcher)};
      }
    }
    return detail::root_step(f, th);
  }
  for (std::size_t i = 0; i < f.subs().size(); ++i) {
    if (auto r = rewrite_step(f.sub(i), th)) {
      std::vector<Formula> s = f.subs();
      s[i] = r->result;
      r->result = f.with_subs(std::move(s));
      r->path.insert(r->path.begin(), static_cast<int>(i));
      return r;
    }
  }
  return std::nullopt;
}

inline std::optional<Term> apply_rule_once(const Term &t, const EqTheory &th) {
  if (auto r = rewrite_step(t, th))
    return r->result;
  return std::nullopt;
}

inline std::optional<Formula> apply_rule_once(const Formula &f, const EqTheory &th) {
  if (auto r = rewrite_step(f, th))
    return r->result;
  return std::nullopt;
}

inline std::optional<Expr> apply_rule_once(const Expr &e, const EqTheory &th) {
  return std::visit(
      [&](const auto &x) -> std::optional<Expr> {
        if (auto r = apply_rule_once(x, th))
          return Expr(*r);
        return std::nullopt;
      },
      e);
}

// ---------------------------------------------------------------- normalization

class Normalizer {
public:
  Normalizer(const EqTheory &th, std::size_t fuel) : th_(th), fuel_(fuel) {}

  std::size_t steps() const { return steps_; }

  // Innermost: arguments first, then the root; same normal form as iterating
  // apply_rule_once since the theory is assumed convergent.
  Term operator()(const Term &t) {
    if (th_.empty() || (t.args().empty() && !t.is_fun()))
      return t;
    Term cur = t;
    if (!t.args().empty()) {
      std::vector<Term> a;
      a.reserve(t.args().size());
      bool changed = false;
      for (const Term &x : t.args()) {
        a.push_back((*this)(x));
        changed = changed || !a.back().same_node(x);
      }
      if (changed)
        cur = t.with_args(std::move(a));
    }
    if (auto r = detail::root_step(cur, th_)) {
      consume();
      return (*this)(r->result);
    }
    return cur;
  }

  Formula operator()(const Formula &f) {
    if (th_.empty())
      return f;
    if (f.is_atom()) {
      std::vector<Term> a;
      a.reserve(f.args().size());
      for (const Term &x : f.args())
        a.push_back((*this)(x));
      Formula cur = f.with_args(std::move(a));
      if (auto r = detail::root_step(cur, th_)) {
        consume();
        return (*this)(r->result);
      }
      return cur;
    }
    std::vector<Formula> s;
    s.reserve(f.subs().size());
    for (const Formula &x : f.subs())
      s.push_back((*this)(x));
    return f.with_subs(std::move(s));
  }

private:
  const EqTheory &th_;
  std::size_t fuel_;
  std::size_t steps_ = 0;

  void consume() {
    if (++steps_ > fuel_)
      throw Error(ErrorCode::FuelExhausted,
                  "no normal form within " + std::to_string(fuel_) + " rewrite steps");
  }
};

inline Term normalize(const Term &t, const EqTheory &th, std::size_t fuel = kDefaultFuel) {
  return Normalizer(th, fuel)(t);
}

inline Formula normalize(const Formula &f, const EqTheory &th, std::size_t fuel = kDefaultFuel) {
  return Normalizer(th, fuel)(f);
}

inline Expr normalize(const Expr &e, const EqTheory &th, std::size_t fuel = kDefaultFuel) {
  return std::visit([&](const auto &x) -> Expr { return normalize(x, th, fuel); }, e);
}

inline bool joinable(const Term &a, const Term &b, const EqTheory &th,
                     std::size_t fuel = kDefaultFuel) {
  return normalize(a, th, fuel) == normalize(b, th, fuel);
}

inline bool joinable(const Formula &a, const Formula &b, const EqTheory &th,
                     std::size_t fuel = kDefaultFuel) {
  return alpha_equal(normalize(a, th, fuel), normalize(b, th, fuel));
}

inline bool joinable(const Expr &a, const Expr &b, const EqTheory &th,
                     std::size_t fuel = kDefaultFuel) {
  if (a.index() != b.index())
    return false;
  if (const Term *t = std::get_if<Term>(&a))
    return joinable(*t, std::get<Term>(b), th, fuel);
  return joinable(std::get<Formula>(a), std::get<Formula>(b), th, fuel);
}

// ---------------------------------------------------------------- overlap sanity check

// Ground instances of every lhs with numeric variables up to `depth`; whenever two
// rules fire on the same instance their results must be joinable.
inline std::vector<std::string> check_overlaps(const EqTheory &th, std::size_t depth = 3,
                                               std::size_t fuel = kDefaultFuel) {
  std::vector<std::string> problems;
  const auto &rules = th.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    auto keys = std::visit([](const auto &x) { return free_keys(x); }, rules[i].lhs);
    std::vector<std::string> vars(keys.begin(), keys.end());
    if (vars.size() > 4)
      continue;
    std::vector<std::size_t> digits(vars.size(), 0);
    for (;;) {
      Subst g;
      for (std::size_t v = 0; v < vars.size(); ++v)
        g[vars[v]] = vars[v][0] == 'v' ? Term::fun("c" + std::to_string(digits[v]), {}, Sort::Iota)
                                        : numeral(digits[v]);
      Expr inst = std::visit([&](const auto &x) -> Expr { return substitute(x, g); }, rules[i].lhs);
      Expr ri = std::visit([&](const auto &x) -> Expr { return substitute(x, g); }, rules[i].rhs);
      for (std::size_t j = 0; j < rules.size(); ++j) {
        if (j == i || rules[j].head() != rules[i].head() ||
            rules[j].lhs.index() != rules[i].lhs.index())
          continue;
        Subst b;
        bool hit = std::visit(
            [&](const auto &pat) {
              using P = std::decay_t<decltype(pat)>;
              return match(pat, std::get<P>(inst), b);
            },
            rules[j].lhs);
        if (!hit)
          continue;
        Expr rj = std::visit([&](const auto &x) -> Expr { return substitute(x, b); }, rules[j].rhs);
        try {
          if (!joinable(ri, rj, th, fuel))
            problems.push_back(rules[i].name + "/" + rules[j].name + " at " + to_sexpr(inst));
        } catch (const Error &e) {
          problems.push_back(rules[i].name + "/" + rules[j].name + ": " + e.what());
        }
      }
      std::size_t v = 0;
      while (v < digits.size() && ++digits[v] > depth)
        digits[v++] = 0;
      if (v == digits.size())
        break;
    }
  }
  return problems;
}

} // namespace schemakern
