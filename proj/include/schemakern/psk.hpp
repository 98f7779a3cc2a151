#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "calculus.hpp"
#include "rewrite.hpp"
#include "schema.hpp"
#include "sexpr.hpp"

namespace schemakern {

struct NamedProof {
  std::string name;
  Proof proof;
  std::optional<std::string> profile;
  SourceSpan span;
};

struct Document {
  Signature declared;               // as written in the signature section
  std::vector<std::string> builtins; // builtin theories requested
  std::vector<RewriteRule> custom_rules;
  std::vector<std::pair<std::string, Sequent>> axioms;
  std::optional<PSchema> schema;
  std::vector<NamedProof> proofs;

  EqTheory theory() const {
    EqTheory th("document");
    for (const std::string &b : builtins)
      if (auto t = builtin_theory(b))
        th.merge(*t);
    for (const RewriteRule &r : custom_rules)
      th.add(r);
    th.signature().merge(declared);
    return th;
  }

  Signature signature() const { return theory().signature(); }

  // Declared axioms plus one pa:<rule> axiom per E_PA rule when pa is in use.
  std::map<std::string, Sequent> axiom_map() const {
    std::map<std::string, Sequent> m;
    for (const auto &[name, seq] : axioms)
      m[name] = seq;
    EqTheory pa = theory_pa();
    if (std::find(builtins.begin(), builtins.end(), "pa") != builtins.end())
      for (const RewriteRule &r : pa.rules())
        m["pa:" + r.name] =
            Sequent{{}, {Formula::eq(std::get<Term>(r.lhs), std::get<Term>(r.rhs))}};
    return m;
  }

  const NamedProof *find_proof(const std::string &name) const {
    for (const NamedProof &p : proofs)
      if (p.name == name)
        return &p;
    return nullptr;
  }
};

struct Diagnostic {
  std::string severity = "error";
  std::string code;
  std::string message;
  SourceSpan span;
  std::string path;
};

struct ParseResult {
  Document doc;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

namespace detail {

inline std::optional<Sort> sort_from_name(const std::string &s) {
  if (s == "omega")
    return Sort::Omega;
  if (s == "iota")
    return Sort::Iota;
  if (s == "o")
    return Sort::Bool;
  return std::nullopt;
}

inline bool all_digits(const std::string &s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class Parser {
public:
  explicit Parser(const Signature &sig) : sig_(sig) {}

  [[noreturn]] void fail(const SExpr &e, const std::string &msg,
                         ErrorCode code = ErrorCode::SyntaxError) const {
    throw Error(code, msg, e.span);
  }

  Term term(const SExpr &e) const {
    if (e.is_atom()) {
      std::string a = e.atom;
      std::size_t primes = 0;
      while (a.size() > 1 && a.back() == '\'') {
        a.pop_back();
        ++primes;
      }
      Term t = base_atom(e, a);
      for (std::size_t i = 0; i < primes; ++i) {
        if (t.sort() != Sort::Omega)
          fail(e, "prime applied to a non-numeric term", ErrorCode::SortError);
        t = Term::succ(t);
      }
      return t;
    }
    if (e.items.empty() || !e.items[0].is_atom())
      fail(e, "term application needs a symbol head");
    const std::string &f = e.items[0].atom;
    std::vector<Term> args;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      args.push_back(term(e.items[i]));
    if (f == "s") {
      if (args.size() != 1)
        fail(e, "s takes one argument");
      if (args[0].sort() != Sort::Omega)
        fail(e, "s applied to a non-numeric term", ErrorCode::SortError);
      return Term::succ(args[0]);
    }
    check_name(e.items[0], f);
    auto it = sig_.funs.find(f);
    if (it != sig_.funs.end()) {
      if (it->second.args.size() != args.size())
        fail(e, f + " expects " + std::to_string(it->second.args.size()) + " arguments");
      for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].sort() != it->second.args[i])
          fail(e.items[i + 1], "argument " + std::to_string(i + 1) + " of " + f + " must have sort " +
                                   sort_name(it->second.args[i]),
               ErrorCode::SortError);
      return Term::fun(f, std::move(args), it->second.result);
    }
    return Term::fun(f, std::move(args), sig_.result_sort(f));
  }

  Formula formula(const SExpr &e) const {
    if (e.is_atom()) {
      check_name(e, e.atom);
      return Formula::atom(e.atom, {});
    }
    if (e.items.empty() || !e.items[0].is_atom())
      fail(e, "formula needs a symbol head");
    const std::string &h = e.items[0].atom;
    auto arity = [&](std::size_t n) {
      if (e.items.size() != n + 1)
        fail(e, h + " takes " + std::to_string(n) + " arguments");
    };
    if (h == "not") {
      arity(1);
      return Formula::neg(formula(e.items[1]));
    }
    if (h == "and" || h == "or" || h == "imp") {
      arity(2);
      Formula::Kind k = h == "and" ? Formula::Kind::And : h == "or" ? Formula::Kind::Or : Formula::Kind::Imp;
      return Formula::binary(k, formula(e.items[1]), formula(e.items[2]));
    }
    if (h == "all" || h == "ex") {
      arity(2);
      Term b = term(e.items[1]);
      try {
        return Formula::quantifier(h == "all" ? Formula::Kind::ForAll : Formula::Kind::Exists, b,
                                   formula(e.items[2]));
      } catch (const Error &err) {
        if (err.span().known())
          throw;
        throw Error(err.code(), err.detail(), e.items[1].span);
      }
    }
    std::vector<Term> args;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      args.push_back(term(e.items[i]));
    if (h == "=") {
      arity(2);
      if (args[0].sort() != args[1].sort())
        fail(e, "equation between different sorts", ErrorCode::SortError);
      return Formula::eq(args[0], args[1]);
    }
    check_name(e.items[0], h);
    auto it = sig_.preds.find(h);
    if (it != sig_.preds.end()) {
      if (it->second.size() != args.size())
        fail(e, h + " expects " + std::to_string(it->second.size()) + " arguments");
      for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].sort() != it->second[i])
          fail(e.items[i + 1], "argument " + std::to_string(i + 1) + " of " + h + " must have sort " +
                                   sort_name(it->second[i]),
               ErrorCode::SortError);
    }
    return Formula::atom(h, std::move(args));
  }

  Sequent sequent(const SExpr &e) const {
    if (!e.is_form("seq") || e.items.size() != 3 || !e.items[1].is_form("ant") ||
        !e.items[2].is_form("suc"))
      fail(e, "expected (seq (ant ...) (suc ...))");
    Sequent s;
    for (std::size_t i = 1; i < e.items[1].items.size(); ++i)
      s.ant.push_back(formula(e.items[1].items[i]));
    for (std::size_t i = 1; i < e.items[2].items.size(); ++i)
      s.suc.push_back(formula(e.items[2].items[i]));
    return s;
  }

  static bool is_premise(const SExpr &e) { return e.is_form("rule") || e.is_form("link"); }

  Proof proof(const SExpr &e) const {
    if (e.is_form("link"))
      return link(e);
    if (!e.is_form("rule") || e.items.size() < 3 || !e.items[1].is_atom())
      fail(e, "expected (rule TAG (seq ...) ...) or (link ...)");
    auto r = rule_from_tag(e.items[1].atom);
    if (!r || *r == Rule::Link)
      fail(e.items[1], "unknown rule tag " + e.items[1].atom);
    ProofNode n;
    n.rule = *r;
    n.span = e.span;
    n.conclusion = sequent(e.items[2]);
    for (std::size_t i = 3; i < e.items.size(); ++i) {
      const SExpr &a = e.items[i];
      if (is_premise(a)) {
        n.premises.push_back(proof(a));
        continue;
      }
      attribute(a, n);
    }
    if (static_cast<int>(n.premises.size()) != premise_count(n.rule))
      fail(e, std::string(rule_tag(n.rule)) + " expects " + std::to_string(premise_count(n.rule)) +
                  " premises, found " + std::to_string(n.premises.size()));
    if (n.rule == Rule::MvInd || n.rule == Rule::Ind) {
      if (!n.induction)
        fail(e, "induction node lacks (indf ...), (param ...) and (target ...)");
    }
    return build::node(std::move(n));
  }

  Proof link(const SExpr &e) const {
    if (e.items.size() < 3 || !e.items[1].is_atom())
      fail(e, "expected (link NAME (seq ...) ...)");
    ProofNode n;
    n.rule = Rule::Link;
    n.span = e.span;
    n.conclusion = sequent(e.items[2]);
    LinkData d;
    d.target = e.items[1].atom;
    for (std::size_t i = 3; i < e.items.size(); ++i) {
      const SExpr &a = e.items[i];
      if (a.is_form("arg") && a.items.size() == 2)
        d.arg = term(a.items[1]);
      else if (a.is_form("iargs"))
        for (std::size_t j = 1; j < a.items.size(); ++j)
          d.iargs.push_back(term(a.items[j]));
      else if (a.is_form("rargs"))
        for (std::size_t j = 1; j < a.items.size(); ++j)
          d.rargs.push_back(term(a.items[j]));
      else
        fail(a, "unknown link attribute");
    }
    n.link = std::move(d);
    return build::node(std::move(n));
  }

private:
  const Signature &sig_;

  void check_name(const SExpr &e, const std::string &name) const {
    static const std::set<std::string> reserved = {"not", "and", "or", "imp", "all", "ex", "s", "seq"};
    if (reserved.count(name) || name.find(':') != std::string::npos || all_digits(name))
      fail(e, "'" + name + "' cannot be used as a symbol");
  }

  Term base_atom(const SExpr &e, const std::string &a) const {
    if (all_digits(a)) {
      if (a.size() > 6)
        fail(e, "numeral too large");
      return numeral(std::stoull(a));
    }
    if (a.size() > 2 && a[1] == ':') {
      std::string name = a.substr(2);
      switch (a[0]) {
      case 'n': return Term::active(name);
      case 'p': return Term::passive(name);
      case 'i': return Term::internal(name);
      case 'v': return Term::var(name);
      default: fail(e, "unknown parameter prefix in " + a);
      }
    }
    check_name(e, a);
    auto it = sig_.funs.find(a);
    if (it != sig_.funs.end() && !it->second.args.empty())
      fail(e, a + " expects " + std::to_string(it->second.args.size()) + " arguments");
    return Term::fun(a, {}, sig_.result_sort(a));
  }

  void attribute(const SExpr &a, ProofNode &n) const {
    const std::string &h = a.head();
    auto one = [&]() -> const SExpr & {
      if (a.items.size() != 2)
        fail(a, "(" + h + " ...) takes one argument");
      return a.items[1];
    };
    auto ind = [&]() -> InductionData & {
      if (!n.induction)
        n.induction = InductionData{Formula(), Term::zero(), Term::zero(), {}};
      return *n.induction;
    };
    if (h == "cutf")
      n.cut_formula = formula(one());
    else if (h == "eigen" || h == "witness")
      n.term = term(one());
    else if (h == "scheme") {
      auto s = scheme_from_name(one().atom);
      if (!s)
        fail(a, "unknown equality scheme");
      n.scheme = s;
    } else if (h == "label")
      n.label = one().atom;
    else if (h == "at") {
      if (a.items.size() != 4 || !a.items[1].is_atom() || !a.items[2].is_atom() ||
          !all_digits(a.items[2].atom) || !a.items[3].is_list)
        fail(a, "expected (at ant|suc INDEX (PATH ...))");
      EPosition p;
      p.succedent = a.items[1].atom == "suc";
      if (!p.succedent && a.items[1].atom != "ant")
        fail(a.items[1], "side must be ant or suc");
      p.index = std::stoul(a.items[2].atom);
      for (const SExpr &x : a.items[3].items) {
        if (!x.is_atom() || !all_digits(x.atom))
          fail(x, "path entries are indices");
        p.path.push_back(std::stoi(x.atom));
      }
      n.position = p;
    } else if (h == "indf")
      ind().formula = formula(one());
    else if (h == "param")
      ind().param = term(one());
    else if (h == "target")
      ind().target = term(one());
    else if (h == "inst") {
      InductionData &d = ind();
      for (std::size_t i = 1; i < a.items.size(); ++i) {
        const SExpr &pr = a.items[i];
        if (!pr.is_list || pr.items.size() != 2)
          fail(pr, "expected (PARAM TERM)");
        d.inst.emplace_back(term(pr.items[0]), term(pr.items[1]));
      }
    } else
      fail(a, "unknown attribute '" + h + "'");
  }
};

} // namespace detail

namespace detail {

inline SExpr single_form(std::string_view text) {
  std::vector<SExpr> forms = read_sexprs(text);
  if (forms.size() != 1)
    throw Error(ErrorCode::SyntaxError, "expected exactly one expression");
  return forms.front();
}

} // namespace detail

// Single-expression readers over the builtin signature plus `sig`.
inline Term read_term(std::string_view text, const Signature &sig = {}) {
  return detail::Parser(sig).term(detail::single_form(text));
}
inline Formula read_formula(std::string_view text, const Signature &sig = {}) {
  return detail::Parser(sig).formula(detail::single_form(text));
}
inline Sequent read_sequent(std::string_view text, const Signature &sig = {}) {
  return detail::Parser(sig).sequent(detail::single_form(text));
}

inline ParseResult parse_psk(std::string_view text) {
  ParseResult res;
  Document &doc = res.doc;
  auto report = [&](const Error &e, const SourceSpan &fallback) {
    Diagnostic d;
    d.code = error_code_name(e.code());
    d.message = e.detail();
    d.span = e.span().known() ? e.span() : fallback;
    res.diagnostics.push_back(std::move(d));
  };
  std::vector<SExpr> forms;
  try {
    forms = read_sexprs(text);
  } catch (const Error &e) {
    report(e, {});
    return res;
  }
  // Pass 1: signature and theory.
  for (const SExpr &f : forms) {
    try {
      if (f.is_form("signature")) {
        for (std::size_t i = 1; i < f.items.size(); ++i) {
          const SExpr &d = f.items[i];
          if (d.is_form("fun") && d.items.size() == 4 && d.items[1].is_atom() && d.items[2].is_list) {
            FunSig fs;
            for (const SExpr &s : d.items[2].items) {
              auto so = detail::sort_from_name(s.atom);
              if (!so)
                throw Error(ErrorCode::SyntaxError, "unknown sort " + s.atom, s.span);
              fs.args.push_back(*so);
            }
            auto r = detail::sort_from_name(d.items[3].atom);
            if (!r)
              throw Error(ErrorCode::SyntaxError, "unknown sort", d.items[3].span);
            fs.result = *r;
            if (doc.declared.funs.count(d.items[1].atom))
              throw Error(ErrorCode::DuplicateName, "function " + d.items[1].atom + " declared twice", d.span);
            doc.declared.funs[d.items[1].atom] = fs;
          } else if (d.is_form("pred") && d.items.size() == 3 && d.items[1].is_atom() && d.items[2].is_list) {
            std::vector<Sort> args;
            for (const SExpr &s : d.items[2].items) {
              auto so = detail::sort_from_name(s.atom);
              if (!so)
                throw Error(ErrorCode::SyntaxError, "unknown sort " + s.atom, s.span);
              args.push_back(*so);
            }
            if (doc.declared.preds.count(d.items[1].atom))
              throw Error(ErrorCode::DuplicateName, "predicate " + d.items[1].atom + " declared twice", d.span);
            doc.declared.preds[d.items[1].atom] = args;
          } else {
            throw Error(ErrorCode::SyntaxError, "expected (fun NAME (SORTS) SORT) or (pred NAME (SORTS))", d.span);
          }
        }
      }
    } catch (const Error &e) {
      report(e, f.span);
    }
  }
  for (const SExpr &f : forms) {
    if (!f.is_form("theory"))
      continue;
    for (std::size_t i = 1; i < f.items.size(); ++i) {
      const SExpr &d = f.items[i];
      try {
        if (d.is_form("builtin") && d.items.size() == 2) {
          if (!builtin_theory(d.items[1].atom))
            throw Error(ErrorCode::SyntaxError, "unknown builtin theory " + d.items[1].atom, d.items[1].span);
          if (std::find(doc.builtins.begin(), doc.builtins.end(), d.items[1].atom) == doc.builtins.end())
            doc.builtins.push_back(d.items[1].atom);
        }
      } catch (const Error &e) {
        report(e, d.span);
      }
    }
  }
  Signature sig;
  try {
    sig = doc.theory().signature();
  } catch (const Error &e) {
    report(e, {});
  }
  detail::Parser p(sig);
  for (const SExpr &f : forms) {
    if (!f.is_form("theory"))
      continue;
    for (std::size_t i = 1; i < f.items.size(); ++i) {
      const SExpr &d = f.items[i];
      try {
        if (d.is_form("builtin"))
          continue;
        if (!d.is_form("rule") || d.items.size() != 4 || !d.items[1].is_atom())
          throw Error(ErrorCode::SyntaxError, "expected (builtin NAME) or (rule NAME LHS RHS)", d.span);
        const SExpr &l = d.items[2];
        bool is_formula = l.is_list && !l.items.empty() && sig.preds.count(l.head());
        RewriteRule r;
        r.name = d.items[1].atom;
        if (is_formula) {
          r.lhs = p.formula(l);
          r.rhs = p.formula(d.items[3]);
        } else {
          r.lhs = p.term(l);
          r.rhs = p.term(d.items[3]);
        }
        validate_rule(r);
        for (const RewriteRule &o : doc.custom_rules)
          if (o.name == r.name)
            throw Error(ErrorCode::DuplicateName, "rule " + r.name + " declared twice", d.span);
        doc.custom_rules.push_back(std::move(r));
      } catch (const Error &e) {
        report(e, d.span);
      }
    }
  }
  // Pass 2: everything else.
  std::set<std::string> proof_names, axiom_names;
  for (const SExpr &f : forms) {
    try {
      if (f.is_form("signature") || f.is_form("theory"))
        continue;
      if (f.is_form("axiom")) {
        if (f.items.size() != 3 || !f.items[1].is_atom())
          throw Error(ErrorCode::SyntaxError, "expected (axiom NAME (seq ...))", f.span);
        if (!axiom_names.insert(f.items[1].atom).second)
          throw Error(ErrorCode::DuplicateName, "axiom " + f.items[1].atom + " declared twice", f.span);
        doc.axioms.emplace_back(f.items[1].atom, p.sequent(f.items[2]));
      } else if (f.is_form("proof")) {
        if (f.items.size() < 3 || !f.items[1].is_atom())
          throw Error(ErrorCode::SyntaxError, "expected (proof NAME [(profile P)] PROOF)", f.span);
        NamedProof np;
        np.name = f.items[1].atom;
        np.span = f.span;
        std::size_t i = 2;
        if (f.items[i].is_form("profile")) {
          if (f.items[i].items.size() != 2 || !profile_from_name(f.items[i].items[1].atom))
            throw Error(ErrorCode::SyntaxError, "profile is one of lk, lks, mvlkie, pra, any", f.items[i].span);
          np.profile = f.items[i].items[1].atom;
          ++i;
        }
        if (i + 1 != f.items.size())
          throw Error(ErrorCode::SyntaxError, "proof takes exactly one derivation", f.span);
        np.proof = p.proof(f.items[i]);
        if (!proof_names.insert(np.name).second)
          throw Error(ErrorCode::DuplicateName, "proof " + np.name + " declared twice", f.span);
        doc.proofs.push_back(std::move(np));
      } else if (f.is_form("schema")) {
        if (doc.schema)
          throw Error(ErrorCode::DuplicateName, "more than one schema section", f.span);
        PSchema s;
        std::set<std::string> names;
        for (std::size_t i = 1; i < f.items.size(); ++i) {
          const SExpr &c = f.items[i];
          if (c.is_form("order")) {
            if (c.items.size() != 4 || !c.items[2].is_atom("<"))
              throw Error(ErrorCode::SyntaxError, "expected (order A < B)", c.span);
            s.order.emplace_back(c.items[1].atom, c.items[3].atom);
            continue;
          }
          if (!c.is_form("component") || c.items.size() < 2 || !c.items[1].is_atom())
            throw Error(ErrorCode::SyntaxError, "expected (component NAME ...) or (order A < B)", c.span);
          Component comp;
          comp.symbol = c.items[1].atom;
          comp.span = c.span;
          if (!names.insert(comp.symbol).second)
            throw Error(ErrorCode::DuplicateName, "component " + comp.symbol + " declared twice", c.span);
          bool have_es = false;
          for (std::size_t j = 2; j < c.items.size(); ++j) {
            const SExpr &a = c.items[j];
            const std::string &h = a.head();
            if ((h == "active" || h == "recursion") && a.items.size() == 2) {
              Term t = p.term(a.items[1]);
              if (!t.is_param() || t.is_param(ParamKind::Internal))
                throw Error(ErrorCode::SyntaxError, "recursion parameter must be active or passive", a.span);
              comp.recursion = t;
            } else if (h == "ints") {
              for (std::size_t k = 1; k < a.items.size(); ++k) {
                Term t = p.term(a.items[k]);
                if (!t.is_param(ParamKind::Internal))
                  throw Error(ErrorCode::SyntaxError, "ints lists internal parameters", a.items[k].span);
                comp.internals.push_back(t);
              }
            } else if (h == "rvars") {
              for (std::size_t k = 1; k < a.items.size(); ++k) {
                Term t = p.term(a.items[k]);
                if (!t.is_var())
                  throw Error(ErrorCode::SyntaxError, "rvars lists iota variables", a.items[k].span);
                comp.rvars.push_back(t);
              }
            } else if (h == "base-value" && a.items.size() == 2) {
              comp.base_value = p.term(a.items[1]);
            } else if (h == "es" && a.items.size() == 2) {
              comp.es = p.sequent(a.items[1]);
              have_es = true;
            } else if (h == "base" && a.items.size() == 2) {
              comp.base = p.proof(a.items[1]);
            } else if (h == "step" && a.items.size() == 2) {
              comp.step = p.proof(a.items[1]);
            } else {
              throw Error(ErrorCode::SyntaxError, "unknown component attribute", a.span);
            }
          }
          if (!have_es || !comp.base || !comp.step)
            throw Error(ErrorCode::SyntaxError, "component needs (es ...), (base ...) and (step ...)", c.span);
          s.components.push_back(std::move(comp));
        }
        doc.schema = std::move(s);
      } else {
        throw Error(ErrorCode::SyntaxError,
                    "expected a signature, theory, axiom, schema or proof section", f.span);
      }
    } catch (const Error &e) {
      report(e, f.span);
    }
  }
  return res;
}

// ---------------------------------------------------------------- printing

namespace detail {

inline void print_proof(const Proof &p, std::size_t indent, std::string &out) {
  std::string pad(indent, ' ');
  const ProofNode &n = *p;
  if (n.rule == Rule::Link) {
    out += pad + "(link " + n.link->target + " " + to_sexpr(n.conclusion);
    if (n.link->arg)
      out += " (arg " + to_sexpr(*n.link->arg) + ")";
    if (!n.link->iargs.empty()) {
      out += " (iargs";
      for (const Term &t : n.link->iargs)
        out += " " + to_sexpr(t);
      out += ")";
    }
    if (!n.link->rargs.empty()) {
      out += " (rargs";
      for (const Term &t : n.link->rargs)
        out += " " + to_sexpr(t);
      out += ")";
    }
    out += ")";
    return;
  }
  out += pad + "(rule " + rule_tag(n.rule) + " " + to_sexpr(n.conclusion);
  if (n.scheme)
    out += std::string(" (scheme ") + scheme_name(*n.scheme) + ")";
  if (!n.label.empty())
    out += " (label " + n.label + ")";
  if (n.cut_formula)
    out += " (cutf " + to_sexpr(*n.cut_formula) + ")";
  if (n.term) {
    bool eigen = n.rule == Rule::ForAllR || n.rule == Rule::ExistsL;
    out += std::string(eigen ? " (eigen " : " (witness ") + to_sexpr(*n.term) + ")";
  }
  if (n.position) {
    out += std::string(" (at ") + (n.position->succedent ? "suc " : "ant ") +
           std::to_string(n.position->index) + " (";
    for (std::size_t i = 0; i < n.position->path.size(); ++i)
      out += (i ? " " : "") + std::to_string(n.position->path[i]);
    out += "))";
  }
  if (n.induction) {
    const InductionData &d = *n.induction;
    out += " (indf " + to_sexpr(d.formula) + ") (param " + to_sexpr(d.param) + ") (target " +
           to_sexpr(d.target) + ")";
    if (!d.inst.empty()) {
      out += " (inst";
      for (const auto &[m, a] : d.inst)
        out += " (" + to_sexpr(m) + " " + to_sexpr(a) + ")";
      out += ")";
    }
  }
  for (const Proof &q : n.premises) {
    out += "\n";
    print_proof(q, indent + 2, out);
  }
  out += ")";
}

} // namespace detail

inline std::string print_proof(const Proof &p, std::size_t indent = 0) {
  std::string out;
  detail::print_proof(p, indent, out);
  return out;
}

inline std::string print_psk(const Document &doc) {
  std::string out;
  if (!doc.declared.funs.empty() || !doc.declared.preds.empty()) {
    out += "(signature";
    for (const auto &[name, fs] : doc.declared.funs) {
      out += "\n  (fun " + name + " (";
      for (std::size_t i = 0; i < fs.args.size(); ++i)
        out += (i ? " " : "") + std::string(sort_name(fs.args[i]));
      out += ") " + std::string(sort_name(fs.result)) + ")";
    }
    for (const auto &[name, args] : doc.declared.preds) {
      out += "\n  (pred " + name + " (";
      for (std::size_t i = 0; i < args.size(); ++i)
        out += (i ? " " : "") + std::string(sort_name(args[i]));
      out += "))";
    }
    out += ")\n\n";
  }
  if (!doc.builtins.empty() || !doc.custom_rules.empty()) {
    out += "(theory";
    for (const std::string &b : doc.builtins)
      out += "\n  (builtin " + b + ")";
    for (const RewriteRule &r : doc.custom_rules)
      out += "\n  (rule " + r.name + " " + to_sexpr(r.lhs) + " " + to_sexpr(r.rhs) + ")";
    out += ")\n\n";
  }
  for (const auto &[name, seq] : doc.axioms)
    out += "(axiom " + name + " " + to_sexpr(seq) + ")\n\n";
  if (doc.schema) {
    out += "(schema";
    for (const Component &c : doc.schema->components) {
      out += "\n  (component " + c.symbol;
      if (c.recursion)
        out += std::string("\n    (") + (c.recursion->is_param(ParamKind::Active) ? "active " : "recursion ") +
               to_sexpr(*c.recursion) + ")";
      if (!c.internals.empty()) {
        out += "\n    (ints";
        for (const Term &t : c.internals)
          out += " " + to_sexpr(t);
        out += ")";
      }
      if (!c.rvars.empty()) {
        out += "\n    (rvars";
        for (const Term &t : c.rvars)
          out += " " + to_sexpr(t);
        out += ")";
      }
      if (!c.base_value.is_zero())
        out += "\n    (base-value " + to_sexpr(c.base_value) + ")";
      out += "\n    (es " + to_sexpr(c.es) + ")";
      out += "\n    (base\n" + print_proof(c.base, 6) + ")";
      out += "\n    (step\n" + print_proof(c.step, 6) + "))";
    }
    for (const auto &[a, b] : doc.schema->order)
      out += "\n  (order " + a + " < " + b + ")";
    out += ")\n\n";
  }
  for (const NamedProof &p : doc.proofs) {
    out += "(proof " + p.name;
    if (p.profile)
      out += " (profile " + *p.profile + ")";
    out += "\n" + print_proof(p.proof, 2) + ")\n\n";
  }
  while (out.size() > 1 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n')
    out.pop_back();
  return out;
}

} // namespace schemakern
