// schemakern: check, unfold, translate and mine Herbrand systems from proof schemata.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "schemakern/schemakern.hpp"

using namespace schemakern;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kInternal = 2 };

struct Output {
  bool as_json = false;
  std::string source; // input text, for spans of located errors

  void diagnostic(const std::string &code, const std::string &message, SourceSpan span, const std::string &file,
                  const std::string &path = {}) const {
    if (!span.known()) {
      span.line = 1;
      span.column = 1;
      span.begin = 0;
      span.end = source.size();
    }
    if (as_json) {
      json::object_t rec{{"kind", "diagnostic"}, {"severity", "error"}, {"code", code}, {"message", message},
                         {"file", file},         {"line", span.line},    {"column", span.column},
                         {"begin", span.begin},  {"end", span.end}};
      if (!path.empty())
        rec["path"] = path;
      std::cerr << json(rec).dump() << "\n";
    } else {
      std::cerr << file << ":" << span.line << ":" << span.column << ": error: " << code << ": " << message;
      if (!path.empty())
        std::cerr << " (at " << path << ")";
      std::cerr << "\n";
    }
  }

  void result(const std::string &text, json rec) const {
    if (as_json)
      std::cout << rec.dump() << "\n";
    else
      std::cout << text << "\n";
  }
};

struct Globals {
  std::size_t fuel = kDefaultFuel;
  std::string format = "text";
  std::optional<unsigned> seed;
};

std::optional<std::string> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_output(const std::string &path, const std::string &text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

// Loads and parses a .psk file; reports diagnostics and returns nullopt on failure.
std::optional<Document> load(const std::string &file, Output &out) {
  auto text = read_file(file);
  if (!text) {
    out.diagnostic("IoError", "cannot read " + file, {}, file);
    return std::nullopt;
  }
  out.source = *text;
  ParseResult r = parse_psk(*text);
  for (const Diagnostic &d : r.diagnostics)
    out.diagnostic(d.code, d.message, d.span, file, d.path);
  if (!r.ok())
    return std::nullopt;
  return std::move(r.doc);
}

std::vector<std::size_t> parse_params(const std::string &text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.size() > 6 ||
        !std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorCode::SyntaxError, "parameter value '" + item + "' is not a natural number below 10^6");
    out.push_back(std::stoul(item));
  }
  return out;
}

// ---------------------------------------------------------------- check

int cmd_check(const Globals &g, const std::string &file) {
  Output out{g.format == "json", {}};
  auto doc = load(file, out);
  if (!doc)
    return kInvalid;
  EqTheory th = doc->theory();
  auto axioms = doc->axiom_map();
  bool ok = true;
  if (doc->schema) {
    SchemaCheckOptions o;
    o.theory = &th;
    o.fuel = g.fuel;
    o.theory_axioms = &axioms;
    SchemaReport rep = validate_schema(*doc->schema, o);
    for (const Violation &v : rep.diagnostics)
      out.diagnostic(v.code, v.message, v.span, file, v.where.empty() ? path_string(v.path) : v.where + ":" + path_string(v.path));
    json subs = json::array();
    for (const SubSchema &s : rep.subs)
      subs.push_back(json{{"members", s.members}, {"computational", s.computational}});
    out.result(rep.summary(), json{{"kind", "schema"},
                                   {"valid", rep.valid},
                                   {"class", rep.classification()},
                                   {"components", rep.components},
                                   {"strict", rep.strict},
                                   {"sub_schemata", subs},
                                   {"summary", rep.summary()}});
    ok = ok && rep.valid;
  }
  for (const NamedProof &p : doc->proofs) {
    CheckOptions co;
    co.theory = &th;
    co.fuel = g.fuel;
    co.theory_axioms = &axioms;
    if (p.profile) {
      auto prof = profile_from_name(*p.profile);
      if (!prof) {
        out.diagnostic("UnknownProfile", "unknown profile " + *p.profile, p.span, file);
        ok = false;
        continue;
      }
      co.profile = *prof;
    }
    if (doc->schema)
      co.resolver = schema_resolver(*doc->schema);
    CheckReport rep = check_derivation(p.proof, co);
    for (const Violation &v : rep.violations)
      out.diagnostic(v.code, v.message, v.span, file, p.name + ":" + path_string(v.path));
    std::string verdict = rep.valid ? "valid" : "invalid";
    out.result(p.name + ": " + verdict + ", " + rep.classification() + ", " + std::to_string(rep.nodes) + " nodes",
               json{{"kind", "proof"},
                    {"name", p.name},
                    {"valid", rep.valid},
                    {"classification", rep.classification()},
                    {"nodes", rep.nodes}});
    ok = ok && rep.valid;
  }
  if (!doc->schema && doc->proofs.empty())
    out.result("empty document", json{{"kind", "empty"}});
  return ok ? kOk : kInvalid;
}

// ---------------------------------------------------------------- unfold

int cmd_unfold(const Globals &g, const std::string &file, const std::string &subst, const std::optional<std::string> &emit,
               bool expand) {
  Output out{g.format == "json", {}};
  auto doc = load(file, out);
  if (!doc)
    return kInvalid;
  if (!doc->schema) {
    out.diagnostic("NoSchema", "document has no schema", {}, file);
    return kInvalid;
  }
  EqTheory th = doc->theory();
  auto axioms = doc->axiom_map();
  UnfoldOptions o;
  o.fuel = g.fuel;
  o.seed = g.seed;
  o.expand_computational = expand;
  o.theory = &th;
  o.theory_axioms = &axioms;
  UnfoldReport r = unfold(*doc->schema, parse_assignment(subst), o);
  bool sound = verify_unfolded(r);
  for (const Violation &v : r.verdict.violations)
    out.diagnostic(v.code, v.message, {}, file, "unfolded:" + path_string(v.path));
  std::string verdict = sound ? "valid" : "invalid";
  json rec{{"kind", "unfold"},
           {"subst", subst},
           {"steps", r.steps},
           {"size", r.size},
           {"end_sequent", pretty(r.proof->conclusion)},
           {"boundary_axioms", json::array()},
           {"verdict", verdict}};
  for (const auto &[k, s] : r.theory)
    rec["boundary_axioms"].push_back(k);
  if (emit) {
    Document d;
    d.declared = doc->declared;
    d.builtins = doc->builtins;
    d.custom_rules = doc->custom_rules;
    d.axioms = doc->axioms;
    for (const auto &[k, s] : r.theory)
      d.axioms.emplace_back(k, s);
    d.proofs.push_back({"unfolded", r.proof, std::string("lk"), {}});
    std::string text = print_psk(d);
    if (*emit != "-") {
      if (!write_output(*emit, text)) {
        out.diagnostic("IoError", "cannot write " + *emit, {}, file);
        return kInvalid;
      }
      rec["emitted"] = *emit;
    } else if (out.as_json) {
      rec["document"] = text;
    } else {
      std::cout << text << "\n";
    }
  }
  out.result("unfolded in " + std::to_string(r.steps) + " link steps, proof size " + std::to_string(r.size) +
                 ", end-sequent " + pretty(r.proof->conclusion) + ", verdict " + verdict,
             rec);
  return sound ? kOk : kInvalid;
}

// ---------------------------------------------------------------- translate

struct TranslateArgs {
  std::string file;
  std::string to;
  std::string output;
  std::string proof;
  bool eliminate_e = false;
  bool generalize = false;
  bool general = false;
};

const NamedProof *pick_proof(const Document &doc, const std::string &name) {
  if (!name.empty())
    return doc.find_proof(name);
  return doc.proofs.empty() ? nullptr : &doc.proofs.front();
}

int cmd_translate(const Globals &g, const TranslateArgs &a) {
  Output out{g.format == "json", {}};
  auto doc = load(a.file, out);
  if (!doc)
    return kInvalid;
  EqTheory th = doc->theory();
  auto axioms = doc->axiom_map();
  TranslateOptions o;
  o.theory = &th;
  o.theory_axioms = &axioms;
  o.fuel = g.fuel;
  o.general = a.general;

  Document res;
  res.declared = doc->declared;
  res.builtins = doc->builtins;
  res.custom_rules = doc->custom_rules;
  res.axioms = doc->axioms;

  auto mvlkie_input = [&]() -> Proof {
    if (doc->schema && (a.proof.empty() || !doc->find_proof(a.proof))) {
      if (a.general)
        for (const SubSchema &s : sub_schemata(*doc->schema))
          if (s.computational)
            for (const std::string &m : s.members) {
              res.axioms.emplace_back("schema:" + m, doc->schema->at(m).es);
              axioms["schema:" + m] = doc->schema->at(m).es;
            }
      return schema_to_mvlkie(*doc->schema, o);
    }
    const NamedProof *p = pick_proof(*doc, a.proof);
    if (!p)
      throw Error(ErrorCode::CheckFailed, "document has neither a schema nor the requested proof");
    return p->proof;
  };

  json rec{{"kind", "translation"}, {"to", a.to}};
  std::string summary;
  if (a.to == "schema") {
    const NamedProof *p = pick_proof(*doc, a.proof);
    if (!p)
      throw Error(ErrorCode::CheckFailed, "document has no proof to translate");
    Proof src = p->proof;
    if (a.eliminate_e)
      src = eliminate_e_rule(src, th, g.fuel).proof;
    PSchema s = mvlkie_to_schema(src, o);
    rec["components"] = s.components.size();
    summary = "schema with " + std::to_string(s.components.size()) + " components, end-sequent " +
              pretty(s.end_sequent());
    res.schema = std::move(s);
  } else {
    Proof p = mvlkie_input();
    std::size_t e_nodes = 0, cuts = 0;
    if (a.eliminate_e || a.to == "pra") {
      EElimReport e = eliminate_e_rule(p, th, g.fuel);
      p = e.proof;
      e_nodes = e.eliminated;
      cuts = e.cuts_added;
    }
    std::string profile = "mvlkie";
    if (a.to == "pra") {
      p = to_pra(p, o);
      profile = "pra";
    }
    if (a.generalize)
      p = generalize(p);
    CheckOptions co;
    co.profile = *profile_from_name(profile);
    co.theory = &th;
    co.fuel = g.fuel;
    co.theory_axioms = &axioms;
    CheckReport rep = check_derivation(p, co);
    for (const Violation &v : rep.violations)
      out.diagnostic(v.code, v.message, {}, a.file, "translated:" + path_string(v.path));
    if (!rep.valid)
      return kInvalid;
    res.proofs.push_back({a.to == "pra" ? "pra" : "mvlkie", p, profile, {}});
    rec["nodes"] = tree_size(p);
    rec["inductions"] = count_rule(p, a.to == "pra" ? Rule::Ind : Rule::MvInd);
    rec["e_eliminated"] = e_nodes;
    rec["cuts_added"] = cuts;
    summary = profile + " proof, " + std::to_string(tree_size(p)) + " nodes, " +
              "induction: " + std::to_string(count_rule(p, a.to == "pra" ? Rule::Ind : Rule::MvInd)) +
              ", end-sequent " + pretty(p->conclusion);
    if (a.eliminate_e || a.to == "pra")
      summary += ", E eliminated: " + std::to_string(e_nodes) + ", cuts added: " + std::to_string(cuts);
  }
  rec["summary"] = summary;
  std::string text = print_psk(res);
  if (a.output.empty()) {
    if (out.as_json) {
      rec["document"] = text;
      out.result(summary, rec);
    } else {
      std::cout << text;
    }
    return kOk;
  }
  if (!write_output(a.output, text)) {
    out.diagnostic("IoError", "cannot write " + a.output, {}, a.file);
    return kInvalid;
  }
  rec["output"] = a.output;
  out.result("wrote " + a.output + ": " + summary, rec);
  return kOk;
}

// ---------------------------------------------------------------- herbrand

json table_json(const WitnessTable &t) {
  json rows = json::array();
  for (const auto &row : t) {
    json r = json::array();
    for (const Term &x : row)
      r.push_back(to_sexpr(x));
    rows.push_back(r);
  }
  return rows;
}

std::string table_text(const HerbrandSystem &h, const WitnessTable &t) {
  std::string s;
  for (const auto &row : t) {
    s += "  ";
    for (std::size_t i = 0; i < row.size(); ++i)
      s += (i ? ", " : "") + h.vars[i].name() + " := " + pretty(row[i]);
    s += "\n";
  }
  return s;
}

int cmd_herbrand_extract(const Globals &g, const std::string &file, const std::string &output) {
  Output out{g.format == "json", {}};
  auto doc = load(file, out);
  if (!doc)
    return kInvalid;
  HerbrandSystem h = extract_herbrand_system(*doc);
  std::string text = print_hrs(h);
  std::string summary = "Herbrand system " + h.head + ": rules " + std::to_string(h.rules.size()) + ", parameters " +
                        std::to_string(h.params.size()) + ", witness variables " + std::to_string(h.vars.size());
  json rec{{"kind", "herbrand"}, {"head", h.head}, {"rules", h.rules.size()}, {"summary", summary}};
  if (output.empty()) {
    if (out.as_json) {
      rec["system"] = text;
      out.result(summary, rec);
    } else {
      std::cout << text;
    }
    return kOk;
  }
  if (!write_output(output, text)) {
    out.diagnostic("IoError", "cannot write " + output, {}, file);
    return kInvalid;
  }
  rec["output"] = output;
  out.result("wrote " + output + ": " + summary, rec);
  return kOk;
}

int cmd_herbrand_eval(const Globals &g, const std::string &file, const std::string &params) {
  Output out{g.format == "json", {}};
  auto text = read_file(file);
  if (!text) {
    out.diagnostic("IoError", "cannot read " + file, {}, file);
    return kInvalid;
  }
  out.source = *text;
  HerbrandSystem h = parse_hrs(*text);
  std::vector<std::size_t> gamma = parse_params(params);
  WitnessTable t = normalize_witnesses(h, gamma, g.fuel);
  std::string rows = table_text(h, t);
  if (!rows.empty())
    rows.pop_back();
  out.result(std::to_string(t.size()) + " witness tuple(s)" + (rows.empty() ? "" : "\n" + rows),
             json{{"kind", "witnesses"}, {"params", gamma}, {"count", t.size()}, {"witnesses", table_json(t)}});
  return kOk;
}

int cmd_herbrand_verify(const Globals &g, const std::string &file, const std::string &params) {
  Output out{g.format == "json", {}};
  auto doc = load(file, out);
  if (!doc)
    return kInvalid;
  HerbrandSystem h = extract_herbrand_system(*doc);
  std::vector<std::size_t> gamma = parse_params(params);
  WitnessTable t = normalize_witnesses(h, gamma, g.fuel);
  bool valid = verify_herbrand_disjunction(h, gamma, t, g.fuel);

  // Cross-check against the witnesses of the unfolded proof.
  EqTheory th = doc->theory();
  auto axioms = doc->axiom_map();
  Subst sigma;
  for (std::size_t i = 0; i < h.params.size() && i < gamma.size(); ++i)
    sigma[h.params[i].var_key()] = numeral(gamma[i]);
  UnfoldOptions uo;
  uo.fuel = g.fuel;
  uo.seed = g.seed;
  uo.theory = &th;
  uo.theory_axioms = &axioms;
  UnfoldReport u = unfold(*doc->schema, sigma, uo);
  bool same = same_witnesses(t, normalize_table(harvest_witnesses(u.proof, h.vars.size()), th, g.fuel));

  std::string verdict = valid ? "valid" : "invalid";
  out.result("Herbrand disjunction over " + std::to_string(t.size()) + " witness tuple(s): " + verdict +
                 "; unfolded proof witnesses " + (same ? "agree" : "differ"),
             json{{"kind", "herbrand-verify"},
                  {"params", gamma},
                  {"count", t.size()},
                  {"valid", valid},
                  {"agrees_with_unfolding", same},
                  {"witnesses", table_json(t)}});
  return valid && same ? kOk : kInvalid;
}

// ---------------------------------------------------------------- fmt

int cmd_fmt(const Globals &g, const std::string &file, const std::string &output) {
  Output out{g.format == "json", {}};
  std::string text;
  bool hrs = file.size() >= 4 && file.compare(file.size() - 4, 4, ".hrs") == 0;
  if (hrs) {
    auto src = read_file(file);
    if (!src) {
      out.diagnostic("IoError", "cannot read " + file, {}, file);
      return kInvalid;
    }
    out.source = *src;
    text = print_hrs(parse_hrs(*src));
  } else {
    auto doc = load(file, out);
    if (!doc)
      return kInvalid;
    text = print_psk(*doc);
  }
  if (!write_output(output, text)) {
    out.diagnostic("IoError", "cannot write " + output, {}, file);
    return kInvalid;
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Proof-schema kernel: check, unfold and translate P-schemata"};
  app.require_subcommand(1);
  Globals g;
  if (const char *env = std::getenv("SCHEMAKERN_FUEL")) {
    try {
      g.fuel = std::stoul(env);
    } catch (const std::exception &) {
      std::cerr << "error: SCHEMAKERN_FUEL is not a number\n";
      return kInvalid;
    }
  }
  unsigned seed = 0;
  app.add_option("--fuel", g.fuel, "rewrite and unfolding step bound")->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json"}));
  auto *seed_opt = app.add_option("--seed", seed, "seed for the unfolding order");

  std::string file, output, subst, params;
  bool expand = false;
  std::optional<std::string> emit;
  TranslateArgs ta;

  auto *check = app.add_subcommand("check", "validate a schema and its proofs");
  check->add_option("file", file, "input .psk")->required();

  auto *unf = app.add_subcommand("unfold", "evaluate a schema at a ground substitution");
  unf->add_option("file", file, "input .psk")->required();
  unf->add_option("--subst", subst, "passive values, e.g. alpha=2,beta=0")->required();
  unf->add_option("--emit", emit, "write the unfolded LK proof to FILE (stdout when FILE is - or omitted)")
      ->expected(0, 1)
      ->default_str("-");
  unf->add_flag("--expand", expand, "also unfold computational sub-schemata at ground arguments");

  auto *tr = app.add_subcommand("translate", "translate between schemata, mvLKIE and PRA proofs");
  tr->add_option("file", ta.file, "input .psk")->required();
  tr->add_option("--to", ta.to, "target")->required()->check(CLI::IsMember({"mvlkie", "schema", "pra"}));
  tr->add_option("-o,--output", ta.output, "output file");
  tr->add_option("--proof", ta.proof, "name of the input proof");
  tr->add_flag("--eliminate-e", ta.eliminate_e, "replace E inferences by axioms and cuts");
  tr->add_flag("--generalize", ta.generalize, "quantify the passive parameters of the end-sequent");
  tr->add_flag("--general", ta.general, "treat computational sub-schemata as theory axioms");

  auto *hb = app.add_subcommand("herbrand", "Herbrand systems of strict existential schemata");
  hb->require_subcommand(1);
  auto *hx = hb->add_subcommand("extract", "extract the Herbrand system");
  hx->add_option("file", file, "input .psk")->required();
  hx->add_option("-o,--output", output, "output .hrs");
  auto *he = hb->add_subcommand("eval", "normalize the witness terms of an .hrs system");
  he->add_option("file", file, "input .hrs")->required();
  he->add_option("--params", params, "parameter values, e.g. 2,3")->required();
  auto *hv = hb->add_subcommand("verify", "check the Herbrand disjunction of a schema");
  hv->add_option("file", file, "input .psk")->required();
  hv->add_option("--params", params, "parameter values, e.g. 2,3")->required();

  auto *fmt = app.add_subcommand("fmt", "print a document in canonical form");
  fmt->add_option("file", file, "input .psk or .hrs")->required();
  fmt->add_option("-o,--output", output, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (*seed_opt)
    g.seed = seed;

  Output out{g.format == "json", {}};
  std::string where = !file.empty() ? file : ta.file;
  try {
    if (*check)
      return cmd_check(g, file);
    if (*unf)
      return cmd_unfold(g, file, subst, emit, expand);
    if (*tr)
      return cmd_translate(g, ta);
    if (*hx)
      return cmd_herbrand_extract(g, file, output);
    if (*he)
      return cmd_herbrand_eval(g, file, params);
    if (*hv)
      return cmd_herbrand_verify(g, file, params);
    if (*fmt)
      return cmd_fmt(g, file, output);
  } catch (const Error &e) {
    if (auto text = read_file(where))
      out.source = *text;
    out.diagnostic(error_code_name(e.code()), e.detail(), e.span(), where);
    return kInvalid;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
