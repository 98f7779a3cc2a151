#include "support.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using nlohmann::json;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
  std::string err;
};

std::filesystem::path scratch() {
  static std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / ("schemakern_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome run(const std::string &args, const std::string &env = "") {
  std::string out = (scratch() / "stdout").string(), err = (scratch() / "stderr").string();
  std::string cmd = env + " '" + std::string(SCHEMAKERN_CLI) + "' " + args + " >'" + out + "' 2>'" + err + "'";
  int raw = std::system(cmd.c_str());
  Outcome r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = sktest::read_text(out);
  r.err = sktest::read_text(err);
  return r;
}

std::string fx(const std::string &name) { return "'" + sktest::fixture_path(name) + "'"; }

std::vector<std::string> lines(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l))
    if (!l.empty())
      out.push_back(l);
  return out;
}

const char *kCheckable[] = {"assoc.psk", "comm.psk",      "comm_mvlkie.psk", "comm_pra.psk",  "corrupted.psk",
                            "eelim.psk", "ex2_zero_commute.psk", "it.psk", "nonstrict.psk", "pairs.psk",
                            "twolemma.psk"};

} // namespace

TEST(Cli, CheckAssociativity) {
  Outcome r = run("check " + fx("assoc.psk"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("valid, complete P-schema, 2 components", 0), 0u) << r.out;
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, UnfoldAssociativity) {
  Outcome r = run("unfold " + fx("assoc.psk") + " --subst alpha=1,beta=0,gamma=0 --emit");
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("(proof unfolded (profile lk)"), std::string::npos);
  EXPECT_NE(r.out.find("verdict valid"), std::string::npos);

  std::string file = (scratch() / "unfolded.psk").string();
  Outcome e = run("unfold " + fx("assoc.psk") + " --subst alpha=2,beta=1,gamma=3 --emit '" + file + "'");
  EXPECT_EQ(e.status, 0) << e.err;
  Outcome c = run("check '" + file + "'");
  EXPECT_EQ(c.status, 0) << c.err;
  EXPECT_EQ(c.out.rfind("unfolded: valid, inactive, proof", 0), 0u) << c.out;
}

TEST(Cli, CorruptedInputFails) {
  Outcome r = run("check " + fx("corrupted.psk"));
  EXPECT_EQ(r.status, 1);
  std::vector<std::string> diags = lines(r.err);
  ASSERT_GE(diags.size(), 1u);
  for (const std::string &d : diags)
    EXPECT_EQ(d.find(sktest::fixture_path("corrupted.psk") + ":"), 0u) << d;
  EXPECT_NE(r.out.find("broken: invalid"), std::string::npos);
}

TEST(Cli, DiagnosticSpansPointIntoInput) {
  for (const char *name : {"corrupted.psk"}) {
    std::string text = sktest::read_text(sktest::fixture_path(name));
    Outcome r = run("--format json check " + fx(name));
    EXPECT_EQ(r.status, 1);
    std::vector<std::string> diags = lines(r.err);
    ASSERT_FALSE(diags.empty());
    for (const std::string &l : diags) {
      json d = json::parse(l);
      EXPECT_EQ(d["kind"], "diagnostic");
      std::size_t begin = d["begin"], end = d["end"];
      EXPECT_LT(begin, end);
      EXPECT_LE(end, text.size());
      EXPECT_EQ(text[begin], '(');
    }
  }
  std::string bad = (scratch() / "bad.psk").string();
  std::ofstream(bad) << "(theory (builtin pa))\n(proof x\n  (rule ax (seq (ant (P a)) (suc (P a))))\n";
  Outcome r = run("check '" + bad + "'");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find(bad + ":2:1: error: SyntaxError"), std::string::npos) << r.err;
}

TEST(Cli, JsonAndTextAgree) {
  for (const char *name : kCheckable) {
    Outcome text = run("check " + fx(name));
    Outcome js = run("--format json check " + fx(name));
    EXPECT_EQ(text.status, js.status) << name;
    std::vector<std::string> t = lines(text.out), j = lines(js.out);
    ASSERT_EQ(t.size(), j.size()) << name;
    for (std::size_t i = 0; i < t.size(); ++i) {
      json rec = json::parse(j[i]);
      bool valid = rec["valid"];
      bool text_valid = t[i].find("invalid") == std::string::npos;
      EXPECT_EQ(valid, text_valid) << name << ": " << t[i];
      if (rec["kind"] == "schema") {
        EXPECT_EQ(rec["summary"], t[i]);
      }
    }
    EXPECT_EQ(lines(text.err).size(), lines(js.err).size()) << name;
  }
}

TEST(Cli, FmtIsIdempotent) {
  for (const char *name : kCheckable) {
    Outcome once = run("fmt " + fx(name));
    ASSERT_EQ(once.status, 0) << name;
    std::string first = (scratch() / "first.psk").string();
    std::ofstream(first, std::ios::binary) << once.out;
    Outcome twice = run("fmt '" + first + "'");
    EXPECT_EQ(twice.out, once.out) << name;
  }
  Outcome extract = run("herbrand extract " + fx("pairs.psk"));
  std::string hrs = (scratch() / "pairs.hrs").string();
  std::ofstream(hrs, std::ios::binary) << extract.out;
  Outcome f = run("fmt '" + hrs + "'");
  EXPECT_EQ(f.status, 0);
  EXPECT_EQ(f.out, extract.out);
}

TEST(Cli, Deterministic) {
  std::vector<std::string> commands = {
      "check " + fx("comm.psk"),
      "unfold " + fx("comm.psk") + " --subst alpha=3,beta=2 --emit",
      "translate " + fx("comm.psk") + " --to mvlkie",
      "translate " + fx("comm_mvlkie.psk") + " --to pra",
      "translate " + fx("comm_mvlkie.psk") + " --to schema",
      "herbrand extract " + fx("pairs.psk"),
      "herbrand verify " + fx("pairs.psk") + " --params 3",
      "fmt " + fx("comm.psk"),
  };
  for (const std::string &c : commands)
    for (const char *format : {"text", "json"}) {
      std::string args = std::string("--seed 7 --format ") + format + " " + c;
      Outcome a = run(args), b = run(args);
      EXPECT_EQ(a.status, 0) << args << "\n" << a.err;
      EXPECT_EQ(a.out, b.out) << args;
      EXPECT_EQ(a.err, b.err) << args;
    }
  // the expansion order does not change the emitted proof
  Outcome s1 = run("--seed 1 unfold " + fx("comm.psk") + " --subst alpha=3,beta=2 --emit");
  Outcome s2 = run("--seed 2 unfold " + fx("comm.psk") + " --subst alpha=3,beta=2 --emit");
  EXPECT_EQ(s1.out, s2.out);
}

TEST(Cli, TranslatePipeline) {
  std::string mv = (scratch() / "mv.psk").string(), back = (scratch() / "back.psk").string(),
              pra = (scratch() / "pra.psk").string();
  Outcome a = run("translate " + fx("comm.psk") + " --to mvlkie -o '" + mv + "'");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out.rfind("wrote " + mv + ": mvlkie proof", 0), 0u) << a.out;
  Outcome b = run("translate '" + mv + "' --to schema -o '" + back + "'");
  ASSERT_EQ(b.status, 0) << b.err;
  Outcome c = run("check '" + back + "'");
  EXPECT_EQ(c.status, 0);
  EXPECT_EQ(c.out.rfind("valid, complete P-schema, 5 components (strict)", 0), 0u) << c.out;
  Outcome d = run("translate '" + mv + "' --to pra -o '" + pra + "'");
  ASSERT_EQ(d.status, 0) << d.err;
  EXPECT_NE(d.out.find("induction: 4"), std::string::npos) << d.out;
  EXPECT_EQ(run("check '" + pra + "'").status, 0);

  Outcome g = run("translate " + fx("comm_mvlkie.psk") + " --to pra --generalize");
  EXPECT_EQ(g.status, 0) << g.err;
  EXPECT_NE(g.out.find("(suc (all p:beta (= (^a p:alpha p:beta) (^a p:beta p:alpha)))))"), std::string::npos);
}

TEST(Cli, TranslateFailures) {
  Outcome ns = run("translate " + fx("nonstrict.psk") + " --to mvlkie");
  EXPECT_EQ(ns.status, 1);
  EXPECT_NE(ns.err.find("NotStrict"), std::string::npos);
  EXPECT_EQ(run("translate " + fx("nonstrict.psk") + " --to mvlkie --general").status, 0);
  Outcome it = run("translate " + fx("it.psk") + " --to pra");
  EXPECT_EQ(it.status, 1);
  EXPECT_NE(it.err.find("NonPaRule"), std::string::npos);
}

TEST(Cli, Herbrand) {
  std::string hrs = (scratch() / "it.hrs").string();
  ASSERT_EQ(run("herbrand extract " + fx("it.psk") + " -o '" + hrs + "'").status, 0);
  Outcome e = run("herbrand eval '" + hrs + "' --params 2");
  EXPECT_EQ(e.status, 0) << e.err;
  EXPECT_EQ(e.out, "1 witness tuple(s)\n  x := f(f(a))\n");
  Outcome v = run("herbrand verify " + fx("it.psk") + " --params 4");
  EXPECT_EQ(v.status, 0) << v.err;
  EXPECT_NE(v.out.find("valid; unfolded proof witnesses agree"), std::string::npos);
  Outcome bad = run("herbrand verify " + fx("assoc.psk") + " --params 1");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("WrongEndSequentShape"), std::string::npos);
}

TEST(Cli, FuelAndArguments) {
  Outcome starved = run("unfold " + fx("comm.psk") + " --subst alpha=3,beta=3", "SCHEMAKERN_FUEL=2");
  EXPECT_EQ(starved.status, 1);
  EXPECT_NE(starved.err.find("FuelExhausted"), std::string::npos);
  Outcome flag = run("--fuel 2 unfold " + fx("comm.psk") + " --subst alpha=3,beta=3");
  EXPECT_EQ(flag.status, 1);
  EXPECT_EQ(run("--fuel 100000 unfold " + fx("comm.psk") + " --subst alpha=3,beta=3", "SCHEMAKERN_FUEL=2").status, 0);

  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("nosuch").status, 1);
  EXPECT_EQ(run("check /nonexistent/file.psk").status, 1);
  EXPECT_EQ(run("unfold " + fx("assoc.psk") + " --subst alpha=x").status, 1);
  EXPECT_EQ(run("unfold " + fx("assoc.psk") + " --subst alpha=1").status, 1);
  EXPECT_EQ(run("--format xml check " + fx("assoc.psk")).status, 1);
}
