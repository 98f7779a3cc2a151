#pragma once

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "schemakern/schemakern.hpp"

namespace sktest {

inline std::string fixture_path(const std::string &name) { return std::string(SCHEMAKERN_FIXTURES) + "/" + name; }

inline std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline schemakern::Document load(const std::string &name) {
  schemakern::ParseResult r = schemakern::parse_psk(read_text(fixture_path(name)));
  if (!r.ok()) {
    std::string msg = name + ":";
    for (const auto &d : r.diagnostics)
      msg += " " + d.code + " " + d.message;
    throw std::runtime_error(msg);
  }
  return std::move(r.doc);
}

inline schemakern::Proof proof_of(const schemakern::Document &d, const std::string &name) {
  const schemakern::NamedProof *p = d.find_proof(name);
  if (!p)
    throw std::runtime_error("no proof " + name);
  return p->proof;
}

inline schemakern::Formula F(const std::string &s) { return schemakern::read_formula(s); }
inline schemakern::Term T(const std::string &s) { return schemakern::read_term(s); }

} // namespace sktest
