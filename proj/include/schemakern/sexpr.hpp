#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace schemakern {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourceSpan span;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view a) const { return !is_list && atom == a; }
  // A list whose first element is the given atom.
  bool is_form(std::string_view head) const {
    return is_list && !items.empty() && items.front().is_atom(head);
  }
  const std::string &head() const {
    static const std::string empty;
    return is_list && !items.empty() && items.front().is_atom() ? items.front().atom
                                                                : empty;
  }
};

class SExprReader {
public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (;;) {
      skip_blank();
      if (pos_ >= text_.size())
        return out;
      out.push_back(read_one());
    }
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  SourceSpan here() const { return SourceSpan{pos_, pos_ + 1, line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read_one() {
    skip_blank();
    SourceSpan start = here();
    if (pos_ >= text_.size())
      throw Error(ErrorCode::SyntaxError, "unexpected end of input", start);
    char c = text_[pos_];
    if (c == ')')
      throw Error(ErrorCode::SyntaxError, "unbalanced ')'", start);
    SExpr e;
    if (c == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip_blank();
        if (pos_ >= text_.size()) {
          start.end = pos_;
          throw Error(ErrorCode::SyntaxError, "unbalanced '(': missing ')'", start);
        }
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read_one());
      }
    } else {
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d)))
          break;
        advance();
      }
      e.atom = std::string(text_.substr(start.begin, pos_ - start.begin));
    }
    e.span = start;
    e.span.end = pos_;
    return e;
  }
};

inline std::vector<SExpr> read_sexprs(std::string_view text) {
  return SExprReader(text).read_all();
}

} // namespace schemakern
