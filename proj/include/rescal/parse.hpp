#ifndef RESCAL_PARSE_HPP
#define RESCAL_PARSE_HPP

// Recursive-descent parsers for resource expressions and λ-terms. Errors
// carry the byte offset of the offending token. Non-canonical spellings
// (trailing empty bags in a stream, unsorted bags) are accepted and
// canonicalized by the constructors.

#include <cctype>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rescal/lambda.hpp"
#include "rescal/term.hpp"

namespace rescal {

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)),
        position(pos) {}
};

namespace detail {

class Cursor {
 public:
  explicit Cursor(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }
  size_t pos() const { return pos_; }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool try_consume(const std::string& tok) {
    skip_ws();
    if (text_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!try_consume(tok))
      throw ParseError("expected '" + tok + "'", pos_);
  }
  std::string ident() {
    skip_ws();
    size_t start = pos_;
    auto ok_first = [](char c) {
      return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    auto ok_rest = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
             c == '\'';
    };
    if (pos_ >= text_.size() || !ok_first(text_[pos_]))
      throw ParseError("expected identifier", pos_);
    ++pos_;
    while (pos_ < text_.size() && ok_rest(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }
  uint32_t nat() {
    skip_ws();
    size_t start = pos_;
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected number", pos_);
    uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 0xffffffffull) throw ParseError("number too large", start);
      ++pos_;
    }
    return static_cast<uint32_t>(v);
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;
};

class ResourceParser {
 public:
  explicit ResourceParser(const std::string& text) : cur_(text) {}

  ValuePtr value() {
    cur_.expect("\\");
    std::string binder = cur_.ident();
    cur_.expect(".");
    binders_.push_back(binder);
    Base b = base();
    binders_.pop_back();
    return mk_value(std::move(b));
  }

  Base base() {
    Head h = head();
    Stream s = stream();
    return mk_base(std::move(h), std::move(s));
  }

  Head head() {
    if (cur_.try_consume("(")) {
      ValuePtr v = value();
      cur_.expect(")");
      return Head::value(std::move(v));
    }
    std::string name = cur_.ident();
    cur_.expect(".");
    uint32_t index = cur_.nat();
    for (size_t i = binders_.size(); i-- > 0;) {
      if (binders_[i] == name)
        return Head::bound(static_cast<uint32_t>(binders_.size() - 1 - i),
                           index);
    }
    return Head::free(std::move(name), index);
  }

  Bag bag() {
    cur_.expect("[");
    std::vector<ValuePtr> elems;
    if (!cur_.try_consume("]")) {
      elems.push_back(value());
      while (cur_.try_consume(",")) elems.push_back(value());
      cur_.expect("]");
    }
    return mk_bag(std::move(elems));
  }

  Stream stream() {
    std::vector<Bag> bags;
    for (;;) {
      if (cur_.try_consume("()")) break;
      bags.push_back(bag());
      cur_.expect("::");
    }
    return mk_stream(std::move(bags));
  }

  void finish() {
    if (!cur_.eof()) throw ParseError("trailing input", cur_.pos());
  }

  Cursor& cursor() { return cur_; }

 private:
  Cursor cur_;
  std::vector<std::string> binders_;
};

}  // namespace detail

inline ValuePtr parse_value(const std::string& text) {
  detail::ResourceParser p(text);
  ValuePtr v = p.value();
  p.finish();
  return v;
}

inline Base parse_base(const std::string& text) {
  detail::ResourceParser p(text);
  Base b = p.base();
  p.finish();
  return b;
}

// Accepts either a bare value ("\x. ...") or a base term.
struct ParsedTerm {
  std::optional<ValuePtr> value;
  std::optional<Base> base;
};

inline ParsedTerm parse_term(const std::string& text) {
  detail::ResourceParser probe(text);
  if (probe.cursor().peek() == '\\') return {parse_value(text), std::nullopt};
  return {std::nullopt, parse_base(text)};
}

// λ-terms: "\" IDENT "." term, juxtaposition application, parentheses,
// identifiers. The reserved literal Ω (also spelled "Omega") denotes
// (\x. x x)(\x. x x).
inline LambdaPtr parse_lambda(const std::string& text) {
  detail::Cursor cur(text);

  auto omega = [] {
    auto d = lam_abs("x", lam_app(lam_var("x"), lam_var("x")));
    return lam_app(d, d);
  };

  std::function<LambdaPtr()> term;
  std::function<LambdaPtr()> atom = [&]() -> LambdaPtr {
    if (cur.try_consume("(")) {
      LambdaPtr t = term();
      cur.expect(")");
      return t;
    }
    if (cur.try_consume("Ω")) return omega();
    std::string name = cur.ident();
    if (name == "Omega") return omega();
    return lam_var(std::move(name));
  };
  term = [&]() -> LambdaPtr {
    if (cur.try_consume("\\")) {
      std::string binder = cur.ident();
      cur.expect(".");
      return lam_abs(std::move(binder), term());
    }
    LambdaPtr t = atom();
    for (;;) {
      char c = cur.peek();
      if (c == '\0' || c == ')') break;
      if (c == '\\') {
        t = lam_app(std::move(t), term());
        break;
      }
      t = lam_app(std::move(t), atom());
    }
    return t;
  };

  LambdaPtr t = term();
  if (!cur.eof()) throw ParseError("trailing input", cur.pos());
  return t;
}

}  // namespace rescal

#endif  // RESCAL_PARSE_HPP
