#include "ethmon/asp/parser.hpp"

#include <cctype>

#include "ethmon/asp/errors.hpp"

namespace ethmon::asp {

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Rule> statements() {
    std::vector<Rule> rules;
    skip_blank();
    while (!at_end()) {
      rules.push_back(statement());
      skip_blank();
    }
    return rules;
  }

  Atom lone_atom() {
    skip_blank();
    Atom a = atom();
    skip_blank();
    if (peek() == '.') {
      advance();
      skip_blank();
    }
    if (!at_end()) fail("end of input");
    return a;
  }

  Rule lone_rule() {
    skip_blank();
    Rule r = statement();
    skip_blank();
    if (!at_end()) fail("end of input");
    return r;
  }

 private:
  Rule statement() {
    Rule r;
    r.head = atom();
    skip_blank();
    if (peek() == ':') {
      advance();
      expect('-', "'-' after ':'");
      r.body.push_back(literal());
      skip_blank();
      while (peek() == ',') {
        advance();
        r.body.push_back(literal());
        skip_blank();
      }
    }
    skip_blank();
    expect('.', r.body.empty() ? "'.' or ':-'" : "',' or '.'");
    return r;
  }

  Literal literal() {
    skip_blank();
    if (peek_word() == "not") {
      identifier();
      if (at_end() || !std::isspace(static_cast<unsigned char>(peek()))) {
        fail("whitespace after 'not'");
      }
      skip_blank();
      return Literal::neg(atom());
    }
    return Literal::pos(atom());
  }

  Atom atom() {
    skip_blank();
    if (at_end() || !std::islower(static_cast<unsigned char>(peek()))) fail("predicate name");
    Atom a;
    a.predicate = symbol();
    if (peek() == '(') a.args = arguments();
    return a;
  }

  Term term() {
    skip_blank();
    if (at_end()) fail("term");
    char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) return Term::variable(identifier());
    if (std::islower(static_cast<unsigned char>(c))) {
      std::string name = symbol();
      if (peek() == '(') return Term::compound(std::move(name), arguments());
      return Term::constant(std::move(name));
    }
    fail("variable or constant");
  }

  std::vector<Term> arguments() {
    expect('(', "'('");
    std::vector<Term> args;
    args.push_back(term());
    skip_blank();
    while (peek() == ',') {
      advance();
      args.push_back(term());
      skip_blank();
    }
    expect(')', "',' or ')'");
    return args;
  }

  // Lowercase-initial identifier other than the reserved word.
  std::string symbol() {
    int line = line_, col = col_;
    std::string s = identifier();
    if (s == "not") throw SyntaxError(line, col, "identifier (`not` is reserved)");
    return s;
  }

  std::string identifier() {
    std::string out;
    while (!at_end() && is_ident_char(peek())) {
      out += peek();
      advance();
    }
    return out;
  }

  std::string_view peek_word() const {
    std::size_t end = pos_;
    while (end < text_.size() && is_ident_char(text_[end])) ++end;
    return text_.substr(pos_, end - pos_);
  }

  void skip_blank() {
    while (!at_end()) {
      char c = peek();
      if (c == '%') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void expect(char c, const char* what) {
    skip_blank();
    if (at_end() || peek() != c) fail(what);
    advance();
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(line_, col_, expected);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

Program parse_program(std::string_view text) { return Program(Parser(text).statements()); }

Atom parse_atom(std::string_view text) {
  Atom a = Parser(text).lone_atom();
  for (const auto& t : a.args) {
    if (t.depth() > kMaxTermDepth) throw DepthError(to_string(t));
  }
  return a;
}

Atom parse_ground_atom(std::string_view text) {
  Atom a = parse_atom(text);
  if (!a.is_ground()) throw Error("atom is not ground: " + to_string(a));
  return a;
}

Rule parse_rule(std::string_view text) {
  Rule r = Parser(text).lone_rule();
  check_rule(r, 0);
  return r;
}

std::string print_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.rules().size(); ++i) {
    if (i) out += '\n';
    out += to_string(p.rules()[i]);
  }
  return out;
}

}  // namespace ethmon::asp
