#include "nspec/parser.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "nspec/error.hpp"

namespace nspec {

namespace {

enum class Tok { Ident, Slash, LParen, RParen, Comma, Semi, Arrow, Plus, Leq, Tilde, Colon, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const char* describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Slash: return "'/'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Arrow: return "'->'";
    case Tok::Plus: return "'+'";
    case Tok::Leq: return "'<='";
    case Tok::Tilde: return "'~'";
    case Tok::Colon: return "':'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok{Tok::End, "", line, col};
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "->") {
      tok.kind = Tok::Arrow;
      advance(2);
    } else if (two == "<=") {
      tok.kind = Tok::Leq;
      advance(2);
    } else {
      switch (c) {
        case '/': tok.kind = Tok::Slash; break;
        case '(': tok.kind = Tok::LParen; break;
        case ')': tok.kind = Tok::RParen; break;
        case ',': tok.kind = Tok::Comma; break;
        case ';': tok.kind = Tok::Semi; break;
        case '+': tok.kind = Tok::Plus; break;
        case '~': tok.kind = Tok::Tilde; break;
        case ':': tok.kind = Tok::Colon; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
      advance(1);
    }
    out.push_back(std::move(tok));
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

/// Unresolved term as written.
struct RawTerm {
  std::string name;
  std::vector<RawTerm> args;
  std::size_t line = 0;
  std::size_t column = 0;
  bool infix = false;
  std::string op;  // infix operator spelling
};

struct RawRule {
  RawTerm lhs;
  RawTerm rhs;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }

  Token expect(Tok k) {
    if (!at(k)) {
      const auto& t = peek();
      throw ParseError(std::string("expected ") + describe(k) + ", found " +
                           (t.kind == Tok::Ident ? "'" + t.text + "'" : describe(t.kind)),
                       t.line, t.column);
    }
    return toks_[pos_++];
  }

  void parse_file(Signature& sig, std::vector<RawRule>& rules) {
    while (!at(Tok::End)) {
      if (at(Tok::Ident) && (peek().text == "constructors" || peek().text == "operations")) {
        bool ctors = peek().text == "constructors";
        ++pos_;
        while (!at(Tok::Semi)) parse_declaration(sig, ctors);
        expect(Tok::Semi);
        continue;
      }
      RawRule r{parse_expr(), {}};
      expect(Tok::Arrow);
      r.rhs = parse_expr();
      expect(Tok::Semi);
      rules.push_back(std::move(r));
    }
  }

  RawTerm parse_single_term() {
    auto t = parse_expr();
    expect(Tok::End);
    return t;
  }

 private:
  void parse_declaration(Signature& sig, bool ctors) {
    Token name = expect(Tok::Ident);
    if (std::isupper(static_cast<unsigned char>(name.text[0]))) {
      throw ParseError("symbol '" + name.text + "' must not start with an uppercase letter",
                       name.line, name.column);
    }
    if (name.text == "constructors" || name.text == "operations") {
      throw ParseError("'" + name.text + "' is a keyword", name.line, name.column);
    }
    expect(Tok::Slash);
    Token arity = expect(Tok::Ident);
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(arity.text.data(), arity.text.data() + arity.text.size(), n);
    if (ec != std::errc() || p != arity.text.data() + arity.text.size()) {
      throw ParseError("arity must be a natural number, found '" + arity.text + "'", arity.line,
                       arity.column);
    }
    try {
      sig.add({name.text, n, ctors ? SymbolKind::Constructor : SymbolKind::Operation});
    } catch (const ProgramError& e) {
      throw ParseError(e.what(), name.line, name.column);
    }
  }

  // Precedence, loosest first: ~  <=  :(right)  +(left)
  RawTerm parse_expr() {
    auto lhs = parse_leq();
    if (at(Tok::Tilde)) {
      auto op = toks_[pos_++];
      lhs = infix("eq", "~", op, std::move(lhs), parse_leq());
    }
    return lhs;
  }

  RawTerm parse_leq() {
    auto lhs = parse_cons();
    if (at(Tok::Leq)) {
      auto op = toks_[pos_++];
      lhs = infix("leq", "<=", op, std::move(lhs), parse_cons());
    }
    return lhs;
  }

  RawTerm parse_cons() {
    auto lhs = parse_add();
    if (at(Tok::Colon)) {
      auto op = toks_[pos_++];
      return infix("cons", ":", op, std::move(lhs), parse_cons());
    }
    return lhs;
  }

  RawTerm parse_add() {
    auto lhs = parse_primary();
    while (at(Tok::Plus)) {
      auto op = toks_[pos_++];
      lhs = infix("add", "+", op, std::move(lhs), parse_primary());
    }
    return lhs;
  }

  static RawTerm infix(const char* name, const char* spelling, const Token& op, RawTerm a,
                       RawTerm b) {
    RawTerm t;
    t.name = name;
    t.op = spelling;
    t.infix = true;
    t.line = op.line;
    t.column = op.column;
    t.args.push_back(std::move(a));
    t.args.push_back(std::move(b));
    return t;
  }

  RawTerm parse_primary() {
    if (at(Tok::LParen)) {
      ++pos_;
      auto t = parse_expr();
      expect(Tok::RParen);
      return t;
    }
    Token id = expect(Tok::Ident);
    RawTerm t;
    t.name = id.text;
    t.line = id.line;
    t.column = id.column;
    if (at(Tok::LParen)) {
      ++pos_;
      if (!at(Tok::RParen)) {
        t.args.push_back(parse_expr());
        while (at(Tok::Comma)) {
          ++pos_;
          t.args.push_back(parse_expr());
        }
      }
      expect(Tok::RParen);
    }
    return t;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Term resolve(const RawTerm& raw, const Signature& sig) {
  if (std::isupper(static_cast<unsigned char>(raw.name[0]))) {
    if (!raw.args.empty()) {
      throw ParseError("variable '" + raw.name + "' cannot take arguments", raw.line, raw.column);
    }
    return Term::variable(raw.name);
  }
  const Symbol* s = sig.find(raw.name);
  if (!s) {
    if (raw.infix) {
      throw ParseError("infix '" + raw.op + "' requires a declared '" + raw.name + "/2'",
                       raw.line, raw.column);
    }
    throw ParseError("undeclared symbol '" + raw.name + "'", raw.line, raw.column);
  }
  if (s->arity != raw.args.size()) {
    throw ParseError("'" + raw.name + "' has arity " + std::to_string(s->arity) + ", applied to " +
                         std::to_string(raw.args.size()) + " arguments",
                     raw.line, raw.column);
  }
  std::vector<Term> args;
  for (const auto& a : raw.args) args.push_back(resolve(a, sig));
  return Term::make(s->kind, s->name, std::move(args));
}

}  // namespace

Program parse_program(std::string_view text) {
  Parser parser(text);
  Signature sig;
  std::vector<RawRule> raw_rules;
  parser.parse_file(sig, raw_rules);
  std::vector<Rule> rules;
  for (const auto& r : raw_rules) {
    Term lhs = resolve(r.lhs, sig);
    Term rhs = resolve(r.rhs, sig);
    rules.push_back({lhs, rhs, ""});
  }
  try {
    return Program(std::move(sig), std::move(rules));
  } catch (const ProgramError& e) {
    // Rule labels are positional; report the offending rule's location.
    std::string msg = e.what();
    std::size_t line = 1, col = 1;
    if (msg.rfind("rule R", 0) == 0) {
      std::size_t idx = std::stoul(msg.substr(6)) - 1;
      if (idx < raw_rules.size()) {
        line = raw_rules[idx].lhs.line;
        col = raw_rules[idx].lhs.column;
      }
    }
    throw ParseError(msg, line, col);
  }
}

Term parse_term(std::string_view text, const Signature& signature) {
  Parser parser(text);
  return resolve(parser.parse_single_term(), signature);
}

std::string print_program(const Program& p) {
  std::ostringstream out;
  auto decl = [&](const char* keyword, const std::vector<Symbol>& syms) {
    if (syms.empty()) return;
    out << keyword;
    for (const auto& s : syms) out << ' ' << s.name << '/' << s.arity;
    out << " ;\n";
  };
  decl("constructors", p.signature().constructors());
  decl("operations", p.signature().operations());
  for (const auto& r : p.rules()) out << r.lhs.to_string() << " -> " << r.rhs.to_string() << " ;\n";
  return out.str();
}

}  // namespace nspec
