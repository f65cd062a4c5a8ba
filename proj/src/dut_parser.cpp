#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <filesystem>

#include "greycone/dut.hpp"
#include "dut_lowering.hpp"

namespace greycone {

namespace {

std::string with_loc(SourceLoc loc, const std::string& what) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
         what;
}

}  // namespace

SyntaxError::SyntaxError(SourceLoc l, const std::string& what)
    : std::runtime_error("syntax error at " + with_loc(l, what)), loc(l) {}

TypeError::TypeError(SourceLoc l, const std::string& what)
    : std::runtime_error("type error at " + with_loc(l, what)), loc(l) {}

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t number = 0;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        tok.kind = Token::Kind::End;
        out.push_back(tok);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = Token::Kind::Ident;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          tok.text.push_back(advance());
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        tok.kind = Token::Kind::Number;
        lex_number(tok);
      } else if (c == '\'') {
        tok.kind = Token::Kind::Number;
        advance();
        if (pos_ + 1 >= src_.size() || src_[pos_ + 1] != '\'') {
          throw SyntaxError(tok.loc, "malformed character literal");
        }
        tok.number = static_cast<unsigned char>(advance());
        advance();
        tok.text = "'";
      } else {
        tok.kind = Token::Kind::Punct;
        static const char* kTwo[] = {"==", "!=", "<=", ">=", "&&",
                                     "||", "<<", ">>"};
        for (const char* two : kTwo) {
          if (src_.substr(pos_, 2) == two) {
            tok.text = two;
            advance();
            advance();
            break;
          }
        }
        if (tok.text.empty()) {
          static const std::string_view kOne = "+-*/%&|^~!<>=(){};";
          if (kOne.find(c) == std::string_view::npos) {
            throw SyntaxError(tok.loc,
                              std::string("unexpected character '") + c + "'");
          }
          tok.text.push_back(advance());
        }
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& tok) {
    int base = 10;
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
      base = 16;
      advance();
      advance();
    }
    std::uint64_t v = 0;
    bool any = false;
    while (pos_ < src_.size() &&
           std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
      const char d = src_[pos_];
      int digit = std::isdigit(static_cast<unsigned char>(d))
                      ? d - '0'
                      : std::tolower(static_cast<unsigned char>(d)) - 'a' + 10;
      if (digit >= base) break;
      v = v * base + digit;
      if (v > 0xFFFFFFFFull) throw SyntaxError(tok.loc, "integer literal too large");
      tok.text.push_back(advance());
      any = true;
    }
    if (!any) throw SyntaxError(tok.loc, "malformed integer literal");
    if (pos_ < src_.size() &&
        (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      throw SyntaxError({line_, col_}, "malformed integer literal");
    }
    tok.number = static_cast<std::int64_t>(v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Untyped expression tree, typed in a second pass so integer literals can
// adopt the type of the context they appear in.

struct RawExpr {
  enum class Kind { Literal, BoolLiteral, Name, Unary, Binary };
  Kind kind = Kind::Literal;
  Op op = Op::Add;
  std::int64_t value = 0;
  std::string name;
  SourceLoc loc;
  std::unique_ptr<RawExpr> lhs;
  std::unique_ptr<RawExpr> rhs;
};
using RawPtr = std::unique_ptr<RawExpr>;

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string name)
      : toks_(std::move(toks)) {
    prog_.name = std::move(name);
  }

  Program run() {
    parse_decls();
    while (!at_end()) prog_.body.push_back(parse_stmt());
    lower_to_cfg(prog_);
    return std::move(prog_);
  }

 private:
  // -- token helpers -------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Punct && peek(ahead).text == p;
  }
  bool is_keyword(std::string_view k, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Ident && peek(ahead).text == k;
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail_here(const std::string& what) const {
    const Token& t = peek();
    std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.loc, what + ", got " + got);
  }

  void expect(std::string_view p) {
    if (!is_punct(p)) fail_here("expected '" + std::string(p) + "'");
    ++pos_;
  }

  std::string expect_ident() {
    if (peek().kind != Token::Kind::Ident || is_reserved(peek().text)) {
      fail_here("expected identifier");
    }
    return next().text;
  }

  static bool is_reserved(const std::string& s) {
    static const char* kWords[] = {"input", "symbolic", "if", "else", "while",
                                   "return", "fail", "true", "false"};
    for (const char* w : kWords) {
      if (s == w) return true;
    }
    return parse_type_name(s).has_value();
  }

  std::optional<IntType> peek_type(std::size_t ahead = 0) const {
    if (peek(ahead).kind != Token::Kind::Ident) return std::nullopt;
    auto t = parse_type_name(peek(ahead).text);
    if (t && t->is_bool()) return std::nullopt;
    return t;
  }

  // -- declarations --------------------------------------------------------
  void parse_decls() {
    struct Pending {
      std::string name;
      IntType type;
      bool input;
      bool symbolic;
      SourceLoc loc;
    };
    std::vector<Pending> decls;
    for (;;) {
      bool input = false;
      SourceLoc loc = peek().loc;
      if (is_keyword("input")) {
        input = true;
        ++pos_;
        if (!peek_type()) fail_here("expected type after 'input'");
      } else if (!peek_type()) {
        break;
      }
      IntType type = *peek_type();
      ++pos_;
      Pending d{expect_ident(), type, input, false, loc};
      if (input && is_keyword("symbolic")) {
        ++pos_;
        d.symbolic = true;
      }
      expect(";");
      for (const auto& other : decls) {
        if (other.name == d.name) {
          throw TypeError(loc, "duplicate declaration of '" + d.name + "'");
        }
      }
      decls.push_back(std::move(d));
    }
    std::size_t offset = 0;
    for (const auto& d : decls) {
      if (!d.input) continue;
      InputDecl in{d.name, d.type, d.symbolic, offset};
      offset += in.bytes();
      slots_[d.name] = static_cast<std::uint32_t>(prog_.vars.size());
      prog_.inputs.push_back(in);
      prog_.vars.push_back({d.name, d.type, true});
    }
    for (const auto& d : decls) {
      if (d.input) continue;
      slots_[d.name] = static_cast<std::uint32_t>(prog_.vars.size());
      prog_.vars.push_back({d.name, d.type, false});
    }
  }

  // -- statements ----------------------------------------------------------
  StmtList parse_block() {
    expect("{");
    StmtList out;
    while (!is_punct("}")) {
      if (at_end()) fail_here("expected '}'");
      out.push_back(parse_stmt());
    }
    expect("}");
    return out;
  }

  StmtPtr parse_stmt() {
    auto s = std::make_shared<Stmt>();
    s->loc = peek().loc;
    if (is_keyword("if")) {
      ++pos_;
      s->kind = Stmt::Kind::If;
      s->expr = parse_condition();
      s->body = parse_block();
      if (is_keyword("else")) {
        ++pos_;
        s->has_else = true;
        if (is_keyword("if")) {
          s->orelse.push_back(parse_stmt());
        } else {
          s->orelse = parse_block();
        }
      }
    } else if (is_keyword("while")) {
      ++pos_;
      s->kind = Stmt::Kind::While;
      s->expr = parse_condition();
      s->body = parse_block();
    } else if (is_keyword("return")) {
      ++pos_;
      s->kind = Stmt::Kind::Return;
      expect(";");
    } else if (is_keyword("fail")) {
      ++pos_;
      s->kind = Stmt::Kind::Fail;
      expect(";");
    } else if (peek_type() || is_keyword("input")) {
      fail_here("declarations must precede statements");
    } else {
      s->kind = Stmt::Kind::Assign;
      const SourceLoc loc = peek().loc;
      const std::string name = expect_ident();
      auto it = slots_.find(name);
      if (it == slots_.end()) {
        throw TypeError(loc, "assignment to undeclared variable '" + name + "'");
      }
      s->var = it->second;
      expect("=");
      RawPtr raw = parse_expr();
      expect(";");
      s->expr = build(*raw, prog_.vars[s->var].type);
    }
    return s;
  }

  ExprPtr parse_condition() {
    expect("(");
    RawPtr raw = parse_expr();
    expect(")");
    auto hint = type_hint(*raw);
    if (!hint || !hint->is_bool()) {
      throw TypeError(raw->loc, "branch condition is not boolean");
    }
    return build(*raw, kBool);
  }

  // -- expressions (C precedence) ------------------------------------------
  RawPtr make_binary(Op op, SourceLoc loc, RawPtr l, RawPtr r) {
    auto e = std::make_unique<RawExpr>();
    e->kind = RawExpr::Kind::Binary;
    e->op = op;
    e->loc = loc;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  RawPtr parse_expr() { return parse_level(0); }

  RawPtr parse_level(int level) {
    static const std::vector<std::vector<std::pair<std::string, Op>>> kLevels = {
        {{"||", Op::LOr}},
        {{"&&", Op::LAnd}},
        {{"|", Op::BitOr}},
        {{"^", Op::BitXor}},
        {{"&", Op::BitAnd}},
        {{"==", Op::Eq}, {"!=", Op::Ne}},
        {{"<", Op::Lt}, {"<=", Op::Le}, {">", Op::Gt}, {">=", Op::Ge}},
        {{"<<", Op::Shl}, {">>", Op::Shr}},
        {{"+", Op::Add}, {"-", Op::Sub}},
        {{"*", Op::Mul}, {"/", Op::Div}, {"%", Op::Rem}},
    };
    if (level == static_cast<int>(kLevels.size())) return parse_unary();
    RawPtr lhs = parse_level(level + 1);
    for (;;) {
      bool matched = false;
      for (const auto& [sym, op] : kLevels[level]) {
        if (is_punct(sym)) {
          const SourceLoc loc = next().loc;
          RawPtr rhs = parse_level(level + 1);
          lhs = make_binary(op, loc, std::move(lhs), std::move(rhs));
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  RawPtr parse_unary() {
    const SourceLoc loc = peek().loc;
    std::optional<Op> op;
    if (is_punct("-")) op = Op::Neg;
    else if (is_punct("~")) op = Op::BitNot;
    else if (is_punct("!")) op = Op::LNot;
    if (!op) return parse_primary();
    ++pos_;
    RawPtr inner = parse_unary();
    if (inner->kind == RawExpr::Kind::Literal && *op != Op::LNot) {
      inner->value = *op == Op::Neg ? -inner->value : ~inner->value;
      inner->loc = loc;
      return inner;
    }
    auto e = std::make_unique<RawExpr>();
    e->kind = RawExpr::Kind::Unary;
    e->op = *op;
    e->loc = loc;
    e->lhs = std::move(inner);
    return e;
  }

  RawPtr parse_primary() {
    auto e = std::make_unique<RawExpr>();
    e->loc = peek().loc;
    if (is_punct("(")) {
      ++pos_;
      RawPtr inner = parse_expr();
      expect(")");
      return inner;
    }
    if (peek().kind == Token::Kind::Number) {
      e->kind = RawExpr::Kind::Literal;
      e->value = next().number;
      return e;
    }
    if (is_keyword("true") || is_keyword("false")) {
      e->kind = RawExpr::Kind::BoolLiteral;
      e->value = next().text == "true" ? 1 : 0;
      return e;
    }
    if (peek().kind == Token::Kind::Ident && !is_reserved(peek().text)) {
      e->kind = RawExpr::Kind::Name;
      e->name = next().text;
      if (!slots_.count(e->name)) {
        throw TypeError(e->loc, "use of undeclared variable '" + e->name + "'");
      }
      return e;
    }
    fail_here("expected expression");
  }

  // -- typing --------------------------------------------------------------

  // Type an expression has regardless of context; nullopt for bare literals.
  std::optional<IntType> type_hint(const RawExpr& e) const {
    switch (e.kind) {
      case RawExpr::Kind::Literal: return std::nullopt;
      case RawExpr::Kind::BoolLiteral: return kBool;
      case RawExpr::Kind::Name: return prog_.vars[slots_.at(e.name)].type;
      case RawExpr::Kind::Unary:
        return e.op == Op::LNot ? std::optional<IntType>(kBool) : type_hint(*e.lhs);
      case RawExpr::Kind::Binary:
        if (is_compare(e.op) || is_logic(e.op)) return kBool;
        if (auto l = type_hint(*e.lhs)) return l;
        return type_hint(*e.rhs);
    }
    return std::nullopt;
  }

  [[noreturn]] static void mismatch(SourceLoc loc, IntType want, IntType got) {
    throw TypeError(loc, "type mismatch: expected " + type_name(want) + ", got " +
                             type_name(got));
  }

  ExprPtr build(const RawExpr& e, IntType want) {
    auto out = std::make_shared<Expr>();
    out->type = want;
    switch (e.kind) {
      case RawExpr::Kind::Literal: {
        if (want.is_bool()) {
          throw TypeError(e.loc, "integer literal used where a boolean is expected");
        }
        const std::int64_t lo = -(std::int64_t{1} << (want.width - 1));
        const std::int64_t hi = (std::int64_t{1} << want.width) - 1;
        if (e.value < lo || e.value > hi) {
          throw TypeError(e.loc, "literal " + std::to_string(e.value) +
                                     " does not fit in " + type_name(want));
        }
        out->kind = Expr::Kind::Const;
        out->value = truncate(static_cast<std::uint64_t>(e.value), want);
        return out;
      }
      case RawExpr::Kind::BoolLiteral:
        if (!want.is_bool()) mismatch(e.loc, want, kBool);
        out->kind = Expr::Kind::Const;
        out->value = static_cast<std::uint32_t>(e.value);
        return out;
      case RawExpr::Kind::Name: {
        const std::uint32_t slot = slots_.at(e.name);
        if (prog_.vars[slot].type != want) mismatch(e.loc, want, prog_.vars[slot].type);
        out->kind = Expr::Kind::Var;
        out->var = slot;
        return out;
      }
      case RawExpr::Kind::Unary:
        out->kind = Expr::Kind::Unary;
        out->op = e.op;
        if (e.op == Op::LNot) {
          if (!want.is_bool()) mismatch(e.loc, want, kBool);
          out->lhs = build(*e.lhs, kBool);
        } else {
          if (want.is_bool()) {
            throw TypeError(e.loc, "arithmetic operator applied to boolean");
          }
          out->lhs = build(*e.lhs, want);
        }
        out->operand_type = out->lhs->type;
        return out;
      case RawExpr::Kind::Binary: {
        out->kind = Expr::Kind::Binary;
        out->op = e.op;
        IntType operand = want;
        if (is_logic(e.op)) {
          if (!want.is_bool()) mismatch(e.loc, want, kBool);
          operand = kBool;
        } else if (is_compare(e.op)) {
          if (!want.is_bool()) mismatch(e.loc, want, kBool);
          auto h = type_hint(*e.lhs);
          if (!h) h = type_hint(*e.rhs);
          operand = h.value_or(kI32);
          if (operand.is_bool() && e.op != Op::Eq && e.op != Op::Ne) {
            throw TypeError(e.loc, "ordering comparison on booleans");
          }
        } else if (want.is_bool()) {
          throw TypeError(e.loc, std::string("operator '") +
                                     std::string(op_symbol(e.op)) +
                                     "' applied to booleans");
        }
        out->operand_type = operand;
        out->lhs = build(*e.lhs, operand);
        out->rhs = build(*e.rhs, operand);
        return out;
      }
    }
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Program prog_;
  std::map<std::string, std::uint32_t> slots_;
};

}  // namespace

Program parse(std::string_view source, std::string name) {
  Lexer lexer(source);
  Parser parser(lexer.run(), std::move(name));
  return parser.run();
}

Program parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::filesystem::path(path).stem().string());
}

std::size_t Program::input_bytes() const {
  std::size_t n = 0;
  for (const auto& in : inputs) n += in.bytes();
  return n;
}

std::size_t Program::symbolic_input_count() const {
  std::size_t n = 0;
  for (const auto& in : inputs) n += in.symbolic ? 1 : 0;
  return n;
}

}  // namespace greycone
