#include "greycone/symexpr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace greycone {

namespace {

SymRef make(SymNode n) {
  std::uint32_t d = 0;
  if (n.a) d = n.a->depth;
  if (n.b) d = std::max(d, n.b->depth);
  n.depth = d + 1;
  return std::make_shared<const SymNode>(std::move(n));
}

void need(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

SymRef sym_const(IntType t, std::uint32_t bits) {
  SymNode n;
  n.kind = SymNode::Kind::Const;
  n.type = t;
  n.operand_type = t;
  n.value = truncate(bits, t);
  return make(std::move(n));
}

SymRef sym_bool(bool v) { return sym_const(kBool, v ? 1 : 0); }

SymRef sym_var(std::uint32_t index, std::string name, IntType t) {
  SymNode n;
  n.kind = SymNode::Kind::Var;
  n.type = t;
  n.operand_type = t;
  n.var = index;
  n.name = std::move(name);
  return make(std::move(n));
}

SymRef sym_unary(Op op, SymRef a) {
  need(is_unary(op), "sym_unary: not a unary operator");
  need(a != nullptr, "sym_unary: null operand");
  need((op == Op::LNot) == a->type.is_bool(), "sym_unary: operand type");
  SymNode n;
  n.kind = SymNode::Kind::Unary;
  n.op = op;
  n.type = a->type;
  n.operand_type = a->type;
  n.a = std::move(a);
  return make(std::move(n));
}

SymRef sym_binary(Op op, SymRef a, SymRef b) {
  need(!is_unary(op), "sym_binary: unary operator");
  need(a && b, "sym_binary: null operand");
  need(a->type == b->type, "sym_binary: operand types differ");
  SymNode n;
  n.op = op;
  n.operand_type = a->type;
  if (is_compare(op)) {
    need(!a->type.is_bool() || op == Op::Eq || op == Op::Ne,
         "sym_binary: ordering on bool");
    n.kind = SymNode::Kind::Compare;
    n.type = kBool;
  } else if (is_logic(op)) {
    need(a->type.is_bool(), "sym_binary: logic on ints");
    n.kind = SymNode::Kind::Logic;
    n.type = kBool;
  } else {
    need(!a->type.is_bool(), "sym_binary: arithmetic on bool");
    n.kind = SymNode::Kind::Binary;
    n.type = a->type;
  }
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

SymRef sym_not(SymRef p) { return sym_unary(Op::LNot, std::move(p)); }

bool is_const(const SymNode& n) { return n.kind == SymNode::Kind::Const; }
bool is_true(const SymNode& n) { return is_const(n) && n.type.is_bool() && n.value; }
bool is_false(const SymNode& n) { return is_const(n) && n.type.is_bool() && !n.value; }

std::optional<std::uint32_t> eval(const SymNode& n,
                                  const std::vector<std::uint32_t>& env) {
  switch (n.kind) {
    case SymNode::Kind::Const: return n.value;
    case SymNode::Kind::Var: return truncate(env.at(n.var), n.type);
    case SymNode::Kind::Unary: {
      auto a = eval(*n.a, env);
      if (!a) return std::nullopt;
      return apply_unary(n.op, n.operand_type, *a);
    }
    default: {
      auto a = eval(*n.a, env);
      if (!a) return std::nullopt;
      auto b = eval(*n.b, env);
      if (!b) return std::nullopt;
      return apply_binary(n.op, n.operand_type, *a, *b);
    }
  }
}

bool sym_equal(const SymNode& x, const SymNode& y) {
  if (&x == &y) return true;
  if (x.kind != y.kind || x.type != y.type || x.operand_type != y.operand_type) {
    return false;
  }
  switch (x.kind) {
    case SymNode::Kind::Const: return x.value == y.value;
    case SymNode::Kind::Var: return x.var == y.var;
    case SymNode::Kind::Unary: return x.op == y.op && sym_equal(*x.a, *y.a);
    default:
      return x.op == y.op && sym_equal(*x.a, *y.a) && sym_equal(*x.b, *y.b);
  }
}

std::size_t sym_size(const SymNode& n) {
  std::size_t s = 1;
  if (n.a) s += sym_size(*n.a);
  if (n.b) s += sym_size(*n.b);
  return s;
}

std::size_t sym_depth(const SymNode& n) { return n.depth; }

void collect_vars(const SymNode& n, std::vector<VarInfo>& out) {
  if (n.kind == SymNode::Kind::Var) {
    auto it = std::lower_bound(out.begin(), out.end(), n.var,
                               [](const VarInfo& v, std::uint32_t i) { return v.index < i; });
    if (it == out.end() || it->index != n.var) out.insert(it, {n.var, n.name, n.type});
    return;
  }
  if (n.a) collect_vars(*n.a, out);
  if (n.b) collect_vars(*n.b, out);
}

std::vector<VarInfo> collect_vars(const SymNode& n) {
  std::vector<VarInfo> out;
  collect_vars(n, out);
  return out;
}

// -- s-expressions ----------------------------------------------------------

namespace {

void write(std::ostream& os, const SymNode& n) {
  switch (n.kind) {
    case SymNode::Kind::Const:
      os << "(const " << type_name(n.type) << " " << to_numeric(n.value, n.type) << ")";
      return;
    case SymNode::Kind::Var:
      os << "(var " << n.name;
      if (n.var) os << "#" << n.var;
      os << " " << type_name(n.type) << ")";
      return;
    case SymNode::Kind::Unary:
      os << "(" << op_mnemonic(n.op) << " ";
      write(os, *n.a);
      os << ")";
      return;
    default:
      os << "(" << op_mnemonic(n.op) << " ";
      write(os, *n.a);
      os << " ";
      write(os, *n.b);
      os << ")";
      return;
  }
}

class SexpReader {
 public:
  explicit SexpReader(std::string_view s) : s_(s) {}

  SymRef read() {
    SymRef r = node();
    skip();
    if (pos_ != s_.size()) fail("trailing text");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw SexpError("s-expression: " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view atom() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '(' && s_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected atom");
    return s_.substr(start, pos_ - start);
  }

  IntType type() {
    auto name = atom();
    auto t = parse_type_name(name);
    if (!t) fail("unknown type '" + std::string(name) + "'");
    return *t;
  }

  std::int64_t number() {
    auto a = atom();
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
    if (ec != std::errc() || p != a.data() + a.size()) {
      fail("bad number '" + std::string(a) + "'");
    }
    return v;
  }

  SymRef node() {
    expect('(');
    const auto head = atom();
    SymRef r;
    try {
      if (head == "const") {
        const IntType t = type();
        const std::int64_t v = number();
        if (v < type_min(t) || v > type_max(t)) fail("constant out of range");
        r = sym_const(t, static_cast<std::uint32_t>(v));
      } else if (head == "var") {
        std::string name(atom());
        std::uint32_t index = 0;
        if (auto hash = name.find('#'); hash != std::string::npos) {
          const auto digits = std::string_view(name).substr(hash + 1);
          auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
          if (ec != std::errc() || p != digits.data() + digits.size()) fail("bad var index");
          name.resize(hash);
        }
        r = sym_var(index, std::move(name), type());
      } else {
        auto op = parse_op_mnemonic(head);
        if (!op) fail("unknown operator '" + std::string(head) + "'");
        SymRef a = node();
        r = is_unary(*op) ? sym_unary(*op, a) : sym_binary(*op, a, node());
      }
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    expect(')');
    return r;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_sexp(const SymNode& n) {
  std::ostringstream os;
  write(os, n);
  return os.str();
}

SymRef parse_sexp(std::string_view text) { return SexpReader(text).read(); }

std::vector<SymRef> PathPredicate::all() const {
  std::vector<SymRef> out = assumptions;
  out.insert(out.end(), conjuncts.begin(), conjuncts.end());
  return out;
}

std::vector<VarInfo> PathPredicate::vars() const {
  std::vector<VarInfo> out;
  for (const auto& c : conjuncts) collect_vars(*c, out);
  for (const auto& c : assumptions) collect_vars(*c, out);
  return out;
}

std::string dump_predicate(const PathPredicate& p) {
  std::ostringstream os;
  os << "; target site " << p.target_site << " " << (p.desired ? "true" : "false") << "\n";
  for (const auto& a : p.assumptions) os << "; assume " << to_sexp(*a) << "\n";
  for (const auto& c : p.conjuncts) os << to_sexp(*c) << "\n";
  return os.str();
}

PathPredicate parse_predicate(std::string_view text) {
  PathPredicate p;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    if (line.empty()) continue;
    if (line.starts_with("; assume ")) {
      p.assumptions.push_back(parse_sexp(line.substr(9)));
    } else if (line.starts_with("; target site ")) {
      std::istringstream is{std::string(line.substr(14))};
      std::string dir;
      is >> p.target_site >> dir;
      p.desired = dir != "false";
    } else if (line.front() == ';') {
      continue;
    } else {
      auto c = parse_sexp(line);
      if (!c->type.is_bool()) throw SexpError("conjunct is not boolean: " + std::string(line));
      p.conjuncts.push_back(std::move(c));
    }
  }
  p.depth = p.conjuncts.empty() ? 0 : p.conjuncts.size() - 1;
  return p;
}

}  // namespace greycone
