#include "invlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace invlab {
namespace detail {

enum class UnaryOp { Neg, Exp, Ln, Sqrt, Sin, Cos, Tanh, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Min, Max };

struct ExprNode {
  enum class Kind { Number, Var, Unary, Binary, Norm, Norm2, Dot };
  Kind kind;
  double number = 0.0;
  int var = 0; // 0-based coordinate
  UnaryOp uop{};
  BinaryOp bop{};
  std::shared_ptr<const ExprNode> a, b;
  std::string dot_name;
  Vec dot_vec;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_var(int idx) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Var;
  n->var = idx;
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Unary;
  n->uop = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// ---------------------------------------------------------------- tokenizer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  double number = 0.0;
  std::string text;
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(t);
    advance();
    switch (c) {
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '^': t.kind = Tok::Caret; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case ',': t.kind = Tok::Comma; return t;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token lex_number(Token t) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      advance();
    // exponent part: e or E, optional sign, digits
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      } else {
        // not an exponent after all ("2e" followed by non-digit): rewind
        while (pos_ > mark) { --pos_; --column_; }
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    t.number = std::strtod(text.c_str(), &end);
    if (end == nullptr || *end != '\0')
      throw ParseError("malformed number '" + text + "'", t.line, t.column);
    t.kind = Tok::Number;
    t.text = text;
    return t;
  }

  Token lex_ident(Token t) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      advance();
    t.kind = Tok::Ident;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, column_ = 1;
};

// ------------------------------------------------------------------ parser

class Parser {
 public:
  Parser(std::string_view src, const SymbolTable& symbols)
      : lexer_(src), symbols_(symbols) {
    shift();
  }

  NodePtr parse() {
    NodePtr e = sum();
    expect(Tok::End, "end of input");
    return e;
  }

 private:
  void shift() { tok_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.column);
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  NodePtr sum() {
    NodePtr lhs = product();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const BinaryOp op = tok_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      shift();
      lhs = make_binary(op, std::move(lhs), product());
    }
    return lhs;
  }

  NodePtr product() {
    NodePtr lhs = signed_();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const BinaryOp op = tok_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      shift();
      lhs = make_binary(op, std::move(lhs), signed_());
    }
    return lhs;
  }

  // Unary minus binds looser than '^', so -2^2 parses as -(2^2).
  NodePtr signed_() {
    if (tok_.kind == Tok::Minus) {
      shift();
      return make_unary(UnaryOp::Neg, signed_());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (tok_.kind == Tok::Caret) {
      shift();
      return make_binary(BinaryOp::Pow, std::move(base), signed_());
    }
    return base;
  }

  NodePtr atom() {
    if (tok_.kind == Tok::Number) {
      const double v = tok_.number;
      shift();
      return make_number(v);
    }
    if (tok_.kind == Tok::LParen) {
      shift();
      NodePtr e = sum();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (tok_.kind == Tok::Ident) return ident();
    fail("expected a number, identifier or '('");
  }

  NodePtr ident() {
    const Token name = tok_;
    shift();
    if (tok_.kind == Tok::LParen) return call(name);

    // coordinate x1..xd
    if (name.text.size() >= 2 && name.text[0] == 'x' && all_digits(name.text.substr(1))) {
      const int idx = std::atoi(name.text.c_str() + 1);
      if (idx < 1)
        throw ParseError("coordinates are 1-based, x0 is invalid", name.line, name.column);
      return make_var(idx - 1);
    }
    if (name.text == "x")
      throw ParseError("bare 'x' is only valid inside norm(x), norm2(x) or dot(c, x)",
                       name.line, name.column);
    if (name.text == "pi") return make_number(M_PI);
    if (name.text == "e") return make_number(M_E);
    if (auto it = symbols_.scalars.find(name.text); it != symbols_.scalars.end())
      return make_number(it->second);
    throw ParseError("unknown identifier '" + name.text + "'", name.line, name.column);
  }

  NodePtr call(const Token& name) {
    expect(Tok::LParen, "'('");
    if (name.text == "norm2" || name.text == "norm") {
      point_arg(name);
      expect(Tok::RParen, "')'");
      auto n = std::make_shared<ExprNode>();
      n->kind = name.text == "norm2" ? ExprNode::Kind::Norm2 : ExprNode::Kind::Norm;
      return n;
    }
    if (name.text == "dot") {
      if (tok_.kind != Tok::Ident)
        fail("dot expects a named constant vector as its first argument");
      const Token vec_name = tok_;
      shift();
      auto it = symbols_.vectors.find(vec_name.text);
      if (it == symbols_.vectors.end())
        throw ParseError("unknown constant vector '" + vec_name.text + "'",
                         vec_name.line, vec_name.column);
      expect(Tok::Comma, "','");
      point_arg(name);
      expect(Tok::RParen, "')'");
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Dot;
      n->dot_name = vec_name.text;
      n->dot_vec = it->second;
      return n;
    }

    static const std::map<std::string, UnaryOp, std::less<>> kFunctions = {
        {"exp", UnaryOp::Exp}, {"ln", UnaryOp::Ln},   {"sqrt", UnaryOp::Sqrt},
        {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos}, {"tanh", UnaryOp::Tanh},
        {"abs", UnaryOp::Abs}};
    if (auto it = kFunctions.find(name.text); it != kFunctions.end()) {
      NodePtr arg = sum();
      expect(Tok::RParen, "')'");
      return make_unary(it->second, std::move(arg));
    }
    if (name.text == "min" || name.text == "max") {
      NodePtr a = sum();
      expect(Tok::Comma, "','");
      NodePtr b = sum();
      expect(Tok::RParen, "')'");
      return make_binary(name.text == "min" ? BinaryOp::Min : BinaryOp::Max,
                         std::move(a), std::move(b));
    }
    throw ParseError("unknown function '" + name.text + "'", name.line, name.column);
  }

  void point_arg(const Token& fn) {
    if (tok_.kind != Tok::Ident || tok_.text != "x")
      throw ParseError(fn.text + " expects the point argument 'x'", tok_.line, tok_.column);
    shift();
  }

  static bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }

  Lexer lexer_;
  const SymbolTable& symbols_;
  Token tok_;
};

// -------------------------------------------------------------- evaluation

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

double eval(const ExprNode& n, const Vec& x) {
  switch (n.kind) {
    case ExprNode::Kind::Number:
      return n.number;
    case ExprNode::Kind::Var:
      if (n.var >= x.size())
        throw DimensionError("expression references x" + std::to_string(n.var + 1) +
                             " but the point has dimension " + std::to_string(x.size()));
      return x[n.var];
    case ExprNode::Kind::Norm2:
      return x.squaredNorm();
    case ExprNode::Kind::Norm:
      return x.norm();
    case ExprNode::Kind::Dot:
      if (n.dot_vec.size() != x.size())
        throw DimensionError("dot(" + n.dot_name + ", x): vector has dimension " +
                             std::to_string(n.dot_vec.size()) + ", point has " +
                             std::to_string(x.size()));
      return n.dot_vec.dot(x);
    case ExprNode::Kind::Unary: {
      const double a = eval(*n.a, x);
      switch (n.uop) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Exp: return std::exp(a);
        case UnaryOp::Ln:
          if (a <= 0.0) throw DomainError("ln of non-positive value");
          return std::log(a);
        case UnaryOp::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value");
          return std::sqrt(a);
        case UnaryOp::Sin: return std::sin(a);
        case UnaryOp::Cos: return std::cos(a);
        case UnaryOp::Tanh: return std::tanh(a);
        case UnaryOp::Abs: return std::abs(a);
      }
      break;
    }
    case ExprNode::Kind::Binary: {
      const double a = eval(*n.a, x);
      const double b = eval(*n.b, x);
      switch (n.bop) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) throw DomainError("division by zero");
          return a / b;
        case BinaryOp::Pow:
          if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
          if (a < 0.0 && !is_integer(b))
            throw DomainError("negative base raised to a non-integer power");
          return std::pow(a, b);
        case BinaryOp::Min: return std::min(a, b);
        case BinaryOp::Max: return std::max(a, b);
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------- printing

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::Number:
      if (n.number < 0 || std::signbit(n.number)) {
        out += '(';
        out += format_number(n.number);
        out += ')';
      } else {
        out += format_number(n.number);
      }
      return;
    case ExprNode::Kind::Var:
      out += 'x';
      out += std::to_string(n.var + 1);
      return;
    case ExprNode::Kind::Norm2:
      out += "norm2(x)";
      return;
    case ExprNode::Kind::Norm:
      out += "norm(x)";
      return;
    case ExprNode::Kind::Dot:
      out += "dot(" + n.dot_name + ", x)";
      return;
    case ExprNode::Kind::Unary: {
      const char* fn = nullptr;
      switch (n.uop) {
        case UnaryOp::Neg: fn = nullptr; break;
        case UnaryOp::Exp: fn = "exp"; break;
        case UnaryOp::Ln: fn = "ln"; break;
        case UnaryOp::Sqrt: fn = "sqrt"; break;
        case UnaryOp::Sin: fn = "sin"; break;
        case UnaryOp::Cos: fn = "cos"; break;
        case UnaryOp::Tanh: fn = "tanh"; break;
        case UnaryOp::Abs: fn = "abs"; break;
      }
      if (fn == nullptr) {
        out += "(-";
        print(*n.a, out);
        out += ')';
      } else {
        out += fn;
        out += '(';
        print(*n.a, out);
        out += ')';
      }
      return;
    }
    case ExprNode::Kind::Binary: {
      const char* op = nullptr;
      switch (n.bop) {
        case BinaryOp::Add: op = " + "; break;
        case BinaryOp::Sub: op = " - "; break;
        case BinaryOp::Mul: op = " * "; break;
        case BinaryOp::Div: op = " / "; break;
        case BinaryOp::Pow: op = " ^ "; break;
        case BinaryOp::Min: op = nullptr; break;
        case BinaryOp::Max: op = nullptr; break;
      }
      if (op == nullptr) {
        out += n.bop == BinaryOp::Min ? "min(" : "max(";
        print(*n.a, out);
        out += ", ";
        print(*n.b, out);
        out += ')';
      } else {
        out += '(';
        print(*n.a, out);
        out += op;
        print(*n.b, out);
        out += ')';
      }
      return;
    }
  }
}

int min_dimension(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Number: return 0;
    case ExprNode::Kind::Var: return n.var + 1;
    case ExprNode::Kind::Norm2:
    case ExprNode::Kind::Norm: return 0;
    case ExprNode::Kind::Dot: return int(n.dot_vec.size());
    case ExprNode::Kind::Unary: return min_dimension(*n.a);
    case ExprNode::Kind::Binary:
      return std::max(min_dimension(*n.a), min_dimension(*n.b));
  }
  return 0;
}

} // namespace
} // namespace detail

Expression Expression::parse(std::string_view source, const SymbolTable& symbols) {
  detail::Parser parser(source, symbols);
  Expression e;
  e.root_ = parser.parse();
  e.min_dim_ = detail::min_dimension(*e.root_);
  return e;
}

double Expression::operator()(const Vec& x) const {
  if (!root_) throw Error("evaluating an empty expression");
  return detail::eval(*root_, x);
}

std::string Expression::str() const {
  if (!root_) return std::string();
  std::string out;
  detail::print(*root_, out);
  return out;
}

} // namespace invlab
