#include "holocorr/syntax.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace holocorr {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Exact value of a decimal literal such as "12.5e-3".
Rational decimal_value(const std::string& text) {
  std::string mantissa;
  long exp10 = 0;
  std::size_t i = 0;
  bool after_point = false;
  for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
    if (text[i] == '.') {
      after_point = true;
      continue;
    }
    mantissa += text[i];
    if (after_point) --exp10;
  }
  if (i < text.size()) exp10 += std::stol(text.substr(i + 1));
  mpz_class m(mantissa.empty() ? "0" : mantissa, 10);
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  Rational v = exp10 >= 0 ? Rational(m * p) : Rational(m, p);
  v.canonicalize();
  return v;
}

// Terminating decimal expansion of a nonnegative rational whose denominator
// has only the prime factors 2 and 5.
std::string decimal_text(const Rational& v) {
  mpz_class den = v.get_den();
  int twos = 0, fives = 0;
  while (den % 2 == 0) den /= 2, ++twos;
  while (den % 5 == 0) den /= 5, ++fives;
  if (den != 1) return v.get_str();  // not produced by the tokenizer
  const int k = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(k));
  const mpz_class digits_value = v.get_num() * scale / v.get_den();
  std::string digits = digits_value.get_str();
  if (k == 0) return digits;
  if (static_cast<int>(digits.size()) <= k) digits.insert(0, static_cast<std::size_t>(k + 1) - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - static_cast<std::size_t>(k)) + "." + digits.substr(digits.size() - static_cast<std::size_t>(k));
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  return out;
}

// Gaussian rational a + b i.
struct GQ {
  Rational re, im;
  bool is_zero() const { return re == 0 && im == 0; }
};
GQ operator+(const GQ& a, const GQ& b) { return {a.re + b.re, a.im + b.im}; }
GQ operator-(const GQ& a, const GQ& b) { return {a.re - b.re, a.im - b.im}; }
GQ operator*(const GQ& a, const GQ& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
GQ inverse(const GQ& a) {
  const Rational n = a.re * a.re + a.im * a.im;
  return {a.re / n, -a.im / n};
}

// Polynomial over Q(i); index j multiplies z^j; trimmed, zero is empty.
using GPoly = std::vector<GQ>;

void trim(GPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}
GPoly gadd(const GPoly& a, const GPoly& b, bool subtract = false) {
  GPoly c(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const GQ x = i < a.size() ? a[i] : GQ{};
    const GQ y = i < b.size() ? b[i] : GQ{};
    c[i] = subtract ? x - y : x + y;
  }
  trim(c);
  return c;
}
GPoly gmul(const GPoly& a, const GPoly& b) {
  if (a.empty() || b.empty()) return {};
  GPoly c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = c[i + j] + a[i] * b[j];
  }
  trim(c);
  return c;
}
GPoly gscale(const GPoly& a, const GQ& s) {
  GPoly c(a);
  for (auto& v : c) v = v * s;
  trim(c);
  return c;
}
// Remainder and quotient of a / b.
std::pair<GPoly, GPoly> gdivmod(GPoly a, const GPoly& b) {
  GPoly q;
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, GQ{});
  const GQ lead_inv = inverse(b.back());
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const GQ c = a.back() * lead_inv;
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = a[shift + j] - c * b[j];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}
GPoly gmonic(const GPoly& a) { return a.empty() ? a : gscale(a, inverse(a.back())); }
GPoly ggcd(GPoly a, GPoly b) {
  while (!b.empty()) {
    GPoly r = gdivmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return gmonic(a);
}

struct RatFunc {
  GPoly num, den;
};

class Parser {
 public:
  Parser(std::string_view text) : tokens_(tokenize(text)) {}

  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  bool at_symbol(const char* s) const { return peek().kind == TokenKind::symbol && peek().text == s; }
  bool at_word(const char* s) const { return peek().kind == TokenKind::identifier && peek().text == s; }
  bool at_end() const { return peek().kind == TokenKind::end; }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    throw ParseError(message + (t.kind == TokenKind::end ? " but found end of input" : " but found '" + t.text + "'"),
                     t.position);
  }

  void expect_symbol(const char* s) {
    if (!at_symbol(s)) fail(std::string("expected '") + s + "'");
    next();
  }

  Expr expression() {
    Expr left = term();
    while (at_symbol("+") || at_symbol("-")) {
      const Token& op = next();
      Expr right = term();
      left = binary(op.text == "+" ? Expr::Kind::add : Expr::Kind::subtract, std::move(left), std::move(right), op.position);
    }
    return left;
  }

  Expr term() {
    Expr left = unary();
    while (at_symbol("*") || at_symbol("/")) {
      const Token& op = next();
      Expr right = unary();
      left = binary(op.text == "*" ? Expr::Kind::multiply : Expr::Kind::divide, std::move(left), std::move(right), op.position);
    }
    return left;
  }

  Expr unary() {
    if (at_symbol("-")) {
      const std::size_t p = next().position;
      Expr e;
      e.kind = Expr::Kind::negate;
      e.position = p;
      e.args.push_back(unary());
      return e;
    }
    if (at_symbol("+")) {
      next();
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (!at_symbol("^")) return base;
    const std::size_t p = next().position;
    bool negative = false;
    if (at_symbol("-")) {
      next();
      negative = true;
    }
    if (peek().kind != TokenKind::number || peek().text.find_first_not_of("0123456789") != std::string::npos) {
      fail("expected an integer exponent");
    }
    const Token& t = next();
    long v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || v > 1000) throw ParseError("exponent out of range", t.position);
    Expr e;
    e.kind = Expr::Kind::power;
    e.exponent = static_cast<int>(negative ? -v : v);
    e.position = p;
    e.args.push_back(std::move(base));
    if (at_symbol("^")) fail("chained exponents need parentheses; expected an operator");
    return e;
  }

  Expr atom() {
    const Token& t = peek();
    Expr e;
    e.position = t.position;
    switch (t.kind) {
      case TokenKind::number:
        next();
        e.kind = Expr::Kind::number;
        e.value = decimal_value(t.text);
        return e;
      case TokenKind::imaginary:
        next();
        e.kind = Expr::Kind::imaginary;
        e.value = decimal_value(t.text.substr(0, t.text.size() - 1));
        return e;
      case TokenKind::identifier:
        next();
        e.kind = Expr::Kind::variable;
        e.name = t.text;
        return e;
      default:
        break;
    }
    if (at_symbol("(")) {
      next();
      Expr inner = expression();
      expect_symbol(")");
      return inner;
    }
    fail("expected a number, variable or '('");
  }

  double real_number() {
    bool negative = false;
    if (at_symbol("-") || at_symbol("+")) negative = next().text == "-";
    if (peek().kind != TokenKind::number) fail("expected a number");
    const Token& t = next();
    double v = 0.0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc()) throw ParseError("number out of range", t.position);
    return negative ? -v : v;
  }

  std::size_t position() const { return peek().position; }

 private:
  static Expr binary(Expr::Kind kind, Expr a, Expr b, std::size_t position) {
    Expr e;
    e.kind = kind;
    e.position = position;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

RatFunc eval_rational(const Expr& e) {
  auto constant = [](GQ c) { return RatFunc{c.is_zero() ? GPoly{} : GPoly{c}, GPoly{GQ{1, 0}}}; };
  switch (e.kind) {
    case Expr::Kind::number:
      return constant({e.value, 0});
    case Expr::Kind::imaginary:
      return constant({0, e.value});
    case Expr::Kind::variable:
      if (e.name == "z") return {GPoly{GQ{}, GQ{1, 0}}, GPoly{GQ{1, 0}}};
      if (e.name == "i") return constant({0, 1});
      throw ParseError("unknown variable '" + e.name + "' (maps use z)", e.position);
    case Expr::Kind::negate: {
      RatFunc a = eval_rational(e.args[0]);
      return {gscale(a.num, {-1, 0}), a.den};
    }
    case Expr::Kind::add:
    case Expr::Kind::subtract: {
      const RatFunc a = eval_rational(e.args[0]), b = eval_rational(e.args[1]);
      return {gadd(gmul(a.num, b.den), gmul(b.num, a.den), e.kind == Expr::Kind::subtract), gmul(a.den, b.den)};
    }
    case Expr::Kind::multiply: {
      const RatFunc a = eval_rational(e.args[0]), b = eval_rational(e.args[1]);
      return {gmul(a.num, b.num), gmul(a.den, b.den)};
    }
    case Expr::Kind::divide: {
      const RatFunc a = eval_rational(e.args[0]), b = eval_rational(e.args[1]);
      if (b.num.empty()) throw ParseError("division by zero", e.position);
      return {gmul(a.num, b.den), gmul(a.den, b.num)};
    }
    case Expr::Kind::power: {
      RatFunc base = eval_rational(e.args[0]);
      if (e.exponent < 0) {
        if (base.num.empty()) throw ParseError("zero raised to a negative power", e.position);
        std::swap(base.num, base.den);
      }
      RatFunc out{GPoly{GQ{1, 0}}, GPoly{GQ{1, 0}}};
      for (int k = 0; k < std::abs(e.exponent); ++k) out = {gmul(out.num, base.num), gmul(out.den, base.den)};
      return out;
    }
  }
  return {};
}

ExactBivarPoly eval_poly(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number:
      return ExactBivarPoly::constant(e.value);
    case Expr::Kind::imaginary:
      throw ParseError("polynomial coefficients must be rational", e.position);
    case Expr::Kind::variable:
      if (e.name == "x") return ExactBivarPoly::x();
      if (e.name == "y") return ExactBivarPoly::y();
      throw ParseError("unknown variable '" + e.name + "' (polynomials use x and y)", e.position);
    case Expr::Kind::negate:
      return Rational(-1) * eval_poly(e.args[0]);
    case Expr::Kind::add:
      return eval_poly(e.args[0]) + eval_poly(e.args[1]);
    case Expr::Kind::subtract:
      return eval_poly(e.args[0]) - eval_poly(e.args[1]);
    case Expr::Kind::multiply:
      return eval_poly(e.args[0]) * eval_poly(e.args[1]);
    case Expr::Kind::divide: {
      const ExactBivarPoly d = eval_poly(e.args[1]);
      if (!d.is_constant() || d.is_zero()) throw ParseError("polynomials may only be divided by nonzero constants", e.position);
      return Rational(1 / d.coeff(0, 0)) * eval_poly(e.args[0]);
    }
    case Expr::Kind::power:
      if (e.exponent < 0) throw ParseError("negative exponent in a polynomial", e.position);
      return pow(eval_poly(e.args[0]), e.exponent);
  }
  return {};
}

RationalMap to_map(const RatFunc& f, const std::string& text) {
  if (f.num.empty()) throw DegreeError("generator '" + text + "' is constant");
  const GPoly g = ggcd(f.num, f.den);
  GPoly num = gdivmod(f.num, g).first, den = gdivmod(f.den, g).first;
  const GQ lead = inverse(den.back());
  num = gscale(num, lead);
  den = gscale(den, lead);
  if (num.size() <= 1 && den.size() <= 1) throw DegreeError("generator '" + text + "' is constant");
  auto numeric = [](const GPoly& p) {
    std::vector<Complex> c;
    for (const auto& v : p) c.emplace_back(v.re.get_d(), v.im.get_d());
    return c;
  };
  return RationalMap::from_affine(numeric(num), numeric(den));
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::subtract:
      return 1;
    case Expr::Kind::multiply:
    case Expr::Kind::divide:
      return 2;
    case Expr::Kind::negate:
      return 3;
    case Expr::Kind::power:
      return 4;
    default:
      return 5;
  }
}

std::string print(const Expr& e, int min_prec) {
  std::string s;
  switch (e.kind) {
    case Expr::Kind::number:
      s = decimal_text(e.value);
      break;
    case Expr::Kind::imaginary:
      s = decimal_text(e.value) + "i";
      break;
    case Expr::Kind::variable:
      s = e.name;
      break;
    case Expr::Kind::negate:
      s = "-" + print(e.args[0], 3);
      break;
    case Expr::Kind::add:
    case Expr::Kind::subtract:
      s = print(e.args[0], 1) + (e.kind == Expr::Kind::add ? " + " : " - ") + print(e.args[1], 2);
      break;
    case Expr::Kind::multiply:
    case Expr::Kind::divide:
      s = print(e.args[0], 2) + (e.kind == Expr::Kind::multiply ? "*" : "/") + print(e.args[1], 3);
      break;
    case Expr::Kind::power:
      s = print(e.args[0], 5) + "^" + std::to_string(e.exponent);
      break;
  }
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (digit(c) || (c == '.' && i + 1 < text.size() && digit(text[i + 1]))) {
      while (i < text.size() && digit(text[i])) ++i;
      if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && digit(text[i])) ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && digit(text[j])) {
          i = j;
          while (i < text.size() && digit(text[i])) ++i;
        }
      }
      TokenKind kind = TokenKind::number;
      if (i < text.size() && text[i] == 'i' && (i + 1 == text.size() || !ident_char(text[i + 1]))) {
        ++i;
        kind = TokenKind::imaginary;
      }
      if (i < text.size() && ident_char(text[i])) {
        throw ParseError("malformed number '" + std::string(text.substr(start, i + 1 - start)) + "'", start);
      }
      out.push_back({kind, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({TokenKind::identifier, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (std::string_view("+-*/^();[]:").find(c) != std::string_view::npos) {
      out.push_back({TokenKind::symbol, std::string(1, c), start});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({TokenKind::end, "", text.size()});
  return out;
}

bool Expr::operator==(const Expr& other) const {
  return kind == other.kind && value == other.value && name == other.name && exponent == other.exponent &&
         args == other.args;
}

std::string to_string(const Expr& e) { return print(e, 0); }

Correspondence GeneratorSpec::correspondence() const {
  if (poly_mode) {
    std::vector<PolyFactor> factors;
    for (std::size_t i = 0; i < items.size(); ++i) {
      factors.push_back({items[i].adjoint ? polys[i].swapped() : polys[i], items[i].multiplicity});
    }
    return Correspondence::poly_chain(std::move(factors));
  }
  std::vector<GraphComponent> comps;
  for (std::size_t i = 0; i < items.size(); ++i) {
    comps.push_back({maps[i], items[i].multiplicity, items[i].adjoint ? Direction::reverse : Direction::forward});
  }
  return Correspondence::graph_chain(std::move(comps));
}

GeneratorSpec parse_generators(std::string_view text, bool allow_deg1) {
  Parser p(text);
  GeneratorSpec spec;
  spec.source = std::string(text);
  if (p.at_word("poly") && p.peek(1).kind == TokenKind::symbol && p.peek(1).text == ":") {
    p.next();
    p.next();
    spec.poly_mode = true;
  }
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (;;) {
    GeneratorItem item;
    const std::size_t start = p.position();
    if (p.at_symbol("[")) {
      p.next();
      if (p.peek().kind != TokenKind::number || p.peek().text.find_first_not_of("0123456789") != std::string::npos) {
        p.fail("expected a positive integer multiplicity");
      }
      const Token& t = p.next();
      const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), item.multiplicity);
      if (res.ec != std::errc() || item.multiplicity < 1) throw ParseError("multiplicity must be a positive integer", t.position);
      p.expect_symbol("]");
    }
    if (p.at_word("adjoint") && p.peek(1).kind == TokenKind::symbol && p.peek(1).text == "(") {
      p.next();
      p.next();
      item.adjoint = true;
      item.expr = p.expression();
      p.expect_symbol(")");
    } else {
      item.expr = p.expression();
    }
    spans.push_back({start, p.position()});
    spec.items.push_back(std::move(item));
    if (p.at_end()) break;
    p.expect_symbol(";");
  }

  auto item_text = [&](std::size_t i) {
    const auto [a, b] = spans[i];
    std::string s(text.substr(a, std::min(b, text.size()) - a));
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  };
  if (spec.poly_mode) {
    for (const auto& item : spec.items) spec.polys.push_back(eval_poly(item.expr));
    return spec;
  }
  std::vector<RatFunc> funcs;
  for (const auto& item : spec.items) funcs.push_back(eval_rational(item.expr));
  for (std::size_t i = 0; i < funcs.size(); ++i) spec.maps.push_back(to_map(funcs[i], item_text(i)));
  if (!allow_deg1) {
    for (std::size_t i = 0; i < spec.maps.size(); ++i) {
      if (spec.maps[i].degree() < 2) {
        throw DegreeError("generator '" + item_text(i) + "' has degree 1; semigroup mode needs degree >= 2 (use --allow-deg1)");
      }
    }
  }
  return spec;
}

std::string to_string(const GeneratorSpec& spec) {
  std::string out = spec.poly_mode ? "poly: " : "";
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    const auto& item = spec.items[i];
    if (i) out += "; ";
    if (item.multiplicity != 1) out += "[" + std::to_string(item.multiplicity) + "] ";
    out += item.adjoint ? "adjoint(" + to_string(item.expr) + ")" : to_string(item.expr);
  }
  return out;
}

ExactBivarPoly parse_poly(std::string_view text) {
  Parser p(text);
  const Expr e = p.expression();
  if (!p.at_end()) p.fail("expected end of polynomial");
  return eval_poly(e);
}

namespace {

Region region(Parser& p) {
  auto closedness = [&]() {
    if (!p.at_word("closed") && !p.at_word("open")) p.fail("expected 'open' or 'closed'");
    return p.next().text == "closed";
  };
  auto group = [&]() {
    p.expect_symbol("(");
    Region r = region(p);
    p.expect_symbol(")");
    return r;
  };
  const std::size_t at = p.position();
  try {
    if (p.at_word("all") || p.at_word("empty")) return p.next().text == "all" ? Region::all() : Region::empty();
    if (p.at_word("disc")) {
      p.next();
      std::optional<Complex> center;
      if (p.at_word("inf")) {
        p.next();
      } else {
        const double re = p.real_number();
        const double im = p.real_number();
        center = Complex(re, im);
      }
      const double r = p.real_number();
      return Region::disc(center, r, closedness());
    }
    if (p.at_word("annulus")) {
      p.next();
      const double r1 = p.real_number();
      const double r2 = p.real_number();
      return Region::annulus(r1, r2, closedness());
    }
    if (p.at_word("halfplane")) {
      p.next();
      const double nx = p.real_number();
      const double ny = p.real_number();
      const double offset = p.real_number();
      return Region::half_plane(nx, ny, offset);
    }
    if (p.at_word("union") || p.at_word("intersection")) {
      const bool is_union = p.next().text == "union";
      std::vector<Region> parts{group()};
      while (p.at_symbol("(")) parts.push_back(group());
      if (parts.size() < 2) p.fail("expected '(' for a second operand");
      return is_union ? Region::union_of(std::move(parts)) : Region::intersection_of(std::move(parts));
    }
    if (p.at_word("complement")) {
      p.next();
      return Region::complement_of(group());
    }
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), at);
  }
  p.fail("expected a region (disc, annulus, halfplane, union, intersection, complement, all, empty)");
}

}  // namespace

Region parse_region(std::string_view text) {
  Parser p(text);
  Region r = region(p);
  if (!p.at_end()) p.fail("expected end of region");
  return r;
}

}  // namespace holocorr
