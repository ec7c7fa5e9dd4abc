#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "holocorr/correspondence.hpp"
#include "holocorr/region.hpp"

namespace holocorr {

enum class TokenKind { number, imaginary, identifier, symbol, end };

/// Token shared by the generator, polynomial and region languages. Numbers
/// are decimal literals; `3i` and `2.5i` lex as imaginary literals.
struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  std::size_t position = 0;
};

/// Throws ParseError on characters outside the languages.
std::vector<Token> tokenize(std::string_view text);

/// Arithmetic expression tree. Literals keep their exact decimal value.
struct Expr {
  enum class Kind { number, imaginary, variable, negate, add, subtract, multiply, divide, power };
  Kind kind = Kind::number;
  Rational value;
  std::string name;
  int exponent = 0;
  std::vector<Expr> args;
  std::size_t position = 0;

  bool operator==(const Expr& other) const;
};

/// Prints with the fewest parentheses that reparse to the same tree.
std::string to_string(const Expr& e);

struct GeneratorItem {
  int multiplicity = 1;
  /// Component enters through its adjoint (reverse graph).
  bool adjoint = false;
  Expr expr;
};

/// Parsed generator list: rational maps in z, or (after a `poly:` prefix)
/// exact polynomials in x and y.
struct GeneratorSpec {
  std::string source;
  bool poly_mode = false;
  std::vector<GeneratorItem> items;
  /// Map mode, parallel to items.
  std::vector<RationalMap> maps;
  /// Poly mode, parallel to items.
  std::vector<ExactBivarPoly> polys;

  Correspondence correspondence() const;
};

/// Grammar: items separated by `;`, each `[m] expr` or `[m] adjoint(expr)`
/// with optional multiplicity prefix; expressions use z, i, decimal
/// literals, + - * / ^ (integer exponents) and parentheses. Maps are reduced
/// exactly over Q(i) at parse time. Throws ParseError, or DegreeError for a
/// constant generator or, unless allow_deg1, a generator of degree 1.
GeneratorSpec parse_generators(std::string_view text, bool allow_deg1 = false);
std::string to_string(const GeneratorSpec& spec);

/// Exact polynomial in x and y with rational coefficients.
ExactBivarPoly parse_poly(std::string_view text);

/// Prefix region language:
///   disc RE IM R open|closed, disc inf R open|closed,
///   annulus R_IN R_OUT open|closed, halfplane NX NY OFFSET, all, empty,
///   union (A) (B) ..., intersection (A) (B) ..., complement (A).
Region parse_region(std::string_view text);

}  // namespace holocorr
