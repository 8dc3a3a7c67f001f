#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pw::ordinal {

/// Countable ordinal in Cantor normal form: a sum of terms w^e * c with
/// strictly decreasing exponents and positive coefficients. The empty sum is 0.
///
/// Textual form: `0`, `5`, `w`, `w*3+2`, `w^2*2+1`, `w^(w+1)`. Exponents that
/// are not a plain natural or `w` are parenthesised.
class Ordinal {
 public:
  struct Term;

  Ordinal() = default;

  static Ordinal finite(std::uint64_t n);
  static Ordinal omega();
  /// w^exponent * coefficient
  static Ordinal power(const Ordinal& exponent, std::uint64_t coefficient = 1);
  /// Throws Error(Parse) unless terms are in normal form.
  static Ordinal from_terms(std::vector<Term> terms);
  static Ordinal parse(std::string_view text);

  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  bool is_successor() const;
  bool is_limit() const { return !is_zero() && !is_successor(); }
  /// Value of a finite ordinal; only meaningful when is_finite().
  std::uint64_t finite_value() const;

  const std::vector<Term>& terms() const { return terms_; }
  /// Exponent of the leading term (0 for finite ordinals).
  Ordinal leading_exponent() const;
  /// Nesting depth of exponents: 0 for finite, 1 for w*k+n, 2 for w^w ...
  int tower_height() const;

  Ordinal successor() const;
  /// Requires is_successor().
  Ordinal predecessor() const;
  /// The unique b with 1 + b == *this (this must be nonzero). Finite n gives
  /// n-1, infinite ordinals are fixed.
  Ordinal drop_one() const;
  /// n-th element of the canonical fundamental sequence of a limit ordinal.
  /// Strictly increasing in n and cofinal.
  Ordinal fundamental(std::uint64_t n) const;

  std::string str() const;

  friend Ordinal operator+(const Ordinal& a, const Ordinal& b);
  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);
  friend bool operator==(const Ordinal& a, const Ordinal& b);

 private:
  std::vector<Term> terms_;
};

struct Ordinal::Term {
  Ordinal exponent;
  std::uint64_t coefficient = 1;

  friend bool operator==(const Term&, const Term&) = default;
};

std::strong_ordering ordinal_cmp(const Ordinal& a, const Ordinal& b);

/// Ranks handled by the builders are kept below w^bound.
struct RankBound {
  int bound = 6;

  bool admits(const Ordinal& a) const;
  /// Throws Error(RankOverflow) when !admits(a).
  void check(const Ordinal& a, std::string_view context) const;
};

}  // namespace pw::ordinal
