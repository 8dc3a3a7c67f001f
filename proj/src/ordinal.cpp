#include "pantswork/ordinal.hpp"

#include <cctype>

#include "pantswork/error.hpp"

namespace pw {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedEncoding: return "MalformedEncoding";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::RankOverflow: return "RankOverflow";
    case ErrorKind::PerfectKernel: return "PerfectKernel";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::SlotOccupied: return "SlotOccupied";
    case ErrorKind::SelectorOutOfRange: return "SelectorOutOfRange";
    case ErrorKind::NotSeparating: return "NotSeparating";
    case ErrorKind::UnknownEdge: return "UnknownEdge";
    case ErrorKind::NotABiflute: return "NotABiflute";
    case ErrorKind::NoBoundarySlot: return "NoBoundarySlot";
    case ErrorKind::NoGluingSite: return "NoGluingSite";
    case ErrorKind::EmbeddingFailure: return "EmbeddingFailure";
    case ErrorKind::NonPositiveLength: return "NonPositiveLength";
    case ErrorKind::PathNotCarried: return "PathNotCarried";
    case ErrorKind::CurveNotCarried: return "CurveNotCarried";
    case ErrorKind::MapUndefinedOnCurve: return "MapUndefinedOnCurve";
    case ErrorKind::UnboundedFamily: return "UnboundedFamily";
    case ErrorKind::NoWitness: return "NoWitness";
    case ErrorKind::FiniteGenusComplement: return "FiniteGenusComplement";
  }
  return "Error";
}

}  // namespace pw

namespace pw::ordinal {

Ordinal Ordinal::finite(std::uint64_t n) {
  Ordinal o;
  if (n > 0) o.terms_.push_back(Term{Ordinal{}, n});
  return o;
}

Ordinal Ordinal::omega() { return power(finite(1)); }

Ordinal Ordinal::power(const Ordinal& exponent, std::uint64_t coefficient) {
  Ordinal o;
  if (coefficient > 0) o.terms_.push_back(Term{exponent, coefficient});
  return o;
}

Ordinal Ordinal::from_terms(std::vector<Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient == 0) throw Error(ErrorKind::Parse, "zero coefficient in ordinal");
    if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent))
      throw Error(ErrorKind::Parse, "ordinal exponents must strictly decrease");
  }
  Ordinal o;
  o.terms_ = std::move(terms);
  return o;
}

bool Ordinal::is_finite() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

bool Ordinal::is_successor() const {
  return !terms_.empty() && terms_.back().exponent.is_zero();
}

std::uint64_t Ordinal::finite_value() const {
  return terms_.empty() ? 0 : terms_[0].coefficient;
}

Ordinal Ordinal::leading_exponent() const {
  return terms_.empty() ? Ordinal{} : terms_.front().exponent;
}

int Ordinal::tower_height() const {
  if (is_finite()) return 0;
  return 1 + terms_.front().exponent.tower_height();
}

Ordinal Ordinal::successor() const { return *this + finite(1); }

Ordinal Ordinal::predecessor() const {
  if (!is_successor()) throw Error(ErrorKind::InvalidParameters, "predecessor of non-successor " + str());
  Ordinal o = *this;
  if (--o.terms_.back().coefficient == 0) o.terms_.pop_back();
  return o;
}

Ordinal Ordinal::drop_one() const {
  if (is_zero()) throw Error(ErrorKind::InvalidParameters, "drop_one of zero");
  if (is_finite()) return finite(finite_value() - 1);
  return *this;
}

Ordinal Ordinal::fundamental(std::uint64_t n) const {
  if (!is_limit()) throw Error(ErrorKind::InvalidParameters, "fundamental sequence of non-limit " + str());
  Ordinal base = *this;
  Term last = base.terms_.back();
  if (--base.terms_.back().coefficient == 0) base.terms_.pop_back();
  if (last.exponent.is_successor()) return base + power(last.exponent.predecessor(), n + 1);
  return base + power(last.exponent.fundamental(n));
}

namespace {

std::string exponent_str(const Ordinal& e) {
  std::string s = e.str();
  if (e.is_finite() || s == "w") return s;
  return "(" + s + ")";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Ordinal parse_all() {
    Ordinal o = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return o;
  }

 private:
  Ordinal sum() {
    std::vector<Ordinal::Term> terms;
    bool zero_seen = false;
    do {
      Ordinal::Term t = term();
      zero_seen = zero_seen || t.coefficient == 0;
      if (!terms.empty() && terms.back().exponent == t.exponent) {
        terms.back().coefficient += t.coefficient;
      } else {
        terms.push_back(std::move(t));
      }
    } while (accept('+'));
    // `0` alone denotes zero; zero terms may not appear inside sums.
    if (terms.size() == 1 && terms[0].coefficient == 0) return Ordinal{};
    if (zero_seen) fail("0 inside a sum");
    return Ordinal::from_terms(std::move(terms));
  }

  Ordinal::Term term() {
    skip_ws();
    if (accept('w')) {
      Ordinal e = Ordinal::finite(1);
      if (accept('^')) e = atom();
      std::uint64_t c = 1;
      if (accept('*')) c = nat();
      if (c == 0) fail("zero coefficient");
      return {e, c};
    }
    return {Ordinal{}, nat()};
  }

  Ordinal atom() {
    skip_ws();
    if (accept('(')) {
      Ordinal o = sum();
      if (!accept(')')) fail("expected ')'");
      return o;
    }
    if (accept('w')) return Ordinal::omega();
    return Ordinal::finite(nat());
  }

  std::uint64_t nat() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected natural number");
    return v;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse,
                "ordinal '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Ordinal Ordinal::parse(std::string_view text) { return Parser(text).parse_all(); }

std::string Ordinal::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += '+';
    if (t.exponent.is_zero()) {
      out += std::to_string(t.coefficient);
      continue;
    }
    out += 'w';
    if (!(t.exponent == finite(1))) out += "^" + exponent_str(t.exponent);
    if (t.coefficient > 1) out += "*" + std::to_string(t.coefficient);
  }
  return out;
}

Ordinal operator+(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const Ordinal& lead = b.terms_.front().exponent;
  Ordinal out;
  for (const auto& t : a.terms_) {
    if (t.exponent > lead) {
      out.terms_.push_back(t);
    } else if (t.exponent == lead) {
      out.terms_.push_back({t.exponent, t.coefficient + b.terms_.front().coefficient});
      out.terms_.insert(out.terms_.end(), b.terms_.begin() + 1, b.terms_.end());
      return out;
    } else {
      break;
    }
  }
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  return out;
}

std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.terms_[i].exponent <=> b.terms_[i].exponent; c != 0) return c;
    if (auto c = a.terms_[i].coefficient <=> b.terms_[i].coefficient; c != 0) return c;
  }
  return a.terms_.size() <=> b.terms_.size();
}

bool operator==(const Ordinal& a, const Ordinal& b) { return a.terms_ == b.terms_; }

std::strong_ordering ordinal_cmp(const Ordinal& a, const Ordinal& b) { return a <=> b; }

bool RankBound::admits(const Ordinal& a) const {
  return a < Ordinal::power(Ordinal::finite(static_cast<std::uint64_t>(bound)));
}

void RankBound::check(const Ordinal& a, std::string_view context) const {
  if (!admits(a))
    throw Error(ErrorKind::RankOverflow, std::string(context) + ": rank " + a.str() +
                                             " is not below w^" + std::to_string(bound));
}

}  // namespace pw::ordinal
