#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace sheafgen {

using BigInt = mpz_class;
using BigRat = mpq_class;

// x = w^{1/s}; s = 2 covers theta1(cz) with odd c and every Appell prefactor used here.
inline constexpr int kRootOrder = 2;

inline BigRat rat(long p, long q = 1) {
  BigRat r(p, q);
  r.canonicalize();
  return r;
}

inline BigInt floor_of(const BigRat& x) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f;
}

inline BigInt ceil_of(const BigRat& x) {
  BigInt f;
  mpz_cdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f;
}

inline bool is_integral(const BigRat& x) { return x.get_den() == 1; }

inline long to_long(const BigInt& x) {
  if (!x.fits_slong_p()) throw domain_error("integer does not fit in a machine word: " + x.get_str());
  return x.get_si();
}

inline long to_long(const BigRat& x) {
  if (!is_integral(x)) throw domain_error("expected an integer, got " + x.get_str());
  return to_long(x.get_num());
}

inline BigRat parse_rat(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw domain_error("empty rational");
  BigRat r;
  if (r.set_str(s, 10) != 0 || r.get_den() == 0) throw domain_error("malformed rational '" + s + "'");
  r.canonicalize();
  return r;
}

struct WTerm {
  long exp;
  BigInt coeff;
  friend bool operator==(const WTerm&, const WTerm&) = default;
};

namespace detail {

using Dense = std::vector<BigInt>;

inline void trim(Dense& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline BigInt content(const Dense& a) {
  BigInt g = 0;
  for (const auto& c : a) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

inline void make_primitive(Dense& a) {
  trim(a);
  if (a.empty()) return;
  BigInt g = content(a);
  if (a.back() < 0) g = -g;
  if (g != 1)
    for (auto& c : a) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

inline BigInt max_norm(const Dense& a) {
  BigInt m = 0;
  for (const auto& c : a)
    if (mpz_cmpabs(c.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(c);
  return m;
}

// Exact division in Z[y]; nullopt when b does not divide a.
inline std::optional<Dense> divexact(const Dense& a, const Dense& b) {
  if (a.empty()) return Dense{};
  if (b.empty()) throw division_by_zero();
  if (a.size() < b.size()) return std::nullopt;
  const std::size_t db = b.size() - 1;
  if (b[0] != 0 && !mpz_divisible_p(a[0].get_mpz_t(), b[0].get_mpz_t())) return std::nullopt;
  Dense r = a;
  Dense q(a.size() - db);
  const BigInt& lc = b.back();
  for (std::size_t i = q.size(); i-- > 0;) {
    BigInt& top = r[i + db];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), lc.get_mpz_t())) return std::nullopt;
    mpz_divexact(q[i].get_mpz_t(), top.get_mpz_t(), lc.get_mpz_t());
    for (std::size_t j = 0; j <= db; ++j)
      if (b[j] != 0) mpz_submul(r[i + j].get_mpz_t(), q[i].get_mpz_t(), b[j].get_mpz_t());
  }
  for (std::size_t i = 0; i < db; ++i)
    if (r[i] != 0) return std::nullopt;
  trim(q);
  return q;
}

inline Dense prem(Dense a, const Dense& b) {
  const std::size_t db = b.size() - 1;
  const BigInt& lc = b.back();
  trim(a);
  while (!a.empty() && a.size() - 1 >= db) {
    BigInt lead = a.back();
    std::size_t shift = a.size() - 1 - db;
    for (auto& c : a) c *= lc;
    for (std::size_t j = 0; j <= db; ++j) a[shift + j] -= lead * b[j];
    trim(a);
  }
  return a;
}

inline Dense gcd_prs(Dense a, Dense b) {
  make_primitive(a);
  make_primitive(b);
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    Dense r = prem(a, b);
    a = std::move(b);
    make_primitive(r);
    b = std::move(r);
  }
  make_primitive(a);
  return a;
}

inline BigInt eval_at(const Dense& a, const BigInt& xi) {
  BigInt v = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    v *= xi;
    v += a[i];
  }
  return v;
}

// Heuristic gcd by evaluation and xi-adic reconstruction, verified by trial division.
inline std::optional<Dense> gcd_heu(const Dense& a, const Dense& b) {
  BigInt xi = 2 * std::min(max_norm(a), max_norm(b)) + 29;
  const std::size_t deg = std::max(a.size(), b.size());
  for (int attempt = 0; attempt < 6; ++attempt) {
    if (mpz_sizeinbase(xi.get_mpz_t(), 2) * deg > 400000) break;
    BigInt g;
    BigInt va = eval_at(a, xi), vb = eval_at(b, xi);
    mpz_gcd(g.get_mpz_t(), va.get_mpz_t(), vb.get_mpz_t());
    Dense h;
    BigInt half = xi / 2;
    while (g != 0) {
      BigInt c;
      mpz_fdiv_r(c.get_mpz_t(), g.get_mpz_t(), xi.get_mpz_t());
      if (c > half) c -= xi;
      h.push_back(c);
      g -= c;
      mpz_divexact(g.get_mpz_t(), g.get_mpz_t(), xi.get_mpz_t());
    }
    make_primitive(h);
    if (!h.empty() && divexact(a, h) && divexact(b, h)) return h;
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

inline Dense gcd(Dense a, Dense b) {
  make_primitive(a);
  make_primitive(b);
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.size() == 1 || b.size() == 1) return Dense{BigInt(1)};
  if (a == b) return a;
  if (a.size() >= b.size() && divexact(a, b)) return b;
  if (b.size() > a.size() && divexact(b, a)) return a;
  if (auto h = gcd_heu(a, b)) return *h;
  return gcd_prs(std::move(a), std::move(b));
}

}  // namespace detail

class WPoly {
 public:
  explicit WPoly(int root_order = kRootOrder) : s_(root_order) {
    if (s_ < 1) throw domain_error("root_order must be positive");
  }

  static WPoly constant(const BigInt& c, int s = kRootOrder) { return monomial(c, 0, s); }

  static WPoly monomial(const BigInt& c, long exp, int s = kRootOrder) {
    WPoly p(s);
    if (c != 0) p.t_.push_back({exp, c});
    return p;
  }

  static WPoly from_terms(std::vector<WTerm> terms, int s = kRootOrder) {
    std::sort(terms.begin(), terms.end(), [](const WTerm& a, const WTerm& b) { return a.exp < b.exp; });
    WPoly p(s);
    for (auto& t : terms) {
      if (!p.t_.empty() && p.t_.back().exp == t.exp)
        p.t_.back().coeff += t.coeff;
      else
        p.t_.push_back(std::move(t));
      if (p.t_.back().coeff == 0) p.t_.pop_back();
    }
    return p;
  }

  int root_order() const { return s_; }
  bool is_zero() const { return t_.empty(); }
  std::size_t size() const { return t_.size(); }
  const std::vector<WTerm>& terms() const { return t_; }
  long low_exp() const { return t_.front().exp; }
  long high_exp() const { return t_.back().exp; }
  const BigInt& leading_coeff() const { return t_.back().coeff; }
  bool is_monomial() const { return t_.size() == 1; }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].exp == 0); }
  bool is_one() const { return t_.size() == 1 && t_[0].exp == 0 && t_[0].coeff == 1; }

  BigInt coeff(long exp) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), exp, [](const WTerm& a, long e) { return a.exp < e; });
    return (it != t_.end() && it->exp == exp) ? it->coeff : BigInt(0);
  }

  BigInt content() const {
    BigInt g = 0;
    for (const auto& t : t_) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_mpz_t());
      if (g == 1) break;
    }
    return g;
  }

  WPoly shifted(long k) const {
    WPoly p = *this;
    for (auto& t : p.t_) t.exp += k;
    return p;
  }

  WPoly operator-() const {
    WPoly p = *this;
    for (auto& t : p.t_) t.coeff = -t.coeff;
    return p;
  }

  WPoly& operator+=(const WPoly& o) { return *this = add(*this, o, false); }
  WPoly& operator-=(const WPoly& o) { return *this = add(*this, o, true); }
  WPoly& operator*=(const WPoly& o) { return *this = mul(*this, o); }

  WPoly& operator*=(const BigInt& c) {
    if (c == 0) {
      t_.clear();
    } else if (c != 1) {
      for (auto& t : t_) t.coeff *= c;
    }
    return *this;
  }

  friend WPoly operator+(const WPoly& a, const WPoly& b) { return add(a, b, false); }
  friend WPoly operator-(const WPoly& a, const WPoly& b) { return add(a, b, true); }
  friend WPoly operator*(const WPoly& a, const WPoly& b) { return mul(a, b); }
  friend WPoly operator*(WPoly a, const BigInt& c) { return a *= c; }

  WPoly divexact(const BigInt& c) const {
    WPoly p = *this;
    for (auto& t : p.t_) mpz_divexact(t.coeff.get_mpz_t(), t.coeff.get_mpz_t(), c.get_mpz_t());
    return p;
  }

  // x^e -> sign * x^{m e}; with twist and even m the sign is (-1)^{e/s} (w -> -(-w)^m).
  WPoly substitute_power(long m, bool twist) const {
    if (m < 1) throw domain_error("substitution power must be positive");
    WPoly p(s_);
    p.t_.reserve(t_.size());
    for (const auto& t : t_) {
      BigInt c = t.coeff;
      if (twist && m % 2 == 0) {
        if (t.exp % s_ != 0) throw domain_error("twisted substitution of a fractional w-power");
        if (((t.exp / s_) % 2 + 2) % 2 == 1) c = -c;
      }
      p.t_.push_back({t.exp * m, std::move(c)});
    }
    return p;
  }

  WPoly rebased(int new_s) const {
    if (new_s % s_ != 0) throw domain_error("re-basing requires a multiple of the current root_order");
    WPoly p = *this;
    p.s_ = new_s;
    const long f = new_s / s_;
    for (auto& t : p.t_) t.exp *= f;
    return p;
  }

  std::complex<double> eval_x(std::complex<double> x) const {
    std::complex<double> v = 0;
    for (const auto& t : t_) v += t.coeff.get_d() * std::pow(x, static_cast<double>(t.exp));
    return v;
  }

  double abs_bound_x(double absx) const {
    double v = 0;
    for (const auto& t : t_) v += std::fabs(t.coeff.get_d()) * std::pow(absx, static_cast<double>(t.exp));
    return v;
  }

  friend bool operator==(const WPoly& a, const WPoly& b) { return a.s_ == b.s_ && a.t_ == b.t_; }

  // Text form: "c*x^e" terms in ascending exponent joined by " + "; zero is "0".
  std::string str() const {
    if (t_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i) out += " + ";
      out += t_[i].coeff.get_str() + "*x^" + std::to_string(t_[i].exp);
    }
    return out;
  }

  static WPoly parse(std::string_view text, int s = kRootOrder) {
    std::string str(text);
    str.erase(std::remove_if(str.begin(), str.end(), [](unsigned char c) { return std::isspace(c); }), str.end());
    if (str == "0") return WPoly(s);
    std::vector<WTerm> terms;
    std::size_t pos = 0;
    while (pos < str.size()) {
      std::size_t next = str.find('+', pos);
      while (next != std::string::npos && next > 0 && str[next - 1] == '^') next = str.find('+', next + 1);
      std::string tok = str.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      auto star = tok.find("*x^");
      if (star == std::string::npos) throw domain_error("malformed polynomial term '" + tok + "'");
      BigInt c;
      if (c.set_str(tok.substr(0, star), 10) != 0) throw domain_error("malformed coefficient '" + tok + "'");
      std::size_t used = 0;
      long e = 0;
      try {
        e = std::stol(tok.substr(star + 3), &used);
      } catch (const std::exception&) {
        throw domain_error("malformed exponent '" + tok + "'");
      }
      if (used != tok.size() - star - 3) throw domain_error("malformed exponent '" + tok + "'");
      terms.push_back({e, c});
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return from_terms(std::move(terms), s);
  }

 private:
  static void check(const WPoly& a, const WPoly& b) {
    if (a.s_ != b.s_) throw root_order_mismatch();
  }

  static WPoly add(const WPoly& a, const WPoly& b, bool subtract) {
    check(a, b);
    WPoly p(a.s_);
    p.t_.reserve(a.t_.size() + b.t_.size());
    std::size_t i = 0, j = 0;
    while (i < a.t_.size() || j < b.t_.size()) {
      if (j == b.t_.size() || (i < a.t_.size() && a.t_[i].exp < b.t_[j].exp)) {
        p.t_.push_back(a.t_[i++]);
      } else if (i == a.t_.size() || b.t_[j].exp < a.t_[i].exp) {
        p.t_.push_back({b.t_[j].exp, subtract ? BigInt(-b.t_[j].coeff) : b.t_[j].coeff});
        ++j;
      } else {
        BigInt c = subtract ? BigInt(a.t_[i].coeff - b.t_[j].coeff) : BigInt(a.t_[i].coeff + b.t_[j].coeff);
        if (c != 0) p.t_.push_back({a.t_[i].exp, std::move(c)});
        ++i;
        ++j;
      }
    }
    return p;
  }

  static WPoly mul(const WPoly& a, const WPoly& b) {
    check(a, b);
    WPoly p(a.s_);
    if (a.t_.empty() || b.t_.empty()) return p;
    if (a.t_.size() == 1 || b.t_.size() == 1) {
      const WPoly& m = a.t_.size() == 1 ? a : b;
      const WPoly& o = a.t_.size() == 1 ? b : a;
      p.t_.reserve(o.t_.size());
      for (const auto& t : o.t_) p.t_.push_back({t.exp + m.t_[0].exp, t.coeff * m.t_[0].coeff});
      return p;
    }
    const long lo = a.low_exp() + b.low_exp();
    const long span = a.high_exp() + b.high_exp() - lo + 1;
    const double work = static_cast<double>(a.t_.size()) * static_cast<double>(b.t_.size());
    if (static_cast<double>(span) <= 8.0 * work + 64.0) {
      detail::Dense acc(static_cast<std::size_t>(span));
      for (const auto& x : a.t_)
        for (const auto& y : b.t_)
          mpz_addmul(acc[x.exp + y.exp - lo].get_mpz_t(), x.coeff.get_mpz_t(), y.coeff.get_mpz_t());
      for (long i = 0; i < span; ++i)
        if (acc[i] != 0) p.t_.push_back({lo + i, std::move(acc[i])});
      return p;
    }
    std::map<long, BigInt> acc;
    for (const auto& x : a.t_)
      for (const auto& y : b.t_) mpz_addmul(acc[x.exp + y.exp].get_mpz_t(), x.coeff.get_mpz_t(), y.coeff.get_mpz_t());
    for (auto& [e, c] : acc)
      if (c != 0) p.t_.push_back({e, std::move(c)});
    return p;
  }

  int s_;
  std::vector<WTerm> t_;
};

struct WPolyLess {
  bool operator()(const WPoly& a, const WPoly& b) const {
    if (a.root_order() != b.root_order()) return a.root_order() < b.root_order();
    if (a.size() != b.size()) return a.size() < b.size();
    const auto& x = a.terms();
    const auto& y = b.terms();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].exp != y[i].exp) return x[i].exp < y[i].exp;
      int c = cmp(x[i].coeff, y[i].coeff);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

namespace detail {

// Exponent stride shared by a and b relative to their lowest exponents.
inline long common_stride(const WPoly& a, const WPoly& b) {
  long g = 0;
  for (const auto& t : a.terms()) g = std::gcd(g, t.exp - a.low_exp());
  for (const auto& t : b.terms()) g = std::gcd(g, t.exp - b.low_exp());
  return g == 0 ? 1 : g;
}

inline Dense to_dense(const WPoly& p, long stride) {
  Dense d(static_cast<std::size_t>((p.high_exp() - p.low_exp()) / stride + 1));
  for (const auto& t : p.terms()) d[(t.exp - p.low_exp()) / stride] = t.coeff;
  return d;
}

inline WPoly from_dense(const Dense& d, long low, long stride, int s) {
  std::vector<WTerm> terms;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] != 0) terms.push_back({low + static_cast<long>(i) * stride, d[i]});
  return WPoly::from_terms(std::move(terms), s);
}

}  // namespace detail

// Laurent quotient a/b when b divides a in Z[x, 1/x]; nullopt otherwise.
inline std::optional<WPoly> exact_quotient(const WPoly& a, const WPoly& b) {
  if (b.is_zero()) throw division_by_zero();
  if (a.root_order() != b.root_order()) throw root_order_mismatch();
  if (a.is_zero()) return WPoly(a.root_order());
  if (b.is_monomial()) {
    const BigInt& c = b.terms()[0].coeff;
    for (const auto& t : a.terms())
      if (!mpz_divisible_p(t.coeff.get_mpz_t(), c.get_mpz_t())) return std::nullopt;
    return a.divexact(c).shifted(-b.low_exp());
  }
  const long g = detail::common_stride(a, b);
  auto q = detail::divexact(detail::to_dense(a, g), detail::to_dense(b, g));
  if (!q) return std::nullopt;
  return detail::from_dense(*q, a.low_exp() - b.low_exp(), g, a.root_order());
}

// Primitive gcd normalised to lowest exponent 0 and positive leading coefficient.
inline WPoly primitive_gcd(const WPoly& a, const WPoly& b) {
  const int s = a.root_order();
  if (a.is_zero() && b.is_zero()) return WPoly::constant(1, s);
  if (a.is_zero() || b.is_zero()) {
    const WPoly& p = a.is_zero() ? b : a;
    WPoly q = p.shifted(-p.low_exp()).divexact(p.content());
    return q.leading_coeff() < 0 ? -q : q;
  }
  if (a.is_monomial() || b.is_monomial()) return WPoly::constant(1, s);
  const long g = detail::common_stride(a, b);
  auto d = detail::gcd(detail::to_dense(a, g), detail::to_dense(b, g));
  return detail::from_dense(d, 0, g, s);
}

inline WPoly full_gcd(const WPoly& a, const WPoly& b) {
  BigInt c;
  BigInt ca = a.content(), cb = b.content();
  mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  return primitive_gcd(a, b) * c;
}

class WRational {
 public:
  explicit WRational(int s = kRootOrder) : num_(s), den_(WPoly::constant(1, s)) {}

  WRational(WPoly num, WPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (num_.root_order() != den_.root_order()) throw root_order_mismatch();
    canonicalize();
  }

  explicit WRational(WPoly p) : num_(std::move(p)), den_(WPoly::constant(1, num_.root_order())) {}

  static WRational integer(const BigInt& c, int s = kRootOrder) { return WRational(WPoly::constant(c, s)); }

  static WRational scalar(const BigRat& c, int s = kRootOrder) {
    return WRational(WPoly::constant(c.get_num(), s), WPoly::constant(c.get_den(), s));
  }

  static WRational x_monomial(const BigInt& c, long xexp, int s = kRootOrder) {
    return WRational(WPoly::monomial(c, xexp, s));
  }

  // c * w^{wexp}; wexp * s must be an integer.
  static WRational w_monomial(const BigInt& c, const BigRat& wexp, int s = kRootOrder) {
    BigRat x = wexp * s;
    if (!is_integral(x)) throw domain_error("w-power " + wexp.get_str() + " not representable at root_order " + std::to_string(s));
    return x_monomial(c, to_long(x), s);
  }

  const WPoly& num() const { return num_; }
  const WPoly& den() const { return den_; }
  int root_order() const { return num_.root_order(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }

  WRational operator-() const { return WRational(-num_, den_, raw{}); }

  friend WRational operator+(const WRational& a, const WRational& b) { return add(a, b, false); }
  friend WRational operator-(const WRational& a, const WRational& b) { return add(a, b, true); }

  friend WRational operator*(const WRational& a, const WRational& b) {
    check(a, b);
    if (a.is_zero() || b.is_zero()) return WRational(a.root_order());
    if (a.den_.is_one() && b.den_.is_one()) return WRational(a.num_ * b.num_, a.den_, raw{});
    return WRational(a.num_ * b.num_, a.den_ * b.den_);
  }

  friend WRational operator/(const WRational& a, const WRational& b) { return a * b.inverse(); }

  WRational& operator+=(const WRational& o) { return *this = *this + o; }
  WRational& operator-=(const WRational& o) { return *this = *this - o; }
  WRational& operator*=(const WRational& o) { return *this = *this * o; }

  WRational scaled(const BigRat& c) const {
    if (c == 0 || is_zero()) return WRational(root_order());
    WRational r(num_ * c.get_num(), den_ * c.get_den(), raw{});
    r.normalize_content();
    return r;
  }

  WRational inverse() const {
    if (is_zero()) throw division_by_zero();
    return WRational(den_, num_);
  }

  WRational substitute_power(long m, bool twist) const {
    return WRational(num_.substitute_power(m, twist), den_.substitute_power(m, twist));
  }

  WRational rebased(int new_s) const { return WRational(num_.rebased(new_s), den_.rebased(new_s), raw{}); }

  struct Laurent {
    WPoly poly;
    bool symmetric;
  };

  Laurent as_symmetric_laurent() const {
    if (!den_.is_constant()) throw not_polynomial("not polynomial: denominator " + den_.str() + " does not divide the numerator");
    if (!den_.is_one()) throw not_polynomial("not polynomial: non-integral coefficients");
    bool sym = true;
    for (const auto& t : num_.terms())
      if (num_.coeff(-t.exp) != t.coeff) {
        sym = false;
        break;
      }
    return {num_, sym};
  }

  std::complex<double> eval(std::complex<double> w0) const {
    const std::complex<double> x = std::pow(w0, 1.0 / root_order());
    const std::complex<double> d = den_.eval_x(x);
    const double scale = den_.abs_bound_x(std::abs(x));
    if (std::abs(d) <= 1e-12 * scale || std::abs(d) == 0.0) throw pole_error("evaluation too close to a pole of the denominator");
    return num_.eval_x(x) / d;
  }

  friend bool operator==(const WRational& a, const WRational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  std::string str() const { return num_.str() + " / " + den_.str(); }

 private:
  struct raw {};
  WRational(WPoly num, WPoly den, raw) : num_(std::move(num)), den_(std::move(den)) {}

  static void check(const WRational& a, const WRational& b) {
    if (a.root_order() != b.root_order()) throw root_order_mismatch();
  }

  static WRational add(const WRational& a, const WRational& b, bool subtract) {
    check(a, b);
    if (b.is_zero()) return a;
    if (a.is_zero()) return subtract ? -b : b;
    if (a.den_ == b.den_) {
      WPoly n = subtract ? a.num_ - b.num_ : a.num_ + b.num_;
      if (a.den_.is_one()) return WRational(std::move(n), a.den_, raw{});
      return WRational(std::move(n), a.den_);
    }
    WPoly g = full_gcd(a.den_, b.den_);
    WPoly da = *exact_quotient(a.den_, g);
    WPoly db = *exact_quotient(b.den_, g);
    WPoly n = subtract ? a.num_ * db - b.num_ * da : a.num_ * db + b.num_ * da;
    return WRational(std::move(n), a.den_ * db);
  }

  void normalize_content() {
    BigInt cn = num_.content(), cd = den_.content(), g;
    mpz_gcd(g.get_mpz_t(), cn.get_mpz_t(), cd.get_mpz_t());
    if (den_.leading_coeff() < 0) g = -g;
    if (g != 1) {
      num_ = num_.divexact(g);
      den_ = den_.divexact(g);
    }
  }

  void canonicalize() {
    const int s = num_.root_order();
    if (den_.is_zero()) throw division_by_zero();
    if (num_.is_zero()) {
      den_ = WPoly::constant(1, s);
      return;
    }
    if (den_.low_exp() != 0) {
      const long k = den_.low_exp();
      num_ = num_.shifted(-k);
      den_ = den_.shifted(-k);
    }
    if (!den_.is_monomial() && !num_.is_monomial()) {
      const BigInt cd = den_.content();
      WPoly pd = den_.divexact(cd);
      if (auto q = exact_quotient(num_, pd)) {
        num_ = std::move(*q);
        den_ = WPoly::constant(cd, s);
      } else {
        WPoly g = primitive_gcd(num_, den_);
        if (!g.is_constant()) {
          num_ = *exact_quotient(num_, g);
          den_ = *exact_quotient(den_, g);
        }
      }
    }
    normalize_content();
  }

  WPoly num_;
  WPoly den_;
};

// Sum of many WRationals grouped by denominator so that gcds run once per group.
class WRationalSum {
 public:
  explicit WRationalSum(int s = kRootOrder) : s_(s) {}

  void add(const WRational& x) {
    if (x.is_zero()) return;
    add_fraction(x.num(), x.den());
  }

  void add_product(const WRational& a, const WRational& b) {
    if (a.is_zero() || b.is_zero()) return;
    if (a.den().is_one()) {
      add_fraction(a.num() * b.num(), b.den());
    } else if (b.den().is_one()) {
      add_fraction(a.num() * b.num(), a.den());
    } else {
      add_fraction(a.num() * b.num(), a.den() * b.den());
    }
  }

  // den must have lowest exponent 0 and positive leading coefficient.
  void add_fraction(const WPoly& num, const WPoly& den) {
    if (num.root_order() != s_ || den.root_order() != s_) throw root_order_mismatch();
    if (num.is_zero()) return;
    auto it = groups_.find(den);
    if (it == groups_.end())
      groups_.emplace(den, num);
    else
      it->second += num;
  }

  bool empty() const { return groups_.empty(); }

  WRational value() const {
    std::optional<WPoly> N, D;
    for (const auto& [d, n] : groups_) {
      if (n.is_zero()) continue;
      if (!N) {
        N = n;
        D = d;
        continue;
      }
      if (*D == d) {
        *N += n;
        continue;
      }
      WPoly g = full_gcd(*D, d);
      WPoly dd = *exact_quotient(d, g);
      WPoly DD = *exact_quotient(*D, g);
      *N = *N * dd + n * DD;
      *D = *D * dd;
    }
    if (!N || N->is_zero()) return WRational(s_);
    return WRational(std::move(*N), std::move(*D));
  }

 private:
  int s_;
  std::map<WPoly, WPoly, WPolyLess> groups_;
};

}  // namespace sheafgen
