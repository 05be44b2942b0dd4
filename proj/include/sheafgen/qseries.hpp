#pragma once

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exactnum.hpp"

namespace sheafgen {

// Truncated series in q: exponents e <= trunc are exact, nothing is known above trunc.
class QSeries {
 public:
  using Map = std::map<BigRat, WRational>;

  explicit QSeries(BigRat trunc = 0, int s = kRootOrder) : s_(s), trunc_(std::move(trunc)) {}

  QSeries(Map coeffs, BigRat trunc, int s = kRootOrder) : s_(s), trunc_(std::move(trunc)) {
    for (auto& [e, c] : coeffs) {
      if (c.root_order() != s_) throw root_order_mismatch();
      if (e <= trunc_ && !c.is_zero()) c_.emplace(e, std::move(c));
    }
  }

  static QSeries one(const BigRat& trunc, int s = kRootOrder) { return monomial(0, WRational::integer(1, s), trunc); }

  static QSeries monomial(const BigRat& e, const WRational& c, const BigRat& trunc) {
    QSeries a(trunc, c.root_order());
    if (e <= trunc && !c.is_zero()) a.c_.emplace(e, c);
    return a;
  }

  int root_order() const { return s_; }
  const BigRat& trunc() const { return trunc_; }
  const Map& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  std::size_t size() const { return c_.size(); }

  // Smallest stored exponent; an empty series reports its truncation.
  BigRat leading_exponent() const { return c_.empty() ? trunc_ : c_.begin()->first; }

  WRational coefficient(const BigRat& e) const {
    if (e > trunc_) throw beyond_truncation("beyond truncation: q^" + e.get_str() + " requested, series known through q^" + trunc_.get_str());
    auto it = c_.find(e);
    return it == c_.end() ? WRational(s_) : it->second;
  }

  QSeries truncated(const BigRat& t) const {
    QSeries r(t < trunc_ ? t : trunc_, s_);
    for (const auto& [e, c] : c_) {
      if (e > r.trunc_) break;
      r.c_.emplace(e, c);
    }
    return r;
  }

  QSeries operator-() const {
    QSeries r(trunc_, s_);
    for (const auto& [e, c] : c_) r.c_.emplace(e, -c);
    return r;
  }

  friend QSeries operator+(const QSeries& a, const QSeries& b) { return add(a, b, false); }
  friend QSeries operator-(const QSeries& a, const QSeries& b) { return add(a, b, true); }
  friend QSeries operator*(const QSeries& a, const QSeries& b) { return mul(a, b); }

  QSeries& operator+=(const QSeries& o) { return *this = *this + o; }
  QSeries& operator-=(const QSeries& o) { return *this = *this - o; }
  QSeries& operator*=(const QSeries& o) { return *this = *this * o; }

  QSeries scaled(const WRational& x) const {
    if (x.root_order() != s_) throw root_order_mismatch();
    QSeries r(trunc_, s_);
    if (x.is_zero()) return r;
    for (const auto& [e, c] : c_) r.c_.emplace(e, c * x);
    return r;
  }

  QSeries scaled(const BigRat& x) const {
    QSeries r(trunc_, s_);
    if (x == 0) return r;
    for (const auto& [e, c] : c_) r.c_.emplace(e, c.scaled(x));
    return r;
  }

  // Multiplication by the monomial x * q^e.
  QSeries shifted(const BigRat& e, const WRational& x) const {
    QSeries r(trunc_ + e, s_);
    if (x.is_zero()) return r;
    for (const auto& [f, c] : c_) r.c_.emplace(f + e, x.is_one() ? c : c * x);
    return r;
  }

  QSeries inverse() const;

  // (z, tau) -> (m z, m tau): exponents times m, w -> w^m or -(-w)^m.
  QSeries scale_args(long m, bool twist) const {
    if (m < 1) throw domain_error("scale factor must be positive");
    QSeries r(trunc_ * m, s_);
    for (const auto& [e, c] : c_) r.c_.emplace(e * m, c.substitute_power(m, twist));
    return r;
  }

  QSeries rebased(int new_s) const {
    QSeries r(trunc_, new_s);
    for (const auto& [e, c] : c_) r.c_.emplace(e, c.rebased(new_s));
    return r;
  }

  std::complex<double> eval(std::complex<double> w0, std::complex<double> q0) const {
    std::complex<double> v = 0;
    for (const auto& [e, c] : c_) v += c.eval(w0) * std::pow(q0, e.get_d());
    return v;
  }

 private:
  friend class SeriesBuilder;

  static void check(const QSeries& a, const QSeries& b) {
    if (a.s_ != b.s_) throw root_order_mismatch();
  }

  static QSeries add(const QSeries& a, const QSeries& b, bool subtract) {
    check(a, b);
    QSeries r(a.trunc_ < b.trunc_ ? a.trunc_ : b.trunc_, a.s_);
    for (const auto& [e, c] : a.c_) {
      if (e > r.trunc_) break;
      r.c_.emplace(e, c);
    }
    for (const auto& [e, c] : b.c_) {
      if (e > r.trunc_) break;
      auto it = r.c_.find(e);
      if (it == r.c_.end()) {
        r.c_.emplace(e, subtract ? -c : c);
      } else {
        it->second = subtract ? it->second - c : it->second + c;
        if (it->second.is_zero()) r.c_.erase(it);
      }
    }
    return r;
  }

  static QSeries mul(const QSeries& a, const QSeries& b);

  int s_;
  BigRat trunc_;
  Map c_;
};

// Accumulates terms per exponent; denominators are grouped so each coefficient is normalised once.
class SeriesBuilder {
 public:
  explicit SeriesBuilder(BigRat trunc, int s = kRootOrder) : s_(s), trunc_(std::move(trunc)) {}

  const BigRat& trunc() const { return trunc_; }
  int root_order() const { return s_; }

  void add(const BigRat& e, const WRational& c) {
    if (e > trunc_ || c.is_zero()) return;
    slot(e).add(c);
  }

  void add_fraction(const BigRat& e, const WPoly& num, const WPoly& den) {
    if (e > trunc_ || num.is_zero()) return;
    slot(e).add_fraction(num, den);
  }

  void add_product(const BigRat& e, const WRational& a, const WRational& b) {
    if (e > trunc_) return;
    slot(e).add_product(a, b);
  }

  void add_series(const QSeries& a) {
    for (const auto& [e, c] : a.coefficients()) add(e, c);
  }

  QSeries build() const {
    QSeries r(trunc_, s_);
    for (const auto& [e, acc] : acc_) {
      WRational v = acc.value();
      if (!v.is_zero()) r.c_.emplace(e, std::move(v));
    }
    return r;
  }

 private:
  WRationalSum& slot(const BigRat& e) {
    auto it = acc_.find(e);
    if (it == acc_.end()) it = acc_.emplace(e, WRationalSum(s_)).first;
    return it->second;
  }

  int s_;
  BigRat trunc_;
  std::map<BigRat, WRationalSum> acc_;
};

inline QSeries QSeries::mul(const QSeries& a, const QSeries& b) {
  check(a, b);
  const BigRat la = a.leading_exponent(), lb = b.leading_exponent();
  BigRat t1 = a.trunc_ + lb, t2 = b.trunc_ + la;
  SeriesBuilder acc(t1 < t2 ? t1 : t2, a.s_);
  for (const auto& [ea, ca] : a.c_) {
    for (const auto& [eb, cb] : b.c_) {
      BigRat e = ea + eb;
      if (e > acc.trunc()) break;
      acc.add_product(e, ca, cb);
    }
  }
  return acc.build();
}

inline QSeries QSeries::inverse() const {
  if (c_.empty()) throw division_by_zero();
  const BigRat L = c_.begin()->first;
  const WRational inv0 = c_.begin()->second.inverse();
  const BigRat prec = trunc_ - L;
  std::vector<std::pair<BigRat, const WRational*>> gens;
  for (auto it = std::next(c_.begin()); it != c_.end(); ++it) gens.emplace_back(it->first - L, &it->second);

  std::map<BigRat, WRational> rel;
  std::set<BigRat> todo{BigRat(0)};
  while (!todo.empty()) {
    BigRat e = *todo.begin();
    todo.erase(todo.begin());
    if (e == 0) {
      rel.emplace(e, inv0);
    } else {
      WRationalSum acc(s_);
      for (const auto& [d, c] : gens) {
        if (d > e) break;
        auto it = rel.find(e - d);
        if (it != rel.end()) acc.add_product(*c, it->second);
      }
      WRational v = -(acc.value() * inv0);
      rel.emplace(e, std::move(v));
    }
    for (const auto& g : gens) {
      BigRat n = e + g.first;
      if (n > prec) break;
      todo.insert(std::move(n));
    }
  }
  QSeries r(prec - L, s_);
  for (auto& [e, c] : rel)
    if (!c.is_zero()) r.c_.emplace(e - L, std::move(c));
  return r;
}

inline QSeries invert(const QSeries& a) { return a.inverse(); }

// 1 / (1 - sign * x^xexp * q^B).
struct GeometricFactor {
  int sign;
  long xexp;
  BigRat B;
};

// Adds q^e0 * c0 / prod(factors) to out, expanding each factor in |q| < 1:
// B > 0 geometric in q; B < 0 via 1/(1-Wq^B) = -W^{-1}q^{-B}/(1-W^{-1}q^{-B}); B = 0 kept as 1/(1-W).
inline void add_geometric_expansion(SeriesBuilder& out, const BigRat& e0, const WPoly& c0,
                                    const std::vector<GeometricFactor>& factors) {
  const int s = out.root_order();
  const BigRat& T = out.trunc();
  if (e0 > T || c0.is_zero()) return;
  WPoly num = WPoly::constant(1, s);
  WPoly den = WPoly::constant(1, s);
  std::vector<std::pair<BigRat, WPoly>> terms{{e0, c0}};
  for (const auto& f : factors) {
    if (f.B == 0) {
      if (f.xexp == 0) {
        if (f.sign == 1) throw pole_error("denominator factor 1 - 1 vanishes identically");
        den *= BigInt(2);
      } else if (f.xexp > 0) {
        den *= WPoly::monomial(1, f.xexp, s) - WPoly::constant(f.sign, s);
        if (f.sign == 1) num = -num;
      } else {
        num *= WPoly::monomial(1, -f.xexp, s);
        den *= WPoly::monomial(1, -f.xexp, s) - WPoly::constant(f.sign, s);
      }
      continue;
    }
    int ratio_sign = f.sign;
    long ratio_x = f.xexp;
    BigRat step = f.B;
    int pre_sign = 1;
    long pre_x = 0;
    BigRat pre_q = 0;
    if (f.B < 0) {
      ratio_x = -f.xexp;
      step = -f.B;
      pre_sign = -f.sign;
      pre_x = -f.xexp;
      pre_q = -f.B;
    }
    std::vector<std::pair<BigRat, WPoly>> next;
    for (const auto& [e, p] : terms) {
      BigRat en = e + pre_q;
      if (en > T) continue;
      WPoly pn = p.shifted(pre_x);
      if (pre_sign < 0) pn = -pn;
      while (en <= T) {
        next.emplace_back(en, pn);
        en += step;
        pn = pn.shifted(ratio_x);
        if (ratio_sign < 0) pn = -pn;
      }
    }
    terms = std::move(next);
  }
  const bool trivial = num.is_one();
  for (const auto& [e, p] : terms) out.add_fraction(e, trivial ? p : p * num, den);
}

inline QSeries power(const QSeries& a, long n) {
  if (n < 0) return power(a.inverse(), -n);
  if (n == 0) return QSeries::one(a.trunc() - a.leading_exponent(), a.root_order());
  QSeries r = a;
  for (long i = 1; i < n; ++i) r = r * a;
  return r;
}

// First exponent within the common truncation where a and b differ.
inline std::optional<BigRat> first_difference(const QSeries& a, const QSeries& b) {
  const BigRat t = a.trunc() < b.trunc() ? a.trunc() : b.trunc();
  auto ia = a.coefficients().begin(), ib = b.coefficients().begin();
  const auto ea = a.coefficients().end(), eb = b.coefficients().end();
  while (true) {
    const bool da = ia == ea || ia->first > t;
    const bool db = ib == eb || ib->first > t;
    if (da && db) return std::nullopt;
    if (da) return ib->first;
    if (db) return ia->first;
    if (ia->first < ib->first) return ia->first;
    if (ib->first < ia->first) return ib->first;
    if (!(ia->second == ib->second)) return ia->first;
    ++ia;
    ++ib;
  }
}

inline bool agree(const QSeries& a, const QSeries& b) { return !first_difference(a, b); }

inline std::string exponent_text(const BigRat& e) { return "q^{" + e.get_str() + "}"; }

// Outcome of comparing two truncated series: equal through `through`, or the first exponent where they differ.
struct SeriesComparison {
  bool equal = false;
  BigRat through = 0;
  std::optional<BigRat> at;
  std::string lhs;
  std::string rhs;

  std::string describe() const {
    if (equal) return "equal through q^" + through.get_str();
    if (!at) return "known only through q^" + through.get_str();
    return "first difference at " + exponent_text(*at) + ": " + lhs + " vs " + rhs;
  }
};

// Equality through `required`; fails if either side is known to less than that.
inline SeriesComparison compare_series(const QSeries& a, const QSeries& b, const BigRat& required) {
  SeriesComparison c;
  c.through = a.trunc() < b.trunc() ? a.trunc() : b.trunc();
  if (c.through < required) return c;
  c.through = required;
  auto d = first_difference(a.truncated(required), b.truncated(required));
  if (!d) {
    c.equal = true;
    return c;
  }
  c.at = *d;
  c.lhs = a.coefficient(*d).str();
  c.rhs = b.coefficient(*d).str();
  return c;
}

// Exact text serialization: a header line and one "q^{p/q} : num / den" line per stored term.
inline std::string to_text(const QSeries& a) {
  std::ostringstream os;
  os << "# root_order " << a.root_order() << " trunc " << a.trunc().get_str() << "\n";
  for (const auto& [e, c] : a.coefficients()) os << exponent_text(e) << " : " << c.num().str() << " / " << c.den().str() << "\n";
  return os.str();
}

inline QSeries parse_series_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw domain_error("empty series text");
  std::istringstream head(line);
  std::string hash, k1, k2, tstr;
  int s = 0;
  if (!(head >> hash >> k1 >> s >> k2 >> tstr) || hash != "#" || k1 != "root_order" || k2 != "trunc")
    throw domain_error("malformed series header '" + line + "'");
  QSeries::Map m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto open = line.find("q^{"), close = line.find('}'), colon = line.find(" : "), slash = line.find(" / ");
    if (open != 0 || close == std::string::npos || colon == std::string::npos || slash == std::string::npos || slash < colon)
      throw domain_error("malformed series line '" + line + "'");
    BigRat e = parse_rat(line.substr(3, close - 3));
    WPoly num = WPoly::parse(line.substr(colon + 3, slash - colon - 3), s);
    WPoly den = WPoly::parse(line.substr(slash + 3), s);
    m.emplace(e, WRational(num, den));
  }
  return QSeries(std::move(m), parse_rat(tstr), s);
}

}  // namespace sheafgen
