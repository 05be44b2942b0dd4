#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "blocks.hpp"
#include "wallcross.hpp"

namespace sheafgen {

enum class Surface { Sigma1, P2 };

inline long euler_characteristic(Surface s) { return s == Surface::Sigma1 ? 4 : 3; }

// gamma = (r, c1, ch2). On Sigma1 c1 = b C - a f; on P2 c1 = d H.
struct ChernCharacter {
  Surface surface = Surface::P2;
  long r = 1;
  long b = 0;
  long a = 0;
  long d = 0;
  BigRat ch2 = 0;

  static ChernCharacter sigma1(long r, long a, long b, BigRat ch2) {
    return check({Surface::Sigma1, r, b, a, 0, std::move(ch2)});
  }
  static ChernCharacter sigma1_c2(long r, long a, long b, long c2) {
    ChernCharacter g{Surface::Sigma1, r, b, a, 0, 0};
    g.ch2 = g.c1_squared() / 2 - c2;
    return check(g);
  }
  static ChernCharacter p2(long r, long d, BigRat ch2) { return check({Surface::P2, r, 0, 0, d, std::move(ch2)}); }
  static ChernCharacter p2_c2(long r, long d, long c2) { return p2(r, d, rat(d * d, 2) - c2); }

  BigRat c1_squared() const {
    if (surface == Surface::P2) return BigRat(d * d);
    return BigRat(-b * b - 2 * a * b);
  }
  BigRat c1_dot_K() const {
    if (surface == Surface::P2) return BigRat(-3 * d);
    return BigRat(2 * a - b);
  }
  BigRat c2() const { return c1_squared() / 2 - ch2; }
  BigRat discriminant() const { return (c2() - rat(r - 1, 2 * r) * c1_squared()) / r; }
  // Exponent of q at which I(gamma) sits in the generating function: r Delta - r chi(S)/24.
  BigRat exponent() const { return r * discriminant() - rat(r * euler_characteristic(surface), 24); }
  // Complex dimension 2 r c2 - (r-1) c1^2 - r^2 chi(O_S) + 1 of the moduli space (chi(O_S) = 1 on both surfaces).
  BigRat expected_dimension() const { return 2 * r * c2() - (r - 1) * c1_squared() - r * r + 1; }

  bool same_c1_direction(const ChernCharacter& o) const {
    if (surface != o.surface) return false;
    if (surface == Surface::P2) return d * o.r == o.d * r;
    return b * o.r == o.b * r && a * o.r == o.a * r;
  }
  // gamma / m when integral (r, c1 divisible and c2 of the quotient integral).
  std::optional<ChernCharacter> divided(long m) const {
    if (m < 1 || r % m != 0 || b % m != 0 || a % m != 0 || d % m != 0) return std::nullopt;
    ChernCharacter g{surface, r / m, b / m, a / m, d / m, ch2 / m};
    if (!is_integral(g.c2())) return std::nullopt;
    return g;
  }
  std::string str() const {
    std::string c1 = surface == Surface::P2 ? std::to_string(d) + "H" : "(" + std::to_string(b) + "C-" + std::to_string(a) + "f)";
    return std::string(surface == Surface::P2 ? "P2" : "Sigma1") + "(r=" + std::to_string(r) + ", c1=" + c1 +
           ", ch2=" + ch2.get_str() + ")";
  }
  friend bool operator==(const ChernCharacter&, const ChernCharacter&) = default;

 private:
  static ChernCharacter check(ChernCharacter g) {
    if (g.r < 1) throw domain_error("rank must be positive");
    if (!is_integral(2 * g.ch2)) throw domain_error("2 ch2 must be an integer");
    if (!is_integral(g.c2())) throw domain_error("c2 of " + g.str() + " is not an integer");
    return g;
  }
};

// Reduced Hilbert polynomial chi(E(nJ))/r = quad n^2 + lin n + cst.
struct HilbertPoly {
  BigRat quad;
  BigRat lin;
  BigRat cst;
  friend bool operator==(const HilbertPoly&, const HilbertPoly&) = default;
};

inline HilbertPoly hilbert_poly(const ChernCharacter& g, const StabilityPoint& J) {
  BigRat JJ, JK, c1J;
  if (g.surface == Surface::P2) {
    // J = t H with t = m (n ignored on P2, the ample cone is a ray)
    JJ = J.m * J.m;
    JK = -3 * J.m;
    c1J = g.d * J.m;
  } else {
    JJ = J.m * J.m + 2 * J.m * J.n;
    JK = -3 * J.m - 2 * J.n;
    c1J = BigRat(g.b) * J.n - BigRat(g.a) * J.m;
  }
  if (JJ <= 0) throw domain_error("polarization is not ample");
  return {JJ / 2, c1J / g.r - JK / 2, (g.ch2 - g.c1_dot_K() / 2) / g.r + 1};
}

// Gieseker order: compare reduced Hilbert polynomials for large n (lexicographic from the top).
inline int gieseker_compare(const HilbertPoly& p, const HilbertPoly& q) {
  if (p.quad != q.quad) return p.quad < q.quad ? -1 : 1;
  if (p.lin != q.lin) return p.lin < q.lin ? -1 : 1;
  if (p.cst != q.cst) return p.cst < q.cst ? -1 : 1;
  return 0;
}

// phi^*(dH) - kC = (d-k) C + d f, i.e. (a,b) = (-d, d-k).
inline std::pair<long, long> pullback_c1(long d, long k) { return {-d, d - k}; }

inline BigRat b_rk_leading_exponent(long r, long k) {
  const long kk = ((k % r) + r) % r;
  return rat(kk * (r - kk), 2 * r) - rat(r, 24);
}

// H_{r,(a,b)}(J_{1,0}) / B_{r,k} through trunc.
inline QSeries h_over_b(long r, long a, long b, long k, const BigRat& trunc, const AssemblyOptions& opt, int s = kRootOrder) {
  const BigRat LB = b_rk_leading_exponent(r, k);
  QSeries H = h_sigma1_J10(r, a, b, trunc + LB, opt, s);
  if (H.is_zero()) return QSeries(trunc, s);
  const BigRat LH = H.leading_exponent();
  const BlockSource& blocks = opt.blocks ? *opt.blocks : direct_blocks();
  QSeries B = blocks.B(r, k, trunc - LH + 2 * LB, s);
  return (H * B.inverse()).truncated(trunc);
}

// H_{r,dH}(P2) = H_{r, phi^* dH - kC}(J_{1,0}) / B_{r,k}.
inline QSeries h_p2(long r, long d, long k, const BigRat& trunc, const AssemblyOptions& opt, int s = kRootOrder) {
  const auto [a, b] = pullback_c1(d, k);
  return h_over_b(r, a, b, k, trunc, opt, s);
}

inline QSeries h_p2(long r, long d, long k, const BigRat& trunc, unsigned jobs = 1, int s = kRootOrder) {
  AssemblyOptions opt;
  opt.jobs = jobs;
  return h_p2(r, d, k, trunc, opt, s);
}

inline WRational extract_I(const QSeries& H, const ChernCharacter& g) { return H.coefficient(g.exponent()); }

using Decomposition = std::vector<ChernCharacter>;

// Ordered decompositions gamma = sum gamma_i with every gamma_i = (r_i/r) gamma integral.
inline std::vector<Decomposition> equal_hilbert_decompositions(const ChernCharacter& g) {
  std::vector<Decomposition> out;
  for (const auto& comp : compositions(g.r)) {
    Decomposition dec;
    bool ok = true;
    for (long ri : comp.parts()) {
      const long q = g.r;
      if ((g.b * ri) % q || (g.a * ri) % q || (g.d * ri) % q) {
        ok = false;
        break;
      }
      ChernCharacter p{g.surface, ri, g.b * ri / q, g.a * ri / q, g.d * ri / q, g.ch2 * ri / q};
      if (!is_integral(p.c2())) {
        ok = false;
        break;
      }
      dec.push_back(p);
    }
    if (ok) out.push_back(std::move(dec));
  }
  return out;
}

// Where I(gamma) comes from: the coefficient itself and a lower bound on the exponents at which
// classes of the given rank and c1 can be non-zero.
struct InvariantSource {
  std::function<WRational(const ChernCharacter&)> I;
  std::function<BigRat(const ChernCharacter&)> min_exponent;
};

// Ordered decompositions into classes of equal mu-slope (c1_i = (r_i/r) c1) with every split of ch2
// for which each part lies at or above its minimal exponent. r Delta - r chi/24 is additive along such splits.
inline std::vector<Decomposition> equal_slope_decompositions(const ChernCharacter& g, const InvariantSource& src) {
  std::vector<Decomposition> out;
  const BigRat E = g.exponent();
  for (const auto& comp : compositions(g.r)) {
    const auto& rs = comp.parts();
    std::vector<ChernCharacter> base;
    bool ok = true;
    for (long ri : rs) {
      const long q = g.r;
      if ((g.b * ri) % q || (g.a * ri) % q || (g.d * ri) % q) {
        ok = false;
        break;
      }
      base.push_back({g.surface, ri, g.b * ri / q, g.a * ri / q, g.d * ri / q, 0});
    }
    if (!ok) continue;
    const std::size_t l = base.size();
    std::vector<BigRat> mins(l), offs(l);
    for (std::size_t i = 0; i < l; ++i) {
      // exponent(part) = c2_i - off_i
      ChernCharacter z = base[i];
      z.ch2 = z.c1_squared() / 2;
      offs[i] = -z.exponent();
      mins[i] = src.min_exponent(base[i]);
    }
    std::vector<BigRat> tailmin(l + 1, 0);
    for (std::size_t i = l; i-- > 0;) tailmin[i] = tailmin[i + 1] + mins[i];
    Decomposition cur(l);
    std::function<void(std::size_t, BigRat)> rec = [&](std::size_t i, BigRat rest) {
      if (i + 1 == l) {
        BigRat c2 = rest + offs[i];
        if (!is_integral(c2) || rest < mins[i]) return;
        cur[i] = base[i];
        cur[i].ch2 = cur[i].c1_squared() / 2 - c2;
        out.push_back(cur);
        return;
      }
      BigInt lo = ceil_of(mins[i] + offs[i]);
      for (BigInt c2 = lo;; ++c2) {
        BigRat e = BigRat(c2) - offs[i];
        if (e + tailmin[i + 1] > rest) break;
        cur[i] = base[i];
        cur[i].ch2 = cur[i].c1_squared() / 2 - BigRat(c2);
        rec(i + 1, rest - e);
      }
    };
    if (tailmin[0] <= E) rec(0, E);
  }
  return out;
}

enum class DecompositionRule { EqualSlope, EqualHilbert };

// Omega_bar(gamma) = sum over ordered decompositions (-1)^{l-1}/l prod I(gamma_i).
inline WRational omega_bar(const ChernCharacter& g, const InvariantSource& src,
                           DecompositionRule rule = DecompositionRule::EqualSlope, int s = kRootOrder) {
  const auto decs = rule == DecompositionRule::EqualSlope ? equal_slope_decompositions(g, src) : equal_hilbert_decompositions(g);
  WRationalSum acc(s);
  for (const auto& dec : decs) {
    WRational p = WRational::integer(1, s);
    for (const auto& part : dec) {
      p = p * src.I(part);
      if (p.is_zero()) break;
    }
    if (p.is_zero()) continue;
    const long l = static_cast<long>(dec.size());
    acc.add(p.scaled(rat(l % 2 == 1 ? 1 : -1, l)));
  }
  return acc.value();
}

inline int moebius(long n) {
  int mu = 1;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

// Omega(gamma, w) = sum_{m | gamma} mu(m)/m Omega_bar(gamma/m, -(-w)^m).
inline WRational omega(const ChernCharacter& g, const std::function<WRational(const ChernCharacter&)>& omega_bar_of) {
  WRational acc = omega_bar_of(g);
  for (long m = 2; m <= g.r; ++m) {
    const int mu = moebius(m);
    if (mu == 0) continue;
    auto q = g.divided(m);
    if (!q) continue;
    WRational ob = omega_bar_of(*q);
    if (ob.is_zero()) continue;
    acc = acc + ob.substitute_power(m, true).scaled(rat(mu, m));
  }
  return acc;
}

struct BettiRow {
  long c2 = 0;
  long dim = -1;                  // complex dimension; -1 for empty moduli
  std::vector<BigInt> betti;      // b_0, b_2, ..., b_{2 dim}
  std::vector<BigInt> odd_betti;  // b_1, b_3, ..., b_{2 dim - 1}
  BigInt euler = 0;

  // Half view: b_{2j} for 2j <= dim.
  std::vector<BigInt> lower_half() const {
    std::vector<BigInt> h;
    for (long j = 0; 2 * j <= dim; ++j) h.push_back(betti[j]);
    return h;
  }
};

// P(w) = (w - w^{-1}) Omega(gamma, w) = sum_n b_n w^{n - dim}.
inline BettiRow poincare_row(long c2, const WRational& Om) {
  const int s = Om.root_order();
  const WRational P = Om * WRational(WPoly::monomial(1, s, s) - WPoly::monomial(1, -s, s));
  BettiRow row;
  row.c2 = c2;
  if (P.is_zero()) return row;
  WRational::Laurent L;
  try {
    L = P.as_symmetric_laurent();
  } catch (const not_polynomial& e) {
    throw pipeline_error("P(c2=" + std::to_string(c2) + ") is not a Laurent polynomial: " + P.str());
  }
  if (!L.symmetric) throw pipeline_error("P(c2=" + std::to_string(c2) + ") is not symmetric under w -> 1/w: " + L.poly.str());
  for (const auto& t : L.poly.terms()) {
    if (t.exp % s != 0) throw pipeline_error("P(c2=" + std::to_string(c2) + ") has fractional w-powers");
    if (t.coeff < 0) throw pipeline_error("P(c2=" + std::to_string(c2) + ") has a negative coefficient");
  }
  row.dim = L.poly.high_exp() / s;
  for (long n = 0; n <= 2 * row.dim; ++n) {
    BigInt c = L.poly.coeff((n - row.dim) * s);
    if (n % 2 == 0)
      row.betti.push_back(c);
    else
      row.odd_betti.push_back(c);
    row.euler += (n % 2 == 0) ? c : BigInt(-c);
  }
  return row;
}

inline BigInt evaluate_at_minus_one(const BettiRow& row) { return row.dim % 2 == 0 ? row.euler : BigInt(-row.euler); }

// Lazily computed P2 generating functions H_{r,dH}, one per (r, d), grown on demand.
class P2SeriesCache {
 public:
  explicit P2SeriesCache(AssemblyOptions opt = {}, long k = 0, int s = kRootOrder) : opt_(std::move(opt)), k_(k), s_(s) {}

  const QSeries& get(long r, long d, const BigRat& trunc) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(r, d);
    auto it = cache_.find(key);
    if (it == cache_.end() || it->second.trunc() < trunc) {
      QSeries h = h_p2(r, d, k_, trunc, opt_, s_);
      it = cache_.insert_or_assign(key, std::move(h)).first;
    }
    return it->second;
  }

  // Leading exponent of H_{r,dH}; grows the truncation until a non-zero term appears.
  BigRat leading(long r, long d) {
    BigRat t = 1;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find({r, d});
      if (it != cache_.end() && !it->second.is_zero()) return it->second.leading_exponent();
      if (it != cache_.end()) t = it->second.trunc() + 1;
    }
    for (int step = 0; step < 16; ++step, t += 1) {
      const QSeries& h = get(r, d, t);
      if (!h.is_zero()) return h.leading_exponent();
    }
    throw pipeline_error("H_{" + std::to_string(r) + "," + std::to_string(d) + "H} has no terms in the searched range");
  }

  int root_order() const { return s_; }

 private:
  AssemblyOptions opt_;
  long k_;
  int s_;
  std::mutex mu_;
  std::map<std::pair<long, long>, QSeries> cache_;
};

// Source of I(gamma) on P2 backed by the cache; each series is grown to the exponent requested.
inline InvariantSource p2_source(P2SeriesCache& cache) {
  InvariantSource src;
  src.I = [&cache](const ChernCharacter& g) {
    const BigRat e = g.exponent();
    return cache.get(g.r, g.d, e).coefficient(e);
  };
  src.min_exponent = [&cache](const ChernCharacter& g) { return cache.leading(g.r, g.d); };
  return src;
}

inline WRational omega_p2(const ChernCharacter& g, P2SeriesCache& cache, DecompositionRule rule = DecompositionRule::EqualSlope) {
  const InvariantSource src = p2_source(cache);
  return omega(g, [&](const ChernCharacter& x) { return omega_bar(x, src, rule, cache.root_order()); });
}

// Rank-4 combination H_{4,2C+2f}(J_{1,0})/B_{4,0} - 1/2 H_{2,H}^2 + 1/2 H_{2,H}(2z,2tau).
inline QSeries rank4_generating_function(const BigRat& trunc, const AssemblyOptions& opt = {}, int s = kRootOrder) {
  QSeries h4 = h_p2(4, 2, 0, trunc, opt, s);
  const BigRat L2 = h_p2(2, 1, 0, 1, opt, s).leading_exponent();
  QSeries h2 = h_p2(2, 1, 0, std::max<BigRat>(trunc - L2, trunc / 2), opt, s);
  QSeries sq = (h2 * h2).scaled(rat(-1, 2));
  QSeries dbl = h2.scale_args(2, false).scaled(rat(1, 2));
  return (h4 + sq + dbl).truncated(trunc);
}

struct BettiTableOptions {
  AssemblyOptions assembly;
  long k = 0;               // blow-up twist used for every H_{r,dH}
  bool cross_check = true;  // for (r,d) = (4,2) also evaluate the rank-4 generating-function combination
};

inline std::vector<BettiRow> betti_table(long r, long d, long c2_min, long c2_max, const BettiTableOptions& opt = {},
                                         P2SeriesCache* shared = nullptr) {
  if (r < 1) throw domain_error("rank must be positive");
  if (c2_min > c2_max) throw domain_error("empty c2 range");
  P2SeriesCache local(opt.assembly, opt.k);
  P2SeriesCache& cache = shared ? *shared : local;
  std::vector<BettiRow> rows;
  std::optional<QSeries> gen;
  if (opt.cross_check && r == 4 && d == 2) gen = rank4_generating_function(ChernCharacter::p2_c2(r, d, c2_max).exponent(), opt.assembly);
  for (long c2 = c2_min; c2 <= c2_max; ++c2) {
    const ChernCharacter g = ChernCharacter::p2_c2(r, d, c2);
    const WRational Om = omega_p2(g, cache);
    if (gen) {
      const WRational G = gen->coefficient(g.exponent());
      if (!(G == Om))
        throw pipeline_error("c2=" + std::to_string(c2) + ": coefficientwise chain gives " + Om.str() +
                             " but the rank-4 generating function gives " + G.str());
    }
    rows.push_back(poincare_row(c2, Om));
  }
  return rows;
}

}  // namespace sheafgen
