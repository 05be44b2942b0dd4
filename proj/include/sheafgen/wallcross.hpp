#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "qseries.hpp"

namespace sheafgen {

inline BigRat fractional_part(const BigRat& x) { return x - BigRat(floor_of(x)); }

class Composition {
 public:
  Composition(std::vector<long> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw domain_error("composition needs at least one part");
    for (long p : parts_)
      if (p < 1) throw domain_error("composition parts must be positive");
  }
  Composition(std::initializer_list<long> parts) : Composition(std::vector<long>(parts)) {}

  const std::vector<long>& parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }
  long operator[](std::size_t i) const { return parts_[i]; }
  long rank() const {
    long r = 0;
    for (long p : parts_) r += p;
    return r;
  }
  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
    return s + ")";
  }
  friend bool operator==(const Composition&, const Composition&) = default;

 private:
  std::vector<long> parts_;
};

// All ordered compositions of r, in lexicographic order of parts.
inline std::vector<Composition> compositions(long r) {
  std::vector<Composition> out;
  std::vector<long> cur;
  std::function<void(long)> rec = [&](long rest) {
    if (rest == 0) {
      out.emplace_back(cur);
      return;
    }
    for (long f = 1; f <= rest; ++f) {
      cur.push_back(f);
      rec(rest - f);
      cur.pop_back();
    }
  };
  if (r >= 1) rec(r);
  return out;
}

// J_{m,n} = m(C+f) + n f on Sigma_1.
struct StabilityPoint {
  BigRat m;
  BigRat n;
};

// c1 = b C - a f with C^2 = -1, f^2 = 0, C.f = 1.
struct SheafClassSigma1 {
  long r;
  BigInt b;
  BigInt a;
  BigRat ch2;

  BigRat c1_squared() const { return BigRat(-b * b - 2 * a * b); }
  BigRat c2() const { return c1_squared() / 2 - ch2; }
  BigRat discriminant() const { return (c2() - rat(r - 1, 2 * r) * c1_squared()) / r; }
  BigRat slope(const StabilityPoint& J) const { return (BigRat(b) * J.n - BigRat(a) * J.m) / r; }
};

// Ordered value types that s_function compares: partial-sum slopes need ranks, so callers pass
// phi_J of each part and phi_J' of the left/right partial sums at each cut.
template <class T, class U>
int s_function_cuts(const std::vector<T>& phiJ, const std::vector<U>& left, const std::vector<U>& right) {
  int sign = 1;
  for (std::size_t i = 0; i + 1 < phiJ.size(); ++i) {
    const bool a = phiJ[i] <= phiJ[i + 1] && left[i] > right[i];
    const bool b = phiJ[i] > phiJ[i + 1] && left[i] <= right[i];
    if (a)
      sign = -sign;
    else if (!b)
      return 0;
  }
  return sign;
}

// A class gamma_i through its rank and the degrees c1.J, c1.J'.
struct SlopeData {
  BigInt rank;
  BigRat deg_J;
  BigRat deg_Jp;
};

struct SlopeCuts {
  std::vector<BigRat> phiJ;
  std::vector<BigRat> left;
  std::vector<BigRat> right;
};

inline SlopeCuts slope_cuts(const std::vector<SlopeData>& g) {
  SlopeCuts c;
  BigInt rt = 0;
  BigRat dt = 0;
  for (const auto& x : g) {
    if (x.rank <= 0) throw domain_error("slope data needs positive ranks");
    c.phiJ.push_back(x.deg_J / BigRat(x.rank));
    rt += x.rank;
    dt += x.deg_Jp;
  }
  BigInt rl = 0;
  BigRat dl = 0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    rl += g[i].rank;
    dl += g[i].deg_Jp;
    c.left.push_back(dl / BigRat(rl));
    c.right.push_back((dt - dl) / BigRat(rt - rl));
  }
  return c;
}

inline int s_function(const std::vector<SlopeData>& g) {
  SlopeCuts c = slope_cuts(g);
  return s_function_cuts(c.phiJ, c.left, c.right);
}

inline int sgn(const BigRat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline BigRat minimal_gap(const SlopeCuts& c) {
  std::optional<BigRat> m;
  auto consider = [&](const BigRat& d) {
    if (d == 0) return;
    BigRat a = abs(d);
    if (!m || a < *m) m = a;
  };
  for (std::size_t i = 0; i + 1 < c.phiJ.size(); ++i) {
    consider(c.phiJ[i] - c.phiJ[i + 1]);
    consider(c.left[i] - c.right[i]);
  }
  return m ? *m : BigRat(1);
}

// 2^{1-l} prod_{i>=2} (sgn(phiJ(g_{i-1}) - phiJ(g_i) - v1) - sgn(phiJ'(left) - phiJ'(right) - v2)).
inline int s_sign_product(const std::vector<SlopeData>& g, std::optional<BigRat> v1 = std::nullopt,
                          std::optional<BigRat> v2 = std::nullopt) {
  SlopeCuts c = slope_cuts(g);
  const BigRat gap = minimal_gap(c);
  if (!v1) v1 = gap / 2;
  if (!v2) v2 = gap / 2;
  if (*v1 <= 0 || *v2 <= 0 || *v1 >= gap || *v2 >= gap)
    throw domain_error("tie-break offset must lie strictly between 0 and the minimal slope gap " + gap.get_str());
  long prod = 1;
  for (std::size_t i = 0; i + 1 < c.phiJ.size(); ++i) {
    BigRat d1 = c.phiJ[i] - c.phiJ[i + 1] - *v1;
    BigRat d2 = c.left[i] - c.right[i] - *v2;
    prod *= sgn(d1) - sgn(d2);
    if (prod == 0) return 0;
  }
  return static_cast<int>(prod / (1L << (c.phiJ.size() - 1)));
}

namespace detail {

struct PsiSetup {
  std::vector<long> r;
  long rank;
  std::vector<BigRat> fr;  // fr[i] for i >= 1 (0-based), fr[0] unused
};

inline PsiSetup psi_setup(const Composition& comp, long a) {
  PsiSetup p;
  p.r = comp.parts();
  p.rank = comp.rank();
  const std::size_t l = p.r.size();
  p.fr.assign(l, BigRat(0));
  for (std::size_t i = 1; i < l; ++i) {
    long tail = 0;
    for (std::size_t k = i; k < l; ++k) tail += p.r[k];
    p.fr[i] = fractional_part(rat(a, p.rank) * tail);
  }
  return p;
}

}  // namespace detail

// Closed-form kernel: sum over (b_i) with sum r_i b_i = b of
// w^{sum_{j<i} r_i r_j (b_i - b_j) + sum_{i>=2} 2(r_i + r_{i-1}) fr_i}
// q^{sum r_i (r - r_i)/(2r) b_i^2 - (1/r) sum_{i<j} r_i r_j b_i b_j + sum_{i>=2} (b_{i-1} - b_i) fr_i}
// / prod_{i>=2} (1 - w^{2(r_i + r_{i-1})} q^{b_{i-1} - b_i}),  fr_i = {a/r sum_{k>=i} r_k}.
inline QSeries psi_closed(const Composition& comp, long a, long b, const BigRat& trunc, int s = kRootOrder) {
  const auto P = detail::psi_setup(comp, a);
  const std::size_t l = P.r.size();
  const long r = P.rank;
  SeriesBuilder acc(trunc, s);
  if (l == 1) {
    if (b % r == 0) acc.add(0, WRational::integer(1, s));
    return acc.build();
  }
  QuadraticFunction full(l);
  for (std::size_t i = 0; i < l; ++i) {
    full.G[i][i] = rat(P.r[i] * (r - P.r[i]), 2 * r);
    for (std::size_t j = 0; j < l; ++j)
      if (j != i) full.G[i][j] = rat(-P.r[i] * P.r[j], 2 * r);
  }
  for (std::size_t i = 1; i < l; ++i) {
    full.l[i - 1] += P.fr[i];
    full.l[i] -= P.fr[i];
  }
  // b_1 = (b - sum_{i>=2} r_i y_i) / r_1, b_i = y_i
  std::vector<std::vector<BigRat>> A(l, std::vector<BigRat>(l - 1));
  std::vector<BigRat> t(l);
  t[0] = rat(b, P.r[0]);
  for (std::size_t i = 1; i < l; ++i) {
    A[0][i - 1] = rat(-P.r[i], P.r[0]);
    A[i][i - 1] = 1;
  }
  QuadraticFunction f = substitute_affine(full, A, t);
  std::vector<long> bv(l);
  enumerate_below(f, trunc, [&](const std::vector<long>& y, const BigRat& e) {
    long rest = b;
    for (std::size_t i = 1; i < l; ++i) rest -= P.r[i] * y[i - 1];
    if (rest % P.r[0] != 0) return;
    bv[0] = rest / P.r[0];
    for (std::size_t i = 1; i < l; ++i) bv[i] = y[i - 1];
    BigRat we = 0;
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = 0; j < i; ++j) we += P.r[i] * P.r[j] * (bv[i] - bv[j]);
    std::vector<GeometricFactor> dens;
    for (std::size_t i = 1; i < l; ++i) {
      we += 2 * (P.r[i] + P.r[i - 1]) * P.fr[i];
      dens.push_back({1, x_exponent(BigRat(2 * (P.r[i] + P.r[i - 1])), s), BigRat(bv[i - 1] - bv[i])});
    }
    if (!is_integral(we)) throw pipeline_error("non-integral w-exponent in the closed kernel");
    add_geometric_expansion(acc, e, WPoly::monomial(1, x_exponent(we, s), s), dens);
  });
  return acc.build();
}

// Replaces psi_closed for selected compositions (returns nullopt to keep the closed form).
using KernelOverride = std::function<std::optional<QSeries>(const Composition&, long a, long b, const BigRat& trunc, int s)>;

struct AssemblyOptions {
  unsigned jobs = 1;
  const BlockSource* blocks = nullptr;
  KernelOverride kernel;
};

// H_{r,(a,b)}(J_{1,0}) = sum over compositions of Psi_{comp,(a,b)} * prod_j H_{r_j}.
inline QSeries h_sigma1_J10(long r, long a, long b, const BigRat& trunc, const AssemblyOptions& opt, int s = kRootOrder) {
  const unsigned jobs = opt.jobs;
  const BlockSource& blocks = opt.blocks ? *opt.blocks : direct_blocks();
  if (r < 1) throw domain_error("rank must be positive");
  const auto comps = compositions(r);
  const BigRat lead_h = rat(-r, 6);
  std::vector<QSeries> psi(comps.size());
  parallel_for(comps.size(), jobs, [&](std::size_t i) {
    std::optional<QSeries> o;
    if (opt.kernel) o = opt.kernel(comps[i], a, b, trunc - lead_h, s);
    psi[i] = o ? std::move(*o) : psi_closed(comps[i], a, b, trunc - lead_h, s);
  });
  std::map<long, BigRat> need;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (psi[i].is_zero()) continue;
    for (long rj : comps[i].parts()) {
      BigRat t = trunc - psi[i].leading_exponent() - lead_h - rat(rj, 6);
      auto it = need.find(rj);
      if (it == need.end() || it->second < t) need[rj] = t;
    }
  }
  std::vector<long> ranks;
  for (const auto& kv : need) ranks.push_back(kv.first);
  std::vector<QSeries> hs(ranks.size());
  parallel_for(ranks.size(), jobs, [&](std::size_t i) { hs[i] = blocks.H(ranks[i], need[ranks[i]], s); });
  std::map<long, const QSeries*> H;
  for (std::size_t i = 0; i < ranks.size(); ++i) H[ranks[i]] = &hs[i];
  std::vector<QSeries> terms(comps.size(), QSeries(trunc, s));
  parallel_for(comps.size(), jobs, [&](std::size_t i) {
    if (psi[i].is_zero()) return;
    QSeries prod = psi[i];
    for (long rj : comps[i].parts()) prod = prod * *H.at(rj);
    terms[i] = prod.truncated(trunc);
  });
  QSeries total(trunc, s);
  for (const auto& tm : terms) total = total + tm;
  return total;
}

inline QSeries h_sigma1_J10(long r, long a, long b, const BigRat& trunc, unsigned jobs = 1, int s = kRootOrder) {
  AssemblyOptions opt;
  opt.jobs = jobs;
  return h_sigma1_J10(r, a, b, trunc, opt, s);
}

namespace detail {

struct Frac64 {
  long n, d;  // d > 0
  friend bool operator<=(const Frac64& x, const Frac64& y) { return static_cast<__int128>(x.n) * y.d <= static_cast<__int128>(y.n) * x.d; }
  friend bool operator>(const Frac64& x, const Frac64& y) { return !(x <= y); }
};

template <class F>
void for_each_shell_point(std::size_t dim, long rho, F&& fn) {
  std::vector<long> x(dim, -rho);
  if (dim == 0) {
    if (rho == 0) fn(x);
    return;
  }
  while (true) {
    long m = 0;
    for (long v : x) m = std::max(m, std::labs(v));
    if (m == rho) fn(x);
    std::size_t k = 0;
    while (k < dim && x[k] == rho) x[k++] = -rho;
    if (k == dim) break;
    ++x[k];
  }
}

}  // namespace detail

struct NumericOracleOptions {
  double tol = 1e-13;
  long max_radius_a = 600;
  long max_radius_b = 60;
};

// Largest r_i + r_{i-1}; the pre-resummation sum converges for |w| > 1 and |w^{2m} q| < 1.
inline long oracle_exponent(const Composition& comp) {
  long m = 0;
  for (std::size_t i = 1; i < comp.length(); ++i) m = std::max(m, comp[i] + comp[i - 1]);
  return m;
}

// Direct evaluation of the sum over (a_i), (b_i) with sum a_i = a, sum r_i b_i = b of
// S({gamma_i}, J_{0,1}, J_{1,0}) w^{sum_{j<i} r_i r_j (b_i - b_j) - 2(r_j a_i - r_i a_j)} q^{r Delta({gamma_i})}.
inline std::complex<double> psi_direct_numeric(const Composition& comp, long a, long b, std::complex<double> w0,
                                               std::complex<double> q0, const NumericOracleOptions& opt = {}) {
  const auto& r = comp.parts();
  const std::size_t l = r.size();
  const long R = comp.rank();
  if (l == 1) return (b % R == 0) ? 1.0 : 0.0;
  const long m = oracle_exponent(comp);
  if (!(std::abs(w0) > 1.0) || !(std::pow(std::abs(w0), 2.0 * m) * std::abs(q0) < 1.0))
    throw domain_error("sample point outside the convergence region |w| > 1, |w^" + std::to_string(2 * m) + " q| < 1");
  std::vector<long> Rp(l + 1, 0);
  for (std::size_t i = 0; i < l; ++i) Rp[i + 1] = Rp[i] + r[i];
  const std::complex<double> logw = std::log(w0), logq = std::log(q0);

  std::vector<long> bv(l), av(l);
  std::vector<long> phiJ(l);
  std::vector<detail::Frac64> left(l - 1), right(l - 1);

  auto term = [&]() -> std::complex<double> {
    long A = 0;
    for (std::size_t i = 0; i + 1 < l; ++i) {
      A += av[i];
      left[i] = {-A, Rp[i + 1]};
      right[i] = {-(a - A), R - Rp[i + 1]};
    }
    for (std::size_t i = 0; i < l; ++i) phiJ[i] = bv[i];
    const int S = s_function_cuts(phiJ, left, right);
    if (S == 0) return 0.0;
    long we = 0;
    double qe = 0;
    for (std::size_t i = 1; i < l; ++i) {
      long X = 0, Y = 0;
      for (std::size_t j = 0; j < i; ++j) {
        we += r[i] * r[j] * (bv[i] - bv[j]) - 2 * (r[j] * av[i] - r[i] * av[j]);
        X += r[i] * r[j] * (bv[j] - bv[i]);
        Y -= r[i] * av[j] - r[j] * av[i];
      }
      qe -= static_cast<double>(-X * X + 2 * X * Y) / static_cast<double>(2 * r[i] * Rp[i + 1] * Rp[i]);
    }
    return static_cast<double>(S) * std::exp(static_cast<double>(we) * logw + qe * logq);
  };

  auto a_sum = [&]() -> std::complex<double> {
    std::complex<double> tot = 0;
    int quiet = 0;
    const long min_rho = 6 + std::labs(a) + std::labs(b);
    for (long rho = 0;; ++rho) {
      if (rho > opt.max_radius_a) throw convergence_error("numeric oracle: a-sum did not converge within the radius cap");
      std::complex<double> shell = 0;
      double mag = 0;
      detail::for_each_shell_point(l - 1, rho, [&](const std::vector<long>& y) {
        long rest = a;
        for (std::size_t i = 1; i < l; ++i) {
          av[i] = y[i - 1];
          rest -= y[i - 1];
        }
        av[0] = rest;
        std::complex<double> t = term();
        shell += t;
        mag += std::abs(t);
      });
      tot += shell;
      if (rho >= min_rho && mag <= opt.tol * std::max(std::abs(tot), 1e-300)) {
        if (++quiet >= 3) break;
      } else {
        quiet = 0;
      }
    }
    return tot;
  };

  std::complex<double> total = 0;
  int quiet = 0;
  for (long rho = 0;; ++rho) {
    if (rho > opt.max_radius_b) throw convergence_error("numeric oracle: b-sum did not converge within the radius cap");
    std::complex<double> shell = 0;
    double mag = 0;
    detail::for_each_shell_point(l - 1, rho, [&](const std::vector<long>& y) {
      long rest = b;
      for (std::size_t i = 1; i < l; ++i) {
        bv[i] = y[i - 1];
        rest -= r[i] * y[i - 1];
      }
      if (rest % r[0] != 0) return;
      bv[0] = rest / r[0];
      std::complex<double> t = a_sum();
      shell += t;
      mag += std::abs(t);
    });
    total += shell;
    if (rho >= 3 && mag <= opt.tol * std::max(std::abs(total), 1e-300)) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
  }
  return total;
}

struct IdentityCheck {
  std::string name;
  BigRat lhs;
  BigRat rhs;
  bool holds() const { return lhs == rhs; }
};

// The three induction identities behind the closed kernel, evaluated exactly for a composition and b-vector.
inline std::vector<IdentityCheck> proof_identities(const Composition& comp, const std::vector<long>& bvec) {
  const auto& r = comp.parts();
  const std::size_t l = r.size();
  if (bvec.size() != l) throw domain_error("b-vector length must match the composition");
  const long R = comp.rank();
  std::vector<long> Rp(l + 1, 0), tail(l + 1, 0);
  for (std::size_t i = 0; i < l; ++i) Rp[i + 1] = Rp[i] + r[i];
  for (std::size_t i = l; i-- > 0;) tail[i] = tail[i + 1] + r[i];
  long btot = 0;
  for (std::size_t i = 0; i < l; ++i) btot += r[i] * bvec[i];

  IdentityCheck one{"sum (r_i + r_{i-1}) sum_{k>=i} r_k = (r - r_1) r", 0, BigRat((R - r[0]) * R)};
  for (std::size_t i = 1; i < l; ++i) one.lhs += (r[i] + r[i - 1]) * tail[i];

  IdentityCheck two{"r sum_{j<i} r_i r_j (b_i - b_j) / (R_i R_{i-1}) = b - b_1 r", 0, BigRat(btot - bvec[0] * R)};
  for (std::size_t i = 1; i < l; ++i)
    for (std::size_t j = 0; j < i; ++j) two.lhs += rat(R * r[i] * r[j] * (bvec[i] - bvec[j]), Rp[i + 1] * Rp[i]);

  IdentityCheck three{"sum r_i/(2 R_i R_{i-1}) (sum_{j<i} r_j (b_j - b_i))^2 = sum_{i != j} r_i r_j/(2r) (b_i^2 - b_i b_j)", 0, 0};
  for (std::size_t i = 1; i < l; ++i) {
    long inner = 0;
    for (std::size_t j = 0; j < i; ++j) inner += r[j] * (bvec[j] - bvec[i]);
    three.lhs += rat(r[i] * inner * inner, 2 * Rp[i + 1] * Rp[i]);
  }
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j)
      if (i != j) three.rhs += rat(r[i] * r[j] * (bvec[i] * bvec[i] - bvec[i] * bvec[j]), 2 * R);
  return {one, two, three};
}

inline bool proof_identities_check(const Composition& comp, const std::vector<long>& bvec) {
  for (const auto& c : proof_identities(comp, bvec))
    if (!c.holds()) return false;
  return true;
}

}  // namespace sheafgen
