#pragma once

#include <functional>
#include <vector>

#include "lattice.hpp"
#include "qseries.hpp"

namespace sheafgen {

// c*z + t*tau + constant for the formal elliptic variable z (w = e^{2 pi i z}).
struct AffineArg {
  BigRat z = 0;
  BigRat tau = 0;
  BigRat constant = 0;

  AffineArg() = default;
  AffineArg(BigRat zc, BigRat tc = 0, BigRat cc = 0) : z(std::move(zc)), tau(std::move(tc)), constant(std::move(cc)) {
    if (!is_integral(constant * 2)) throw domain_error("affine constant must be a half-integer");
  }

  friend AffineArg operator+(const AffineArg& a, const AffineArg& b) { return {a.z + b.z, a.tau + b.tau, a.constant + b.constant}; }
  friend AffineArg operator-(const AffineArg& a, const AffineArg& b) { return {a.z - b.z, a.tau - b.tau, a.constant - b.constant}; }
  friend AffineArg operator*(const BigRat& k, const AffineArg& a) { return {k * a.z, k * a.tau, k * a.constant}; }
  friend bool operator==(const AffineArg&, const AffineArg&) = default;
};

// e^{2 pi i k arg} = sign * w^{k z} q^{k tau}; requires k * constant in (1/2)Z.
struct ExpFactor {
  int sign;
  BigRat wexp;
  BigRat qexp;
};

inline ExpFactor exp_factor(const AffineArg& a, const BigRat& k) {
  BigRat twice = 2 * k * a.constant;
  if (!is_integral(twice)) throw domain_error("e^{2 pi i (" + BigRat(k * a.constant).get_str() + ")} is not real");
  const bool odd = mpz_odd_p(twice.get_num_mpz_t()) != 0;
  return {odd ? -1 : 1, k * a.z, k * a.tau};
}

inline long x_exponent(const BigRat& wexp, int s) {
  BigRat x = wexp * s;
  if (!is_integral(x)) throw domain_error("w-power " + wexp.get_str() + " not representable at root_order " + std::to_string(s));
  return to_long(x);
}

// Argument of theta1~: zmult*z + taumult*tau + constant with an integer constant.
struct ThetaArg {
  long zmult = 0;
  BigRat taumult = 0;
  long constant = 0;
};

// theta~(arg) = theta1(arg)/i = sum_{r in Z+1/2} (-1)^{r-1/2} q^{r^2/2} e^{2 pi i r arg}.
inline QSeries theta1_tilde(const ThetaArg& arg, const BigRat& trunc, int s = kRootOrder) {
  if (arg.zmult == 0 && is_integral(arg.taumult)) throw domain_error("theta1 argument vanishes identically on the lattice");
  // r = j + 1/2: r^2/2 + t r = j^2/2 + (1/2 + t) j + 1/8 + t/2
  QuadraticFunction f(1);
  f.G[0][0] = rat(1, 2);
  f.l[0] = rat(1, 2) + arg.taumult;
  f.c = rat(1, 8) + arg.taumult / 2;
  SeriesBuilder acc(trunc, s);
  enumerate_below(f, trunc, [&](const std::vector<long>& x, const BigRat& e) {
    const long j = x[0];
    const bool neg = ((j % 2) != 0) != ((arg.constant % 2) != 0);
    const long xe = x_exponent(rat(arg.zmult * (2 * j + 1), 2), s);
    acc.add(e, WRational::x_monomial(neg ? -1 : 1, xe, s));
  });
  return acc.build();
}

inline QSeries theta1_tilde(long c, const BigRat& trunc, int s = kRootOrder) {
  return theta1_tilde(ThetaArg{c, 0, 0}, trunc, s);
}

// Product form q^{1/8}(w^{c/2} - w^{-c/2}) prod_n (1-q^n)(1-w^c q^n)(1-w^{-c} q^n).
inline QSeries theta1_tilde_product(long c, const BigRat& trunc, int s = kRootOrder) {
  const BigRat base = rat(1, 8);
  QSeries out(trunc, s);
  if (trunc < base) return out;
  const long N = to_long(floor_of(trunc - base));
  const long xc = x_exponent(BigRat(c), s);
  std::vector<WPoly> p(N + 1, WPoly(s));
  p[0] = WPoly::monomial(1, 0, s);
  const WPoly one = WPoly::monomial(1, 0, s);
  const WPoly mid = one + WPoly::monomial(1, xc, s) + WPoly::monomial(1, -xc, s);
  for (long n = 1; n <= N; ++n) {
    std::vector<WPoly> next = p;
    for (long i = 0; i <= N; ++i) {
      if (p[i].is_zero()) continue;
      if (i + n <= N) next[i + n] -= p[i] * mid;
      if (i + 2 * n <= N) next[i + 2 * n] += p[i] * mid;
      if (i + 3 * n <= N) next[i + 3 * n] -= p[i];
    }
    p = std::move(next);
  }
  const long half = x_exponent(rat(c, 2), s);
  const WPoly lead = WPoly::monomial(1, half, s) - WPoly::monomial(1, -half, s);
  QSeries::Map m;
  for (long i = 0; i <= N; ++i)
    if (!p[i].is_zero()) m.emplace(base + i, WRational(p[i] * lead));
  return QSeries(std::move(m), trunc, s);
}

// eta = q^{1/24} prod_{n>=1} (1 - q^n).
inline QSeries eta_series(const BigRat& trunc, int s = kRootOrder) {
  const BigRat base = rat(1, 24);
  if (trunc < base) return QSeries(trunc, s);
  const long N = to_long(floor_of(trunc - base));
  std::vector<BigInt> c(N + 1);
  c[0] = 1;
  for (long n = 1; n <= N; ++n)
    for (long i = N; i >= n; --i) c[i] -= c[i - n];
  QSeries::Map m;
  for (long i = 0; i <= N; ++i)
    if (c[i] != 0) m.emplace(base + i, WRational::integer(c[i], s));
  return QSeries(std::move(m), trunc, s);
}

// H_r = eta^{2r-3} / (theta~(2)^2 ... theta~(2r-2)^2 theta~(2r)); leading exponent -r/6.
inline QSeries h_r_series(long r, const BigRat& trunc, int s = kRootOrder) {
  if (r < 1) throw domain_error("H_r needs r >= 1");
  const BigRat prec = trunc + rat(r, 6);
  if (prec < 0) return QSeries(trunc, s);
  const BigRat tt = rat(1, 8) + prec;
  QSeries den = theta1_tilde(2 * r, tt, s);
  for (long j = 1; j < r; ++j) {
    QSeries t = theta1_tilde(2 * j, tt, s);
    den = den * t * t;
  }
  QSeries res = den.inverse();
  QSeries e = eta_series(rat(1, 24) + prec, s);
  if (2 * r - 3 < 0) e = e.inverse();
  for (long i = 0; i < std::abs(2 * r - 3); ++i) res = res * e;
  return res.truncated(trunc);
}

// Lattice part of B_{r,k}: sum over a_i in Z + k/r with sum a_i = 0 of q^{sum a_i^2 / 2} w^{sum_{i<j}(a_i - a_j)}.
inline QSeries b_rk_theta(long r, long k, const BigRat& trunc, int s = kRootOrder) {
  if (r < 1) throw domain_error("B_{r,k} needs r >= 1");
  const long kk = ((k % r) + r) % r;
  const BigRat shift = rat(kk, r);
  SeriesBuilder acc(trunc, s);
  if (r == 1) {
    acc.add(0, WRational::integer(1, s));
    return acc.build();
  }
  const std::size_t n = static_cast<std::size_t>(r - 1);
  // a_i = n_i + k/r for i < r, a_r = -sum; exponent = 1/2 sum_{i<r} a_i^2 + 1/2 (sum_{i<r} a_i)^2
  QuadraticFunction f(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) f.G[i][j] = (i == j) ? BigRat(1) : rat(1, 2);
    f.l[i] = shift + shift * static_cast<long>(n);
  }
  f.c = shift * shift * static_cast<long>(n) / 2 + shift * shift * static_cast<long>(n * n) / 2;
  enumerate_below(f, trunc, [&](const std::vector<long>& x, const BigRat& e) {
    std::vector<BigRat> a(r);
    BigRat sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = x[i] + shift;
      sum += a[i];
    }
    a[n] = -sum;
    BigRat we = 0;
    for (long i = 0; i < r; ++i) we += a[i] * (r + 1 - 2 * (i + 1));
    acc.add(e, WRational::x_monomial(1, x_exponent(we, s), s));
  });
  return acc.build();
}

// B_{r,k} = eta^{-r} * lattice sum.
inline QSeries b_rk_series(long r, long k, const BigRat& trunc, int s = kRootOrder) {
  const BigRat lead_eta = rat(-r, 24);
  QSeries theta = b_rk_theta(r, k, trunc - lead_eta, s);
  if (theta.is_zero()) return QSeries(trunc, s);
  const BigRat L = theta.leading_exponent();
  const BigRat prec = trunc - L - lead_eta;
  QSeries ie = eta_series(rat(1, 24) + prec, s).inverse();
  QSeries p = power(ie, r);
  return (theta * p).truncated(trunc);
}

// Where H_r and B_{r,k} come from; empty members fall back to direct computation (used by the CLI disk cache).
struct BlockSource {
  std::function<QSeries(long r, const BigRat& trunc, int s)> h_r;
  std::function<QSeries(long r, long k, const BigRat& trunc, int s)> b_rk;

  QSeries H(long r, const BigRat& trunc, int s) const { return h_r ? h_r(r, trunc, s) : h_r_series(r, trunc, s); }
  QSeries B(long r, long k, const BigRat& trunc, int s) const { return b_rk ? b_rk(r, k, trunc, s) : b_rk_series(r, k, trunc, s); }
};

inline const BlockSource& direct_blocks() {
  static const BlockSource b;
  return b;
}

using Gram = std::vector<std::vector<long>>;

class LatticeQF {
 public:
  explicit LatticeQF(std::vector<std::vector<long>> gram) : gram_(std::move(gram)) {
    const std::size_t n = gram_.size();
    if (n == 0) throw domain_error("lattice dimension must be positive");
    for (const auto& row : gram_)
      if (row.size() != n) throw domain_error("gram matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (gram_[i][j] != gram_[j][i]) throw domain_error("gram matrix must be symmetric");
    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<std::vector<BigRat>> minor(k, std::vector<BigRat>(k));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) minor[i][j] = gram_[i][j];
      if (determinant(minor) <= 0) throw domain_error("gram matrix is not positive definite");
    }
  }

  std::size_t dim() const { return gram_.size(); }
  const std::vector<std::vector<long>>& gram() const { return gram_; }

  BigRat norm(const std::vector<long>& k) const {
    BigRat v = 0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) v += BigRat(gram_[i][j]) * k[i] * k[j];
    return v;
  }

 private:
  std::vector<std::vector<long>> gram_;
};

// Theta_Q(v) = sum_k q^{Q(k)/2 + R} e^{2 pi i v.k}.
inline QSeries theta_Q(const LatticeQF& Q, const std::vector<AffineArg>& v, const BigRat& R, const BigRat& trunc,
                       int s = kRootOrder) {
  const std::size_t n = Q.dim();
  if (v.size() != n) throw domain_error("theta_Q: elliptic vector has wrong length");
  QuadraticFunction f(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) f.G[i][j] = rat(Q.gram()[i][j], 2);
    f.l[i] = v[i].tau;
  }
  f.c = R;
  SeriesBuilder acc(trunc, s);
  enumerate_below(f, trunc, [&](const std::vector<long>& k, const BigRat& e) {
    int sign = 1;
    BigRat we = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ExpFactor x = exp_factor(v[i], k[i]);
      sign *= x.sign;
      we += x.wexp;
    }
    acc.add(e, WRational::x_monomial(sign, x_exponent(we, s), s));
  });
  return acc.build();
}

}  // namespace sheafgen
