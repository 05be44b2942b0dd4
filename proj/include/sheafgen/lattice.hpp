#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "exactnum.hpp"

namespace sheafgen {

// f(x) = x^T G x + l.x + c over integer vectors x, G symmetric rational.
struct QuadraticFunction {
  std::vector<std::vector<BigRat>> G;
  std::vector<BigRat> l;
  BigRat c = 0;

  explicit QuadraticFunction(std::size_t n = 0) : G(n, std::vector<BigRat>(n)), l(n) {}

  std::size_t dim() const { return l.size(); }

  template <class V>
  BigRat operator()(const V& x) const {
    BigRat v = c;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i] == 0) continue;
      BigRat xi = x[i];
      v += l[i] * xi;
      for (std::size_t j = 0; j < dim(); ++j)
        if (x[j] != 0) v += G[i][j] * xi * BigRat(x[j]);
    }
    return v;
  }
};

// x = A y + t, with A of size n x m; returns the pulled-back function of y.
inline QuadraticFunction substitute_affine(const QuadraticFunction& f, const std::vector<std::vector<BigRat>>& A,
                                           const std::vector<BigRat>& t) {
  const std::size_t n = f.dim();
  const std::size_t m = n == 0 ? 0 : A[0].size();
  QuadraticFunction g(m);
  std::vector<BigRat> Gt(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Gt[i] += f.G[i][j] * t[j];
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      BigRat s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (A[i][a] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) s += A[i][a] * f.G[i][j] * A[j][b];
      }
      g.G[a][b] = s;
    }
  for (std::size_t a = 0; a < m; ++a) {
    BigRat s = 0;
    for (std::size_t i = 0; i < n; ++i) s += A[i][a] * (2 * Gt[i] + f.l[i]);
    g.l[a] = s;
  }
  g.c = f.c;
  for (std::size_t i = 0; i < n; ++i) g.c += t[i] * Gt[i] + f.l[i] * t[i];
  return g;
}

// Fincke-Pohst style enumeration of all x in Z^n with f(x) <= bound, exact at every node.
// Completing squares from the first coordinate: f = sum_k d_k (x_k - centre_k(x_{k+1..}))^2 + fmin.
class QuadraticEnumerator {
 public:
  explicit QuadraticEnumerator(const QuadraticFunction& f) : n_(f.dim()) {
    auto G = f.G;
    auto h = f.l;
    BigRat c = f.c;
    d_.resize(n_);
    alpha_.resize(n_);
    beta_.assign(n_, std::vector<BigRat>(n_));
    for (std::size_t k = 0; k < n_; ++k) {
      const BigRat gkk = G[k][k];
      if (gkk <= 0) throw domain_error("quadratic form is not positive definite");
      d_[k] = gkk;
      alpha_[k] = -h[k] / (2 * gkk);
      for (std::size_t j = k + 1; j < n_; ++j) beta_[k][j] = -G[k][j] / gkk;
      for (std::size_t j = k + 1; j < n_; ++j) {
        for (std::size_t m = k + 1; m < n_; ++m) G[j][m] -= G[k][j] * G[k][m] / gkk;
        h[j] -= G[k][j] * h[k] / gkk;
      }
      c -= h[k] * h[k] / (4 * gkk);
    }
    fmin_ = c;
  }

  const BigRat& minimum_bound() const { return fmin_; }

  // visit(const std::vector<long>& x, const BigRat& f(x))
  void run(const BigRat& bound, const std::function<void(const std::vector<long>&, const BigRat&)>& visit) const {
    if (n_ == 0) {
      if (fmin_ <= bound) visit({}, fmin_);
      return;
    }
    if (fmin_ > bound) return;
    std::vector<long> x(n_);
    descend(n_ - 1, fmin_, bound, x, visit);
  }

 private:
  void descend(std::size_t k, const BigRat& acc, const BigRat& bound, std::vector<long>& x,
               const std::function<void(const std::vector<long>&, const BigRat&)>& visit) const {
    BigRat centre = alpha_[k];
    for (std::size_t j = k + 1; j < n_; ++j)
      if (x[j] != 0) centre += beta_[k][j] * x[j];
    const BigRat room = bound - acc;
    const double radius = std::sqrt(std::max(0.0, BigRat(room / d_[k]).get_d()));
    const double cd = centre.get_d();
    long lo = static_cast<long>(std::floor(cd - radius)) - 1;
    long hi = static_cast<long>(std::ceil(cd + radius)) + 1;
    for (long v = lo; v <= hi; ++v) {
      BigRat diff = BigRat(v) - centre;
      BigRat val = acc + d_[k] * diff * diff;
      if (val > bound) continue;
      x[k] = v;
      if (k == 0)
        visit(x, val);
      else
        descend(k - 1, val, bound, x, visit);
    }
    x[k] = 0;
  }

  std::size_t n_;
  std::vector<BigRat> d_;
  std::vector<BigRat> alpha_;
  std::vector<std::vector<BigRat>> beta_;
  BigRat fmin_;
};

inline void enumerate_below(const QuadraticFunction& f, const BigRat& bound,
                            const std::function<void(const std::vector<long>&, const BigRat&)>& visit) {
  QuadraticEnumerator(f).run(bound, visit);
}

// Exact determinant by Gaussian elimination over the rationals.
inline BigRat determinant(std::vector<std::vector<BigRat>> M) {
  const std::size_t n = M.size();
  BigRat det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && M[p][k] == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      std::swap(M[p], M[k]);
      det = -det;
    }
    det *= M[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      if (M[i][k] == 0) continue;
      BigRat f = M[i][k] / M[k][k];
      for (std::size_t j = k; j < n; ++j) M[i][j] -= f * M[k][j];
    }
  }
  return det;
}

}  // namespace sheafgen
