#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "lattice.hpp"
#include "qseries.hpp"
#include "wallcross.hpp"

namespace sheafgen {

// e^{2 pi i m0.u} sum_k q^{t(Q(k)/2 + R)} e^{2 pi i v.k} / prod_j (1 - q^{t m_j.k} e^{2 pi i u_j}), t = tau_mult.
// tau-parts inside u and v refer to the unscaled tau.
struct AppellSpec {
  LatticeQF Q;
  std::vector<std::vector<long>> M;  // rows m_1..m_{n-}, each of length n+
  std::vector<BigRat> m0;            // length n-
  BigRat R = 0;
  std::vector<AffineArg> u;          // length n-
  std::vector<AffineArg> v;          // length n+
  long tau_mult = 1;

  std::size_t n_plus() const { return Q.dim(); }
  std::size_t n_minus() const { return M.size(); }

  void validate() const {
    const std::size_t np = n_plus(), nm = n_minus();
    if (nm == 0) throw domain_error("Appell data needs at least one denominator");
    for (const auto& row : M)
      if (row.size() != np) throw domain_error("each m_j must have length n+");
    if (m0.size() != nm || u.size() != nm) throw domain_error("m0 and u must have length n-");
    if (v.size() != np) throw domain_error("v must have length n+");
    if (tau_mult < 1) throw domain_error("tau multiple must be positive");
    std::vector<std::vector<BigRat>> big(np + nm, std::vector<BigRat>(np + nm));
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < np; ++j) big[i][j] = Q.gram()[i][j];
    for (std::size_t j = 0; j < nm; ++j)
      for (std::size_t i = 0; i < np; ++i) big[np + j][i] = big[i][np + j] = M[j][i];
    if (determinant(big) == 0) throw domain_error("block matrix [[Q, M^T], [M, 0]] is singular");
  }
};

namespace detail {

inline WRational signed_w_power(int sign, const BigRat& wexp, int s) { return WRational::x_monomial(sign, x_exponent(wexp, s), s); }

}  // namespace detail

inline QSeries appell_general(const AppellSpec& spec, const BigRat& trunc, int s = kRootOrder) {
  spec.validate();
  const std::size_t np = spec.n_plus(), nm = spec.n_minus();
  const long t = spec.tau_mult;
  int pre_sign = 1;
  BigRat pre_w = 0, pre_q = 0;
  for (std::size_t j = 0; j < nm; ++j) {
    ExpFactor f = exp_factor(spec.u[j], spec.m0[j]);
    pre_sign *= f.sign;
    pre_w += f.wexp;
    pre_q += f.qexp;
  }
  // Every denominator expansion only raises exponents, so this bound on the numerator is complete.
  QuadraticFunction f(np);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) f.G[i][j] = rat(t * spec.Q.gram()[i][j], 2);
    f.l[i] = spec.v[i].tau;
  }
  f.c = t * spec.R + pre_q;
  std::vector<ExpFactor> ue(nm);
  for (std::size_t j = 0; j < nm; ++j) ue[j] = exp_factor(spec.u[j], 1);
  SeriesBuilder acc(trunc, s);
  enumerate_below(f, trunc, [&](const std::vector<long>& k, const BigRat& e) {
    int sign = pre_sign;
    BigRat we = pre_w;
    for (std::size_t i = 0; i < np; ++i) {
      ExpFactor x = exp_factor(spec.v[i], k[i]);
      sign *= x.sign;
      we += x.wexp;
    }
    std::vector<GeometricFactor> dens;
    for (std::size_t j = 0; j < nm; ++j) {
      long mk = 0;
      for (std::size_t i = 0; i < np; ++i) mk += spec.M[j][i] * k[i];
      const BigRat B = BigRat(t * mk) + ue[j].qexp;
      if (B == 0 && ue[j].wexp == 0) {
        std::string ks;
        for (std::size_t i = 0; i < np; ++i) ks += (i ? "," : "") + std::to_string(k[i]);
        throw pole_error("Appell denominator j=" + std::to_string(j + 1) + " vanishes identically at k=(" + ks + ")");
      }
      dens.push_back({ue[j].sign, x_exponent(ue[j].wexp, s), B});
    }
    add_geometric_expansion(acc, e, WPoly::monomial(sign, x_exponent(we, s), s), dens);
  });
  return acc.build();
}

// Classical A(u,v,t tau) = e^{pi i u} sum_n (-1)^n q^{t n(n+1)/2} e^{2 pi i n v} / (1 - e^{2 pi i u} q^{t n}).
inline QSeries appell_classical(const AffineArg& u, const AffineArg& v, long tau_mult, const BigRat& trunc, int s = kRootOrder) {
  if (tau_mult < 1) throw domain_error("tau multiple must be positive");
  const ExpFactor pre = exp_factor(u, rat(1, 2));
  const ExpFactor ue = exp_factor(u, 1);
  QuadraticFunction f(1);
  f.G[0][0] = rat(tau_mult, 2);
  f.l[0] = rat(tau_mult, 2) + v.tau;
  f.c = pre.qexp;
  SeriesBuilder acc(trunc, s);
  enumerate_below(f, trunc, [&](const std::vector<long>& x, const BigRat& e) {
    const long n = x[0];
    const ExpFactor vn = exp_factor(v, n);
    const int sign = pre.sign * vn.sign * (n % 2 == 0 ? 1 : -1);
    const BigRat B = BigRat(tau_mult * n) + ue.qexp;
    if (B == 0 && ue.wexp == 0) throw pole_error("Appell denominator vanishes identically at n=" + std::to_string(n));
    add_geometric_expansion(acc, e, WPoly::monomial(sign, x_exponent(pre.wexp + vn.wexp, s), s),
                            {{ue.sign, x_exponent(ue.wexp, s), B}});
  });
  return acc.build();
}

// Signature (1,1) data equal to the classical function: Q = (1), m_1 = (1), m0 = 1/2, R = 0, v -> v + t tau/2 + 1/2.
inline AppellSpec classical_as_general(const AffineArg& u, const AffineArg& v, long tau_mult = 1) {
  return AppellSpec{LatticeQF(Gram{{1}}), {{1}}, {rat(1, 2)}, 0, {u}, {v + AffineArg(0, rat(tau_mult, 2), rat(1, 2))}, tau_mult};
}

// A_{Q2}(u, v) = sum q^{k1^2+k2^2+k1k2} e^{2 pi i (v1(2k1+k2) + v2(k2-k1))} / ((1 - e^{2 pi i u1} q^{2k1+k2})(1 - e^{2 pi i u2} q^{k2-k1})).
inline AppellSpec a_q2_spec(const AffineArg& u1, const AffineArg& u2, const AffineArg& v1, const AffineArg& v2) {
  return AppellSpec{LatticeQF(Gram{{2, 1}, {1, 2}}), {{2, 1}, {-1, 1}}, {0, 0}, 0, {u1, u2},
                    {BigRat(2) * v1 - v2, v1 + v2}, 1};
}

// Generalized data whose expansion is Psi_{(1,1,1,1),(-2,2)} up to a single monomial.
inline AppellSpec psi_1111_spec() {
  return AppellSpec{LatticeQF(Gram{{2, 1, 1}, {1, 2, 1}, {1, 1, 2}}),
                    {{1, -1, 0}, {0, 1, -1}, {1, 1, 2}},
                    {rat(1, 2), 0, 0},
                    rat(5, 2),
                    {AffineArg(-4), AffineArg(-4), AffineArg(-4, 2)},
                    {AffineArg(6, 3), AffineArg(4, 3), AffineArg(2, 2)},
                    1};
}

struct MonomialRatio {
  BigRat qexp;
  WRational coeff;  // +-c w^beta
};

// a = coeff * q^qexp * b through the common truncation, with coeff a single signed monomial in w.
inline std::optional<MonomialRatio> single_monomial_ratio(const QSeries& a, const QSeries& b) {
  if (a.is_zero() || b.is_zero()) return std::nullopt;
  const BigRat alpha = a.leading_exponent() - b.leading_exponent();
  const WRational c = a.coefficient(a.leading_exponent()) / b.coefficient(b.leading_exponent());
  if (!c.num().is_monomial() || !c.den().is_constant()) return std::nullopt;
  QSeries bs = b.shifted(alpha, c);
  if (!agree(a, bs)) return std::nullopt;
  return MonomialRatio{alpha, c};
}

struct AdapterCheck {
  std::string name;
  std::optional<MonomialRatio> ratio;
  BigRat through;
  bool passed() const { return ratio.has_value(); }
};

// A(4z+tau, -2z+tau+1/2, 2tau) against Psi_{(1,1),(-1,1)}.
inline AdapterCheck check_adapter_r2(const BigRat& trunc, int s = kRootOrder) {
  const BigRat margin = 2;
  QSeries A = appell_classical(AffineArg(4, 1), AffineArg(-2, 1, rat(1, 2)), 2, trunc + margin, s);
  QSeries P = psi_closed({1, 1}, -1, 1, trunc + margin, s);
  AdapterCheck c{"A(4z+tau,-2z+tau+1/2,2tau) ~ Psi_(1,1),(-1,1)", std::nullopt, trunc};
  auto r = single_monomial_ratio(A.truncated(trunc + 1), P.truncated(trunc + 1));
  if (r && std::min(A.trunc(), P.trunc()) >= trunc) c.ratio = r;
  return c;
}

inline AdapterCheck check_adapter_r4(const BigRat& trunc, int s = kRootOrder) {
  const BigRat margin = 2;
  QSeries A = appell_general(psi_1111_spec(), trunc + margin, s);
  QSeries P = psi_closed({1, 1, 1, 1}, -2, 2, trunc + margin, s);
  AdapterCheck c{"A_{Q3} data ~ Psi_(1,1,1,1),(-2,2)", std::nullopt, trunc};
  auto r = single_monomial_ratio(A.truncated(trunc + 1), P.truncated(trunc + 1));
  if (r) c.ratio = r;
  return c;
}

namespace detail {

inline ThetaArg theta_arg(const AffineArg& a) {
  if (!is_integral(a.z) || !is_integral(a.constant))
    throw domain_error("theta1 argument needs an integral multiple of z and an integral constant");
  return ThetaArg{to_long(a.z), a.tau, to_long(a.constant)};
}

inline bool theta_degenerate(const AffineArg& a) { return a.z == 0 && is_integral(a.tau); }

}  // namespace detail

struct IdentityResult {
  std::string name;
  SeriesComparison cmp;
  bool passed() const { return cmp.equal; }
};

// theta~(v) A(u+z,v+z) - theta~(v+z) A(u,v) = eta^3 theta~(u+v+z) theta~(z) / (theta~(u) theta~(u+z)), arguments integer multiples of z.
inline IdentityResult check_periodicity(long u, long v, long z, const BigRat& trunc, int s = kRootOrder) {
  for (long x : {u, v, z, u + z, v + z, u + v + z})
    if (x == 0) throw domain_error("degenerate specialization: a theta1 argument vanishes");
  const BigRat T = trunc + 1;
  auto A = [&](long a, long b) { return appell_classical(AffineArg(a), AffineArg(b), 1, T, s); };
  auto th = [&](long c) { return theta1_tilde(c, T, s); };
  QSeries lhs = th(v) * A(u + z, v + z) - th(v + z) * A(u, v);
  QSeries e = eta_series(T, s);
  QSeries rhs = e * e * e * th(u + v + z) * th(z) * (th(u) * th(u + z)).inverse();
  const BigRat L = rhs.leading_exponent();
  return {"periodicity (u,v,z)=(" + std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(z) + ")",
          compare_series(lhs, rhs, L + trunc)};
}

struct ThetaDecompositionOptions {
  long cap = 40;           // largest |l| shell tried
  long quiet_shells = 2;   // consecutive shells contributing nothing before stopping
};

// sum_l A(u + l tau, v) e^{2 pi i l.(z - m0 tau) - 2 pi i m0.u}
//   = Theta_Q(v - sum_j z_j m_j) prod_j (-eta^3 theta~(u_j+z_j) / (theta~(u_j) theta~(z_j))).
// Each z_j needs a tau-part in (0,1) so that the l-sum is a formal q-series.
inline IdentityResult check_theta_decomposition(const AppellSpec& spec, const std::vector<AffineArg>& z, const BigRat& trunc,
                                                const ThetaDecompositionOptions& opt = {}, int s = kRootOrder) {
  spec.validate();
  const std::size_t np = spec.n_plus(), nm = spec.n_minus();
  if (spec.tau_mult != 1) throw domain_error("theta decomposition is checked at tau multiple 1");
  if (z.size() != nm) throw domain_error("z must have length n-");
  for (const auto& x : z)
    if (!(x.tau > 0 && x.tau < 1)) throw domain_error("each z_j needs a tau-part strictly between 0 and 1");
  for (std::size_t j = 0; j < nm; ++j)
    if (detail::theta_degenerate(spec.u[j]) || detail::theta_degenerate(spec.u[j] + z[j]))
      throw domain_error("degenerate specialization: a theta1 argument vanishes");

  // Right-hand side.
  const BigRat T = trunc + 2;
  std::vector<AffineArg> vz = spec.v;
  for (std::size_t j = 0; j < nm; ++j)
    for (std::size_t i = 0; i < np; ++i) vz[i] = vz[i] - BigRat(spec.M[j][i]) * z[j];
  QSeries rhs = theta_Q(spec.Q, vz, spec.R, T, s);
  QSeries e = eta_series(T, s);
  QSeries e3 = e * e * e;
  for (std::size_t j = 0; j < nm; ++j) {
    QSeries num = e3 * theta1_tilde(detail::theta_arg(spec.u[j] + z[j]), T, s);
    QSeries den = theta1_tilde(detail::theta_arg(spec.u[j]), T, s) * theta1_tilde(detail::theta_arg(z[j]), T, s);
    rhs = rhs * (num * den.inverse()).scaled(BigRat(-1));
  }
  const BigRat L = rhs.leading_exponent();
  const BigRat need = L + trunc;

  // Left-hand side, shell by shell in l.
  ExpFactor mu{1, 0, 0};
  for (std::size_t j = 0; j < nm; ++j) {
    ExpFactor f = exp_factor(spec.u[j], -spec.m0[j]);
    mu.sign *= f.sign;
    mu.wexp += f.wexp;
    mu.qexp += f.qexp;
  }
  QSeries lhs(need, s);
  long quiet = 0;
  for (long rho = 0;; ++rho) {
    if (rho > opt.cap) throw convergence_error("theta decomposition: l-sum did not stabilize within |l| <= " + std::to_string(opt.cap));
    bool contributed = false;
    detail::for_each_shell_point(nm, rho, [&](const std::vector<long>& l) {
      int sign = mu.sign;
      BigRat we = mu.wexp, qe = mu.qexp;
      AppellSpec shifted = spec;
      for (std::size_t j = 0; j < nm; ++j) {
        ExpFactor f = exp_factor(z[j], l[j]);
        sign *= f.sign;
        we += f.wexp;
        qe += f.qexp - spec.m0[j] * l[j];
        shifted.u[j] = spec.u[j] + AffineArg(0, l[j]);
      }
      QSeries term = appell_general(shifted, need - qe, s);
      if (term.is_zero()) return;
      contributed = true;
      lhs = lhs + term.shifted(qe, detail::signed_w_power(sign, we, s)).truncated(need);
    });
    if (contributed)
      quiet = 0;
    else if (++quiet >= opt.quiet_shells)
      break;
  }
  std::string zs;
  for (std::size_t j = 0; j < nm; ++j) zs += (j ? "," : "") + std::string("z") + std::to_string(j + 1);
  return {"theta decomposition, signature (" + std::to_string(np) + "," + std::to_string(nm) + ")", compare_series(lhs, rhs, need)};
}

// Classical coefficients of a meromorphic Jacobi form, in theta~ normalisation:
// sum_m A(u + m tau, v) e^{2 pi i m (z - tau/2) - pi i u} = -q^{-1/8} e^{-pi i (v - z)} eta^3 theta~(u+z) theta~(v-z) / (theta~(u) theta~(z)).
inline IdentityResult check_jacobi_coefficients(long u, const AffineArg& v, const AffineArg& z, const BigRat& trunc,
                                                const ThetaDecompositionOptions& opt = {}, int s = kRootOrder) {
  if (!(z.tau > 0 && z.tau < 1)) throw domain_error("z needs a tau-part strictly between 0 and 1");
  if (u == 0) throw domain_error("degenerate specialization: u vanishes");
  const BigRat T = trunc + 2;
  QSeries e = eta_series(T, s);
  QSeries rhs = e * e * e * theta1_tilde(detail::theta_arg(AffineArg(u) + z), T, s) *
                theta1_tilde(detail::theta_arg(v - z), T, s) *
                (theta1_tilde(u, T, s) * theta1_tilde(detail::theta_arg(z), T, s)).inverse();
  const ExpFactor pf = exp_factor(v - z, rat(-1, 2));
  rhs = rhs.shifted(rat(-1, 8) + pf.qexp, detail::signed_w_power(-pf.sign, pf.wexp, s));
  const BigRat need = rhs.leading_exponent() + trunc;
  const ExpFactor pu = exp_factor(AffineArg(u), rat(-1, 2));
  QSeries lhs(need, s);
  long quiet = 0;
  for (long rho = 0;; ++rho) {
    if (rho > opt.cap) throw convergence_error("Jacobi coefficient sum did not stabilize within |m| <= " + std::to_string(opt.cap));
    bool contributed = false;
    for (long m : (rho == 0 ? std::vector<long>{0} : std::vector<long>{-rho, rho})) {
      ExpFactor f = exp_factor(z, m);
      const int sign = f.sign * pu.sign;
      const BigRat we = f.wexp + pu.wexp;
      const BigRat qe = f.qexp - rat(m, 2) + pu.qexp;
      QSeries term = appell_classical(AffineArg(u, m), v, 1, need - qe, s);
      if (term.is_zero()) continue;
      contributed = true;
      lhs = lhs + term.shifted(qe, detail::signed_w_power(sign, we, s)).truncated(need);
    }
    if (contributed)
      quiet = 0;
    else if (++quiet >= opt.quiet_shells)
      break;
  }
  return {"Jacobi coefficients u=" + std::to_string(u), compare_series(lhs, rhs, need)};
}

}  // namespace sheafgen
