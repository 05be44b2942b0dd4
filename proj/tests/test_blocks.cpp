#include <gtest/gtest.h>

#include <sheafgen/blocks.hpp>

#include "support.hpp"

using namespace sheafgen;
using namespace sheafgen::testing;

namespace {

// Euler's pentagonal theorem: prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}.
QSeries pentagonal_eta(long N) {
  QSeries::Map m;
  for (long k = -N; k <= N; ++k) {
    const long e = k * (3 * k - 1) / 2;
    if (e <= N) m[rat(1, 24) + e] = WRational::integer(k % 2 == 0 ? 1 : -1);
  }
  return QSeries(std::move(m), rat(1, 24) + N);
}

// Brute-force lattice sum for B_{r,k} over a box.
QSeries brute_b_theta(long r, long k, const BigRat& trunc, long box) {
  SeriesBuilder acc(trunc);
  const BigRat sh = rat(((k % r) + r) % r, r);
  std::vector<long> n(r - 1, -box);
  while (true) {
    std::vector<BigRat> a(r);
    BigRat sum = 0, e = 0;
    for (long i = 0; i < r - 1; ++i) {
      a[i] = n[i] + sh;
      sum += a[i];
    }
    a[r - 1] = -sum;
    for (const auto& x : a) e += x * x / 2;
    BigRat we = 0;
    for (long i = 0; i < r; ++i)
      for (long j = i + 1; j < r; ++j) we += a[i] - a[j];
    acc.add(e, WRational::w_monomial(1, we));
    long i = 0;
    while (i < r - 1 && n[i] == box) n[i++] = -box;
    if (i == r - 1) break;
    ++n[i];
  }
  return acc.build();
}

}  // namespace

TEST(Eta, PentagonalNumbers) {
  EXPECT_TRUE(agree(eta_series(40), pentagonal_eta(40)));
  QSeries e = eta_series(rat(49, 24));
  EXPECT_EQ(e.coefficient(rat(1, 24)), WRational::integer(1));
  EXPECT_EQ(e.coefficient(rat(25, 24)), WRational::integer(-1));
  EXPECT_EQ(e.coefficient(rat(49, 24)), WRational::integer(-1));
  EXPECT_TRUE(agree(e * e.inverse(), QSeries::one(2)));
  EXPECT_EQ(e.size(), 3u);
}

TEST(Theta, TwoTermTruncation) {
  QSeries t = theta1_tilde(2, rat(9, 8));
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.coefficient(rat(1, 8)), wr(1) - wr(-1));
  EXPECT_EQ(t.coefficient(rat(9, 8)), wr(-3) - wr(3));
}

TEST(Theta, SumEqualsProduct) {
  for (long c : {1, 2, 3, 4, 6})
    for (long t : {1, 3, 5, 12}) EXPECT_TRUE(agree(theta1_tilde(c, t), theta1_tilde_product(c, t))) << "c=" << c << " t=" << t;
}

TEST(Theta, OddUnderInversion) {
  QSeries t = theta1_tilde(3, 6);
  QSeries flipped = theta1_tilde(-3, 6);
  EXPECT_TRUE(agree(flipped, -t));
  EXPECT_THROW(theta1_tilde(0, 2), domain_error);
}

TEST(Hr, LeadingTerms) {
  QSeries h1 = h_r_series(1, 2);
  EXPECT_EQ(h1.leading_exponent(), rat(-1, 6));
  EXPECT_EQ(h1.coefficient(rat(-1, 6)), (wr(1) - wr(-1)).inverse());
  EXPECT_EQ(h_r_series(2, 1).leading_exponent(), rat(-1, 3));
  EXPECT_THROW(h_r_series(0, 1), domain_error);
}

TEST(Hr, DefiningQuotient) {
  // H_2 = eta / (theta(2)^2 theta(4))
  const BigRat T = 5;
  QSeries t2 = theta1_tilde(2, 8), t4 = theta1_tilde(4, 8);
  QSeries ref = eta_series(8) * (t2 * t2 * t4).inverse();
  EXPECT_TRUE(agree(h_r_series(2, T), ref.truncated(T)));
}

TEST(Hr, OddInW) {
  for (long r = 1; r <= 3; ++r) {
    QSeries h = h_r_series(r, 3);
    for (const auto& [e, c] : h.coefficients()) {
      // w -> 1/w: reflect every exponent
      auto reflect = [](const WPoly& p) {
        WPoly q;
        for (const auto& t : p.terms()) q += WPoly::monomial(t.coeff, -t.exp);
        return q;
      };
      EXPECT_EQ(WRational(reflect(c.num()), reflect(c.den())), -c) << "r=" << r << " q^" << e.get_str();
    }
  }
}

TEST(Hr, DenominatorsAreWFactors) {
  // every canonical denominator divides a product of (w^j - w^{-j}) with j <= 2r
  for (long r = 1; r <= 3; ++r) {
    QSeries h = h_r_series(r, 3);
    WPoly big = WPoly::constant(1);
    for (long j = 1; j <= 2 * r; ++j)
      for (int rep = 0; rep < 2 * r; ++rep) big *= wp(2 * j) - wp(0);
    for (const auto& [e, c] : h.coefficients()) EXPECT_TRUE(exact_quotient(big, c.den())) << c.str();
  }
}

TEST(Brk, SmallCases) {
  EXPECT_TRUE(agree(b_rk_series(1, 0, 5), eta_series(6).inverse().truncated(5)));
  // B_{2,0} = eta^{-2} sum_a q^{a^2} w^{2a}
  QSeries::Map m;
  for (long a = -3; a <= 3; ++a) m[a * a] += wr(2 * a);
  QSeries lattice(std::move(m), 6);
  QSeries ie = eta_series(8).inverse();
  EXPECT_TRUE(agree(b_rk_series(2, 0, 5), (lattice * ie * ie).truncated(5)));
  for (long r = 1; r <= 4; ++r)
    for (long k = 0; k < r; ++k) EXPECT_TRUE(agree(b_rk_series(r, k, 3), b_rk_series(r, k + r, 3)));
}

TEST(Brk, LatticeSumAgainstBox) {
  for (long r = 2; r <= 4; ++r)
    for (long k = 0; k < r; ++k) EXPECT_TRUE(agree(b_rk_theta(r, k, 6), brute_b_theta(r, k, 6, 5))) << r << "," << k;
}

TEST(Brk, ReflectionSymmetry) {
  auto reflect = [](const QSeries& a) {
    QSeries::Map m;
    for (const auto& [e, c] : a.coefficients()) {
      WPoly n, d;
      for (const auto& t : c.num().terms()) n += WPoly::monomial(t.coeff, -t.exp);
      for (const auto& t : c.den().terms()) d += WPoly::monomial(t.coeff, -t.exp);
      m[e] = WRational(n, d);
    }
    return QSeries(std::move(m), a.trunc());
  };
  for (long r = 2; r <= 4; ++r)
    for (long k = 0; k < r; ++k) EXPECT_TRUE(agree(b_rk_series(r, -k, 4), reflect(b_rk_series(r, k, 4))));
}

TEST(ThetaQ, Examples) {
  QSeries a1 = theta_Q(LatticeQF(Gram{{2}}), {AffineArg()}, 0, 9);
  EXPECT_EQ(a1.coefficient(0), WRational::integer(1));
  EXPECT_EQ(a1.coefficient(1), WRational::integer(2));
  EXPECT_EQ(a1.coefficient(4), WRational::integer(2));
  EXPECT_EQ(a1.coefficient(9), WRational::integer(2));
  EXPECT_EQ(a1.size(), 4u);
  QSeries a2 = theta_Q(LatticeQF(Gram{{2, 1}, {1, 2}}), {AffineArg(), AffineArg()}, 0, 3);
  EXPECT_EQ(a2.coefficient(1), WRational::integer(6));
  EXPECT_EQ(a2.coefficient(3), WRational::integer(6));
  EXPECT_TRUE(theta_Q(LatticeQF(Gram{{2}}), {AffineArg()}, 5, 4).is_zero());
  EXPECT_THROW(LatticeQF(Gram{{1, 2}, {2, 1}}), domain_error);
  EXPECT_THROW(LatticeQF(Gram{{1, 0}, {1, 1}}), domain_error);
}
