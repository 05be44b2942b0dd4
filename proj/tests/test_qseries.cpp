#include <gtest/gtest.h>

#include <random>
#include <sheafgen/blocks.hpp>
#include <sheafgen/qseries.hpp>

#include "support.hpp"

using namespace sheafgen;
using namespace sheafgen::testing;

namespace {

QSeries mono(const BigRat& e, const WRational& c, const BigRat& t) { return QSeries::monomial(e, c, t); }

}  // namespace

TEST(QSeries, ProductOfHalfIntegerBinomials) {
  const WRational one = WRational::integer(1);
  QSeries a = mono(0, one, 3) + mono(rat(1, 2), one, 3);
  QSeries b = mono(0, one, 3) - mono(rat(1, 2), one, 3);
  QSeries p = a * b;
  EXPECT_EQ(p.coefficient(0), one);
  EXPECT_EQ(p.coefficient(1), -one);
  EXPECT_EQ(p.size(), 2u);
}

TEST(QSeries, ExponentsAdd) {
  const WRational one = WRational::integer(1);
  QSeries p = mono(rat(-1, 6), one, 1) * mono(rat(-1, 24), one, 1);
  EXPECT_EQ(p.leading_exponent(), rat(-5, 24));
}

TEST(QSeries, HOneSquaredLeadingTerm) {
  QSeries h = h_r_series(1, 2);
  QSeries sq = h * h;
  EXPECT_EQ(sq.leading_exponent(), rat(-1, 3));
  WRational d = wr(1) - wr(-1);
  EXPECT_EQ(sq.coefficient(rat(-1, 3)), (d * d).inverse());
}

TEST(QSeries, InvertGeometric) {
  const WRational one = WRational::integer(1);
  QSeries inv = (mono(0, one, 6) - mono(1, one, 6)).inverse();
  for (long n = 0; n <= 6; ++n) EXPECT_EQ(inv.coefficient(n), one);
  EXPECT_EQ(inv.trunc(), BigRat(6));
}

TEST(QSeries, InvertMonomial) {
  WRational d = wr(1) - wr(-1);
  QSeries inv = mono(rat(1, 8), d, 3).inverse();
  EXPECT_EQ(inv.leading_exponent(), rat(-1, 8));
  EXPECT_EQ(inv.coefficient(rat(-1, 8)), d.inverse());
}

TEST(QSeries, InvertBOneIsEta) {
  QSeries e = eta_series(6);
  QSeries b = b_rk_series(1, 0, rat(-1, 24) + 6);
  EXPECT_TRUE(agree(b.inverse(), e));
}

TEST(QSeries, ScaleArgs) {
  QSeries a = mono(rat(3, 4), wr(-1), 4);
  QSeries s = a.scale_args(2, false);
  EXPECT_EQ(s.coefficient(rat(3, 2)), wr(-2));
  EXPECT_TRUE(agree(a.scale_args(1, true), a));
}

TEST(QSeries, CoefficientBeyondTruncationThrows) {
  const WRational one = WRational::integer(1);
  QSeries a = mono(0, one, 10) + mono(1, one, 10);
  EXPECT_TRUE(a.coefficient(10).is_zero());
  EXPECT_THROW(a.coefficient(11), beyond_truncation);
}

TEST(QSeries, GeometricExpansionMatchesInverse) {
  // q^{1/2} w / (1 - w^4 q^2) and q^{1/2} w / (1 - w^4 q^{-2}) expanded in |q| < 1
  SeriesBuilder acc(8);
  add_geometric_expansion(acc, rat(1, 2), wp(1), {{1, 8, BigRat(2)}});
  QSeries ref = mono(0, WRational::integer(1), 8) - mono(2, wr(4), 8);
  EXPECT_TRUE(agree(acc.build(), mono(rat(1, 2), wr(1), 8) * ref.inverse()));
  SeriesBuilder neg(8);
  add_geometric_expansion(neg, rat(1, 2), wp(1), {{1, 8, BigRat(-2)}});
  QSeries n = neg.build();
  EXPECT_EQ(n.coefficient(rat(5, 2)), -wr(-3));
  EXPECT_EQ(n.coefficient(rat(9, 2)), -wr(-7));
  SeriesBuilder zero(2);
  add_geometric_expansion(zero, 0, wp(0), {{1, 8, BigRat(0)}});
  EXPECT_EQ(zero.build().coefficient(0), WRational(wp(0), wp(0) - wp(4)));
}

TEST(QSeries, TextRoundTrip) {
  std::mt19937 rng(29);
  for (int i = 0; i < 30; ++i) {
    QSeries a = random_series(rng, 3, true) * h_r_series(2, 2);
    QSeries b = parse_series_text(to_text(a));
    EXPECT_TRUE(agree(a, b));
    EXPECT_EQ(a.trunc(), b.trunc());
    EXPECT_EQ(to_text(b), to_text(a));
  }
  EXPECT_THROW(parse_series_text("garbage"), domain_error);
}

TEST(QSeries, CompareReportsFirstDifference) {
  const WRational one = WRational::integer(1);
  QSeries a = mono(0, one, 4) + mono(2, one, 4), b = mono(0, one, 4) + mono(2, wr(1), 4);
  auto c = compare_series(a, b, 4);
  EXPECT_FALSE(c.equal);
  ASSERT_TRUE(c.at);
  EXPECT_EQ(*c.at, BigRat(2));
  EXPECT_FALSE(compare_series(a, a, 5).equal);
  EXPECT_TRUE(compare_series(a, a, 4).equal);
}

TEST(QSeriesProperty, RingLaws) {
  std::mt19937 rng(31);
  for (int i = 0; i < 40; ++i) {
    QSeries a = random_series(rng, 4), b = random_series(rng, 4), c = random_series(rng, 4);
    EXPECT_TRUE(agree((a * b) * c, a * (b * c)));
    EXPECT_TRUE(agree(a * (b + c), a * b + a * c));
    EXPECT_TRUE(agree(a * b, b * a));
  }
}

TEST(QSeriesProperty, InverseRoundTrip) {
  std::mt19937 rng(37);
  for (int i = 0; i < 25; ++i) {
    QSeries a = random_series(rng, 3, true);
    QSeries p = a * a.inverse();
    QSeries one = QSeries::one(p.trunc());
    EXPECT_FALSE(first_difference(p, one)) << to_text(a);
  }
}

TEST(QSeriesProperty, ScaleArgsMultiplicative) {
  std::mt19937 rng(41);
  for (int i = 0; i < 25; ++i) {
    QSeries a = random_series(rng, 3, true);
    EXPECT_TRUE(agree(a.scale_args(2, false).scale_args(3, false), a.scale_args(6, false)));
    EXPECT_TRUE(agree(a.scale_args(3, true).scale_args(5, true), a.scale_args(15, true)));
  }
}

TEST(QSeriesProperty, TruncationRefinement) {
  QSeries lo = h_r_series(3, 2) * b_rk_series(3, 1, 2);
  QSeries hi = h_r_series(3, 4) * b_rk_series(3, 1, 4);
  EXPECT_FALSE(first_difference(lo, hi));
  EXPECT_LT(lo.trunc(), hi.trunc());
}
