#include <gtest/gtest.h>

#include <sheafgen/invariants.hpp>

#include "support.hpp"

using namespace sheafgen;
using namespace sheafgen::testing;

namespace {

WRational inv_w() { return (wr(1) - wr(-1)).inverse(); }

// Synthetic invariants: I(gamma) = w^{r} / (1 - w^4)^{c2}, zero for negative c2.
InvariantSource synthetic() {
  InvariantSource src;
  src.I = [](const ChernCharacter& g) {
    const long c2 = to_long(g.c2());
    if (c2 < 0) return WRational();
    WRational v = wr(g.r);
    for (long i = 0; i < c2; ++i) v = v * WRational(wp(0), wp(0) - wp(4));
    return v;
  };
  src.min_exponent = [](const ChernCharacter& g) {
    ChernCharacter z = g;
    z.ch2 = z.c1_squared() / 2;
    return z.exponent() - 10;
  };
  return src;
}

}  // namespace

TEST(Chern, Bookkeeping) {
  auto g = ChernCharacter::p2_c2(4, 2, 4);
  EXPECT_EQ(g.c2(), 4);
  EXPECT_EQ(g.expected_dimension(), 5);
  EXPECT_EQ(ChernCharacter::p2_c2(2, 1, 1).expected_dimension(), 0);
  EXPECT_FALSE(g.divided(2));  // c2 of the half would be 3/2
  auto half = ChernCharacter::p2_c2(4, 2, 5).divided(2);
  ASSERT_TRUE(half);
  EXPECT_EQ(half->r, 2);
  EXPECT_EQ(half->d, 1);
  EXPECT_FALSE(g.divided(3));
  EXPECT_THROW(ChernCharacter::p2(0, 0, 0), domain_error);
  EXPECT_THROW(ChernCharacter::p2(2, 1, 0), domain_error);
  auto s = ChernCharacter::sigma1(1, 0, 0, 0);
  EXPECT_EQ(s.exponent(), rat(-1, 6));
}

TEST(Chern, HilbertPolynomialOrdering) {
  StabilityPoint J{1, 0};
  auto a = hilbert_poly(ChernCharacter::p2_c2(1, 0, 1), J), b = hilbert_poly(ChernCharacter::p2_c2(1, 0, 0), J);
  EXPECT_EQ(gieseker_compare(a, b), -1);
  EXPECT_EQ(gieseker_compare(a, a), 0);
  EXPECT_EQ(hilbert_poly(ChernCharacter::p2_c2(2, 0, 0), J), b);
}

TEST(BlowUp, PullbackExamples) {
  EXPECT_EQ(pullback_c1(2, 0), std::make_pair(-2L, 2L));
  EXPECT_EQ(pullback_c1(1, 0), std::make_pair(-1L, 1L));
  EXPECT_EQ(pullback_c1(1, 1), std::make_pair(-1L, 0L));
}

TEST(BlowUp, RankOneLeadingTerm) {
  QSeries h = h_p2(1, 0, 0, 3);
  EXPECT_EQ(h.leading_exponent(), rat(-1, 8));
  EXPECT_EQ(h.coefficient(rat(-1, 8)), inv_w());
  EXPECT_TRUE(agree(h, (eta_series(4) * h_r_series(1, 4)).truncated(3)));
}

TEST(BlowUpProperty, IndependentOfTwist) {
  for (long r = 1; r <= 3; ++r)
    for (long d = 0; d <= 2; ++d) {
      const BigRat L = h_p2(r, d, 0, 2).leading_exponent();
      const BigRat T = L + 3;
      const QSeries base = h_p2(r, d, 0, T);
      for (long k = 1; k <= 2; ++k) EXPECT_TRUE(compare_series(base, h_p2(r, d, k, T), T).equal) << "r=" << r << " d=" << d << " k=" << k;
    }
}

TEST(Extract, SigmaOneRankOne) {
  QSeries h1 = h_r_series(1, 2);
  EXPECT_EQ(extract_I(h1, ChernCharacter::sigma1(1, 0, 0, 0)), inv_w());
  EXPECT_TRUE(extract_I(h1, ChernCharacter::sigma1(1, 0, 0, 1)).is_zero());
}

TEST(Decompositions, EqualHilbert) {
  EXPECT_EQ(equal_hilbert_decompositions(ChernCharacter::p2_c2(2, 1, 3)).size(), 1u);
  EXPECT_EQ(equal_hilbert_decompositions(ChernCharacter::p2_c2(3, 1, 3)).size(), 1u);
  auto decs = equal_hilbert_decompositions(ChernCharacter::p2_c2(4, 2, 5));
  for (const auto& dec : decs)
    for (const auto& p : dec) EXPECT_TRUE(p.r == 2 || p.r == 4);
  EXPECT_EQ(decs.size(), 2u);
}

TEST(Decompositions, EqualSlopeSplitsAddUp) {
  auto src = synthetic();
  const auto g = ChernCharacter::p2_c2(4, 2, 5);
  for (const auto& dec : equal_slope_decompositions(g, src)) {
    BigRat e = 0;
    for (const auto& p : dec) {
      EXPECT_TRUE(p.same_c1_direction(g));
      e += p.exponent();
    }
    EXPECT_EQ(e, g.exponent());
  }
}

TEST(OmegaBar, Examples) {
  auto src = synthetic();
  const auto prim = ChernCharacter::p2_c2(3, 1, 3);
  EXPECT_EQ(omega_bar(prim, src, DecompositionRule::EqualHilbert), src.I(prim));
  const auto g = ChernCharacter::p2_c2(4, 2, 5);
  const auto half = ChernCharacter::p2(2, 1, g.ch2 / 2);
  const WRational Ih = src.I(half);
  EXPECT_EQ(omega_bar(g, src, DecompositionRule::EqualHilbert), src.I(g) - (Ih * Ih).scaled(rat(1, 2)));
}

TEST(Omega, MoebiusAndInversion) {
  EXPECT_EQ(moebius(1), 1);
  EXPECT_EQ(moebius(2), -1);
  EXPECT_EQ(moebius(4), 0);
  EXPECT_EQ(moebius(6), 1);
  auto ob = [](const ChernCharacter& g) { return wr(g.r) + WRational::integer(to_long(g.c2())); };
  const auto prim = ChernCharacter::p2_c2(3, 1, 3);
  EXPECT_EQ(omega(prim, ob), ob(prim));
  const auto g = ChernCharacter::p2_c2(4, 2, 7);
  ASSERT_TRUE(g.divided(2));
  const auto half = *g.divided(2);
  EXPECT_EQ(omega(g, ob), ob(g) - ob(half).substitute_power(2, true).scaled(rat(1, 2)));
  // sum_m Omega(gamma/m, -(-w)^m)/m recovers Omega_bar
  WRational back = omega(g, ob) + omega(half, ob).substitute_power(2, true).scaled(rat(1, 2));
  auto q4 = g.divided(4);
  if (q4) back = back + omega(*q4, ob).substitute_power(4, true).scaled(rat(1, 4));
  EXPECT_EQ(back, ob(g));
}

TEST(PoincareRow, Certification) {
  auto row = poincare_row(1, inv_w());
  EXPECT_EQ(row.dim, 0);
  ASSERT_EQ(row.betti.size(), 1u);
  EXPECT_EQ(row.betti[0], 1);
  EXPECT_EQ(row.euler, 1);
  EXPECT_THROW(poincare_row(1, WRational(wp(0), wp(0) - wp(4))), pipeline_error);
  EXPECT_THROW(poincare_row(1, wr(1) * inv_w()), pipeline_error);
  EXPECT_THROW(poincare_row(1, inv_w().scaled(-1)), pipeline_error);
  // P = w^2 + 1 + w^-2 is P^2
  auto p2 = poincare_row(1, (wr(2) + wr(0) + wr(-2)) * inv_w());
  EXPECT_EQ(p2.dim, 2);
  EXPECT_EQ(p2.euler, 3);
  EXPECT_EQ(evaluate_at_minus_one(p2), 3);
  EXPECT_TRUE(poincare_row(5, WRational()).betti.empty());
}

TEST(Betti, SanityAnchors) {
  auto r1 = betti_table(1, 0, 0, 2);
  ASSERT_EQ(r1.size(), 3u);
  EXPECT_EQ(r1[0].betti, std::vector<BigInt>{1});
  EXPECT_EQ(r1[1].betti, (std::vector<BigInt>{1, 1, 1}));
  EXPECT_EQ(r1[2].betti, (std::vector<BigInt>{1, 2, 3, 2, 1}));
  auto r2 = betti_table(2, 1, 1, 1);
  ASSERT_EQ(r2.size(), 1u);
  EXPECT_EQ(r2[0].betti, std::vector<BigInt>{1});
  EXPECT_EQ(r2[0].euler, 1);
}

TEST(Betti, TableOneFirstRows) {
  auto rows = betti_table(4, 2, 4, 5);
  EXPECT_EQ(rows[0].lower_half(), (std::vector<BigInt>{1, 1, 1}));
  EXPECT_EQ(rows[0].euler, 6);
  EXPECT_EQ(rows[1].lower_half(), (std::vector<BigInt>{1, 2, 6, 10, 17, 21, 24}));
  EXPECT_EQ(rows[1].euler, 162);
}

TEST(BettiProperty, RowsAreCertified) {
  for (auto [r, d, lo, hi] : std::vector<std::tuple<long, long, long, long>>{{1, 0, 0, 4}, {2, 1, 1, 4}, {2, 0, 2, 4}, {3, 1, 2, 4}, {4, 2, 4, 6}}) {
    for (const auto& row : betti_table(r, d, lo, hi)) {
      BigInt sum = 0;
      for (std::size_t j = 0; j < row.betti.size(); ++j) {
        EXPECT_GE(row.betti[j], 0);
        EXPECT_EQ(row.betti[j], row.betti[row.betti.size() - 1 - j]);
        sum += row.betti[j];
      }
      for (const auto& o : row.odd_betti) sum += o;
      EXPECT_EQ(sum, row.euler);
      if (r == 4) {
        for (const auto& o : row.odd_betti) EXPECT_EQ(o, 0);
      }
    }
  }
}

TEST(BettiProperty, TruncationRefinementKeepsRows) {
  auto plain = betti_table(3, 1, 2, 4);
  P2SeriesCache warm;
  warm.get(3, 1, 8);
  warm.get(2, 1, 8);
  warm.get(1, 0, 8);
  auto refined = betti_table(3, 1, 2, 4, {}, &warm);
  ASSERT_EQ(plain.size(), refined.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(plain[i].betti, refined[i].betti);
    EXPECT_EQ(plain[i].euler, refined[i].euler);
  }
}

TEST(BettiProperty, ChainMatchesRankFourCombination) {
  P2SeriesCache cache;
  const QSeries gen = rank4_generating_function(ChernCharacter::p2_c2(4, 2, 6).exponent());
  for (long c2 = 4; c2 <= 6; ++c2) {
    const auto g = ChernCharacter::p2_c2(4, 2, c2);
    EXPECT_EQ(omega_p2(g, cache), gen.coefficient(g.exponent())) << c2;
  }
}

TEST(Betti, RejectsBadInput) {
  EXPECT_THROW(betti_table(0, 0, 0, 0), domain_error);
  EXPECT_THROW(betti_table(1, 0, 3, 2), domain_error);
}

TEST(Betti, DoubledArgumentTerm) {
  // 1/2 H_{2,H}(2z, 2tau) of the rank-4 combination: exponents doubled, w -> -w^2
  QSeries h2 = h_p2(2, 1, 0, 2);
  QSeries dbl = h2.scale_args(2, true);
  EXPECT_EQ(dbl.leading_exponent(), 2 * h2.leading_exponent());
  EXPECT_EQ(dbl.coefficient(2 * h2.leading_exponent()), h2.coefficient(h2.leading_exponent()).substitute_power(2, true));
}
