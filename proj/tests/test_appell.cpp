#include <gtest/gtest.h>

#include <sheafgen/appell.hpp>
#include <sheafgen/suites.hpp>

#include "support.hpp"

using namespace sheafgen;
using namespace sheafgen::testing;

TEST(AppellClassical, LeadingTermOnly) {
  // below the first shifted term only n = 0 survives: e^{pi i u} / (1 - e^{2 pi i u})
  QSeries a = appell_classical(AffineArg(2), AffineArg(1), 1, rat(1, 2));
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(a.coefficient(0), WRational(wp(1), wp(0) - wp(2)));
}

TEST(AppellClassical, Periodicity) {
  for (auto [u, v, z] : std::vector<std::tuple<long, long, long>>{{3, 2, 1}, {5, 1, 2}, {4, 3, 1}}) {
    auto r = check_periodicity(u, v, z, 4);
    EXPECT_TRUE(r.passed()) << r.name << ": " << r.cmp.describe();
  }
  EXPECT_THROW(check_periodicity(3, 2, 0, 4), domain_error);
}

TEST(AppellGeneral, ReducesToClassical) {
  for (long t : {1, 2}) {
    const AffineArg u(3, 1), v(-1, rat(1, 2), rat(1, 2));
    EXPECT_TRUE(agree(appell_classical(u, v, t, 4), appell_general(classical_as_general(u, v, t), 4))) << t;
  }
}

TEST(AppellGeneral, AQ2MatchesDoubleSum) {
  EXPECT_TRUE(agree(appell_general(a_q2_spec(AffineArg(2), AffineArg(4), AffineArg(1), AffineArg(-1)), 4), a_q2_direct(2, 4, 1, -1, 4)));
  EXPECT_TRUE(agree(appell_general(a_q2_spec(AffineArg(1), AffineArg(3), AffineArg(2), AffineArg(1)), 3), a_q2_direct(1, 3, 2, 1, 3)));
}

TEST(AppellGeneral, ValidatesData) {
  AppellSpec bad = classical_as_general(AffineArg(1), AffineArg(1));
  bad.m0 = {};
  EXPECT_THROW(appell_general(bad, 2), domain_error);
  AppellSpec singular{LatticeQF(Gram{{2, 0}, {0, 2}}), {{1, 0}, {2, 0}}, {0, 0}, 0, {AffineArg(1), AffineArg(2)}, {AffineArg(1), AffineArg(1)}, 1};
  EXPECT_THROW(appell_general(singular, 2), domain_error);
}

TEST(AppellGeneral, PoleIsReported) {
  // u = 0 makes the k = 0 denominator vanish
  EXPECT_THROW(appell_general(classical_as_general(AffineArg(0), AffineArg(1)), 2), pole_error);
}

TEST(Adapters, SingleMonomialRatios) {
  auto r2 = check_adapter_r2(4);
  ASSERT_TRUE(r2.passed());
  EXPECT_EQ(r2.ratio->qexp, rat(-1, 4));
  EXPECT_EQ(r2.ratio->coeff, wr(1));
  auto r4 = check_adapter_r4(4);
  ASSERT_TRUE(r4.passed());
  EXPECT_EQ(r4.ratio->qexp, 0);
  EXPECT_EQ(r4.ratio->coeff, WRational::integer(-1));
}

TEST(Adapters, RatioDetection) {
  QSeries a = h_r_series(1, 3);
  EXPECT_TRUE(single_monomial_ratio(a.shifted(1, wr(2)), a));
  EXPECT_FALSE(single_monomial_ratio(a + a.shifted(1, wr(1)), a));
}

TEST(ThetaDecomposition, Classical) {
  auto r = check_theta_decomposition(classical_as_general(AffineArg(3), AffineArg(1)), {AffineArg(1, rat(1, 3))}, 4);
  EXPECT_TRUE(r.passed()) << r.cmp.describe();
}

TEST(ThetaDecomposition, SignatureTwoOne) {
  AppellSpec q21{LatticeQF(Gram{{2, 1}, {1, 2}}), {{1, 1}}, {rat(1, 2)}, 0, {AffineArg(2)}, {AffineArg(1), AffineArg(-1, rat(1, 2))}, 1};
  auto r = check_theta_decomposition(q21, {AffineArg(1, rat(1, 3))}, 4);
  EXPECT_TRUE(r.passed()) << r.cmp.describe();
  EXPECT_THROW(check_theta_decomposition(q21, {AffineArg(1)}, 4), domain_error);
}

TEST(ThetaDecomposition, SignatureTwoTwo) {
  auto r = check_theta_decomposition(a_q2_spec(AffineArg(2), AffineArg(3), AffineArg(1), AffineArg(2)),
                                     {AffineArg(1, rat(1, 3)), AffineArg(1, rat(1, 2))}, 3);
  EXPECT_TRUE(r.passed()) << r.cmp.describe();
}

TEST(JacobiCoefficients, OneTermBlock) {
  auto r = check_jacobi_coefficients(3, AffineArg(1), AffineArg(1, rat(1, 3)), 4);
  EXPECT_TRUE(r.passed()) << r.cmp.describe();
}
