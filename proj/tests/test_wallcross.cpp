#include <gtest/gtest.h>

#include <random>
#include <sheafgen/reference.hpp>
#include <sheafgen/suites.hpp>
#include <sheafgen/wallcross.hpp>

using namespace sheafgen;

TEST(FractionalPart, Examples) {
  EXPECT_EQ(fractional_part(rat(-1, 2)), rat(1, 2));
  EXPECT_EQ(fractional_part(BigRat(-1)), BigRat(0));
  EXPECT_EQ(fractional_part(rat(7, 3)), rat(1, 3));
}

TEST(Compositions, CountAndOrder) {
  for (long r = 1; r <= 8; ++r) {
    auto cs = compositions(r);
    EXPECT_EQ(cs.size(), std::size_t(1) << (r - 1));
    for (const auto& c : cs) EXPECT_EQ(c.rank(), r);
  }
  EXPECT_EQ(compositions(3).front().str(), "(1,1,1)");
}

TEST(SFunction, SmallCases) {
  EXPECT_EQ(s_function({{1, 3, -2}}), 1);
  EXPECT_EQ(s_sign_product({{1, 3, -2}}), 1);
  // phiJ(g1) <= phiJ(g2), phiJ'(g1) > phiJ'(g2)
  std::vector<SlopeData> flip{{1, 0, 1}, {1, 1, 0}};
  EXPECT_EQ(s_function(flip), -1);
  EXPECT_EQ(s_sign_product(flip), -1);
  std::vector<SlopeData> none{{1, 1, 1}, {1, 0, 0}};
  EXPECT_EQ(s_function(none), 0);
  EXPECT_EQ(s_sign_product(none), 0);
  EXPECT_THROW(s_sign_product(flip, BigRat(0)), domain_error);
  EXPECT_THROW(s_function({{0, 1, 1}}), domain_error);
}

TEST(SFunctionProperty, SignProductAgreesOnRandomTuples) {
  std::mt19937 rng(43);
  std::uniform_int_distribution<long> len(1, 5), rk(1, 3), deg(-6, 6);
  for (int i = 0; i < 3000; ++i) {
    std::vector<SlopeData> g(len(rng));
    for (auto& x : g) x = {BigInt(rk(rng)), rat(deg(rng), 2), rat(deg(rng), 3)};
    EXPECT_EQ(s_function(g), s_sign_product(g));
  }
}

TEST(SFunction, ExhaustiveGridUnitRanksLengthThree) {
  long n = 0;
  for (const auto& g : slope_grid(3, -2, 2, {1})) {
    ++n;
    ASSERT_EQ(s_function(g), s_sign_product(g));
  }
  EXPECT_EQ(n, 25 + 625 + 15625);
}

TEST(Psi, SinglePart) {
  for (long b = -4; b <= 4; ++b) {
    QSeries p = psi_closed({3}, 1, b, 4);
    if (b % 3 == 0) {
      EXPECT_TRUE(agree(p, QSeries::one(4)));
    } else {
      EXPECT_TRUE(p.is_zero());
    }
  }
}

TEST(Psi, RankTwoKernel) { EXPECT_TRUE(agree(psi_closed({1, 1}, -1, 1, 8), expand_kernel(rank2_kernel_h(), 8))); }

TEST(Psi, RankFourThreeOne) { EXPECT_TRUE(agree(psi_closed({3, 1}, -2, 2, 6), expand_kernel(listed_kernel_31(), 6))); }

TEST(PsiProperty, ShiftInvariance) {
  const std::vector<std::tuple<Composition, long, long>> cases{{{1, 1}, -1, 1}, {{2, 1}, 0, 1}, {{1, 2}, 1, 0}, {{1, 1, 1}, -1, 0}, {{2, 1, 1}, -2, 2}};
  for (const auto& [comp, a, b] : cases) {
    const long r = comp.rank();
    const QSeries base = psi_closed(comp, a, b, 4);
    for (long k1 = -2; k1 <= 2; ++k1)
      for (long k2 = -2; k2 <= 2; ++k2)
        EXPECT_TRUE(agree(base, psi_closed(comp, a + r * k1, b + r * k2, 4)))
            << comp.str() << " (" << a << "," << b << ") shifted by " << k1 << "," << k2;
  }
}

TEST(PsiOracle, AgreesAtSamplePoints) {
  const std::complex<double> w0 = std::polar(1.2, 0.3), q0 = 0.05;
  for (auto [comp, a, b] : std::vector<std::tuple<Composition, long, long>>{{{1, 1}, -1, 1}, {{2, 1}, 0, 0}}) {
    const auto num = psi_direct_numeric(comp, a, b, w0, q0);
    const auto cl = psi_closed(comp, a, b, 16).eval(w0, q0);
    EXPECT_LE(relative_error(cl, num), 1e-8) << comp.str();
  }
  EXPECT_NEAR(std::abs(psi_direct_numeric({2}, 0, 2, w0, q0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(psi_direct_numeric({2}, 0, 1, w0, q0)), 0.0, 1e-14);
}

TEST(PsiOracle, RejectsPointsOutsideRegion) {
  EXPECT_THROW(psi_direct_numeric({1, 1}, -1, 1, 0.9, 0.05), domain_error);
  EXPECT_THROW(psi_direct_numeric({1, 1}, -1, 1, 1.5, 0.5), domain_error);
}

TEST(ProofIdentities, Examples) {
  auto ids = proof_identities({2, 1, 1}, {0, 1, -1});
  EXPECT_EQ(ids[0].lhs, BigRat(8));
  EXPECT_EQ(ids[0].rhs, BigRat(8));
  for (const auto& c : proof_identities({5}, {2})) {
    EXPECT_EQ(c.lhs, 0);
    EXPECT_EQ(c.rhs, 0);
  }
  EXPECT_THROW(proof_identities({1, 1}, {1}), domain_error);
}

TEST(ProofIdentitiesProperty, RandomCompositions) {
  std::mt19937 rng(47);
  std::uniform_int_distribution<long> part(1, 4), len(1, 6), bv(-5, 5);
  for (int i = 0; i < 500; ++i) {
    std::vector<long> parts(len(rng)), b;
    for (auto& p : parts) p = part(rng);
    for (std::size_t j = 0; j < parts.size(); ++j) b.push_back(bv(rng));
    EXPECT_TRUE(proof_identities_check(Composition(parts), b));
  }
}

TEST(Assembly, RankOneIsH1) { EXPECT_TRUE(agree(h_sigma1_J10(1, 0, 3, 4), h_r_series(1, 4))); }

TEST(Assembly, RankTwo) {
  QSeries h1 = h_r_series(1, 6);
  QSeries ref = (h1 * h1 * psi_closed({1, 1}, -1, 1, 6)).truncated(4);
  EXPECT_TRUE(agree(h_sigma1_J10(2, -1, 1, 4), ref));
}

TEST(Assembly, RankThreeFiberClassDisplay) {
  const auto displays = rank3_displays();
  EXPECT_TRUE(agree(h_sigma1_J10(3, -1, 0, 3), expand_rank3_display(displays.front(), 3)));
}

TEST(Assembly, JobsDoNotChangeResult) {
  EXPECT_EQ(to_text(h_sigma1_J10(4, -2, 2, 3, 1)), to_text(h_sigma1_J10(4, -2, 2, 3, 3)));
}

TEST(Assembly, KernelOverrideIsUsed) {
  AssemblyOptions opt;
  opt.kernel = [](const Composition& c, long, long, const BigRat& t, int s) -> std::optional<QSeries> {
    if (c.length() == 2) return QSeries(t, s);
    return std::nullopt;
  };
  EXPECT_TRUE(h_sigma1_J10(2, -1, 1, 2, opt).is_zero());
  EXPECT_TRUE(agree(h_sigma1_J10(2, 0, 0, 2, opt), h_r_series(2, 2)));
}
