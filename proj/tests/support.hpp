#pragma once

#include <random>
#include <sheafgen/qseries.hpp>

namespace sheafgen::testing {

// w^e at the default root order (x = w^{1/2}).
inline WPoly wp(long e, long c = 1) { return WPoly::monomial(c, 2 * e); }
inline WRational wr(long e, long c = 1) { return WRational(wp(e, c)); }

inline WPoly random_poly(std::mt19937& rng, long span = 3, long terms = 3) {
  std::uniform_int_distribution<long> e(-span, span), c(-4, 4);
  WPoly p;
  for (long i = 0; i < terms; ++i) p += WPoly::monomial(c(rng), 2 * e(rng));
  return p;
}

inline WPoly random_nonzero_poly(std::mt19937& rng) {
  WPoly p;
  while (p.is_zero()) p = random_poly(rng);
  return p;
}

inline WRational random_rational(std::mt19937& rng) { return WRational(random_poly(rng), random_nonzero_poly(rng)); }

inline QSeries random_series(std::mt19937& rng, const BigRat& trunc, bool nonzero_lead = false) {
  std::uniform_int_distribution<long> num(0, 8);
  QSeries::Map m;
  for (long i = 0; i < 6; ++i) {
    const BigRat e = rat(num(rng), 2) - 1;
    m[e] = WRational(random_poly(rng, 2, 2), WPoly::constant(1));
  }
  if (nonzero_lead) m[-1] = WRational(random_nonzero_poly(rng), random_nonzero_poly(rng));
  return QSeries(std::move(m), trunc);
}

}  // namespace sheafgen::testing
