#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "qseries.hpp"

namespace sheafgen {

// One summand q^{qexp} w^{wexp} / prod (1 - w^{W} q^{B}) of a closed form indexed by k in Z^dim.
struct KernelTerm {
  BigRat qexp;
  long wexp;
  std::vector<std::pair<long, long>> dens;  // (W, B)
};

using KernelFormula = std::function<KernelTerm(const std::vector<long>&)>;

struct ReferenceKernel {
  std::string label;
  long dim;
  KernelFormula term;
};

// Expands sum_k term(k) through trunc, growing |k| shells until `quiet` consecutive shells add nothing.
inline QSeries expand_kernel(const ReferenceKernel& kern, const BigRat& trunc, long cap = 200, long quiet = 2,
                             int s = kRootOrder) {
  SeriesBuilder acc(trunc, s);
  long idle = 0;
  for (long rho = 0;; ++rho) {
    if (rho > cap) throw convergence_error(kern.label + ": shell expansion did not stabilize");
    bool any = false;
    std::vector<long> k(kern.dim, -rho);
    auto visit = [&](const std::vector<long>& kk) {
      KernelTerm t = kern.term(kk);
      if (t.qexp > trunc) return;
      any = true;
      std::vector<GeometricFactor> g;
      for (auto [W, B] : t.dens) g.push_back({1, x_exponent(BigRat(W), s), BigRat(B)});
      add_geometric_expansion(acc, t.qexp, WPoly::monomial(1, x_exponent(BigRat(t.wexp), s), s), g);
    };
    if (kern.dim == 0) {
      if (rho == 0) visit(k);
    } else {
      while (true) {
        long m = 0;
        for (long v : k) m = std::max(m, std::labs(v));
        if (m == rho) visit(k);
        std::size_t i = 0;
        while (i < k.size() && k[i] == rho) k[i++] = -rho;
        if (i == k.size()) break;
        ++k[i];
      }
    }
    if (any)
      idle = 0;
    else if (rho > 0 && ++idle >= quiet)
      break;
  }
  return acc.build();
}

// Rank-4 kernels Psi_{comp,(-2,2)} in listed closed form. (3,1)/(1,3) and (2,1,1)/(1,1,2) share a formula.
inline ReferenceKernel listed_kernel_31() {
  return {"(3,1)", 1, [](const std::vector<long>& k) {
            const long x = k[0];
            return KernelTerm{BigRat(6 * x * x - 4 * x) + rat(1, 2), -12 * x + 10, {{8, 4 * x - 2}}};
          }};
}

inline ReferenceKernel listed_kernel_22() {
  return {"(2,2)", 1, [](const std::vector<long>& k) {
            const long x = k[0];
            return KernelTerm{BigRat(2 * x * x + 4 * x) + rat(1, 2), -8 * x - 4, {{8, 2 * x + 1}}};
          }};
}

// The (2,2) form with q-exponent 2k^2 + 2k + 1/2.
inline ReferenceKernel corrected_kernel_22() {
  return {"(2,2) corrected", 1, [](const std::vector<long>& k) {
            const long x = k[0];
            return KernelTerm{BigRat(2 * x * x + 2 * x) + rat(1, 2), -8 * x - 4, {{8, 2 * x + 1}}};
          }};
}

inline ReferenceKernel listed_kernel_211() {
  return {"(2,1,1)", 2, [](const std::vector<long>& k) {
            const long x = k[0], y = k[1];
            return KernelTerm{BigRat(3 * x * x + 2 * x * y + y * y - 3 * x - y) + rat(1, 2), -10 * x - 2 * y + 8,
                              {{6, x - y}, {4, 2 * x + 2 * y - 2}}};
          }};
}

inline ReferenceKernel listed_kernel_121() {
  return {"(1,2,1)", 2, [](const std::vector<long>& k) {
            const long x = k[0], y = k[1];
            return KernelTerm{BigRat(x * x + 2 * x * y + 3 * y * y - 4 * y - 1), -6 * x - 6 * y + 10,
                              {{6, x - y}, {4, 2 * x + 2 * y - 2}}};
          }};
}

inline ReferenceKernel listed_kernel_1111() {
  return {"(1,1,1,1)", 3, [](const std::vector<long>& k) {
            const long x = k[0], y = k[1], z = k[2];
            return KernelTerm{BigRat(x * x + y * y + z * z + x * y + x * z + y * z - x - 2 * y - z) + rat(1, 2),
                              -6 * x - 4 * y - 2 * z + 10,
                              {{4, x - y}, {4, y - z}, {4, x + y + 2 * z - 2}}};
          }};
}

struct ListedKernelCase {
  std::vector<long> composition;
  ReferenceKernel kernel;
};

inline std::vector<ListedKernelCase> listed_rank4_kernels() {
  return {{{3, 1}, listed_kernel_31()},   {{1, 3}, listed_kernel_31()},     {{2, 2}, listed_kernel_22()},
          {{2, 1, 1}, listed_kernel_211()}, {{1, 2, 1}, listed_kernel_121()}, {{1, 1, 2}, listed_kernel_211()},
          {{1, 1, 1, 1}, listed_kernel_1111()}};
}

// Rank-2 kernel Psi_{(1,1),(-1,1)} = sum_k w^{-2k+1} q^{k^2+2k+3/4} / (1 - w^4 q^{2k+1}).
inline ReferenceKernel rank2_kernel_h() {
  return {"(1,1),(-1,1)", 1, [](const std::vector<long>& k) {
            const long x = k[0];
            return KernelTerm{BigRat(x * x + 2 * x) + rat(3, 4), -2 * x + 1, {{4, 2 * x + 1}}};
          }};
}

// Rank-3 displays on Sigma_1: H_{3,c1} = H_1 H_2 s1 + H_1^3 s2 (+ H_3 when 3 | b).
struct Rank3Display {
  std::string label;
  long a;
  long b;
  std::vector<ReferenceKernel> s1;
  ReferenceKernel s2;
};

namespace detail {

inline ReferenceKernel k1(std::string label, std::function<BigRat(long)> q, std::function<long(long)> w, long W,
                          std::function<long(long)> B) {
  return {std::move(label), 1, [=](const std::vector<long>& k) {
            return KernelTerm{q(k[0]), w(k[0]), {{W, B(k[0])}}};
          }};
}

// sum w^{wexp} q^{k1^2+k2^2+k1k2+lin} / ((1 - w^4 q^{2k1+k2+c}) (1 - w^4 q^{k2-k1})).
inline ReferenceKernel a2_sum(std::string label, std::function<BigRat(long, long)> lin, std::function<long(long, long)> w,
                              long c) {
  return {std::move(label), 2, [=](const std::vector<long>& k) {
            const long x = k[0], y = k[1];
            return KernelTerm{BigRat(x * x + y * y + x * y) + lin(x, y), w(x, y), {{4, 2 * x + y + c}, {4, y - x}}};
          }};
}

}  // namespace detail

inline std::vector<Rank3Display> rank3_displays() {
  using detail::a2_sum;
  using detail::k1;
  std::vector<Rank3Display> out;
  out.push_back({"f", -1, 0,
                 {k1("f/1", [](long k) -> BigRat { return BigRat(3 * k * k + 2 * k); }, [](long k) { return -6 * k + 4; }, 6,
                     [](long k) { return 3 * k; }),
                  k1("f/2", [](long k) -> BigRat { return BigRat(3 * k * k + k); }, [](long k) { return -6 * k + 2; }, 6,
                     [](long k) { return 3 * k; })},
                 a2_sum("f/3", [](long x, long y) -> BigRat { return BigRat(x + y); }, [](long x, long y) { return -2 * (x + 2 * y - 2); }, 0)});
  out.push_back({"-C+f", -1, -1,
                 {k1("-C+f/1", [](long k) -> BigRat { return BigRat(3 * k * k + 4 * k + 1); }, [](long k) { return -6 * k + 2; }, 6,
                     [](long k) { return 3 * k + 1; }),
                  k1("-C+f/2", [](long k) -> BigRat { return BigRat(3 * k * k - k); }, [](long k) { return -6 * k + 4; }, 6,
                     [](long k) { return 3 * k - 1; })},
                 a2_sum("-C+f/3", [](long x, long y) -> BigRat { return BigRat(2 * x + 2 * y + 1); },
                        [](long x, long y) { return -2 * (x + 2 * y - 1); }, 1)});
  out.push_back({"C+f", -1, 1,
                 {k1("C+f/1", [](long k) -> BigRat { return BigRat(3 * k * k) - rat(1, 3); }, [](long k) { return -6 * k + 6; }, 6,
                     [](long k) { return 3 * k - 1; }),
                  k1("C+f/2", [](long k) -> BigRat { return BigRat(3 * k * k + 3 * k) + rat(2, 3); }, [](long k) { return -6 * k; }, 6,
                     [](long k) { return 3 * k + 1; })},
                 a2_sum("C+f/3", [](long, long) -> BigRat { return rat(-1, 3); }, [](long x, long y) { return -2 * (x + 2 * y - 3); }, -1)});
  out.push_back({"0", 0, 0,
                 {k1("0/1", [](long k) -> BigRat { return BigRat(3 * k * k); }, [](long k) { return -6 * k; }, 6, [](long k) { return 3 * k; }),
                  k1("0/2", [](long k) -> BigRat { return BigRat(3 * k * k); }, [](long k) { return -6 * k; }, 6, [](long k) { return 3 * k; })},
                 a2_sum("0/3", [](long, long) -> BigRat { return BigRat(0); }, [](long x, long y) { return -2 * (x + 2 * y); }, 0)});
  out.push_back({"C", 0, 1,
                 {k1("C/1", [](long k) -> BigRat { return BigRat(3 * k * k - 2 * k) + rat(1, 3); }, [](long k) { return -6 * k + 2; }, 6,
                     [](long k) { return 3 * k - 1; }),
                  k1("C/2", [](long k) -> BigRat { return BigRat(3 * k * k + 2 * k) + rat(1, 3); }, [](long k) { return -6 * k - 2; }, 6,
                     [](long k) { return 3 * k + 1; })},
                 a2_sum("C/3", [](long x, long y) -> BigRat { return BigRat(x + y) + rat(1, 3); },
                        [](long x, long y) { return -2 * (x + 2 * y + 1); }, 1)});
  return out;
}

// Assembles a display from its kernels and H_1, H_2, H_3 through trunc.
inline QSeries expand_rank3_display(const Rank3Display& d, const BigRat& trunc, int s = kRootOrder) {
  const BigRat T = trunc + 1;
  QSeries H1 = h_r_series(1, T + 1, s);
  QSeries H2 = h_r_series(2, T + 1, s);
  QSeries s1(T + 1, s);
  for (const auto& k : d.s1) s1 = s1 + expand_kernel(k, T + 1, 200, 2, s);
  QSeries s2 = expand_kernel(d.s2, T + 1, 200, 2, s);
  QSeries total = H1 * H2 * s1 + H1 * H1 * H1 * s2;
  if (d.b % 3 == 0) total = total + h_r_series(3, T, s);
  return total.truncated(trunc);
}

}  // namespace sheafgen
