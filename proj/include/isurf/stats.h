#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "isurf/types.h"

namespace isurf {

// Regularized upper incomplete gamma Q(a, x) via series / continued fraction;
// enough accuracy for p-values.
inline Scalar gamma_q(Scalar a, Scalar x) {
  if (x < 0 || a <= 0) return 1.0;
  if (x == 0) return 1.0;
  const Scalar gln = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) by series, Q = 1 - P.
    Scalar ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Q(a,x) by Lentz continued fraction.
  const Scalar tiny = 1e-300;
  Scalar b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const Scalar an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const Scalar del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

// Upper-tail p-value of a chi-square statistic.
inline Scalar chi_square_pvalue(Scalar chi2, int dof) {
  return gamma_q(0.5 * dof, 0.5 * chi2);
}

// Pearson chi-square of observed counts against expected counts.
inline Scalar chi_square_statistic(const std::vector<std::int64_t>& observed,
                                   const std::vector<Scalar>& expected) {
  Scalar chi2 = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) continue;
    const Scalar d = static_cast<Scalar>(observed[i]) - expected[i];
    chi2 += d * d / expected[i];
  }
  return chi2;
}

struct LinearFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar r2 = 0;
};

inline LinearFit linear_fit(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  const size_t n = x.size();
  Scalar sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const Scalar mx = sx / n, my = sy / n;
  Scalar sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  Scalar ss_res = 0;
  for (size_t i = 0; i < n; ++i) {
    const Scalar r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

inline Scalar mean_of(const std::vector<Scalar>& v) {
  Scalar s = 0;
  for (Scalar x : v) s += x;
  return s / static_cast<Scalar>(v.size());
}

inline Scalar stdev_of(const std::vector<Scalar>& v) {
  const Scalar m = mean_of(v);
  Scalar s = 0;
  for (Scalar x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<Scalar>(v.size() - 1));
}

}  // namespace isurf
