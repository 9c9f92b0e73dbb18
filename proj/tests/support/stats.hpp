#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace specshare::testing {

struct ChiSquareFit {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

// Pearson chi-square of an age histogram (index = age) against (1-S)^(k-1) S. Ages are
// binned individually while the expected count stays >= 5; the rest is pooled in a tail bin.
inline ChiSquareFit chi_square_geometric(const std::vector<std::uint64_t>& histogram, double s) {
  std::uint64_t n = 0;
  for (auto c : histogram) n += c;
  const double total = static_cast<double>(n);

  ChiSquareFit fit;
  int bins = 0;
  double tail_prob = 1.0;
  std::uint64_t tail_count = n;
  for (std::size_t k = 1;; ++k) {
    const double p = std::pow(1.0 - s, static_cast<double>(k - 1)) * s;
    if (total * p < 5.0 || total * (tail_prob - p) < 5.0) break;
    const std::uint64_t observed = k < histogram.size() ? histogram[k] : 0;
    const double expected = total * p;
    fit.statistic += (observed - expected) * (observed - expected) / expected;
    tail_prob -= p;
    tail_count -= observed;
    ++bins;
  }
  const double expected_tail = total * tail_prob;
  if (expected_tail > 0.0) {
    fit.statistic += (tail_count - expected_tail) * (tail_count - expected_tail) / expected_tail;
    ++bins;
  }
  fit.dof = bins - 1;
  boost::math::chi_squared dist(fit.dof);
  fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.statistic));
  return fit;
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Recording interval after which consecutive ages of an S-process are correlated by at
// most `residual`.
inline std::uint64_t decorrelation_gap(double s, double residual = 1e-4) {
  if (s >= 1.0) return 1;
  return static_cast<std::uint64_t>(std::ceil(std::log(residual) / std::log(1.0 - s)));
}

// Asymptotic 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace specshare::testing
