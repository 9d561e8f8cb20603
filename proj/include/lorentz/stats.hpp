// Copyright 2026 The Lorentz Tubes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small statistics toolbox: goodness-of-fit tests and moment helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace lorentz::stats {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  std::int64_t n = 0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd r;
  r.n = std::int64_t(xs.size());
  if (xs.empty()) return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / double(xs.size() - 1));
  }
  return r;
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int bins = 0;
};

/// Pearson test of integer samples against a pmf on {1, 2, ...}. Bins are
/// merged left to right until each expects at least `min_expected`; the last
/// bin absorbs the tail.
inline ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& samples,
                                      const std::function<double(std::int64_t)>& pmf,
                                      double min_expected = 5.0) {
  if (samples.empty()) throw std::invalid_argument("chi_square_gof: no samples");
  const double n = double(samples.size());
  std::map<std::int64_t, std::int64_t> counts;
  for (auto s : samples) ++counts[s];

  std::vector<double> expected;
  std::vector<double> observed;
  double e = 0.0;
  double o = 0.0;
  double mass = 0.0;
  std::int64_t k = 1;
  for (; n * (1.0 - mass) >= min_expected; ++k) {
    const double p = pmf(k);
    mass += p;
    e += n * p;
    auto it = counts.find(k);
    o += it == counts.end() ? 0.0 : double(it->second);
    if (e >= min_expected) {
      expected.push_back(e);
      observed.push_back(o);
      e = o = 0.0;
    }
  }
  // tail bin: everything from k on, plus any unflushed remainder
  double tail_obs = o;
  for (auto it = counts.lower_bound(k); it != counts.end(); ++it) tail_obs += double(it->second);
  for (auto it = counts.begin(); it != counts.end() && it->first < 1; ++it) tail_obs += double(it->second);
  const double tail_exp = e + n * std::max(0.0, 1.0 - mass);
  if (tail_exp >= min_expected || expected.empty()) {
    expected.push_back(tail_exp);
    observed.push_back(tail_obs);
  } else {
    expected.back() += tail_exp;
    observed.back() += tail_obs;
  }

  ChiSquareResult r;
  r.bins = int(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    r.statistic += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  r.dof = r.bins - 1;
  if (r.dof >= 1) {
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

/// Asymptotic Kolmogorov survival function Q(λ) = 2 Σ (-1)^{j-1} e^{-2 j² λ²}.
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
inline KsResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_test: no samples");
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

/// Mean and variance of a sum of independent Bernoulli(p_j).
struct PoissonBinomial {
  double mean = 0.0;
  double variance = 0.0;
};

inline PoissonBinomial poisson_binomial(const std::vector<double>& ps) {
  PoissonBinomial r;
  for (double p : ps) {
    r.mean += p;
    r.variance += p * (1.0 - p);
  }
  return r;
}

/// Least-squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: need >= 2 points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::nan("");
}

}  // namespace lorentz::stats
