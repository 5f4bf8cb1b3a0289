#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// Sort, cut into s+1 bins (first n mod (s+1) bins one larger), midpoints
/// between neighbouring bins, then drop repeats and values >= max.
inline std::vector<double> thresholds(std::vector<double> y, std::size_t s) {
  std::sort(y.begin(), y.end());
  const std::size_t n = y.size();
  const std::size_t base = n / (s + 1);
  const std::size_t extra = n % (s + 1);
  std::vector<double> raw;
  std::size_t end = 0;
  for (std::size_t b = 0; b < s; ++b) {
    end += base + (b < extra ? 1 : 0);
    raw.push_back((y[end - 1] + y[end]) / 2.0);
  }
  std::vector<double> out;
  for (double t : raw) {
    if (t >= y.back()) continue;
    if (!out.empty() && t == out.back()) continue;
    out.push_back(t);
  }
  return out;
}

/// Solves (A^T A) beta = A^T y by Gaussian elimination with partial pivoting,
/// where A = [1 | X]. Returns {intercept, coefficients...}.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const std::size_t p = x.front().size() + 1;
  std::vector<std::vector<double>> m(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> a(p);
    a[0] = 1.0;
    for (std::size_t j = 1; j < p; ++j) a[j] = x[r][j - 1];
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) m[i][j] += a[i] * a[j];
      m[i][p] += a[i] * y[r];
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k <= p; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t i = 0; i < p; ++i) beta[i] = m[i][p] / m[i][i];
  return beta;
}

/// Two-sided Student-t tail by composite Simpson integration of the density
/// over [0, |t|].
inline double t_two_sided_p(double t, double df, std::size_t steps = 200000) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * std::numbers::pi);
  auto pdf = [&](double u) { return c * std::pow(1.0 + u * u / df, -(df + 1) / 2); };
  const double b = std::abs(t);
  const double h = b / static_cast<double>(steps);
  double sum = pdf(0.0) + pdf(b);
  for (std::size_t i = 1; i < steps; ++i) sum += pdf(h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  const double central = sum * h / 3.0;  // P(0 <= T <= |t|)
  return 1.0 - 2.0 * central;
}

/// Average ranks by counting: rank = 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (double w : v) {
      smaller += w < v[i];
      equal += w == v[i];
    }
    out[i] = 1.0 + smaller + (equal - 1.0) / 2.0;
  }
  return out;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

/// Every (feature, midpoint) candidate scored by summed child SSE; strictly
/// better wins, scanning features then thresholds in ascending order.
inline Split best_sse_split(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                            std::size_t min_leaf = 1) {
  Split best;
  const std::size_t d = x.front().size();
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<double> vals;
    for (const auto& row : x) vals.push_back(row[f]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double t = (vals[k] + vals[k + 1]) / 2.0;
      std::vector<double> l, r;
      for (std::size_t i = 0; i < x.size(); ++i) (x[i][f] <= t ? l : r).push_back(y[i]);
      if (l.size() < min_leaf || r.size() < min_leaf) continue;
      auto sse = [](const std::vector<double>& v) {
        double m = 0;
        for (double a : v) m += a;
        m /= static_cast<double>(v.size());
        double s = 0;
        for (double a : v) s += (a - m) * (a - m);
        return s;
      };
      const double cost = sse(l) + sse(r);
      if (cost < best.cost - 1e-9) best = {static_cast<int>(f), t, cost};
    }
  }
  return best;
}

/// Profile Box-Cox log-likelihood evaluated directly from the definition.
inline double box_cox_loglik(const std::vector<double>& w, double lambda) {
  const double n = static_cast<double>(w.size());
  std::vector<double> v;
  double log_sum = 0.0;
  for (double a : w) {
    v.push_back(lambda == 0.0 ? std::log(a) : (std::pow(a, lambda) - 1.0) / lambda);
    log_sum += std::log(a);
  }
  double m = 0.0;
  for (double a : v) m += a;
  m /= n;
  double var = 0.0;
  for (double a : v) var += (a - m) * (a - m);
  var /= n;
  return -n / 2.0 * std::log(var) + (lambda - 1.0) * log_sum;
}

}  // namespace oracle
