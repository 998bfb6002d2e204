// SPDX-License-Identifier: Apache-2.0
#include "oodeval/numerics.hpp"

#include <cmath>

namespace oodeval {

double pairwise_sum(const double* values, std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n == 1) return values[lo];
  if (n == 2) return values[lo] + values[lo + 1];
  const std::size_t mid = lo + n / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(values.data(), 0, values.size());
}

namespace {

Eigen::VectorXd row_sum_recurse(const Eigen::MatrixXd& m,
                                const std::vector<std::size_t>& rows,
                                std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  if (n == 1) return m.row(static_cast<Eigen::Index>(rows[lo])).transpose();
  const std::size_t mid = lo + n / 2;
  return row_sum_recurse(m, rows, lo, mid) + row_sum_recurse(m, rows, mid, hi);
}

}  // namespace

Eigen::VectorXd pairwise_row_sum(const Eigen::MatrixXd& m,
                                 const std::vector<std::size_t>& rows) {
  if (rows.empty()) return Eigen::VectorXd::Zero(m.cols());
  return row_sum_recurse(m, rows, 0, rows.size());
}

double quantile_sorted(const std::vector<double>& sorted_ascending, double p) {
  const std::size_t n = sorted_ascending.size();
  if (n == 1) return sorted_ascending[0];
  const double pos = p * static_cast<double>(n - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= n) return sorted_ascending[n - 1];
  const double frac = pos - static_cast<double>(i);
  return sorted_ascending[i] +
         frac * (sorted_ascending[i + 1] - sorted_ascending[i]);
}

double logsumexp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  Eigen::VectorXd e = (v.array() - m).exp();
  return e / e.sum();
}

}  // namespace oodeval
