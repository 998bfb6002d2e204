// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace oodeval {

/// Fixed left-to-right pairwise reduction of values[lo, hi). The reduction
/// tree depends only on the index range, so repeated runs (and any internal
/// parallelisation over disjoint ranges) agree bit-for-bit.
double pairwise_sum(const double* values, std::size_t lo, std::size_t hi);
double pairwise_sum(const std::vector<double>& values);

/// Pairwise reduction over rows of a matrix; returns the column-wise sum.
/// `rows` selects and orders the summed rows.
Eigen::VectorXd pairwise_row_sum(const Eigen::MatrixXd& m,
                                 const std::vector<std::size_t>& rows);

/// Linear-interpolation quantile on an ascending-sorted range, matching the
/// convention value = x[i] + frac * (x[i+1] - x[i]) at position p*(n-1).
double quantile_sorted(const std::vector<double>& sorted_ascending, double p);

/// log(sum(exp(v))) with max-subtraction.
double logsumexp(const Eigen::VectorXd& v);

/// softmax(v) with max-subtraction.
Eigen::VectorXd softmax(const Eigen::VectorXd& v);

}  // namespace oodeval
