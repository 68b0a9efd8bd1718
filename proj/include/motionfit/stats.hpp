#pragma once

#include <span>
#include <vector>

namespace motionfit {

// Ranks starting at 1; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of the average ranks. Throws "undefined correlation"
// for a constant input and on length mismatch or fewer than 2 values.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

// Two-sided p for a rank correlation from its t statistic with n - 2 dof.
// Requires n >= 10; |rho| = 1 gives 0.
double spearman_significance(double rho, std::size_t n);

}  // namespace motionfit
