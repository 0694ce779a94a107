#pragma once

#include <functional>

#include <Eigen/Dense>

namespace trapwave::detail {

using Operator = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

/// Largest singular value of an n x n operator given its action and the
/// action of its adjoint, by Golub-Kahan-Lanczos bidiagonalization with full
/// reorthogonalization. The start vector is fixed, so results are
/// reproducible.
double largest_singular_value(int n, const Operator& apply, const Operator& apply_adjoint,
                              double rel_tol = 1e-10, int max_iter = 120);

}  // namespace trapwave::detail
