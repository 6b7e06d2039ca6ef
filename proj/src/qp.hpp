#pragma once

#include <cstddef>
#include <vector>

namespace reluexact::detail {

struct LsqResult {
  std::vector<double> z;
  double objective = 0;  // ||A z - y||^2
  bool converged = false;
  std::size_t iterations = 0;
};

/// minimize ||A z - y||^2 subject to G z <= 0, by a primal active-set method
/// started at z = 0. Blocking constraints are added with the smallest index
/// winning ties and the smallest-index negative multiplier is dropped, which
/// keeps degenerate vertices from cycling in practice.
LsqResult constrained_least_squares(const std::vector<std::vector<double>>& A, const std::vector<double>& y,
                                    const std::vector<std::vector<double>>& G, std::size_t num_vars, double tol,
                                    std::size_t max_iterations);

}  // namespace reluexact::detail
