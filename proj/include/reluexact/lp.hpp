#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "reluexact/rational.hpp"

namespace reluexact {

/// normal . x  (<= | < | =)  offset
struct LinearConstraint {
  enum class Sense { LessEqual, Less, Equal };

  RationalVector normal;
  Rational offset;
  Sense sense = Sense::LessEqual;

  bool satisfied_by(const RationalVector& x) const;
  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

struct LpFeasibility {
  bool feasible = false;
  /// A point satisfying every constraint (strict ones strictly); empty when infeasible.
  RationalVector witness;
};

/// Exact decision of a finite system over Q^n with free variables. Strict
/// rows are handled by maximizing a common slack t <= 1 and testing t > 0.
LpFeasibility lp_feasible(std::size_t dim, const std::vector<LinearConstraint>& constraints);

struct LpSolution {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  RationalVector x;
  Rational value;
};

/// maximize objective . x subject to non-strict constraints; x is free.
/// Dense tableau simplex with Bland's rule, so it always terminates and the
/// answer depends only on the input order.
LpSolution lp_maximize(const RationalVector& objective, const std::vector<LinearConstraint>& constraints);

}  // namespace reluexact
