#include "reluexact/lp.hpp"

#include <utility>

#include "reluexact/errors.hpp"

namespace reluexact {

bool LinearConstraint::satisfied_by(const RationalVector& x) const {
  const Rational lhs = dot(normal, x);
  switch (sense) {
    case Sense::LessEqual:
      return lhs <= offset;
    case Sense::Less:
      return lhs < offset;
    case Sense::Equal:
      return lhs == offset;
  }
  return false;
}

namespace {

// maximize c.y subject to A y <= b, y >= 0.
//
// Tableau layout follows the usual single-artificial-variable scheme: column n
// is the artificial variable, column n+1 the right-hand side, row m the
// objective and row m+1 the phase-one objective. Variable ids are stored in
// N (nonbasic) and B (basic); the artificial variable has id -1.
class Tableau {
 public:
  Tableau(const std::vector<RationalVector>& A, const RationalVector& b, const RationalVector& c)
      : m_(b.size()), n_(c.size()), D_(m_ + 2, RationalVector(n_ + 2)), B_(m_), N_(n_ + 1) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) D_[i][j] = A[i][j];
      B_[i] = static_cast<long>(n_ + i);
      D_[i][n_] = -1;
      D_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      N_[j] = static_cast<long>(j);
      D_[m_][j] = -c[j];
    }
    N_[n_] = -1;
    D_[m_ + 1][n_] = 1;
  }

  enum class Outcome { Optimal, Infeasible, Unbounded };

  Outcome solve(RationalVector& y, Rational& value) {
    if (m_ > 0) {
      std::size_t r = 0;
      for (std::size_t i = 1; i < m_; ++i) {
        if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
      }
      if (D_[r][n_ + 1] < 0) {
        pivot(r, n_);
        if (!run(2) || D_[m_ + 1][n_ + 1] < 0) return Outcome::Infeasible;
        for (std::size_t i = 0; i < m_; ++i) {
          if (B_[i] != -1) continue;
          std::size_t s = n_ + 1;
          for (std::size_t j = 0; j <= n_; ++j) {
            if (D_[i][j] != 0 && (s == n_ + 1 || N_[j] < N_[s])) s = j;
          }
          if (s != n_ + 1) pivot(i, s);
        }
      }
    }
    const bool bounded = run(1);
    y.assign(n_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      if (B_[i] >= 0 && static_cast<std::size_t>(B_[i]) < n_) y[static_cast<std::size_t>(B_[i])] = D_[i][n_ + 1];
    }
    value = D_[m_][n_ + 1];
    return bounded ? Outcome::Optimal : Outcome::Unbounded;
  }

 private:
  void pivot(std::size_t r, std::size_t s) {
    const Rational inv = 1 / D_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || D_[i][s] == 0) continue;
      const Rational factor = D_[i][s] * inv;
      for (std::size_t j = 0; j < n_ + 2; ++j) {
        if (D_[r][j] != 0) D_[i][j] -= D_[r][j] * factor;
      }
      D_[i][s] = D_[r][s] * factor;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j) {
      if (j != s) D_[r][j] *= inv;
    }
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i != r) D_[i][s] *= -inv;
    }
    D_[r][s] = inv;
    std::swap(B_[r], N_[s]);
  }

  // Bland's rule: smallest-id improving column, ratio ties broken by smallest basic id.
  bool run(int phase) {
    const std::size_t x = m_ + static_cast<std::size_t>(phase) - 1;
    for (;;) {
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (N_[j] == -phase) continue;
        if (D_[x][j] < 0 && (s == n_ + 1 || N_[j] < N_[s])) s = j;
      }
      if (s == n_ + 1) return true;
      std::size_t r = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (D_[i][s] <= 0) continue;
        Rational ratio_i = D_[i][n_ + 1] / D_[i][s];
        if (r == m_ || ratio_i < best || (ratio_i == best && B_[i] < B_[r])) {
          r = i;
          best = std::move(ratio_i);
        }
      }
      if (r == m_) return false;
      pivot(r, s);
    }
  }

  std::size_t m_, n_;
  std::vector<RationalVector> D_;
  std::vector<long> B_, N_;
};

struct StandardForm {
  std::vector<RationalVector> A;
  RationalVector b;
};

// Free x is split as x+ - x-; an optional extra column carries the strict slack t.
void add_row(StandardForm& sf, const RationalVector& normal, const Rational& offset, bool with_t, bool negate) {
  const std::size_t dim = normal.size();
  RationalVector row(2 * dim + (with_t ? 1 : 0));
  for (std::size_t k = 0; k < dim; ++k) {
    row[k] = negate ? Rational(-normal[k]) : normal[k];
    row[dim + k] = -row[k];
  }
  sf.A.push_back(std::move(row));
  sf.b.push_back(negate ? Rational(-offset) : offset);
}

StandardForm to_standard(std::size_t dim, const std::vector<LinearConstraint>& constraints, bool with_t) {
  StandardForm sf;
  for (const auto& c : constraints) {
    if (c.normal.size() != dim) throw ValidationError("linear constraint has the wrong dimension");
    switch (c.sense) {
      case LinearConstraint::Sense::LessEqual:
        add_row(sf, c.normal, c.offset, with_t, false);
        break;
      case LinearConstraint::Sense::Less:
        if (!with_t) throw ValidationError("strict constraints are not allowed here");
        add_row(sf, c.normal, c.offset, with_t, false);
        sf.A.back().back() = 1;
        break;
      case LinearConstraint::Sense::Equal:
        add_row(sf, c.normal, c.offset, with_t, false);
        add_row(sf, c.normal, c.offset, with_t, true);
        break;
    }
  }
  return sf;
}

RationalVector recover(const RationalVector& y, std::size_t dim) {
  RationalVector x(dim);
  for (std::size_t k = 0; k < dim; ++k) x[k] = y[k] - y[dim + k];
  return x;
}

}  // namespace

LpFeasibility lp_feasible(std::size_t dim, const std::vector<LinearConstraint>& constraints) {
  bool strict = false;
  for (const auto& c : constraints) strict = strict || c.sense == LinearConstraint::Sense::Less;
  StandardForm sf = to_standard(dim, constraints, strict);
  RationalVector c(2 * dim + (strict ? 1 : 0));
  if (strict) {
    RationalVector cap(c.size());
    cap.back() = 1;
    sf.A.push_back(std::move(cap));
    sf.b.push_back(1);
    c.back() = 1;
  }
  Tableau tab(sf.A, sf.b, c);
  RationalVector y;
  Rational value;
  const auto outcome = tab.solve(y, value);
  LpFeasibility out;
  if (outcome == Tableau::Outcome::Infeasible) return out;
  if (outcome == Tableau::Outcome::Unbounded) throw InvariantViolation("lp_feasible: bounded problem reported unbounded");
  if (strict && value <= 0) return out;
  out.feasible = true;
  out.witness = recover(y, dim);
  return out;
}

LpSolution lp_maximize(const RationalVector& objective, const std::vector<LinearConstraint>& constraints) {
  const std::size_t dim = objective.size();
  StandardForm sf = to_standard(dim, constraints, false);
  RationalVector c(2 * dim);
  for (std::size_t k = 0; k < dim; ++k) {
    c[k] = objective[k];
    c[dim + k] = -objective[k];
  }
  Tableau tab(sf.A, sf.b, c);
  RationalVector y;
  Rational value;
  LpSolution out;
  switch (tab.solve(y, value)) {
    case Tableau::Outcome::Infeasible:
      out.status = LpSolution::Status::Infeasible;
      return out;
    case Tableau::Outcome::Unbounded:
      out.status = LpSolution::Status::Unbounded;
      return out;
    case Tableau::Outcome::Optimal:
      break;
  }
  out.status = LpSolution::Status::Optimal;
  out.x = recover(y, dim);
  out.value = dot(objective, out.x);
  return out;
}

}  // namespace reluexact
