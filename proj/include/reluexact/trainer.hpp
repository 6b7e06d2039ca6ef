#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reluexact/network.hpp"
#include "reluexact/pwl.hpp"

namespace reluexact {

/// Training data: D points x_j in R^n with targets y_j.
struct Dataset {
  std::size_t n = 0;
  std::vector<std::vector<double>> x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  /// D >= 1, every x_j of dimension n, all values finite.
  void validate() const;
};

/// Reads "x1,...,xn,y" rows. A first row that does not parse as numbers is
/// treated as a header. Blank lines are skipped.
Dataset read_dataset_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const Dataset& data);

enum class LossKind { Squared, Hinge };

LossKind parse_loss(const std::string& name);
std::string loss_name(LossKind loss);

/// Squared: (p - y)^2. Hinge: max{0, 1 - p y}.
double loss_value(LossKind loss, double prediction, double target);

/// An ordered two-part split: units are active exactly on `positive`.
struct Dichotomy {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;

  friend auto operator<=>(const Dichotomy&, const Dichotomy&) = default;
};

/// All splits for which some (c, delta) has c.x + delta <= 0 on the negative
/// side and > 0 on the positive side, found by brute force over 2^D subsets
/// with an exact LP test. Sorted. Throws BudgetExceeded when D > max_points.
std::vector<Dichotomy> enumerate_dichotomies(const Dataset& data, std::size_t max_points = 20);

/// Same set for n = 1 without LPs: threshold splits in both orientations.
std::vector<Dichotomy> enumerate_dichotomies_1d(const Dataset& data);

/// minimize sum_j loss(design_j . z, targets_j) subject to constraints_k . z <= 0.
struct ConvexSubproblem {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> design;
  std::vector<double> targets;
  std::vector<std::vector<double>> constraints;
};

struct SubproblemSolution {
  std::vector<double> z;
  double objective = 0;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Squared loss: active-set least squares in doubles. Hinge loss: exact LP on
/// the rational values of the doubles. `max_iterations == 0` picks a budget
/// from the problem size.
SubproblemSolution solve_subproblem(const ConvexSubproblem& sp, LossKind loss, double tol = 1e-8,
                                    std::size_t max_iterations = 0);

/// The convex program for fixed signs and one dichotomy per unit. Variables are
/// (a^1, b_1, ..., a^w, b_w) followed by the output bias when enabled.
ConvexSubproblem build_subproblem(const Dataset& data, const std::vector<int>& signs,
                                  const std::vector<const Dichotomy*>& dichotomies, bool output_bias);

struct TrainOptions {
  std::size_t width = 1;
  LossKind loss = LossKind::Squared;
  double tol = 1e-8;
  /// Cap on the number of subproblems in the enumeration.
  std::uint64_t budget = 5'000'000;
  /// Disables the symmetry pruning between units with equal signs.
  bool verify = false;
  /// Adds a free output bias; the default family has none.
  bool output_bias = false;
  unsigned threads = 1;
};

struct TrainCertificate {
  std::string method;
  std::uint64_t sign_vectors = 0;
  std::uint64_t dichotomies = 0;
  /// sign vectors x tuples (or interval tuples for the piecewise fit).
  std::uint64_t tuples_total = 0;
  std::uint64_t subproblems_solved = 0;
  std::uint64_t pruned = 0;
  std::uint64_t nonconverged = 0;
  std::uint64_t best_index = 0;
  double tol = 0;
};

/// f(x) = sum_i s_i max{0, a^i . x + b_i} (+ c).
struct TrainResult {
  std::size_t n = 0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<int> signs;
  std::vector<Dichotomy> dichotomies;
  bool has_output_bias = false;
  double output_bias = 0;
  /// Mean loss of the returned weights, re-evaluated on the data.
  double loss = 0;
  /// Sum of losses as reported by the winning subproblem.
  double objective = 0;
  TrainCertificate certificate;

  double predict(const std::vector<double>& x) const;
  /// Exact network with the dyadic values of the weights.
  ReluNetwork to_network() const;
};

/// Mean loss over the data.
double empirical_loss(const ReluNetwork& net, const Dataset& data, LossKind loss);
double empirical_loss(const TrainResult& result, const Dataset& data, LossKind loss);

/// Global minimizer over width-w two-layer networks: every sign vector and
/// every w-tuple of separable dichotomies.
TrainResult train_global(const Dataset& data, const TrainOptions& options);

/// The same search for n = 1, with the dichotomies listed directly.
TrainResult train_global_1d(const Dataset& data, const TrainOptions& options);

struct PwlFitResult {
  PwlFunction1D f;
  /// Per-piece slope and intercept of the winning program (blocks left to right).
  std::vector<double> slopes;
  std::vector<double> intercepts;
  /// Last sorted data index (1-based) of each of the first w-1 blocks.
  std::vector<std::size_t> cuts;
  std::vector<int> turn_signs;
  double loss = 0;
  double objective = 0;
  TrainCertificate certificate;

  ReluNetwork to_network() const { return from_pwl_2layer(f); }
};

/// Best continuous function with at most `options.width` pieces, by guessing
/// the data interval holding each breakpoint and the sign of each slope change.
PwlFitResult fit_pwl_1d(const Dataset& data, const TrainOptions& options);

}  // namespace reluexact
