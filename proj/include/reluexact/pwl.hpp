#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reluexact/random.hpp"
#include "reluexact/rational.hpp"

namespace reluexact {

/// Continuous piecewise-linear function R -> R with exact rational data.
///
/// Stored in normalized form: breakpoints strictly increasing and adjacent
/// slopes always different, so `pieces() == breakpoints().size() + 1`.
/// Values at the breakpoints are integrated from the anchor point, which is
/// the first breakpoint (or x = 0 when the function is a single affine piece).
class PwlFunction1D {
 public:
  /// The zero function.
  PwlFunction1D();

  static PwlFunction1D affine(const Rational& slope, const Rational& intercept);
  static PwlFunction1D identity() { return affine(1, 0); }
  static PwlFunction1D constant(const Rational& value) { return affine(0, value); }

  /// `slopes` lists one slope per piece, left to right; the graph passes
  /// through (anchor_x, anchor_y). Collinear neighbours are merged.
  static PwlFunction1D from_slopes(RationalVector breakpoints, RationalVector slopes,
                                   const Rational& anchor_x, const Rational& anchor_y);

  /// Graph vertices (xs[i], ys[i]) with xs strictly increasing, plus the slopes
  /// of the two unbounded pieces. Collinear vertices are dropped.
  static PwlFunction1D from_vertices(const Rational& left_slope, RationalVector xs, RationalVector ys,
                                     const Rational& right_slope);

  const RationalVector& breakpoints() const { return breakpoints_; }
  const RationalVector& slopes() const { return slopes_; }
  /// f at each breakpoint.
  const RationalVector& values() const { return values_; }
  const Rational& left_slope() const { return slopes_.front(); }
  const Rational& right_slope() const { return slopes_.back(); }
  const Rational& anchor_x() const { return anchor_x_; }
  const Rational& anchor_y() const { return anchor_y_; }

  std::size_t pieces() const { return slopes_.size(); }
  /// Number of pieces meeting the open interval (lo, hi).
  std::size_t pieces_in(const Rational& lo, const Rational& hi) const;

  Rational operator()(const Rational& x) const;

  /// Index of the piece containing x (a breakpoint belongs to the piece on its right).
  std::size_t piece_index(const Rational& x) const;

  friend bool operator==(const PwlFunction1D& a, const PwlFunction1D& b);

 private:
  void normalize();

  RationalVector breakpoints_;
  RationalVector slopes_;
  RationalVector values_;
  Rational anchor_x_;
  Rational anchor_y_;
};

Rational eval(const PwlFunction1D& f, const Rational& x);

PwlFunction1D add(const PwlFunction1D& f, const PwlFunction1D& g);
PwlFunction1D subtract(const PwlFunction1D& f, const PwlFunction1D& g);
PwlFunction1D scale(const PwlFunction1D& f, const Rational& factor);
PwlFunction1D add_constant(const PwlFunction1D& f, const Rational& c);
/// sum_i coefficients[i] * terms[i] + constant, merged in one pass.
PwlFunction1D linear_combination(const std::vector<const PwlFunction1D*>& terms, const RationalVector& coefficients,
                                 const Rational& constant);

/// outer(inner(x)).
PwlFunction1D compose(const PwlFunction1D& outer, const PwlFunction1D& inner);

/// Pointwise maximum; crossing points are computed exactly.
PwlFunction1D max_pwl(const PwlFunction1D& f, const PwlFunction1D& g);
PwlFunction1D min_pwl(const PwlFunction1D& f, const PwlFunction1D& g);
/// max{0, f}.
PwlFunction1D relu(const PwlFunction1D& f);

/// Zeros of f that are isolated crossings or touching points (not whole zero pieces).
RationalVector crossing_points(const PwlFunction1D& f);

/// Exact integral of |f - g| over [lo, hi].
Rational l1_distance(const PwlFunction1D& f, const PwlFunction1D& g, const Rational& lo, const Rational& hi);

// ---------------------------------------------------------------------------
// Sawtooth family

/// Parameters of H = h_{a^k} o ... o h_{a^1}. Every layer is a strictly
/// increasing vector inside (0, M) of the same length w - 1 >= 1.
struct SawtoothParams {
  Rational M = 1;
  std::vector<RationalVector> layers;

  /// Throws ValidationError when the parameters leave the simplex.
  void validate() const;
  std::size_t width() const { return layers.empty() ? 0 : layers.front().size() + 1; }
  std::size_t depth() const { return layers.size(); }

  /// a^i = (M/w, 2M/w, ..., (w-1)M/w) for every layer.
  static SawtoothParams uniform(std::size_t w, std::size_t k, const Rational& M = 1);
};

/// h_a: zero left of 0, h(a_i) = M (i mod 2), h(M) = M - h(a_p), and linear
/// continuation of the last bounded piece beyond M.
PwlFunction1D sawtooth_layer(const RationalVector& a, const Rational& M);

/// The composed hard function; has w^k pieces inside [0, M].
PwlFunction1D sawtooth(const SawtoothParams& params);

/// Certified lower bound on ||s - g||_1 over [0,1] for the uniform sawtooth s
/// with w^k teeth and any comparator g with p pieces:
/// max(0, (floor(w^k / 2) - (p - 1)) / (2 w^k)).
Rational gap_lower_bound(std::uint64_t w, std::uint64_t k, std::uint64_t p);

/// The looser closed form 1/4 - (2p - 1) / (4 w^k); may be negative.
Rational gap_closed_form(std::uint64_t w, std::uint64_t k, std::uint64_t p);

/// Size below which every depth-(k'+1) network stays more than delta away in L1:
/// k' * w^{k/k'} * (1 - 4 delta)^{1/k'} / 2^{1 + 1/k'}.
double approximation_size_threshold(std::uint64_t w, std::uint64_t k, std::uint64_t k_prime, double delta);

// ---------------------------------------------------------------------------
// Flap decomposition

/// One-breakpoint building block. A right flap is slope * max{0, x - a},
/// a left flap is slope * min{0, x - a}. Each is a single ReLU unit.
struct FlapSpec {
  enum class Side { Left, Right };
  Side side = Side::Right;
  Rational breakpoint;
  Rational slope;

  Rational operator()(const Rational& x) const;
};

struct FlapDecomposition {
  std::vector<FlapSpec> flaps;
  /// Output constant (bias of the output node).
  Rational constant;

  Rational operator()(const Rational& x) const;
};

/// Writes f as a sum of flaps plus a constant. With p pieces this uses at most
/// p flaps, and p - 1 when the leftmost or rightmost slope is zero. A single
/// affine piece with nonzero slope uses two flaps at 0.
FlapDecomposition decompose_flaps(const PwlFunction1D& f);

/// Random normalized function with exactly `pieces` pieces, breakpoints in
/// [-8, 8] on a 1/8 lattice and small rational slopes. `zero_left` / `zero_right` force a
/// flat outer piece.
PwlFunction1D random_pwl(Rng& rng, std::size_t pieces, bool zero_left = false, bool zero_right = false);

}  // namespace reluexact
