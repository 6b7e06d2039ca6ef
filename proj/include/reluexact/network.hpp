#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reluexact/pwl.hpp"
#include "reluexact/random.hpp"
#include "reluexact/rational.hpp"

namespace reluexact {

/// x -> W x + b with W stored row-major (out_dim x in_dim).
struct AffineMap {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  RationalVector weights;
  RationalVector bias;

  AffineMap() = default;
  /// All-zero map.
  AffineMap(std::size_t out, std::size_t in);

  static AffineMap identity(std::size_t n);
  /// Rows must all have length `in`; the in dimension is explicit so that maps
  /// with zero rows (a width-0 layer) keep their input size.
  static AffineMap from_rows(std::size_t in, const std::vector<RationalVector>& rows, RationalVector bias);

  Rational& at(std::size_t r, std::size_t c) { return weights[r * in_dim + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return weights[r * in_dim + c]; }
  RationalVector row(std::size_t r) const;

  RationalVector apply(const RationalVector& x) const;
  bool is_linear() const;
  /// Throws ValidationError when the storage does not match the dimensions.
  void validate() const;

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// outer(inner(x)) as a single affine map.
AffineMap compose_affine(const AffineMap& outer, const AffineMap& inner);

/// T_{k+1} o relu o T_k o ... o relu o T_1.
///
/// depth = k + 1, size = sum of hidden widths, width = max hidden width.
/// With `output_bias_allowed == false` the output map must be linear; builders
/// that need an output constant set the flag and record it in the bias.
class ReluNetwork {
 public:
  ReluNetwork(std::size_t input_dim, std::vector<AffineMap> hidden, AffineMap output, bool output_bias_allowed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_.out_dim; }
  const std::vector<AffineMap>& hidden() const { return hidden_; }
  const AffineMap& output() const { return output_; }
  bool output_bias_allowed() const { return output_bias_allowed_; }

  std::size_t depth() const { return hidden_.size() + 1; }
  std::size_t size() const;
  std::size_t width() const;
  std::vector<std::size_t> widths() const;

  friend bool operator==(const ReluNetwork&, const ReluNetwork&) = default;

 private:
  std::size_t input_dim_;
  std::vector<AffineMap> hidden_;
  AffineMap output_;
  bool output_bias_allowed_;
};

/// Signed sum of maxima of affine functionals: sum_j s_j max_{l in S_j} l(x).
struct HingeTerm {
  int sign = 1;
  std::vector<AffineMap> affines;  // each 1 x n
};

struct HingeForm {
  std::size_t input_dim = 0;
  std::vector<HingeTerm> terms;

  /// Signs in {-1, +1}, each term nonempty with at most n + 1 affines of input dim n.
  void validate() const;
  Rational operator()(const RationalVector& x) const;
};

/// Exact evaluation. Throws ValidationError on a dimension mismatch.
RationalVector forward(const ReluNetwork& net, const RationalVector& x);
/// Scalar-in, scalar-out convenience.
Rational forward_scalar(const ReluNetwork& net, const Rational& x);

/// The constant-zero R^n -> R^m network with no hidden layers.
ReluNetwork zero_network(std::size_t input_dim, std::size_t output_dim = 1);

/// Depth-2 network built from the flap decomposition; size <= pieces(f), and
/// pieces(f) - 1 when an outer slope is zero.
ReluNetwork from_pwl_2layer(const PwlFunction1D& f);

/// outer o inner: depth(outer) + depth(inner) - 1, size(outer) + size(inner).
/// The output map of `inner` is fused into the first layer of `outer`.
ReluNetwork compose_nets(const ReluNetwork& outer, const ReluNetwork& inner);

/// Extends a network to `target_depth` by carrying its outputs through
/// y = relu(y) - relu(-y) layers; costs 2 * output_dim units per added layer.
ReluNetwork pad_depth(const ReluNetwork& net, std::size_t target_depth);

/// Runs both networks side by side on the same input and concatenates outputs.
ReluNetwork stack_nets(const ReluNetwork& first, const ReluNetwork& second);

/// Pointwise sum. Equal depths give size s1 + s2; the shallower one is padded otherwise.
ReluNetwork add_nets(const ReluNetwork& f, const ReluNetwork& g);

/// Multiplies the output by `factor`.
ReluNetwork scale_net(const ReluNetwork& net, const Rational& factor);

/// R^2 -> R, max{x1, x2} = (x1 + x2)/2 + |x1 - x2|/2 with four hidden units.
ReluNetwork max_gadget();

/// Pointwise maximum of scalar networks by a balanced tree of max gadgets.
ReluNetwork max_nets(const std::vector<ReluNetwork>& nets);

/// Depth <= ceil(log2(n + 1)) + 1: one max tree per term, signed sum at the output.
ReluNetwork from_hinge(const HingeForm& h);

/// T = I relu(T) - I relu(-T): depth 2, size 2 * out_dim.
ReluNetwork affine_net(const AffineMap& T);

/// The exact PWL function of a scalar network, by propagating PWL values
/// through every neuron. Throws BudgetExceeded once a layer holds more than
/// `max_breakpoints` breakpoints in total.
PwlFunction1D extract_pwl(const ReluNetwork& net, std::size_t max_breakpoints = 1'000'000);

/// 2^{k-1} (w_1 + 1) w_2 ... w_k, at least 1.
std::uint64_t pieces_upper_bound(const std::vector<std::size_t>& widths);

/// Minimum size of a depth-(k+1) network with p pieces: k p^{1/k} / 2 - 1.
double size_lower_bound(std::uint64_t p, std::uint64_t k);

/// Maximum pieces of a depth-(k+1) network of size s: (2s/k)^k.
double pieces_cap(std::uint64_t s, std::uint64_t k);

/// Size any depth-(k'+1) representation of a depth-(k+1), width-w sawtooth
/// needs: k' w^{k/k'} / 2 - 1.
double depth_gap_size_bound(std::uint64_t w, std::uint64_t k, std::uint64_t k_prime);

/// Two-layer networks of the sawtooth layers composed in order: depth k+1, size w k.
ReluNetwork sawtooth_net(const SawtoothParams& params);

/// Midpoint of every piece, every breakpoint, and each breakpoint nudged by a
/// small offset to both sides; also one point deep in each unbounded piece.
RationalVector probe_points_1d(const PwlFunction1D& f);

/// Dense random weights in {-3..3}/{1,2}; scalar output unless stated.
ReluNetwork random_network(Rng& rng, std::size_t input_dim, const std::vector<std::size_t>& widths,
                           std::size_t output_dim = 1);

}  // namespace reluexact
