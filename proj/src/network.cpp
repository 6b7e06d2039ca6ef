#include "reluexact/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reluexact/errors.hpp"

namespace reluexact {

AffineMap::AffineMap(std::size_t out, std::size_t in)
    : in_dim(in), out_dim(out), weights(out * in, Rational(0)), bias(out, Rational(0)) {}

AffineMap AffineMap::identity(std::size_t n) {
  AffineMap m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

AffineMap AffineMap::from_rows(std::size_t in, const std::vector<RationalVector>& rows, RationalVector bias) {
  if (rows.size() != bias.size()) throw ValidationError("affine map: rows and bias differ in length");
  AffineMap m(rows.size(), in);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != in) throw ValidationError("affine map: ragged weight rows");
    for (std::size_t c = 0; c < in; ++c) m.at(r, c) = rows[r][c];
  }
  m.bias = std::move(bias);
  return m;
}

RationalVector AffineMap::row(std::size_t r) const {
  return RationalVector(weights.begin() + static_cast<std::ptrdiff_t>(r * in_dim),
                        weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * in_dim));
}

RationalVector AffineMap::apply(const RationalVector& x) const {
  if (x.size() != in_dim) {
    throw ValidationError("affine map expects dimension " + std::to_string(in_dim) + ", got " +
                          std::to_string(x.size()));
  }
  RationalVector y = bias;
  for (std::size_t r = 0; r < out_dim; ++r) {
    for (std::size_t c = 0; c < in_dim; ++c) {
      const Rational& w = at(r, c);
      if (w != 0) y[r] += w * x[c];
    }
  }
  return y;
}

bool AffineMap::is_linear() const {
  return std::all_of(bias.begin(), bias.end(), [](const Rational& b) { return b == 0; });
}

void AffineMap::validate() const {
  if (weights.size() != in_dim * out_dim || bias.size() != out_dim) {
    throw ValidationError("affine map storage does not match its dimensions");
  }
}

AffineMap compose_affine(const AffineMap& outer, const AffineMap& inner) {
  if (outer.in_dim != inner.out_dim) throw ValidationError("compose: inner output dim differs from outer input dim");
  AffineMap m(outer.out_dim, inner.in_dim);
  for (std::size_t r = 0; r < outer.out_dim; ++r) {
    Rational b = outer.bias[r];
    for (std::size_t k = 0; k < outer.in_dim; ++k) {
      const Rational& w = outer.at(r, k);
      if (w == 0) continue;
      b += w * inner.bias[k];
      for (std::size_t c = 0; c < inner.in_dim; ++c) m.at(r, c) += w * inner.at(k, c);
    }
    m.bias[r] = b;
  }
  return m;
}

// ---------------------------------------------------------------------------

ReluNetwork::ReluNetwork(std::size_t input_dim, std::vector<AffineMap> hidden, AffineMap output,
                         bool output_bias_allowed)
    : input_dim_(input_dim),
      hidden_(std::move(hidden)),
      output_(std::move(output)),
      output_bias_allowed_(output_bias_allowed) {
  std::size_t dim = input_dim_;
  for (const auto& layer : hidden_) {
    layer.validate();
    if (layer.in_dim != dim) throw ValidationError("network layers do not chain");
    dim = layer.out_dim;
  }
  output_.validate();
  if (output_.in_dim != dim) throw ValidationError("network output map does not chain");
  if (!output_bias_allowed_ && !output_.is_linear()) {
    throw ValidationError("network output map has a bias but output_bias_allowed is false");
  }
}

std::size_t ReluNetwork::size() const {
  std::size_t s = 0;
  for (const auto& layer : hidden_) s += layer.out_dim;
  return s;
}

std::size_t ReluNetwork::width() const {
  std::size_t w = 0;
  for (const auto& layer : hidden_) w = std::max(w, layer.out_dim);
  return w;
}

std::vector<std::size_t> ReluNetwork::widths() const {
  std::vector<std::size_t> w;
  for (const auto& layer : hidden_) w.push_back(layer.out_dim);
  return w;
}

void HingeForm::validate() const {
  if (input_dim == 0) throw ValidationError("hinge form: input dimension must be positive");
  for (const auto& term : terms) {
    if (term.sign != 1 && term.sign != -1) throw ValidationError("hinge form: signs must be +1 or -1");
    if (term.affines.empty()) throw ValidationError("hinge form: every term needs at least one affine function");
    if (term.affines.size() > input_dim + 1) throw ValidationError("hinge form: a term has more than n + 1 affines");
    for (const auto& a : term.affines) {
      a.validate();
      if (a.out_dim != 1 || a.in_dim != input_dim) throw ValidationError("hinge form: affines must be R^n -> R");
    }
  }
}

Rational HingeForm::operator()(const RationalVector& x) const {
  Rational total = 0;
  for (const auto& term : terms) {
    Rational best = term.affines.front().apply(x)[0];
    for (std::size_t i = 1; i < term.affines.size(); ++i) {
      Rational v = term.affines[i].apply(x)[0];
      if (v > best) best = v;
    }
    total += term.sign * best;
  }
  return total;
}

// ---------------------------------------------------------------------------

RationalVector forward(const ReluNetwork& net, const RationalVector& x) {
  if (x.size() != net.input_dim()) {
    throw ValidationError("forward: expected input of dimension " + std::to_string(net.input_dim()));
  }
  RationalVector h = x;
  for (const auto& layer : net.hidden()) {
    h = layer.apply(h);
    for (auto& v : h) {
      if (v < 0) v = 0;
    }
  }
  return net.output().apply(h);
}

Rational forward_scalar(const ReluNetwork& net, const Rational& x) {
  if (net.output_dim() != 1) throw ValidationError("forward_scalar: network output is not scalar");
  return forward(net, {x})[0];
}

ReluNetwork zero_network(std::size_t input_dim, std::size_t output_dim) {
  return ReluNetwork(input_dim, {}, AffineMap(output_dim, input_dim), false);
}

ReluNetwork from_pwl_2layer(const PwlFunction1D& f) {
  const FlapDecomposition d = decompose_flaps(f);
  std::vector<RationalVector> rows;
  RationalVector hidden_bias;
  RationalVector out_row;
  for (const auto& flap : d.flaps) {
    if (flap.side == FlapSpec::Side::Right) {
      // slope * relu(x - a)
      rows.push_back({Rational(1)});
      hidden_bias.push_back(-flap.breakpoint);
      out_row.push_back(flap.slope);
    } else {
      // slope * min(0, x - a) = -slope * relu(a - x)
      rows.push_back({Rational(-1)});
      hidden_bias.push_back(flap.breakpoint);
      out_row.push_back(-flap.slope);
    }
  }
  const std::size_t width = rows.size();
  AffineMap hidden = AffineMap::from_rows(1, rows, std::move(hidden_bias));
  AffineMap output = AffineMap::from_rows(width, {out_row}, {d.constant});
  return ReluNetwork(1, {std::move(hidden)}, std::move(output), true);
}

ReluNetwork compose_nets(const ReluNetwork& outer, const ReluNetwork& inner) {
  if (inner.output_dim() != outer.input_dim()) {
    throw ValidationError("compose_nets: inner output dimension differs from outer input dimension");
  }
  std::vector<AffineMap> hidden = inner.hidden();
  if (outer.hidden().empty()) {
    AffineMap output = compose_affine(outer.output(), inner.output());
    const bool allowed = outer.output_bias_allowed() || inner.output_bias_allowed() || !output.is_linear();
    return ReluNetwork(inner.input_dim(), std::move(hidden), std::move(output), allowed);
  }
  hidden.push_back(compose_affine(outer.hidden().front(), inner.output()));
  for (std::size_t i = 1; i < outer.hidden().size(); ++i) hidden.push_back(outer.hidden()[i]);
  return ReluNetwork(inner.input_dim(), std::move(hidden), outer.output(), outer.output_bias_allowed());
}

ReluNetwork pad_depth(const ReluNetwork& net, std::size_t target_depth) {
  if (target_depth < net.depth()) throw ValidationError("pad_depth: target is shallower than the network");
  if (target_depth == net.depth()) return net;
  const std::size_t o = net.output_dim();
  const AffineMap& out = net.output();
  std::vector<AffineMap> hidden = net.hidden();

  // First added layer computes relu(y), relu(-y) from the old output map.
  AffineMap split(2 * o, out.in_dim);
  for (std::size_t r = 0; r < o; ++r) {
    for (std::size_t c = 0; c < out.in_dim; ++c) {
      split.at(r, c) = out.at(r, c);
      split.at(o + r, c) = -out.at(r, c);
    }
    split.bias[r] = out.bias[r];
    split.bias[o + r] = -out.bias[r];
  }
  hidden.push_back(std::move(split));

  // Further layers carry (relu(y), relu(-y)) forward unchanged.
  for (std::size_t d = net.depth() + 1; d < target_depth; ++d) {
    AffineMap carry(2 * o, 2 * o);
    for (std::size_t r = 0; r < o; ++r) {
      carry.at(r, r) = 1;
      carry.at(r, o + r) = -1;
      carry.at(o + r, r) = -1;
      carry.at(o + r, o + r) = 1;
    }
    hidden.push_back(std::move(carry));
  }

  AffineMap merge(o, 2 * o);
  for (std::size_t r = 0; r < o; ++r) {
    merge.at(r, r) = 1;
    merge.at(r, o + r) = -1;
  }
  return ReluNetwork(net.input_dim(), std::move(hidden), std::move(merge), net.output_bias_allowed());
}

namespace {

/// Block-diagonal [a 0; 0 b] with concatenated biases.
AffineMap block_diagonal(const AffineMap& a, const AffineMap& b) {
  AffineMap m(a.out_dim + b.out_dim, a.in_dim + b.in_dim);
  for (std::size_t r = 0; r < a.out_dim; ++r) {
    for (std::size_t c = 0; c < a.in_dim; ++c) m.at(r, c) = a.at(r, c);
    m.bias[r] = a.bias[r];
  }
  for (std::size_t r = 0; r < b.out_dim; ++r) {
    for (std::size_t c = 0; c < b.in_dim; ++c) m.at(a.out_dim + r, a.in_dim + c) = b.at(r, c);
    m.bias[a.out_dim + r] = b.bias[r];
  }
  return m;
}

/// [a; b] on a shared input.
AffineMap stack_rows(const AffineMap& a, const AffineMap& b) {
  AffineMap m(a.out_dim + b.out_dim, a.in_dim);
  for (std::size_t r = 0; r < a.out_dim; ++r) {
    for (std::size_t c = 0; c < a.in_dim; ++c) m.at(r, c) = a.at(r, c);
    m.bias[r] = a.bias[r];
  }
  for (std::size_t r = 0; r < b.out_dim; ++r) {
    for (std::size_t c = 0; c < b.in_dim; ++c) m.at(a.out_dim + r, c) = b.at(r, c);
    m.bias[a.out_dim + r] = b.bias[r];
  }
  return m;
}

ReluNetwork affine_only(const AffineMap& m) { return ReluNetwork(m.in_dim, {}, m, !m.is_linear()); }

}  // namespace

ReluNetwork stack_nets(const ReluNetwork& first, const ReluNetwork& second) {
  if (first.input_dim() != second.input_dim()) throw ValidationError("stack_nets: input dimensions differ");
  const std::size_t depth = std::max(first.depth(), second.depth());
  const ReluNetwork a = pad_depth(first, depth);
  const ReluNetwork b = pad_depth(second, depth);
  std::vector<AffineMap> hidden;
  for (std::size_t i = 0; i < a.hidden().size(); ++i) {
    hidden.push_back(i == 0 ? stack_rows(a.hidden()[i], b.hidden()[i])
                            : block_diagonal(a.hidden()[i], b.hidden()[i]));
  }
  AffineMap output = hidden.empty() ? stack_rows(a.output(), b.output()) : block_diagonal(a.output(), b.output());
  const bool allowed = a.output_bias_allowed() || b.output_bias_allowed() || !output.is_linear();
  return ReluNetwork(a.input_dim(), std::move(hidden), std::move(output), allowed);
}

ReluNetwork add_nets(const ReluNetwork& f, const ReluNetwork& g) {
  if (f.output_dim() != g.output_dim()) throw ValidationError("add_nets: output dimensions differ");
  const std::size_t o = f.output_dim();
  AffineMap sum(o, 2 * o);
  for (std::size_t r = 0; r < o; ++r) {
    sum.at(r, r) = 1;
    sum.at(r, o + r) = 1;
  }
  return compose_nets(affine_only(sum), stack_nets(f, g));
}

ReluNetwork scale_net(const ReluNetwork& net, const Rational& factor) {
  AffineMap out = net.output();
  for (auto& w : out.weights) w *= factor;
  for (auto& b : out.bias) b *= factor;
  return ReluNetwork(net.input_dim(), net.hidden(), std::move(out), net.output_bias_allowed());
}

ReluNetwork max_gadget() {
  AffineMap hidden = AffineMap::from_rows(2,
                                          {{Rational(1), Rational(1)},
                                           {Rational(-1), Rational(-1)},
                                           {Rational(1), Rational(-1)},
                                           {Rational(-1), Rational(1)}},
                                          RationalVector(4, Rational(0)));
  const Rational half(1, 2);
  AffineMap output = AffineMap::from_rows(4, {{half, Rational(-half), half, half}}, {Rational(0)});
  return ReluNetwork(2, {std::move(hidden)}, std::move(output), false);
}

ReluNetwork max_nets(const std::vector<ReluNetwork>& nets) {
  if (nets.empty()) throw ValidationError("max_nets: empty list");
  for (const auto& n : nets) {
    if (n.output_dim() != 1) throw ValidationError("max_nets: networks must have scalar output");
    if (n.input_dim() != nets.front().input_dim()) throw ValidationError("max_nets: input dimensions differ");
  }
  if (nets.size() == 1) return nets.front();
  const std::size_t half = nets.size() / 2;
  const std::vector<ReluNetwork> left(nets.begin(), nets.begin() + static_cast<std::ptrdiff_t>(half));
  const std::vector<ReluNetwork> right(nets.begin() + static_cast<std::ptrdiff_t>(half), nets.end());
  return compose_nets(max_gadget(), stack_nets(max_nets(left), max_nets(right)));
}

ReluNetwork from_hinge(const HingeForm& h) {
  h.validate();
  if (h.terms.empty()) return pad_depth(zero_network(h.input_dim), 2);
  std::vector<ReluNetwork> parts;
  for (const auto& term : h.terms) {
    std::vector<ReluNetwork> leaves;
    for (const auto& a : term.affines) leaves.push_back(affine_only(a));
    parts.push_back(scale_net(max_nets(leaves), Rational(term.sign)));
  }
  ReluNetwork total = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) total = add_nets(total, parts[i]);
  return pad_depth(total, std::max<std::size_t>(2, total.depth()));
}

ReluNetwork affine_net(const AffineMap& T) {
  T.validate();
  return pad_depth(affine_only(T), 2);
}

PwlFunction1D extract_pwl(const ReluNetwork& net, std::size_t max_breakpoints) {
  if (net.input_dim() != 1 || net.output_dim() != 1) {
    throw ValidationError("extract_pwl: network must be R -> R");
  }
  std::vector<PwlFunction1D> current{PwlFunction1D::identity()};
  auto combine = [&](const AffineMap& map, std::size_t r) {
    std::vector<const PwlFunction1D*> terms;
    RationalVector coeffs;
    for (std::size_t c = 0; c < map.in_dim; ++c) {
      terms.push_back(&current[c]);
      coeffs.push_back(map.at(r, c));
    }
    return linear_combination(terms, coeffs, map.bias[r]);
  };
  for (const auto& layer : net.hidden()) {
    std::vector<PwlFunction1D> next;
    next.reserve(layer.out_dim);
    std::size_t total = 0;
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
      next.push_back(relu(combine(layer, r)));
      total += next.back().breakpoints().size();
      if (total > max_breakpoints) {
        throw BudgetExceeded("extract_pwl: more than " + std::to_string(max_breakpoints) + " breakpoints in a layer");
      }
    }
    current = std::move(next);
  }
  return combine(net.output(), 0);
}

std::uint64_t pieces_upper_bound(const std::vector<std::size_t>& widths) {
  if (widths.empty()) throw ValidationError("pieces_upper_bound: need at least one hidden layer");
  mpz_class bound = 1;
  bound <<= static_cast<mp_bitcnt_t>(widths.size() - 1);
  bound *= static_cast<unsigned long>(widths.front() + 1);
  for (std::size_t i = 1; i < widths.size(); ++i) bound *= static_cast<unsigned long>(widths[i]);
  if (bound < 1) bound = 1;
  if (!bound.fits_ulong_p()) throw ValidationError("pieces_upper_bound: value exceeds 64 bits");
  return bound.get_ui();
}

double size_lower_bound(std::uint64_t p, std::uint64_t k) {
  if (p < 1 || k < 1) throw ValidationError("size_lower_bound: need p >= 1 and k >= 1");
  const double kd = static_cast<double>(k);
  return 0.5 * kd * std::pow(static_cast<double>(p), 1.0 / kd) - 1.0;
}

double pieces_cap(std::uint64_t s, std::uint64_t k) {
  if (k < 1) throw ValidationError("pieces_cap: need k >= 1");
  const double kd = static_cast<double>(k);
  return std::pow(2.0 * static_cast<double>(s) / kd, kd);
}

double depth_gap_size_bound(std::uint64_t w, std::uint64_t k, std::uint64_t k_prime) {
  if (k_prime < 1) throw ValidationError("depth_gap_size_bound: need k' >= 1");
  const double kp = static_cast<double>(k_prime);
  return 0.5 * kp * std::pow(static_cast<double>(w), static_cast<double>(k) / kp) - 1.0;
}

ReluNetwork sawtooth_net(const SawtoothParams& params) {
  params.validate();
  ReluNetwork net = from_pwl_2layer(sawtooth_layer(params.layers.front(), params.M));
  for (std::size_t i = 1; i < params.layers.size(); ++i) {
    net = compose_nets(from_pwl_2layer(sawtooth_layer(params.layers[i], params.M)), net);
  }
  return net;
}

RationalVector probe_points_1d(const PwlFunction1D& f) {
  const auto& bps = f.breakpoints();
  if (bps.empty()) return {Rational(-1), Rational(0), Rational(1)};
  Rational gap = 1;
  for (std::size_t i = 1; i < bps.size(); ++i) gap = std::min(gap, Rational(bps[i] - bps[i - 1]));
  const Rational eps = gap / 7;
  RationalVector pts;
  pts.push_back(bps.front() - 1);
  pts.push_back(bps.back() + 1);
  for (std::size_t i = 0; i < bps.size(); ++i) {
    pts.push_back(bps[i]);
    pts.push_back(bps[i] - eps);
    pts.push_back(bps[i] + eps);
    if (i + 1 < bps.size()) pts.push_back((bps[i] + bps[i + 1]) / 2);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

ReluNetwork random_network(Rng& rng, std::size_t input_dim, const std::vector<std::size_t>& widths,
                           std::size_t output_dim) {
  std::vector<AffineMap> hidden;
  std::size_t dim = input_dim;
  auto fill = [&](AffineMap& m) {
    for (auto& w : m.weights) w = rng.rational(3, 2);
    for (auto& b : m.bias) b = rng.rational(3, 2);
  };
  for (std::size_t w : widths) {
    AffineMap m(w, dim);
    fill(m);
    hidden.push_back(std::move(m));
    dim = w;
  }
  AffineMap out(output_dim, dim);
  fill(out);
  return ReluNetwork(input_dim, std::move(hidden), std::move(out), true);
}

}  // namespace reluexact
