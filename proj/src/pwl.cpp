#include "reluexact/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "reluexact/errors.hpp"

namespace reluexact {
namespace {

void sort_unique(RationalVector& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

/// Rebuilds a function from every point where it may bend. `f` must be affine
/// between consecutive candidates and beyond the outermost ones.
template <class F>
PwlFunction1D from_candidates(RationalVector xs, F&& f) {
  sort_unique(xs);
  if (xs.empty()) {
    Rational y0 = f(Rational(0));
    Rational y1 = f(Rational(1));
    return PwlFunction1D::affine(y1 - y0, y0);
  }
  RationalVector ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) ys.push_back(f(x));
  Rational left = ys.front() - f(Rational(xs.front() - 1));
  Rational right = f(Rational(xs.back() + 1)) - ys.back();
  return PwlFunction1D::from_vertices(left, std::move(xs), std::move(ys), right);
}

/// One affine piece with optional finite ends and a point on it.
struct Piece {
  std::optional<Rational> lo;
  std::optional<Rational> hi;
  Rational slope;
  Rational ref_x;
  Rational ref_y;

  Rational at(const Rational& x) const { return ref_y + slope * (x - ref_x); }
  bool contains(const Rational& x) const { return (!lo || *lo <= x) && (!hi || x <= *hi); }
};

std::vector<Piece> pieces_of(const PwlFunction1D& f) {
  const auto& bps = f.breakpoints();
  const auto& vals = f.values();
  std::vector<Piece> out;
  out.reserve(f.pieces());
  if (bps.empty()) {
    out.push_back({std::nullopt, std::nullopt, f.slopes().front(), f.anchor_x(), f.anchor_y()});
    return out;
  }
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    Piece p;
    p.slope = f.slopes()[i];
    if (i > 0) p.lo = bps[i - 1];
    if (i < bps.size()) p.hi = bps[i];
    if (i == 0) {
      p.ref_x = bps[0];
      p.ref_y = vals[0];
    } else {
      p.ref_x = bps[i - 1];
      p.ref_y = vals[i - 1];
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

PwlFunction1D::PwlFunction1D() : slopes_{Rational(0)}, anchor_x_(0), anchor_y_(0) {}

PwlFunction1D PwlFunction1D::affine(const Rational& slope, const Rational& intercept) {
  PwlFunction1D f;
  f.slopes_ = {slope};
  f.anchor_x_ = 0;
  f.anchor_y_ = intercept;
  return f;
}

PwlFunction1D PwlFunction1D::from_slopes(RationalVector breakpoints, RationalVector slopes, const Rational& anchor_x,
                                         const Rational& anchor_y) {
  if (slopes.size() != breakpoints.size() + 1) {
    throw ValidationError("PWL function needs exactly one slope per piece");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) throw ValidationError("PWL breakpoints must be strictly increasing");
  }
  PwlFunction1D f;
  f.breakpoints_ = std::move(breakpoints);
  f.slopes_ = std::move(slopes);
  f.anchor_x_ = anchor_x;
  f.anchor_y_ = anchor_y;
  f.normalize();
  return f;
}

PwlFunction1D PwlFunction1D::from_vertices(const Rational& left_slope, RationalVector xs, RationalVector ys,
                                           const Rational& right_slope) {
  if (xs.size() != ys.size()) throw ValidationError("PWL vertices: x and y lengths differ");
  if (xs.empty()) throw ValidationError("PWL vertices: at least one vertex is required");
  RationalVector slopes;
  slopes.reserve(xs.size() + 1);
  slopes.push_back(left_slope);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i - 1] < xs[i])) throw ValidationError("PWL vertices must have strictly increasing x");
    slopes.push_back((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
  }
  slopes.push_back(right_slope);
  Rational ax = xs.front();
  Rational ay = ys.front();
  return from_slopes(std::move(xs), std::move(slopes), ax, ay);
}

void PwlFunction1D::normalize() {
  RationalVector bps;
  RationalVector sl;
  sl.push_back(slopes_.front());
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (slopes_[i + 1] == sl.back()) continue;
    bps.push_back(breakpoints_[i]);
    sl.push_back(slopes_[i + 1]);
  }
  breakpoints_ = std::move(bps);
  slopes_ = std::move(sl);

  if (breakpoints_.empty()) {
    values_.clear();
    anchor_y_ = anchor_y_ - slopes_.front() * anchor_x_;
    anchor_x_ = 0;
    return;
  }
  const std::size_t nb = breakpoints_.size();
  values_.assign(nb, Rational(0));
  const std::size_t idx = static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), anchor_x_) - breakpoints_.begin());
  // The anchor lies on piece idx, i.e. between breakpoints idx-1 and idx.
  std::size_t start = idx;
  if (idx < nb) {
    values_[idx] = anchor_y_ + slopes_[idx] * (breakpoints_[idx] - anchor_x_);
  } else {
    start = idx - 1;
    values_[start] = anchor_y_ - slopes_[idx] * (anchor_x_ - breakpoints_[start]);
  }
  for (std::size_t i = start + 1; i < nb; ++i) {
    values_[i] = values_[i - 1] + slopes_[i] * (breakpoints_[i] - breakpoints_[i - 1]);
  }
  for (std::size_t i = start; i > 0; --i) {
    values_[i - 1] = values_[i] - slopes_[i] * (breakpoints_[i] - breakpoints_[i - 1]);
  }
  anchor_x_ = breakpoints_.front();
  anchor_y_ = values_.front();
}

std::size_t PwlFunction1D::pieces_in(const Rational& lo, const Rational& hi) const {
  if (!(lo < hi)) return 0;
  auto first = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), lo);
  auto last = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), hi);
  return 1 + static_cast<std::size_t>(last > first ? last - first : 0);
}

std::size_t PwlFunction1D::piece_index(const Rational& x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

Rational PwlFunction1D::operator()(const Rational& x) const {
  if (breakpoints_.empty()) return anchor_y_ + slopes_.front() * (x - anchor_x_);
  const std::size_t i = piece_index(x);
  if (i == 0) return values_[0] + slopes_[0] * (x - breakpoints_[0]);
  return values_[i - 1] + slopes_[i] * (x - breakpoints_[i - 1]);
}

bool operator==(const PwlFunction1D& a, const PwlFunction1D& b) {
  return a.breakpoints_ == b.breakpoints_ && a.slopes_ == b.slopes_ && a.anchor_x_ == b.anchor_x_ &&
         a.anchor_y_ == b.anchor_y_;
}

Rational eval(const PwlFunction1D& f, const Rational& x) { return f(x); }

PwlFunction1D linear_combination(const std::vector<const PwlFunction1D*>& terms, const RationalVector& coefficients,
                                 const Rational& constant) {
  if (terms.size() != coefficients.size()) throw ValidationError("linear_combination: length mismatch");
  RationalVector xs;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (coefficients[i] == 0) continue;
    xs.insert(xs.end(), terms[i]->breakpoints().begin(), terms[i]->breakpoints().end());
  }
  return from_candidates(std::move(xs), [&](const Rational& x) {
    Rational acc = constant;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (coefficients[i] != 0) acc += coefficients[i] * (*terms[i])(x);
    }
    return acc;
  });
}

PwlFunction1D add(const PwlFunction1D& f, const PwlFunction1D& g) {
  return linear_combination({&f, &g}, {Rational(1), Rational(1)}, Rational(0));
}

PwlFunction1D subtract(const PwlFunction1D& f, const PwlFunction1D& g) {
  return linear_combination({&f, &g}, {Rational(1), Rational(-1)}, Rational(0));
}

PwlFunction1D scale(const PwlFunction1D& f, const Rational& factor) {
  return linear_combination({&f}, {factor}, Rational(0));
}

PwlFunction1D add_constant(const PwlFunction1D& f, const Rational& c) {
  return linear_combination({&f}, {Rational(1)}, c);
}

PwlFunction1D compose(const PwlFunction1D& outer, const PwlFunction1D& inner) {
  RationalVector xs = inner.breakpoints();
  const auto& obps = outer.breakpoints();
  if (!obps.empty()) {
    for (const Piece& p : pieces_of(inner)) {
      if (p.slope == 0) continue;
      // Image of the piece is an interval of the outer domain; find the outer
      // breakpoints inside it and pull each back through the piece.
      std::optional<Rational> ylo, yhi;
      if (p.slope > 0) {
        if (p.lo) ylo = p.at(*p.lo);
        if (p.hi) yhi = p.at(*p.hi);
      } else {
        if (p.hi) ylo = p.at(*p.hi);
        if (p.lo) yhi = p.at(*p.lo);
      }
      auto first = ylo ? std::lower_bound(obps.begin(), obps.end(), *ylo) : obps.begin();
      auto last = yhi ? std::upper_bound(obps.begin(), obps.end(), *yhi) : obps.end();
      for (auto it = first; it < last; ++it) {
        xs.push_back(p.ref_x + (*it - p.ref_y) / p.slope);
      }
    }
  }
  return from_candidates(std::move(xs), [&](const Rational& x) { return outer(inner(x)); });
}

RationalVector crossing_points(const PwlFunction1D& f) {
  RationalVector out;
  for (const Piece& p : pieces_of(f)) {
    if (p.slope == 0) continue;
    Rational root = p.ref_x - p.ref_y / p.slope;
    if (p.contains(root)) out.push_back(std::move(root));
  }
  sort_unique(out);
  return out;
}

PwlFunction1D max_pwl(const PwlFunction1D& f, const PwlFunction1D& g) {
  RationalVector xs = f.breakpoints();
  xs.insert(xs.end(), g.breakpoints().begin(), g.breakpoints().end());
  RationalVector roots = crossing_points(subtract(f, g));
  xs.insert(xs.end(), roots.begin(), roots.end());
  return from_candidates(std::move(xs), [&](const Rational& x) {
    Rational a = f(x);
    Rational b = g(x);
    return a < b ? b : a;
  });
}

PwlFunction1D min_pwl(const PwlFunction1D& f, const PwlFunction1D& g) {
  return scale(max_pwl(scale(f, -1), scale(g, -1)), -1);
}

PwlFunction1D relu(const PwlFunction1D& f) { return max_pwl(f, PwlFunction1D()); }

Rational l1_distance(const PwlFunction1D& f, const PwlFunction1D& g, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) {
    if (lo == hi) return 0;
    throw ValidationError("l1_distance: empty interval");
  }
  const PwlFunction1D d = subtract(f, g);
  RationalVector xs{lo, hi};
  for (const auto& b : d.breakpoints()) {
    if (lo < b && b < hi) xs.push_back(b);
  }
  for (const auto& r : crossing_points(d)) {
    if (lo < r && r < hi) xs.push_back(r);
  }
  sort_unique(xs);
  // d has constant sign on each segment, so |integral| is the trapezoid of |d|.
  Rational total = 0;
  Rational prev = d(xs.front());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    Rational cur = d(xs[i]);
    total += abs(prev + cur) * (xs[i] - xs[i - 1]) / 2;
    prev = cur;
  }
  return total;
}

// ---------------------------------------------------------------------------

void SawtoothParams::validate() const {
  if (!(M > 0)) throw ValidationError("sawtooth: M must be positive");
  if (layers.empty()) throw ValidationError("sawtooth: at least one layer (k >= 1) is required");
  const std::size_t len = layers.front().size();
  if (len == 0) throw ValidationError("sawtooth: each layer needs w - 1 >= 1 entries");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    if (a.size() != len) throw ValidationError("sawtooth: all layers must have the same width");
    Rational prev = 0;
    for (const auto& v : a) {
      if (!(prev < v)) {
        throw ValidationError("sawtooth: layer " + std::to_string(i + 1) + " must satisfy 0 < a_1 < ... < a_p < M");
      }
      prev = v;
    }
    if (!(prev < M)) {
      throw ValidationError("sawtooth: layer " + std::to_string(i + 1) + " must satisfy 0 < a_1 < ... < a_p < M");
    }
  }
}

SawtoothParams SawtoothParams::uniform(std::size_t w, std::size_t k, const Rational& M) {
  if (w < 2) throw ValidationError("sawtooth: w must be at least 2");
  if (k < 1) throw ValidationError("sawtooth: k must be at least 1");
  SawtoothParams p;
  p.M = M;
  RationalVector a;
  for (std::size_t i = 1; i < w; ++i) {
    Rational v(static_cast<unsigned long>(i), static_cast<unsigned long>(w));
    v.canonicalize();
    a.push_back(v * M);
  }
  p.layers.assign(k, a);
  return p;
}

PwlFunction1D sawtooth_layer(const RationalVector& a, const Rational& M) {
  SawtoothParams single;
  single.M = M;
  single.layers = {a};
  single.validate();
  RationalVector xs{Rational(0)};
  RationalVector ys{Rational(0)};
  for (std::size_t i = 0; i < a.size(); ++i) {
    xs.push_back(a[i]);
    ys.push_back((i + 1) % 2 == 1 ? M : Rational(0));
  }
  xs.push_back(M);
  ys.push_back(M - ys.back());
  Rational right = (ys.back() - ys[ys.size() - 2]) / (M - a.back());
  return PwlFunction1D::from_vertices(0, std::move(xs), std::move(ys), right);
}

PwlFunction1D sawtooth(const SawtoothParams& params) {
  params.validate();
  PwlFunction1D result = sawtooth_layer(params.layers.front(), params.M);
  for (std::size_t i = 1; i < params.layers.size(); ++i) {
    result = compose(sawtooth_layer(params.layers[i], params.M), result);
  }
  return result;
}

namespace {
mpz_class power(std::uint64_t base, std::uint64_t exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}
}  // namespace

Rational gap_lower_bound(std::uint64_t w, std::uint64_t k, std::uint64_t p) {
  if (w < 2 || k < 1 || p < 1) throw ValidationError("gap_lower_bound: need w >= 2, k >= 1, p >= 1");
  const mpz_class q = power(w, k);
  const mpz_class triangles = q / 2;
  mpz_class protected_triangles = triangles - mpz_class(static_cast<unsigned long>(p - 1));
  if (protected_triangles < 0) protected_triangles = 0;
  Rational r(protected_triangles, mpz_class(2 * q));
  r.canonicalize();
  return r;
}

Rational gap_closed_form(std::uint64_t w, std::uint64_t k, std::uint64_t p) {
  if (w < 2 || k < 1 || p < 1) throw ValidationError("gap_closed_form: need w >= 2, k >= 1, p >= 1");
  const mpz_class q = power(w, k);
  Rational r(mpz_class(2 * static_cast<unsigned long>(p) - 1), mpz_class(4 * q));
  r.canonicalize();
  return Rational(Rational(1, 4) - r);
}

double approximation_size_threshold(std::uint64_t w, std::uint64_t k, std::uint64_t k_prime, double delta) {
  if (k_prime == 0) throw ValidationError("approximation_size_threshold: k' must be positive");
  const double kp = static_cast<double>(k_prime);
  return kp * std::pow(static_cast<double>(w), static_cast<double>(k) / kp) * std::pow(1.0 - 4.0 * delta, 1.0 / kp) /
         std::pow(2.0, 1.0 + 1.0 / kp);
}

// ---------------------------------------------------------------------------

Rational FlapSpec::operator()(const Rational& x) const {
  Rational d = x - breakpoint;
  if (side == Side::Right) return d > 0 ? Rational(slope * d) : Rational(0);
  return d < 0 ? Rational(slope * d) : Rational(0);
}

Rational FlapDecomposition::operator()(const Rational& x) const {
  Rational acc = constant;
  for (const auto& flap : flaps) acc += flap(x);
  return acc;
}

FlapDecomposition decompose_flaps(const PwlFunction1D& f) {
  FlapDecomposition out;
  const auto& bps = f.breakpoints();
  const auto& sl = f.slopes();
  if (bps.empty()) {
    out.constant = f(0);
    if (sl.front() != 0) {
      out.flaps.push_back({FlapSpec::Side::Right, 0, sl.front()});
      out.flaps.push_back({FlapSpec::Side::Left, 0, sl.front()});
    }
    return out;
  }
  const std::size_t q = bps.size();
  const bool mirrored = f.left_slope() == 0 && f.right_slope() != 0;
  if (!mirrored) {
    // Left flaps at every breakpoint plus one right flap at the last one. On
    // piece i the active left flaps are those at breakpoints i..q-1.
    out.constant = f.values().back();
    for (std::size_t j = 0; j < q; ++j) {
      Rational t = (j + 1 == q) ? sl[j] : Rational(sl[j] - sl[j + 1]);
      if (t != 0) out.flaps.push_back({FlapSpec::Side::Left, bps[j], t});
    }
    if (f.right_slope() != 0) out.flaps.push_back({FlapSpec::Side::Right, bps[q - 1], f.right_slope()});
  } else {
    // Mirror image: right flaps at every breakpoint, left flap at the first.
    out.constant = f.values().front();
    for (std::size_t j = 0; j < q; ++j) {
      Rational u = (j == 0) ? sl[1] : Rational(sl[j + 1] - sl[j]);
      if (u != 0) out.flaps.push_back({FlapSpec::Side::Right, bps[j], u});
    }
  }
  return out;
}

PwlFunction1D random_pwl(Rng& rng, std::size_t pieces, bool zero_left, bool zero_right) {
  if (pieces == 0) throw ValidationError("random_pwl: at least one piece");
  if (pieces == 2 && zero_left && zero_right) throw ValidationError("random_pwl: two flat pieces would merge");
  RationalVector bps;
  while (bps.size() + 1 < pieces) {
    Rational x(static_cast<long>(rng.uniform_int(-64, 64)), 8ul);
    x.canonicalize();
    if (std::find(bps.begin(), bps.end(), x) == bps.end()) bps.push_back(x);
  }
  std::sort(bps.begin(), bps.end());
  RationalVector slopes(pieces);
  for (std::size_t i = 0; i < pieces; ++i) {
    const bool forced_zero = (i == 0 && zero_left) || (i + 1 == pieces && zero_right);
    for (;;) {
      Rational s = forced_zero ? Rational(0) : rng.rational(6, 3);
      const bool clash_prev = i > 0 && s == slopes[i - 1];
      const bool clash_next_forced = i + 2 == pieces && zero_right && s == 0;
      if (!clash_prev && !clash_next_forced) {
        slopes[i] = s;
        break;
      }
      if (forced_zero) throw InvariantViolation("random_pwl: forced flat piece clashes with neighbour");
    }
  }
  Rational ax = bps.empty() ? Rational(0) : bps.front();
  return PwlFunction1D::from_slopes(std::move(bps), std::move(slopes), ax, rng.rational(8, 4));
}

}  // namespace reluexact
