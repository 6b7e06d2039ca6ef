#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "reluexact/errors.hpp"
#include "reluexact/network.hpp"

using namespace reluexact;

namespace {

AffineMap row_map(RationalVector row, const Rational& b) {
  const std::size_t n = row.size();
  return AffineMap::from_rows(n, {std::move(row)}, {b});
}

ReluNetwork affine_only(const AffineMap& m) { return ReluNetwork(m.in_dim, {}, m, true); }

RationalVector grid1(int lo, int hi, int per_unit) {
  RationalVector xs;
  for (int i = lo * per_unit; i <= hi * per_unit; ++i) xs.push_back(ratio(i, per_unit));
  return xs;
}

std::vector<RationalVector> grid2(int lo, int hi, int per_unit) {
  std::vector<RationalVector> pts;
  for (const auto& a : grid1(lo, hi, per_unit))
    for (const auto& b : grid1(lo, hi, per_unit)) pts.push_back({a, b});
  return pts;
}

std::size_t ceil_log2(std::size_t m) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < m) ++r;
  return r;
}

}  // namespace

TEST_CASE("affine map basics") {
  const auto m = AffineMap::from_rows(2, {{1, 2}, {3, 4}}, {5, 6});
  CHECK(m.apply({1, 1}) == RationalVector{8, 13});
  CHECK_THROWS_AS(m.apply({1}), ValidationError);
  CHECK_THROWS_AS(AffineMap::from_rows(2, {{1}}, {0}), ValidationError);
  const auto c = compose_affine(m, AffineMap::identity(2));
  CHECK(c == m);
}

TEST_CASE("network invariants are enforced") {
  CHECK_THROWS_AS(ReluNetwork(2, {AffineMap(3, 1)}, AffineMap(1, 3), false), ValidationError);
  CHECK_THROWS_AS(ReluNetwork(1, {AffineMap(3, 1)}, AffineMap(1, 2), false), ValidationError);
  AffineMap out(1, 3);
  out.bias[0] = 1;
  CHECK_THROWS_AS(ReluNetwork(1, {AffineMap(3, 1)}, out, false), ValidationError);
  CHECK_NOTHROW(ReluNetwork(1, {AffineMap(3, 1)}, out, true));
  const ReluNetwork n(1, {AffineMap(3, 1), AffineMap(5, 3)}, AffineMap(1, 5), false);
  CHECK(n.depth() == 3);
  CHECK(n.size() == 8);
  CHECK(n.width() == 5);
}

TEST_CASE("forward examples") {
  CHECK(forward(max_gadget(), {3, 5}) == RationalVector{5});
  CHECK(forward(max_gadget(), {-7, ratio(-15, 2)}) == RationalVector{-7});
  const auto z = zero_network(3);
  CHECK(forward(z, {1, 2, 3}) == RationalVector{0});
  CHECK_THROWS_AS(forward(z, {1}), ValidationError);

  SawtoothParams p;
  p.layers = {{ratio(1, 2)}, {ratio(1, 2)}};
  const auto net = sawtooth_net(p);
  CHECK(forward_scalar(net, ratio(1, 4)) == 1);
  CHECK(forward_scalar(net, ratio(1, 4)) == sawtooth(p)(ratio(1, 4)));
}

TEST_CASE("two-layer builder") {
  const auto abs = max_pwl(PwlFunction1D::identity(), PwlFunction1D::affine(-1, 0));
  CHECK(from_pwl_2layer(abs).size() == 2);

  const auto h = sawtooth_layer({ratio(1, 3), ratio(2, 3)}, 1);
  REQUIRE(h.pieces() == 4);
  const auto hn = from_pwl_2layer(h);
  CHECK(hn.size() == 3);
  CHECK(hn.depth() == 2);

  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = static_cast<std::size_t>(rng.uniform_int(1, 9));
    const bool zl = p > 1 && rng.uniform_int(0, 2) == 0;
    const auto f = random_pwl(rng, p, zl, false);
    const auto net = from_pwl_2layer(f);
    CHECK(net.depth() == 2);
    if (p == 1) {
      CHECK(net.size() <= 2);
    } else if (f.left_slope() == 0 || f.right_slope() == 0) {
      CHECK(net.size() <= p - 1);
    } else {
      CHECK(net.size() <= p);
    }
    for (const auto& x : probe_points_1d(f)) CHECK(forward_scalar(net, x) == f(x));
    CHECK(extract_pwl(net) == f);
  }
}

TEST_CASE("composition") {
  SawtoothParams p;
  p.layers = {{ratio(1, 2)}, {ratio(1, 2)}};
  const auto a = from_pwl_2layer(sawtooth_layer(p.layers[0], 1));
  const auto b = from_pwl_2layer(sawtooth_layer(p.layers[1], 1));
  const auto ab = compose_nets(b, a);
  CHECK(ab.depth() == 3);
  CHECK(ab.size() == 4);
  CHECK(extract_pwl(ab) == sawtooth(p));
  CHECK(extract_pwl(ab).pieces_in(0, 1) == 4);

  const auto lin = affine_only(row_map({3}, 1));
  CHECK(compose_nets(lin, ab).depth() == ab.depth());
  CHECK(compose_nets(ab, lin).depth() == ab.depth());

  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto A = random_network(rng, 1, {2});
    const auto B = random_network(rng, 1, {3, 1});
    const auto C = random_network(rng, 1, {2});
    const auto left = compose_nets(A, compose_nets(B, C));
    const auto right = compose_nets(compose_nets(A, B), C);
    CHECK(left.depth() == A.depth() + B.depth() + C.depth() - 2);
    CHECK(left.size() == A.size() + B.size() + C.size());
    for (const auto& x : grid1(-4, 4, 8)) {
      const Rational expect = forward_scalar(A, forward_scalar(B, forward_scalar(C, x)));
      CHECK(forward_scalar(left, x) == expect);
      CHECK(forward_scalar(right, x) == expect);
    }
  }
  CHECK_THROWS_AS(compose_nets(max_gadget(), ab), ValidationError);
}

TEST_CASE("addition and padding") {
  Rng rng(31);
  const auto f = random_network(rng, 1, {3});
  const auto fz = add_nets(f, pad_depth(zero_network(1), 2));
  for (const auto& x : grid1(-3, 3, 5)) CHECK(forward_scalar(fz, x) == forward_scalar(f, x));

  const auto r = relu(PwlFunction1D::identity());
  const auto l = relu(PwlFunction1D::affine(-1, 0));
  const auto absnet = add_nets(from_pwl_2layer(r), from_pwl_2layer(l));
  CHECK(absnet.size() == 2);
  for (const auto& x : grid1(-3, 3, 5)) CHECK(forward_scalar(absnet, x) == abs(x));

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ReluNetwork> nets;
    PwlFunction1D expect;
    for (int i = 0; i < 3; ++i) {
      nets.push_back(random_network(rng, 1, {static_cast<std::size_t>(rng.uniform_int(1, 3))}));
      expect = add(expect, extract_pwl(nets.back()));
    }
    const auto sum = add_nets(add_nets(nets[0], nets[1]), nets[2]);
    CHECK(sum.size() == nets[0].size() + nets[1].size() + nets[2].size());
    CHECK(sum.depth() == 2);
    CHECK(extract_pwl(sum) == expect);
  }

  // unequal depths: the shallow side is padded by 2 units per added layer
  const auto deep = random_network(rng, 1, {2, 2, 2});
  const auto shallow = random_network(rng, 1, {3});
  const auto mixed = add_nets(deep, shallow);
  CHECK(mixed.depth() == 4);
  CHECK(mixed.size() == deep.size() + shallow.size() + 2 * 2);
  for (const auto& x : grid1(-3, 3, 7)) CHECK(forward_scalar(mixed, x) == forward_scalar(deep, x) + forward_scalar(shallow, x));

  const auto padded = pad_depth(shallow, 5);
  CHECK(padded.depth() == 5);
  for (const auto& x : grid1(-3, 3, 7)) CHECK(forward_scalar(padded, x) == forward_scalar(shallow, x));
  CHECK_THROWS_AS(pad_depth(deep, 2), ValidationError);
}

TEST_CASE("max trees") {
  CHECK_THROWS_AS(max_nets({}), ValidationError);
  Rng rng(41);
  const auto one = random_network(rng, 1, {2});
  CHECK(max_nets({one}) == one);

  const auto x1 = affine_only(row_map({1, 0}, 0));
  const auto x2 = affine_only(row_map({0, 1}, 0));
  const auto m2 = max_nets({x1, x2});
  CHECK(m2.size() == 4);
  CHECK(forward(m2, {3, 5}) == RationalVector{5});

  for (std::size_t m = 1; m <= 7; ++m) {
    std::vector<ReluNetwork> nets;
    std::vector<AffineMap> maps;
    std::size_t max_depth = 0, total_size = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i % 2 == 0) {
        maps.push_back(row_map({rng.rational(4, 2), rng.rational(4, 2)}, rng.rational(4, 2)));
        nets.push_back(affine_only(maps.back()));
      } else {
        nets.push_back(random_network(rng, 2, {2}));
      }
      max_depth = std::max(max_depth, nets.back().depth());
      total_size += nets.back().size();
    }
    const auto mx = max_nets(nets);
    // the tree itself adds ceil(log2 m) gadget layers; padding may add a layer of carries
    CHECK(mx.depth() <= max_depth + ceil_log2(m) + 1);
    if (std::all_of(nets.begin(), nets.end(), [&](const ReluNetwork& n) { return n.depth() == max_depth; })) {
      CHECK(mx.size() <= total_size + 4 * (2 * m - 1));
    }
    for (const auto& x : grid2(-2, 2, 3)) {
      Rational best = forward(nets[0], x)[0];
      for (const auto& n : nets) best = std::max(best, forward(n, x)[0]);
      CHECK(forward(mx, x)[0] == best);
    }
  }
}

TEST_CASE("four affine maxima add two gadget layers") {
  Rng rng(43);
  std::vector<ReluNetwork> nets;
  for (int i = 0; i < 4; ++i) nets.push_back(affine_only(row_map({rng.rational(3, 2), rng.rational(3, 2)}, rng.rational(3, 1))));
  const auto mx = max_nets(nets);
  CHECK(mx.depth() == 3);
  CHECK(mx.size() <= 4 * 7);
  for (const auto& x : grid2(-3, 3, 2)) {
    Rational best = forward(nets[0], x)[0];
    for (const auto& n : nets) best = std::max(best, forward(n, x)[0]);
    CHECK(forward(mx, x)[0] == best);
  }
}

TEST_CASE("hinge builder") {
  HingeForm single{2, {{1, {row_map({1, 2}, 3)}}}};
  const auto s = from_hinge(single);
  CHECK(s.depth() == 2);
  CHECK(forward(s, {1, 1}) == RationalVector{6});

  HingeForm l1{2, {{1, {row_map({1, 0}, 0), row_map({-1, 0}, 0)}}, {1, {row_map({0, 1}, 0), row_map({0, -1}, 0)}}}};
  const auto ln = from_hinge(l1);
  CHECK(ln.depth() == 2);
  for (const auto& x : grid2(-3, 3, 3)) CHECK(forward(ln, x)[0] == abs(x[0]) + abs(x[1]));

  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 3));
    HingeForm h{n, {}};
    const auto terms = rng.uniform_int(1, 3);
    for (int t = 0; t < terms; ++t) {
      HingeTerm term{rng.uniform_int(0, 1) == 0 ? 1 : -1, {}};
      const auto count = rng.uniform_int(1, static_cast<std::int64_t>(n) + 1);
      for (int i = 0; i < count; ++i) {
        RationalVector row;
        for (std::size_t c = 0; c < n; ++c) row.push_back(rng.rational(3, 2));
        term.affines.push_back(row_map(row, rng.rational(3, 2)));
      }
      h.terms.push_back(term);
    }
    const auto net = from_hinge(h);
    CHECK(net.depth() <= ceil_log2(n + 1) + 1);
    for (int probe = 0; probe < 40; ++probe) {
      RationalVector x;
      for (std::size_t c = 0; c < n; ++c) x.push_back(rng.rational(5, 4));
      CHECK(forward(net, x)[0] == h(x));
    }
  }

  HingeForm three{2, {{1, {row_map({1, 0}, 0), row_map({0, 1}, 0), row_map({-1, -1}, 0)}}}};
  CHECK(from_hinge(three).depth() <= 3);

  HingeForm bad{1, {{2, {row_map({1}, 0)}}}};
  CHECK_THROWS_AS(from_hinge(bad), ValidationError);
  HingeForm too_many{1, {{1, {row_map({1}, 0), row_map({2}, 0), row_map({3}, 0)}}}};
  CHECK_THROWS_AS(from_hinge(too_many), ValidationError);
}

TEST_CASE("affine embedding") {
  const auto id = affine_net(AffineMap::identity(1));
  CHECK(id.size() == 2);
  CHECK(forward_scalar(id, ratio(-7, 3)) == ratio(-7, 3));
  const auto neg = affine_net(row_map({-1}, 0));
  CHECK(forward_scalar(neg, 7) == -7);

  Rng rng(61);
  AffineMap T(3, 2);
  for (auto& w : T.weights) w = rng.rational(5, 3);
  for (auto& b : T.bias) b = rng.rational(5, 3);
  const auto net = affine_net(T);
  CHECK(net.size() == 6);
  CHECK(net.depth() == 2);
  for (int probe = 0; probe < 20; ++probe) {
    const RationalVector x{rng.rational(9, 4), rng.rational(9, 4)};
    RationalVector expect(3);
    for (std::size_t r = 0; r < 3; ++r) expect[r] = T.at(r, 0) * x[0] + T.at(r, 1) * x[1] + T.bias[r];
    CHECK(forward(net, x) == expect);
  }
}

TEST_CASE("extraction and piece bounds") {
  SawtoothParams p;
  p.layers = {{ratio(1, 2)}, {ratio(1, 2)}};
  CHECK(extract_pwl(sawtooth_net(p)).pieces_in(0, 1) == 4);
  CHECK(extract_pwl(pad_depth(zero_network(1), 3)).pieces() == 1);

  CHECK(pieces_upper_bound({2}) == 3);
  CHECK(pieces_upper_bound({2, 2}) == 12);
  CHECK(pieces_upper_bound({3, 2, 2}) == 64);
  CHECK(pieces_upper_bound({0}) == 1);
  CHECK_THROWS_AS(pieces_upper_bound({}), ValidationError);
  CHECK_THROWS_AS(pieces_upper_bound(std::vector<std::size_t>(70, 2)), ValidationError);

  Rng rng(71);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::size_t> widths;
    const auto depth = rng.uniform_int(1, 3);
    for (int i = 0; i < depth; ++i) widths.push_back(static_cast<std::size_t>(rng.uniform_int(1, 3)));
    const auto net = random_network(rng, 1, widths);
    const auto f = extract_pwl(net);
    CHECK(f.pieces() <= pieces_upper_bound(widths));
    for (const auto& x : probe_points_1d(f)) CHECK(forward_scalar(net, x) == f(x));
  }

  CHECK_THROWS_AS(extract_pwl(max_gadget()), ValidationError);
  CHECK_THROWS_AS(extract_pwl(sawtooth_net(SawtoothParams::uniform(4, 6)), 1000), BudgetExceeded);
}

TEST_CASE("size formulas") {
  CHECK(size_lower_bound(4, 1) == doctest::Approx(1.0));
  CHECK(size_lower_bound(16, 2) == doctest::Approx(3.0));
  CHECK(size_lower_bound(1, 5) == doctest::Approx(1.5));
  CHECK(pieces_cap(3, 1) == doctest::Approx(6.0));
  for (std::uint64_t w = 2; w <= 4; ++w)
    for (std::uint64_t k = 1; k <= 4; ++k)
      for (std::uint64_t kp = 1; kp <= 4; ++kp) {
        const auto p = static_cast<std::uint64_t>(std::llround(std::pow(double(w), double(k))));
        CHECK(size_lower_bound(p, kp) == doctest::Approx(depth_gap_size_bound(w, k, kp)));
      }
  // the two formulas are inverse to each other
  for (std::uint64_t s = 1; s < 20; ++s)
    for (std::uint64_t k = 1; k <= 3; ++k) {
      const double cap = std::floor(pieces_cap(s, k));
      if (cap >= 1) CHECK(size_lower_bound(static_cast<std::uint64_t>(cap), k) <= double(s));
    }
}

TEST_CASE("sawtooth nets have the predicted shape") {
  for (std::size_t w = 2; w <= 4; ++w)
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto p = SawtoothParams::uniform(w, k);
      const auto net = sawtooth_net(p);
      CHECK(net.depth() == k + 1);
      CHECK(net.size() == w * k);
      CHECK(extract_pwl(net) == sawtooth(p));
    }
}
