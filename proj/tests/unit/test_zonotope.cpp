#include <doctest.h>

#include <algorithm>

#include "reluexact/errors.hpp"
#include "reluexact/zonotope.hpp"

using namespace reluexact;

namespace {

// All 2^m sign sums; the vertices are a subset of these.
std::vector<RationalVector> sign_sums(const Zonotope& z) {
  std::vector<RationalVector> pts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << z.m()); ++mask) {
    RationalVector p(z.n);
    for (std::size_t i = 0; i < z.m(); ++i) {
      const int s = (mask >> i) & 1 ? 1 : -1;
      for (std::size_t c = 0; c < z.n; ++c) p[c] += s * z.generators[i][c];
    }
    pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Rational cross(const RationalVector& o, const RationalVector& a, const RationalVector& b) {
  return Rational((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]));
}

// Strict convex hull corners of planar points (monotone chain, collinear points dropped).
std::vector<RationalVector> hull2(std::vector<RationalVector> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<RationalVector> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  std::sort(h.begin(), h.end());
  return h;
}

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("vertex examples") {
  const Zonotope square{2, {{0, 1}, {1, 0}}};
  const auto v = vertices(square);
  CHECK(v == std::vector<RationalVector>{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}});

  const Zonotope segment{3, {{1, 2, 3}}};
  CHECK(vertices(segment) == std::vector<RationalVector>{{-1, -2, -3}, {1, 2, 3}});

  // generators from the first figure's caption are not given numerically; use a
  // fixed generic quadruple instead and compare with the planar hull
  const Zonotope four{2, {{1, 0}, {0, 1}, {1, 1}, {1, -2}}};
  const auto v4 = vertices(four);
  CHECK(v4 == hull2(sign_sums(four)));
  CHECK(v4.size() == 2 * (choose(3, 0) + choose(3, 1)));

  const Zonotope with_zero{2, {{0, 0}, {1, 0}}};
  CHECK(vertices(with_zero).size() == 2);
  CHECK_THROWS_AS(vertices(Zonotope{2, {{1}}}), ValidationError);
  CHECK_THROWS_AS(vertices(Zonotope{2, {}}), ValidationError);
}

TEST_CASE("planar vertices match the convex hull") {
  Rng rng(5);
  for (int trial = 0; trial < 80; ++trial) {
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 7));
    Zonotope z{2, {}};
    for (std::size_t i = 0; i < m; ++i) z.generators.push_back({Rational(rng.uniform_int(-3, 3)), Rational(rng.uniform_int(-3, 3))});
    if (std::all_of(z.generators.begin(), z.generators.end(), [](const RationalVector& g) { return g[0] == 0 && g[1] == 0; }))
      continue;
    CHECK(vertices(z) == hull2(sign_sums(z)));
  }
}

TEST_CASE("support function identities") {
  const Zonotope square{2, {{0, 1}, {1, 0}}};
  CHECK(support(square, {3, -4}) == 7);
  CHECK(support(square, {0, 0}) == 0);

  Rng rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const auto z = random_zonotope(rng, n, m);
    const auto verts = vertices(z);
    const auto pts = sign_sums(z);
    for (const auto& v : verts) CHECK(std::binary_search(pts.begin(), pts.end(), v));
    // central symmetry
    for (const auto& v : verts) {
      RationalVector neg = v;
      for (auto& x : neg) x = -x;
      CHECK(std::binary_search(verts.begin(), verts.end(), neg));
    }
    for (int probe = 0; probe < 10; ++probe) {
      RationalVector r(n);
      for (auto& x : r) x = rng.rational(7, 5);
      Rational by_vertex = dot(r, verts.front()), by_points = dot(r, pts.front());
      for (const auto& v : verts) by_vertex = std::max(by_vertex, dot(r, v));
      for (const auto& p : pts) by_points = std::max(by_points, dot(r, p));
      const Rational s = support(z, r);
      CHECK(s == by_vertex);
      CHECK(s == by_points);
      const Rational c = rng.rational_between(0, 5, 16);
      RationalVector cr = r;
      for (auto& x : cr) x *= c;
      CHECK(support(z, cr) == c * s);
    }
  }
}

TEST_CASE("support network") {
  const Zonotope square{2, {{0, 1}, {1, 0}}};
  const auto net = support_net(square);
  CHECK(net.size() == 4);
  CHECK(net.depth() == 2);
  CHECK(forward(net, {3, -4}) == RationalVector{7});
  const Zonotope one{2, {{2, -1}}};
  CHECK(support_net(one).size() == 2);
  CHECK(forward(support_net(one), {1, 5}) == RationalVector{3});

  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto z = random_zonotope(rng, 3, 4);
    const auto zn = support_net(z);
    CHECK(zn.size() == 8);
    for (int probe = 0; probe < 50; ++probe) {
      const RationalVector r{rng.rational(9, 7), rng.rational(9, 7), rng.rational(9, 7)};
      CHECK(forward(zn, r)[0] == support(z, r));
    }
  }
}

TEST_CASE("genericity") {
  CHECK_FALSE(is_extremal(Zonotope{2, {{1, 0}, {1, 0}}}));
  CHECK(is_extremal(Zonotope{2, {{1, 0}, {0, 1}}}));
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::size_t m = 1; m <= 5; ++m) {
      std::size_t sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += choose(m - 1, i);
      CHECK(generic_vertex_count(n, m) == 2 * sum);
      CHECK(binomial_vertex_sum(n, m) == sum);
    }
  Rng rng(10);
  int extremal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    if (is_extremal(random_zonotope(rng, 2, 4, 50, 40))) ++extremal;
  }
  CHECK(extremal >= 95);
}

TEST_CASE("family networks") {
  ZonotopeFamilyParams p;
  p.zonotope = Zonotope{2, {{1, 0}, {1, 1}}};
  p.sawtooth = SawtoothParams::uniform(2, 1);
  const auto net = zonotope_family_net(p);
  CHECK(net.depth() == 3);
  CHECK(net.size() == 6);

  p.sawtooth.layers.clear();
  CHECK_THROWS_AS(zonotope_family_net(p), ValidationError);

  Rng rng(12);
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::size_t m = 1; m <= 4; ++m)
      for (std::size_t w = 2; w <= 3; ++w)
        for (std::size_t k = 1; k <= 3; ++k) {
          ZonotopeFamilyParams q{random_zonotope(rng, n, m), SawtoothParams::uniform(w, k)};
          const auto fn = zonotope_family_net(q);
          CHECK(fn.depth() == k + 2);
          CHECK(fn.size() == 2 * m + w * k);
        }

  // H_{1/2,1/2} o gamma_Z at random points, against the composition of oracles
  ZonotopeFamilyParams fig{Zonotope{2, {{1, 0}, {0, 1}, {1, 1}, {1, -1}}}, SawtoothParams{}};
  fig.sawtooth.layers = {{ratio(1, 2)}, {ratio(1, 2)}};
  const auto fnet = zonotope_family_net(fig);
  const auto H = sawtooth(fig.sawtooth);
  for (int probe = 0; probe < 100; ++probe) {
    const RationalVector r{rng.rational(8, 9), rng.rational(8, 9)};
    CHECK(forward(fnet, r)[0] == H(support(fig.zonotope, r)));
  }
}

TEST_CASE("formula candidates") {
  const auto f = zonotope_piece_formulas(2, 2, 2, 1);
  CHECK(f.power_form == 2);
  CHECK(f.binomial_form == 4);
  CHECK(f.classical_form == 8);
  const auto g = zonotope_piece_formulas(3, 5, 3, 2);
  CHECK(g.power_form == 16 * 9);
  CHECK(g.binomial_form == (1 + 4 + 6) * 9);
}

TEST_CASE("polar domain") {
  const Zonotope square{2, {{0, 1}, {1, 0}}};
  const auto rows = polar_domain(square, 2);
  CHECK(rows.size() == 4);
  for (int probe = 0; probe < 50; ++probe) {
    Rng rng(static_cast<std::uint64_t>(probe));
    const RationalVector r{rng.rational(4, 3), rng.rational(4, 3)};
    bool inside = true;
    for (const auto& row : rows) inside = inside && row.satisfied_by(r);
    CHECK(inside == (support(square, r) <= 2));
  }
  CHECK_THROWS_AS(polar_domain(square, 0), ValidationError);
}
