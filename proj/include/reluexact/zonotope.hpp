#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reluexact/lp.hpp"
#include "reluexact/network.hpp"
#include "reluexact/pwl.hpp"
#include "reluexact/random.hpp"
#include "reluexact/rational.hpp"

namespace reluexact {

/// Z(b^1..b^m) = { sum lambda_i b^i : -1 <= lambda_i <= 1 }.
struct Zonotope {
  std::size_t n = 0;
  std::vector<RationalVector> generators;

  std::size_t m() const { return generators.size(); }
  /// n >= 1, m >= 1, every generator of length n.
  void validate() const;
  friend bool operator==(const Zonotope&, const Zonotope&) = default;
};

/// Vertices sorted lexicographically. A sign vector eps gives a vertex exactly
/// when some direction r has eps_i <r, b^i> > 0 for every nonzero generator;
/// sign prefixes are extended depth-first and pruned as soon as that strict
/// system becomes infeasible. Throws BudgetExceeded beyond `max_vertices`.
std::vector<RationalVector> vertices(const Zonotope& z, std::size_t max_vertices = 100'000);

/// gamma_Z(r) = sum |<r, b^i>|.
Rational support(const Zonotope& z, const RationalVector& r);

/// Depth 2, size exactly 2m: units relu(<r,b^i>) and relu(-<r,b^i>), summed.
ReluNetwork support_net(const Zonotope& z);

/// Largest vertex count seen over `trials` seeded random generator sets in
/// general position; the reference for genericity tests.
std::size_t generic_vertex_count(std::size_t n, std::size_t m, std::size_t trials = 12);

/// |vertices(z)| equals the generic maximum for its (n, m).
bool is_extremal(const Zonotope& z);

/// { r : <r, v> <= M for every vertex v }, i.e. gamma_Z(r) <= M.
std::vector<LinearConstraint> polar_domain(const Zonotope& z, const Rational& M);

/// Numerators in [-num_bound, num_bound], denominators in [1, den_bound];
/// zero generators are redrawn.
Zonotope random_zonotope(Rng& rng, std::size_t n, std::size_t m, std::int64_t num_bound = 5,
                         std::int64_t den_bound = 3);

struct ZonotopeFamilyParams {
  Zonotope zonotope;
  SawtoothParams sawtooth;
};

/// H_{a^1..a^k} o gamma_Z: depth exactly k + 2 and size exactly 2m + w k.
ReluNetwork zonotope_family_net(const ZonotopeFamilyParams& params);

/// Closed-form piece counts that the literature states for this family.
struct ZonotopePieceFormulas {
  std::uint64_t power_form = 0;      // (m-1)^{n-1} w^k
  std::uint64_t binomial_form = 0;   // (sum_{i<n} C(m-1, i)) w^k
  std::uint64_t classical_form = 0;  // 2 (sum_{i<n} C(m-1, i)) w^k
};

ZonotopePieceFormulas zonotope_piece_formulas(std::uint64_t n, std::uint64_t m, std::uint64_t w, std::uint64_t k);

/// sum_{i<n} C(m-1, i), the vertex bound as printed; generic zonotopes have twice this.
std::uint64_t binomial_vertex_sum(std::uint64_t n, std::uint64_t m);

}  // namespace reluexact
