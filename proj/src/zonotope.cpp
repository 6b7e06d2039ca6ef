#include "reluexact/zonotope.hpp"

#include <algorithm>

#include "reluexact/errors.hpp"

namespace reluexact {

using Sense = LinearConstraint::Sense;

void Zonotope::validate() const {
  if (n == 0) throw ValidationError("zonotope: dimension must be positive");
  if (generators.empty()) throw ValidationError("zonotope: at least one generator");
  for (const auto& g : generators) {
    if (g.size() != n) throw ValidationError("zonotope: generator of the wrong dimension");
  }
}

namespace {

bool is_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& a) { return a == 0; });
}

}  // namespace

std::vector<RationalVector> vertices(const Zonotope& z, std::size_t max_vertices) {
  z.validate();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < z.m(); ++i) {
    if (!is_zero(z.generators[i])) active.push_back(i);
  }
  std::vector<RationalVector> out;
  if (active.empty()) {
    out.emplace_back(z.n);
    return out;
  }
  // rows: -eps_i <r, b^i> < 0
  std::vector<LinearConstraint> rows;
  std::vector<int> signs;
  auto dfs = [&](auto&& self) -> void {
    if (signs.size() == active.size()) {
      RationalVector v(z.n);
      for (std::size_t t = 0; t < active.size(); ++t) {
        const auto& b = z.generators[active[t]];
        for (std::size_t c = 0; c < z.n; ++c) v[c] += signs[t] * b[c];
      }
      out.push_back(std::move(v));
      if (out.size() > max_vertices) {
        throw BudgetExceeded("zonotope vertex enumeration exceeded " + std::to_string(max_vertices) + " vertices");
      }
      return;
    }
    const auto& b = z.generators[active[signs.size()]];
    for (int s : {1, -1}) {
      LinearConstraint row{b, Rational(0), Sense::Less};
      for (auto& x : row.normal) x *= -s;
      rows.push_back(std::move(row));
      if (lp_feasible(z.n, rows).feasible) {
        signs.push_back(s);
        self(self);
        signs.pop_back();
      }
      rows.pop_back();
    }
  };
  dfs(dfs);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rational support(const Zonotope& z, const RationalVector& r) {
  z.validate();
  if (r.size() != z.n) throw ValidationError("support: direction of the wrong dimension");
  Rational total = 0;
  for (const auto& b : z.generators) total += abs(dot(r, b));
  return total;
}

ReluNetwork support_net(const Zonotope& z) {
  z.validate();
  AffineMap hidden(2 * z.m(), z.n);
  for (std::size_t i = 0; i < z.m(); ++i) {
    for (std::size_t c = 0; c < z.n; ++c) {
      hidden.at(2 * i, c) = z.generators[i][c];
      hidden.at(2 * i + 1, c) = -z.generators[i][c];
    }
  }
  AffineMap output(1, 2 * z.m());
  for (auto& w : output.weights) w = 1;
  return ReluNetwork(z.n, {std::move(hidden)}, std::move(output), false);
}

Zonotope random_zonotope(Rng& rng, std::size_t n, std::size_t m, std::int64_t num_bound, std::int64_t den_bound) {
  if (n == 0 || m == 0) throw ValidationError("random_zonotope: n and m must be positive");
  if (num_bound < 1 || den_bound < 1) throw ValidationError("random_zonotope: bounds must be positive");
  Zonotope z{n, {}};
  while (z.generators.size() < m) {
    RationalVector g(n);
    for (auto& x : g) x = rng.rational(num_bound, den_bound);
    if (!is_zero(g)) z.generators.push_back(std::move(g));
  }
  return z;
}

std::size_t generic_vertex_count(std::size_t n, std::size_t m, std::size_t trials) {
  Rng rng(0x9e3779b97f4a7c15ULL ^ (n * 1000003ULL + m));
  std::size_t best = 0;
  for (std::size_t t = 0; t < std::max<std::size_t>(1, trials); ++t) {
    best = std::max(best, vertices(random_zonotope(rng, n, m, 97, 89)).size());
  }
  return best;
}

bool is_extremal(const Zonotope& z) { return vertices(z).size() == generic_vertex_count(z.n, z.m()); }

std::vector<LinearConstraint> polar_domain(const Zonotope& z, const Rational& M) {
  if (M <= 0) throw ValidationError("polar_domain: M must be positive");
  std::vector<LinearConstraint> rows;
  for (auto& v : vertices(z)) rows.push_back({std::move(v), M, Sense::LessEqual});
  return rows;
}

ReluNetwork zonotope_family_net(const ZonotopeFamilyParams& params) {
  params.zonotope.validate();
  params.sawtooth.validate();
  return compose_nets(sawtooth_net(params.sawtooth), support_net(params.zonotope));
}

std::uint64_t binomial_vertex_sum(std::uint64_t n, std::uint64_t m) {
  if (n == 0 || m == 0) throw ValidationError("binomial_vertex_sum: n and m must be positive");
  mpz_class total = 0, c;
  for (std::uint64_t i = 0; i < n && i <= m - 1; ++i) {
    mpz_bin_uiui(c.get_mpz_t(), m - 1, i);
    total += c;
  }
  if (!total.fits_ulong_p()) throw ValidationError("binomial_vertex_sum: value exceeds 64 bits");
  return total.get_ui();
}

ZonotopePieceFormulas zonotope_piece_formulas(std::uint64_t n, std::uint64_t m, std::uint64_t w, std::uint64_t k) {
  auto fit = [](const mpz_class& v) {
    if (!v.fits_ulong_p()) throw ValidationError("zonotope_piece_formulas: value exceeds 64 bits");
    return static_cast<std::uint64_t>(v.get_ui());
  };
  mpz_class wk, mn;
  mpz_ui_pow_ui(wk.get_mpz_t(), w, k);
  mpz_ui_pow_ui(mn.get_mpz_t(), m - 1, n - 1);
  const mpz_class sum = static_cast<unsigned long>(binomial_vertex_sum(n, m));
  ZonotopePieceFormulas f;
  f.power_form = fit(mn * wk);
  f.binomial_form = fit(sum * wk);
  f.classical_form = fit(2 * sum * wk);
  return f;
}

}  // namespace reluexact
