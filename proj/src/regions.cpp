#include "reluexact/regions.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "parallel.hpp"
#include "reluexact/errors.hpp"

namespace reluexact {

using Sense = LinearConstraint::Sense;

std::vector<LinearConstraint> box_domain(std::size_t n, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw ValidationError("box domain needs lo < hi");
  std::vector<LinearConstraint> rows;
  for (std::size_t k = 0; k < n; ++k) {
    RationalVector e(n);
    e[k] = 1;
    rows.push_back({e, hi, Sense::LessEqual});
    e[k] = -1;
    rows.push_back({e, Rational(-lo), Sense::LessEqual});
  }
  return rows;
}

namespace {

struct Item {
  std::string pattern;
  std::vector<LinearConstraint> constraints;
  RationalVector witness;
  AffineMap input;  // current layer input as an affine map of x
  AffineMap pre;    // pre-activations of the layer being split
};

std::vector<LinearConstraint> strict_copy(const std::vector<LinearConstraint>& rows) {
  std::vector<LinearConstraint> out = rows;
  for (auto& r : out) r.sense = Sense::Less;
  return out;
}

bool is_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& a) { return a == 0; });
}

// Splits one item on unit j of the current layer.
std::vector<Item> split(Item item, std::size_t j, std::size_t n) {
  const RationalVector a = item.pre.row(j);
  const Rational c = item.pre.bias[j];
  if (is_zero(a)) {
    item.pattern.push_back(c > 0 ? '1' : '0');
    return {std::move(item)};
  }
  // active side:   -a.x <= c      inactive side:  a.x <= -c
  LinearConstraint active{a, c, Sense::LessEqual};
  for (auto& v : active.normal) v = -v;
  const LinearConstraint inactive{a, Rational(-c), Sense::LessEqual};

  const Rational z = dot(a, item.witness) + c;
  auto probe = [&](const LinearConstraint& side) {
    auto rows = strict_copy(item.constraints);
    rows.push_back(side);
    rows.back().sense = Sense::Less;
    return lp_feasible(n, rows);
  };

  LpFeasibility act, inact;
  if (z > 0) {
    act = {true, item.witness};
    inact = probe(inactive);
  } else if (z < 0) {
    inact = {true, item.witness};
    act = probe(active);
  } else {
    act = probe(active);
    inact = probe(inactive);
  }
  if (!act.feasible && !inact.feasible) throw InvariantViolation("cell split lost both sides");
  if (act.feasible != inact.feasible) {
    item.pattern.push_back(act.feasible ? '1' : '0');
    return {std::move(item)};
  }
  Item off = item;
  off.pattern.push_back('0');
  off.constraints.push_back(inactive);
  off.witness = std::move(inact.witness);
  item.pattern.push_back('1');
  item.constraints.push_back(active);
  item.witness = std::move(act.witness);
  std::vector<Item> out;
  out.push_back(std::move(off));
  out.push_back(std::move(item));
  return out;
}

// Post-activation map: rows of inactive units become zero.
AffineMap activate(const AffineMap& pre, std::string_view bits) {
  AffineMap out = pre;
  for (std::size_t r = 0; r < pre.out_dim; ++r) {
    if (bits[r] == '1') continue;
    for (std::size_t c = 0; c < pre.in_dim; ++c) out.at(r, c) = 0;
    out.bias[r] = 0;
  }
  return out;
}

}  // namespace

std::vector<RegionCell> enumerate_cells(const ReluNetwork& net, const RegionOptions& options) {
  const std::size_t n = net.input_dim();
  for (const auto& row : options.domain) {
    if (row.normal.size() != n) throw ValidationError("domain row has the wrong dimension");
    if (row.sense != Sense::LessEqual) throw ValidationError("domain rows must be non-strict inequalities");
  }
  const auto start = lp_feasible(n, strict_copy(options.domain));
  if (!start.feasible) throw ValidationError("domain has empty interior");

  std::vector<Item> frontier(1);
  frontier[0].constraints = options.domain;
  frontier[0].witness = start.witness;
  frontier[0].input = AffineMap::identity(n);

  for (const auto& layer : net.hidden()) {
    const std::size_t offset = frontier.front().pattern.size();
    for (auto& item : frontier) item.pre = compose_affine(layer, item.input);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      std::vector<std::vector<Item>> children(frontier.size());
      detail::parallel_for(frontier.size(), options.threads,
                           [&](std::size_t i) { children[i] = split(std::move(frontier[i]), j, n); });
      std::vector<Item> next;
      for (auto& group : children)
        for (auto& child : group) next.push_back(std::move(child));
      if (next.size() > options.max_cells) {
        throw BudgetExceeded("region enumeration exceeded " + std::to_string(options.max_cells) + " cells");
      }
      frontier = std::move(next);
    }
    for (auto& item : frontier) item.input = activate(item.pre, std::string_view(item.pattern).substr(offset));
  }

  std::vector<RegionCell> cells;
  cells.reserve(frontier.size());
  for (auto& item : frontier) {
    RegionCell cell;
    cell.pattern = std::move(item.pattern);
    cell.constraints = std::move(item.constraints);
    cell.affine = compose_affine(net.output(), item.input);
    cell.interior = std::move(item.witness);
    cells.push_back(std::move(cell));
  }
  std::sort(cells.begin(), cells.end(),
            [](const RegionCell& x, const RegionCell& y) { return x.pattern < y.pattern; });
  return cells;
}

namespace {

// Same hyperplane, either orientation.
bool same_hyperplane(const LinearConstraint& p, const LinearConstraint& q) {
  if (p.normal.size() != q.normal.size()) return false;
  std::size_t k = 0;
  while (k < p.normal.size() && p.normal[k] == 0) ++k;
  if (k == p.normal.size() || q.normal[k] == 0) return false;
  const Rational lambda = q.normal[k] / p.normal[k];
  for (std::size_t i = 0; i < p.normal.size(); ++i) {
    if (q.normal[i] != lambda * p.normal[i]) return false;
  }
  return q.offset == lambda * p.offset;
}

}  // namespace

bool share_facet(const RegionCell& a, const RegionCell& b) {
  if (a.interior.size() != b.interior.size()) return false;
  const std::size_t n = a.interior.size();
  for (const auto& h : a.constraints) {
    bool opposite = false;
    for (const auto& r : b.constraints) opposite = opposite || same_hyperplane(h, r);
    if (!opposite) continue;
    std::vector<LinearConstraint> rows{{h.normal, h.offset, Sense::Equal}};
    for (const auto* cell : {&a, &b}) {
      for (const auto& r : cell->constraints) {
        if (same_hyperplane(h, r)) continue;
        rows.push_back({r.normal, r.offset, Sense::Less});
      }
    }
    if (lp_feasible(n, rows).feasible) return true;
  }
  return false;
}

std::size_t merge_cells(const std::vector<RegionCell>& cells, unsigned threads) {
  std::vector<std::size_t> parent(cells.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  // Candidate pairs: cells with the same affine map.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string key;
    for (const auto& w : cells[i].affine.weights) key += to_string(w) + ",";
    key += "|";
    for (const auto& b : cells[i].affine.bias) key += to_string(b) + ",";
    groups[key].push_back(i);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [key, members] : groups) {
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y) pairs.emplace_back(members[x], members[y]);
  }
  std::vector<char> adjacent(pairs.size(), 0);
  detail::parallel_for(pairs.size(), threads, [&](std::size_t i) {
    adjacent[i] = share_facet(cells[pairs[i].first], cells[pairs[i].second]) ? 1 : 0;
  });
  std::size_t pieces = cells.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!adjacent[i]) continue;
    const std::size_t ra = find(pairs[i].first), rb = find(pairs[i].second);
    if (ra != rb) {
      parent[std::max(ra, rb)] = std::min(ra, rb);
      --pieces;
    }
  }
  return pieces;
}

PieceReport count_regions(const ReluNetwork& net, const RegionOptions& options) {
  const auto cells = enumerate_cells(net, options);
  return {cells.size(), merge_cells(cells, options.threads)};
}

std::size_t count_pieces(const ReluNetwork& net, const RegionOptions& options) {
  return count_regions(net, options).pieces;
}

}  // namespace reluexact
