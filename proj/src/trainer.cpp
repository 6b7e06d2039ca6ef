#include "reluexact/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "qp.hpp"
#include "reluexact/errors.hpp"
#include "reluexact/lp.hpp"

namespace reluexact {

using Sense = LinearConstraint::Sense;

// ---------------------------------------------------------------------------
// Data and losses

void Dataset::validate() const {
  if (y.empty()) throw ValidationError("dataset: at least one point is required");
  if (n == 0) throw ValidationError("dataset: input dimension must be positive");
  if (x.size() != y.size()) throw ValidationError("dataset: point and target counts differ");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j].size() != n) throw ValidationError("dataset: point " + std::to_string(j + 1) + " has the wrong dimension");
    for (double v : x[j])
      if (!std::isfinite(v)) throw ValidationError("dataset: non-finite coordinate in point " + std::to_string(j + 1));
    if (!std::isfinite(y[j])) throw ValidationError("dataset: non-finite target in point " + std::to_string(j + 1));
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size() && numeric; ++c) numeric = parse_double(cells[c], values[c]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected numbers");
    }
    first = false;
    if (values.size() < 2) throw ValidationError("csv line " + std::to_string(line_no) + ": need at least x1 and y");
    if (data.n == 0) data.n = values.size() - 1;
    if (values.size() != data.n + 1)
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(data.n + 1) + " columns");
    data.y.push_back(values.back());
    values.pop_back();
    data.x.push_back(std::move(values));
  }
  data.validate();
  return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t c = 0; c < data.n; ++c) out << 'x' << (c + 1) << ',';
  out << "y\n";
  std::ostringstream buf;
  buf.precision(17);
  for (std::size_t j = 0; j < data.size(); ++j) {
    for (double v : data.x[j]) buf << v << ',';
    buf << data.y[j] << '\n';
  }
  out << buf.str();
}

LossKind parse_loss(const std::string& name) {
  if (name == "squared") return LossKind::Squared;
  if (name == "hinge") return LossKind::Hinge;
  throw ValidationError("unknown loss '" + name + "' (expected squared or hinge)");
}

std::string loss_name(LossKind loss) { return loss == LossKind::Squared ? "squared" : "hinge"; }

double loss_value(LossKind loss, double prediction, double target) {
  if (loss == LossKind::Squared) return (prediction - target) * (prediction - target);
  return std::max(0.0, 1.0 - prediction * target);
}

// ---------------------------------------------------------------------------
// Dichotomies

std::vector<Dichotomy> enumerate_dichotomies(const Dataset& data, std::size_t max_points) {
  data.validate();
  const std::size_t D = data.size();
  if (D > max_points || D >= 63)
    throw BudgetExceeded("enumerate_dichotomies: " + std::to_string(D) + " points exceeds the limit of " +
                         std::to_string(max_points));
  std::vector<RationalVector> lifted(D);
  for (std::size_t j = 0; j < D; ++j) {
    for (double v : data.x[j]) lifted[j].push_back(from_double(v));
    lifted[j].push_back(1);
  }
  std::vector<Dichotomy> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << D); ++mask) {
    std::vector<LinearConstraint> rows;
    Dichotomy d;
    for (std::size_t j = 0; j < D; ++j) {
      if ((mask >> j) & 1) {
        RationalVector neg = lifted[j];
        for (auto& v : neg) v = -v;
        rows.push_back({std::move(neg), 0, Sense::Less});
        d.positive.push_back(j);
      } else {
        rows.push_back({lifted[j], 0, Sense::LessEqual});
        d.negative.push_back(j);
      }
    }
    if (lp_feasible(data.n + 1, rows).feasible) out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Dichotomy> enumerate_dichotomies_1d(const Dataset& data) {
  data.validate();
  if (data.n != 1) throw ValidationError("enumerate_dichotomies_1d: data must be one-dimensional");
  std::vector<double> values;
  for (const auto& p : data.x) values.push_back(p[0]);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::set<Dichotomy> found;
  for (std::size_t c = 0; c <= values.size(); ++c) {
    // threshold just below values[c]: positive above it, or positive below it
    for (bool upper : {true, false}) {
      Dichotomy d;
      for (std::size_t j = 0; j < data.size(); ++j) {
        const bool above = c < values.size() && data.x[j][0] >= values[c];
        (above == upper ? d.positive : d.negative).push_back(j);
      }
      found.insert(std::move(d));
    }
  }
  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------------------
// Subproblems

ConvexSubproblem build_subproblem(const Dataset& data, const std::vector<int>& signs,
                                  const std::vector<const Dichotomy*>& dichotomies, bool output_bias) {
  const std::size_t n = data.n, D = data.size(), w = signs.size();
  if (dichotomies.size() != w) throw ValidationError("build_subproblem: one dichotomy per unit is required");
  ConvexSubproblem sp;
  sp.num_vars = w * (n + 1) + (output_bias ? 1 : 0);
  sp.design.assign(D, std::vector<double>(sp.num_vars, 0.0));
  sp.targets = data.y;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t base = i * (n + 1);
    const double s = signs[i];
    for (std::size_t j : dichotomies[i]->positive) {
      for (std::size_t c = 0; c < n; ++c) sp.design[j][base + c] = s * data.x[j][c];
      sp.design[j][base + n] = s;
      std::vector<double> row(sp.num_vars, 0.0);
      for (std::size_t c = 0; c < n; ++c) row[base + c] = -data.x[j][c];
      row[base + n] = -1;
      sp.constraints.push_back(std::move(row));
    }
    for (std::size_t j : dichotomies[i]->negative) {
      std::vector<double> row(sp.num_vars, 0.0);
      for (std::size_t c = 0; c < n; ++c) row[base + c] = data.x[j][c];
      row[base + n] = 1;
      sp.constraints.push_back(std::move(row));
    }
  }
  if (output_bias)
    for (auto& row : sp.design) row.back() = 1;
  return sp;
}

namespace {

SubproblemSolution solve_hinge(const ConvexSubproblem& sp) {
  const std::size_t N = sp.num_vars, D = sp.design.size();
  std::vector<LinearConstraint> rows;
  // u_j >= 0 and u_j >= 1 - y_j (design_j . z)
  for (std::size_t j = 0; j < D; ++j) {
    RationalVector nonneg(N + D);
    nonneg[N + j] = -1;
    rows.push_back({std::move(nonneg), 0, Sense::LessEqual});
    RationalVector margin(N + D);
    const Rational yj = from_double(sp.targets[j]);
    for (std::size_t c = 0; c < N; ++c) margin[c] = -yj * from_double(sp.design[j][c]);
    margin[N + j] = -1;
    rows.push_back({std::move(margin), -1, Sense::LessEqual});
  }
  for (const auto& g : sp.constraints) {
    RationalVector row(N + D);
    for (std::size_t c = 0; c < N; ++c) row[c] = from_double(g[c]);
    rows.push_back({std::move(row), 0, Sense::LessEqual});
  }
  RationalVector objective(N + D);
  for (std::size_t j = 0; j < D; ++j) objective[N + j] = -1;
  const auto sol = lp_maximize(objective, rows);
  if (sol.status != LpSolution::Status::Optimal)
    throw InvariantViolation("hinge subproblem: LP did not reach an optimum");
  SubproblemSolution out;
  for (std::size_t c = 0; c < N; ++c) out.z.push_back(to_double(sol.x[c]));
  out.objective = to_double(-sol.value);
  out.iterations = 1;
  return out;
}

}  // namespace

SubproblemSolution solve_subproblem(const ConvexSubproblem& sp, LossKind loss, double tol, std::size_t max_iterations) {
  if (sp.design.size() != sp.targets.size()) throw ValidationError("solve_subproblem: design and targets differ in length");
  for (const auto& row : sp.design)
    if (row.size() != sp.num_vars) throw ValidationError("solve_subproblem: design row of the wrong length");
  for (const auto& row : sp.constraints)
    if (row.size() != sp.num_vars) throw ValidationError("solve_subproblem: constraint row of the wrong length");
  if (!(tol > 0)) throw ValidationError("solve_subproblem: tol must be positive");
  if (loss == LossKind::Hinge) return solve_hinge(sp);
  if (max_iterations == 0) max_iterations = 200 + 20 * (sp.constraints.size() + sp.num_vars);
  const auto r = detail::constrained_least_squares(sp.design, sp.targets, sp.constraints, sp.num_vars, tol, max_iterations);
  return {r.z, r.objective, r.converged, r.iterations};
}

// ---------------------------------------------------------------------------
// Results

double TrainResult::predict(const std::vector<double>& x) const {
  double total = has_output_bias ? output_bias : 0.0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    double pre = b[i];
    for (std::size_t c = 0; c < n; ++c) pre += a[i][c] * x[c];
    total += signs[i] * std::max(0.0, pre);
  }
  return total;
}

ReluNetwork TrainResult::to_network() const {
  const std::size_t w = signs.size();
  AffineMap hidden(w, n), output(1, w);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t c = 0; c < n; ++c) hidden.at(i, c) = from_double(a[i][c]);
    hidden.bias[i] = from_double(b[i]);
    output.at(0, i) = signs[i];
  }
  if (has_output_bias) output.bias[0] = from_double(output_bias);
  return ReluNetwork(n, {std::move(hidden)}, std::move(output), has_output_bias);
}

double empirical_loss(const ReluNetwork& net, const Dataset& data, LossKind loss) {
  data.validate();
  if (net.input_dim() != data.n || net.output_dim() != 1)
    throw ValidationError("empirical_loss: network and data dimensions differ");
  double total = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    RationalVector x;
    for (double v : data.x[j]) x.push_back(from_double(v));
    total += loss_value(loss, to_double(forward(net, x)[0]), data.y[j]);
  }
  return total / static_cast<double>(data.size());
}

double empirical_loss(const TrainResult& result, const Dataset& data, LossKind loss) {
  data.validate();
  if (result.n != data.n) throw ValidationError("empirical_loss: result and data dimensions differ");
  double total = 0;
  for (std::size_t j = 0; j < data.size(); ++j) total += loss_value(loss, result.predict(data.x[j]), data.y[j]);
  return total / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Global search

namespace {

constexpr std::size_t kChunk = 1 << 14;

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t cap, const char* what) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) throw BudgetExceeded(std::string(what) + ": enumeration exceeds the budget of " + std::to_string(cap));
    r *= base;
  }
  return r;
}

void check_options(const TrainOptions& opt) {
  if (opt.width == 0) throw ValidationError("train: width must be at least 1");
  if (opt.width > 30) throw ValidationError("train: width above 30 is not supported");
  if (!(opt.tol > 0)) throw ValidationError("train: tol must be positive");
}

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  bool solved = false;
  bool converged = true;
};

// Runs fn(index) -> Candidate over [0, total) in chunks and returns the
// smallest objective, lowest index first on ties.
template <typename Fn>
std::uint64_t argmin_search(std::uint64_t total, unsigned threads, TrainCertificate& cert, Fn&& fn) {
  std::uint64_t best = total;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<Candidate> slots;
  for (std::uint64_t start = 0; start < total; start += kChunk) {
    const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, total - start));
    slots.assign(len, Candidate{});
    detail::parallel_for(len, threads, [&](std::size_t i) { slots[i] = fn(start + i); });
    for (std::size_t i = 0; i < len; ++i) {
      if (!slots[i].solved) {
        ++cert.pruned;
        continue;
      }
      ++cert.subproblems_solved;
      if (!slots[i].converged) ++cert.nonconverged;
      if (slots[i].objective < best_obj) {
        best_obj = slots[i].objective;
        best = start + i;
      }
    }
  }
  if (best == total) throw InvariantViolation("train: no subproblem was solved");
  cert.best_index = best;
  return best;
}

TrainResult search_units(const Dataset& data, const TrainOptions& opt, const std::vector<Dichotomy>& dich,
                         const std::string& method) {
  const std::size_t w = opt.width;
  const std::uint64_t P = dich.size();
  const std::uint64_t tuples = checked_pow(P, w, opt.budget, "train");
  const std::uint64_t signs_count = std::uint64_t{1} << w;
  if (tuples > opt.budget / signs_count)
    throw BudgetExceeded("train: " + std::to_string(signs_count) + " x " + std::to_string(tuples) +
                         " subproblems exceed the budget of " + std::to_string(opt.budget));

  TrainCertificate cert;
  cert.method = method;
  cert.sign_vectors = signs_count;
  cert.dichotomies = P;
  cert.tuples_total = signs_count * tuples;
  cert.tol = opt.tol;

  auto decode = [&](std::uint64_t index, std::vector<int>& s, std::vector<const Dichotomy*>& d) {
    const std::uint64_t sign_index = index / tuples;
    std::uint64_t t = index % tuples;
    s.assign(w, 1);
    d.assign(w, nullptr);
    for (std::size_t i = 0; i < w; ++i) s[i] = (sign_index >> (w - 1 - i)) & 1 ? -1 : 1;
    std::vector<std::uint64_t> digits(w);
    for (std::size_t i = w; i-- > 0;) {
      digits[i] = t % P;
      t /= P;
    }
    for (std::size_t i = 0; i < w; ++i) d[i] = &dich[digits[i]];
    if (opt.verify) return true;
    // units with equal signs are interchangeable; keep the sorted tuple only
    for (std::size_t i = 0; i + 1 < w; ++i)
      if (s[i] == s[i + 1] && digits[i] > digits[i + 1]) return false;
    return true;
  };

  const std::uint64_t best = argmin_search(cert.tuples_total, opt.threads, cert, [&](std::uint64_t index) {
    std::vector<int> s;
    std::vector<const Dichotomy*> d;
    Candidate c;
    if (!decode(index, s, d)) return c;
    const auto sol = solve_subproblem(build_subproblem(data, s, d, opt.output_bias), opt.loss, opt.tol);
    c.objective = sol.objective;
    c.solved = true;
    c.converged = sol.converged;
    return c;
  });

  std::vector<int> s;
  std::vector<const Dichotomy*> d;
  decode(best, s, d);
  const auto sol = solve_subproblem(build_subproblem(data, s, d, opt.output_bias), opt.loss, opt.tol);

  TrainResult r;
  r.n = data.n;
  r.signs = s;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t base = i * (data.n + 1);
    r.a.emplace_back(sol.z.begin() + static_cast<std::ptrdiff_t>(base),
                     sol.z.begin() + static_cast<std::ptrdiff_t>(base + data.n));
    r.b.push_back(sol.z[base + data.n]);
    r.dichotomies.push_back(*d[i]);
  }
  r.has_output_bias = opt.output_bias;
  if (opt.output_bias) r.output_bias = sol.z.back();
  r.objective = sol.objective;
  r.loss = empirical_loss(r, data, opt.loss);
  r.certificate = cert;
  return r;
}

}  // namespace

TrainResult train_global(const Dataset& data, const TrainOptions& options) {
  data.validate();
  check_options(options);
  return search_units(data, options, enumerate_dichotomies(data), "algorithm-1");
}

TrainResult train_global_1d(const Dataset& data, const TrainOptions& options) {
  data.validate();
  check_options(options);
  if (data.n != 1) throw ValidationError("train_global_1d: data must be one-dimensional");
  return search_units(data, options, enumerate_dichotomies_1d(data), "algorithm-1-1d");
}

// ---------------------------------------------------------------------------
// Breakpoint-interval fit

PwlFitResult fit_pwl_1d(const Dataset& data, const TrainOptions& opt) {
  data.validate();
  check_options(opt);
  if (data.n != 1) throw ValidationError("fit_pwl_1d: data must be one-dimensional");
  const std::size_t D = data.size(), w = opt.width;

  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return data.x[i][0] < data.x[j][0]; });
  std::vector<double> xs(D), ys(D);
  for (std::size_t k = 0; k < D; ++k) {
    xs[k] = data.x[order[k]][0];
    ys[k] = data.y[order[k]];
  }

  // all non-decreasing (w-1)-tuples over 1..D
  std::vector<std::vector<std::size_t>> interval_tuples;
  std::vector<std::size_t> cur(w - 1, 1);
  const std::uint64_t sign_count = std::uint64_t{1} << (w - 1);
  for (;;) {
    interval_tuples.push_back(cur);
    if (interval_tuples.size() > opt.budget / sign_count)
      throw BudgetExceeded("fit_pwl_1d: enumeration exceeds the budget of " + std::to_string(opt.budget));
    std::size_t pos = cur.size();
    while (pos > 0 && cur[pos - 1] == D) --pos;
    if (pos == 0) break;
    ++cur[pos - 1];
    for (std::size_t q = pos; q < cur.size(); ++q) cur[q] = cur[pos - 1];
  }

  TrainCertificate cert;
  cert.method = "breakpoint-intervals";
  cert.sign_vectors = sign_count;
  cert.dichotomies = interval_tuples.size();
  cert.tuples_total = sign_count * interval_tuples.size();
  cert.tol = opt.tol;

  auto build = [&](std::uint64_t index, std::vector<int>& S) {
    const auto& I = interval_tuples[index / sign_count];
    const std::uint64_t sbits = index % sign_count;
    S.assign(w - 1, 1);
    for (std::size_t j = 0; j + 1 < w; ++j) S[j] = (sbits >> (w - 2 - j)) & 1 ? -1 : 1;
    ConvexSubproblem sp;
    sp.num_vars = 2 * w;
    sp.targets = ys;
    std::size_t block = 0;
    for (std::size_t k = 0; k < D; ++k) {
      while (block + 1 < w && k + 1 > I[block]) ++block;
      std::vector<double> row(2 * w, 0.0);
      row[2 * block] = xs[k];
      row[2 * block + 1] = 1;
      sp.design.push_back(std::move(row));
    }
    // d_j(x) = (a_{j+1} - a_j) x + (b_{j+1} - b_j)
    auto d_row = [&](std::size_t j, double x, double factor) {
      std::vector<double> row(2 * w, 0.0);
      row[2 * (j + 1)] = factor * x;
      row[2 * j] = -factor * x;
      row[2 * (j + 1) + 1] = factor;
      row[2 * j + 1] = -factor;
      return row;
    };
    for (std::size_t j = 0; j + 1 < w; ++j) {
      const double s = S[j];
      sp.constraints.push_back(d_row(j, xs[I[j] - 1], s));  // S d(x_{i_j}) <= 0
      if (I[j] < D) sp.constraints.push_back(d_row(j, xs[I[j]], -s));  // S d(x_{i_j + 1}) >= 0
      std::vector<double> turn(2 * w, 0.0);  // S (a_{j+1} - a_j) >= 0
      turn[2 * (j + 1)] = -s;
      turn[2 * j] = s;
      sp.constraints.push_back(std::move(turn));
    }
    return sp;
  };

  const std::uint64_t best = argmin_search(cert.tuples_total, opt.threads, cert, [&](std::uint64_t index) {
    std::vector<int> S;
    const auto sol = solve_subproblem(build(index, S), opt.loss, opt.tol);
    return Candidate{sol.objective, true, sol.converged};
  });

  std::vector<int> S;
  const auto sol = solve_subproblem(build(best, S), opt.loss, opt.tol);
  const auto& I = interval_tuples[best / sign_count];

  PwlFitResult r;
  r.cuts = I;
  r.turn_signs = S;
  r.objective = sol.objective;
  r.certificate = cert;
  for (std::size_t j = 0; j < w; ++j) {
    r.slopes.push_back(sol.z[2 * j]);
    r.intercepts.push_back(sol.z[2 * j + 1]);
  }

  // Rebuild a continuous function from the pieces of the non-empty blocks.
  std::vector<std::size_t> start(w), end(w);
  for (std::size_t j = 0; j < w; ++j) {
    start[j] = j == 0 ? 0 : I[j - 1];
    end[j] = j + 1 < w ? I[j] : D;
  }
  std::vector<std::size_t> used;
  for (std::size_t j = 0; j < w; ++j)
    if (end[j] > start[j]) used.push_back(j);
  auto line = [&](std::size_t j, const Rational& x) {
    return Rational(from_double(r.slopes[j]) * x + from_double(r.intercepts[j]));
  };
  RationalVector vx, vy;
  auto push_vertex = [&](const Rational& x, const Rational& y) {
    if (!vx.empty() && x <= vx.back()) return;
    vx.push_back(x);
    vy.push_back(y);
  };
  for (std::size_t t = 0; t + 1 < used.size(); ++t) {
    const std::size_t p = used[t], q = used[t + 1];
    const Rational xl = from_double(xs[end[p] - 1]), xr = from_double(xs[start[q]]);
    if (q == p + 1) {
      const Rational ap = from_double(r.slopes[p]), aq = from_double(r.slopes[q]);
      Rational beta = xl;
      if (ap != aq) {
        beta = (from_double(r.intercepts[p]) - from_double(r.intercepts[q])) / (aq - ap);
        beta = std::clamp(beta, xl, xr);
      }
      push_vertex(beta, line(p, beta));
    } else {
      push_vertex(xl, line(p, xl));
      if (xr > xl) push_vertex(xr, line(q, xr));
    }
  }
  const Rational left = from_double(r.slopes[used.front()]), right = from_double(r.slopes[used.back()]);
  r.f = vx.empty() ? PwlFunction1D::affine(left, from_double(r.intercepts[used.front()]))
                   : PwlFunction1D::from_vertices(left, vx, vy, right);

  double total = 0;
  for (std::size_t k = 0; k < D; ++k) total += loss_value(opt.loss, to_double(r.f(from_double(xs[k]))), ys[k]);
  r.loss = total / static_cast<double>(D);
  return r;
}

}  // namespace reluexact
