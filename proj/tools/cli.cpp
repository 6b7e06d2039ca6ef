#include "reluexact/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "reluexact/errors.hpp"
#include "reluexact/serialize.hpp"

namespace reluexact {

namespace {

// ---------------------------------------------------------------------------
// small helpers

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

struct Grid {
  Rational lo, hi;
  std::size_t count = 0;

  Rational at(std::size_t i) const {
    if (count == 1) return lo;
    return lo + (hi - lo) * Rational(static_cast<long>(i)) / Rational(static_cast<long>(count - 1));
  }
};

Grid parse_grid(const std::string& text, const char* flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError(std::string(flag) + ": expected lo:hi:count, got '" + text + "'");
  Grid g{parse_rational(parts[0]), parse_rational(parts[1]), 0};
  try {
    std::size_t used = 0;
    const long long c = std::stoll(parts[2], &used);
    if (used != parts[2].size() || c < 1) throw std::invalid_argument("count");
    g.count = static_cast<std::size_t>(c);
  } catch (const std::exception&) {
    throw ValidationError(std::string(flag) + ": count must be a positive integer");
  }
  if (g.hi < g.lo) throw ValidationError(std::string(flag) + ": hi must not be below lo");
  if (g.count > 1'000'000) throw ValidationError(std::string(flag) + ": at most 1000000 samples per axis");
  return g;
}

std::pair<Rational, Rational> parse_box(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ValidationError("--box: expected lo,hi");
  auto lo = parse_rational(parts[0]), hi = parse_rational(parts[1]);
  if (!(lo < hi)) throw ValidationError("--box: lo must be below hi");
  return {lo, hi};
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& p : split(text, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(p, &used);
    } catch (const std::exception&) {
    }
    if (used != p.size() || v < 1) throw ValidationError("--widths: expected comma-separated positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ValidationError("--widths: at least one layer");
  return out;
}

std::uint64_t ipow(std::uint64_t b, std::uint64_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  if (!r.fits_ulong_p()) throw ValidationError("value exceeds 64 bits");
  return r.get_ui();
}

// Where the artifact and the report go.
class Sink {
 public:
  Sink(std::ostream& out, std::ostream& err, std::string path) : out_(out), err_(err), path_(std::move(path)) {}

  void artifact(const std::string& text) {
    if (path_.empty()) {
      out_ << text;
      to_stdout_ = true;
    } else {
      write_text_file(path_, text);
    }
  }
  std::ostream& report() { return to_stdout_ ? err_ : out_; }
  void flush_report(const std::string& text) { report() << text; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::string path_;
  bool to_stdout_ = false;
};

struct Loaded {
  std::string format;
  Json json;
};

Loaded load(const std::string& path) {
  Loaded l{"", read_json_file(path)};
  l.format = format_of(l.json);
  if (l.format.empty()) throw ValidationError(path + ": missing \"format\" field");
  return l;
}

ReluNetwork load_network(const std::string& path) {
  auto l = load(path);
  if (l.format != "relu-net-v1") throw ValidationError(path + ": expected a relu-net-v1 file, found " + l.format);
  return network_from_json(l.json);
}

void describe_net(std::ostream& r, const ReluNetwork& net) {
  r << "input_dim: " << net.input_dim() << "\n";
  r << "depth: " << net.depth() << "\n";
  r << "size: " << net.size() << "\n";
  r << "width: " << net.width() << "\n";
}

const char* verdict(bool ok) { return ok ? "MATCH" : "MISMATCH"; }

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string kind;
  std::uint64_t w = 2, k = 1, n = 2, m = 2, pieces = 3, seed = 0;
  std::string M = "1";
  std::string out, pwl_out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  Sink sink(out, err, a.out);
  std::ostringstream r;
  if (a.kind == "sawtooth") {
    if (a.w < 2 || a.k < 1) throw ValidationError("sawtooth: need --w >= 2 and --k >= 1");
    const auto params = SawtoothParams::uniform(a.w, a.k, parse_rational(a.M));
    const auto net = sawtooth_net(params);
    Json meta{{"family", "sawtooth"}, {"w", a.w}, {"k", a.k}, {"M", rational_to_json(params.M)}};
    sink.artifact(dump(network_to_json(net, meta)));
    if (!a.pwl_out.empty()) write_text_file(a.pwl_out, dump(pwl_to_json(sawtooth(params))));
    describe_net(r, net);
    r << "predicted_depth: " << a.k + 1 << "\n";
    r << "predicted_size: " << a.w * a.k << "\n";
    r << "predicted_pieces_in_[0,M]: " << ipow(a.w, a.k) << "\n";
    r << "lemma_bound: " << pieces_upper_bound(net.widths()) << "\n";
  } else if (a.kind == "zonotope-family") {
    if (a.w < 2 || a.k < 1 || a.n < 1 || a.m < 1) throw ValidationError("zonotope-family: need --n, --m, --k >= 1 and --w >= 2");
    Rng rng(a.seed);
    const ZonotopeFamilyParams params{random_zonotope(rng, a.n, a.m), SawtoothParams::uniform(a.w, a.k)};
    const auto net = zonotope_family_net(params);
    Json meta{{"family", "zonotope-family"}, {"n", a.n}, {"m", a.m}, {"w", a.w}, {"k", a.k},
              {"seed", a.seed}, {"zonotope", zonotope_to_json(params.zonotope)}};
    sink.artifact(dump(network_to_json(net, meta)));
    describe_net(r, net);
    const auto f = zonotope_piece_formulas(a.n, a.m, a.w, a.k);
    r << "predicted_depth: " << a.k + 2 << "\n";
    r << "predicted_size: " << 2 * a.m + a.w * a.k << "\n";
    r << "vertices: " << vertices(params.zonotope).size() << "\n";
    r << "formula_power: " << f.power_form << "\n";
    r << "formula_binomial: " << f.binomial_form << "\n";
    r << "formula_classical: " << f.classical_form << "\n";
  } else if (a.kind == "random-pwl") {
    if (a.pieces < 1) throw ValidationError("random-pwl: --pieces must be at least 1");
    Rng rng(a.seed);
    const auto f = random_pwl(rng, a.pieces);
    sink.artifact(dump(pwl_to_json(f)));
    r << "pieces: " << f.pieces() << "\n";
    r << "two_layer_size: " << from_pwl_2layer(f).size() << "\n";
  } else if (a.kind == "random-zonotope") {
    if (a.n < 1 || a.m < 1) throw ValidationError("random-zonotope: --n and --m must be positive");
    Rng rng(a.seed);
    const auto z = random_zonotope(rng, a.n, a.m);
    sink.artifact(dump(zonotope_to_json(z)));
    r << "n: " << z.n << "\nm: " << z.m() << "\n";
    r << "vertices: " << vertices(z).size() << "\n";
    r << "extremal: " << (is_extremal(z) ? "yes" : "no") << "\n";
  } else {
    throw ValidationError("generate: unknown kind '" + a.kind + "'");
  }
  sink.flush_report(r.str());
  return 0;
}

// ---------------------------------------------------------------------------
// build

struct BuildArgs {
  std::string op;
  std::vector<std::string> inputs;
  std::string factor = "1", widths = "2";
  std::uint64_t depth = 2, n = 2, seed = 0;
  std::string out;
};

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  Sink sink(out, err, a.out);
  auto need = [&](std::size_t count) {
    if (a.inputs.size() < count || (count < 2 && a.inputs.size() != count))
      throw ValidationError("build " + a.op + ": expected " + std::to_string(count) + (count >= 2 ? " or more" : "") +
                            " input file(s)");
  };
  std::optional<ReluNetwork> net;
  Json meta = {{"built_by", a.op}};
  if (a.op == "from-pwl") {
    need(1);
    auto l = load(a.inputs[0]);
    net = from_pwl_2layer(pwl_from_json(l.json));
  } else if (a.op == "support") {
    need(1);
    net = support_net(zonotope_from_json(load(a.inputs[0]).json));
  } else if (a.op == "hinge") {
    need(1);
    net = from_hinge(hinge_from_json(load(a.inputs[0]).json));
  } else if (a.op == "compose") {
    if (a.inputs.size() != 2) throw ValidationError("build compose: expected OUTER INNER");
    net = compose_nets(load_network(a.inputs[0]), load_network(a.inputs[1]));
  } else if (a.op == "add") {
    need(2);
    net = load_network(a.inputs[0]);
    for (std::size_t i = 1; i < a.inputs.size(); ++i) net = add_nets(*net, load_network(a.inputs[i]));
  } else if (a.op == "max") {
    need(2);
    std::vector<ReluNetwork> nets;
    for (const auto& p : a.inputs) nets.push_back(load_network(p));
    net = max_nets(nets);
  } else if (a.op == "scale") {
    need(1);
    net = scale_net(load_network(a.inputs[0]), parse_rational(a.factor));
  } else if (a.op == "pad") {
    need(1);
    net = pad_depth(load_network(a.inputs[0]), a.depth);
  } else if (a.op == "random") {
    need(0);
    if (a.n < 1) throw ValidationError("build random: --n must be positive");
    Rng rng(a.seed);
    net = random_network(rng, a.n, parse_widths(a.widths));
    meta["seed"] = a.seed;
  } else if (a.op == "l1") {
    need(0);
    if (a.n < 1) throw ValidationError("build l1: --n must be positive");
    Zonotope z{a.n, {}};
    for (std::size_t i = 0; i < a.n; ++i) {
      RationalVector e(a.n);
      e[i] = 1;
      z.generators.push_back(e);
    }
    net = support_net(z);
  } else if (a.op == "extract") {
    need(1);
    const auto f = extract_pwl(load_network(a.inputs[0]));
    sink.artifact(dump(pwl_to_json(f)));
    sink.report() << "pieces: " << f.pieces() << "\n";
    return 0;
  } else {
    throw ValidationError("build: unknown operation '" + a.op + "'");
  }
  sink.artifact(dump(network_to_json(*net, meta)));
  std::ostringstream r;
  describe_net(r, *net);
  sink.flush_report(r.str());
  return 0;
}

// ---------------------------------------------------------------------------
// count

struct CountArgs {
  std::string net;
  std::string box;
  std::string domain = "auto";
  std::uint64_t max_cells = 200'000;
  unsigned threads = 1;
  std::string cells_out, summary_csv;
  bool timing = false;
};

int cmd_count(const CountArgs& a, std::ostream& out, std::ostream&) {
  const auto loaded = load(a.net);
  if (loaded.format != "relu-net-v1") throw ValidationError(a.net + ": expected a relu-net-v1 file");
  const auto net = network_from_json(loaded.json);
  const Json meta = loaded.json.contains("meta") ? loaded.json.at("meta") : Json();
  const std::string family = meta.is_object() && meta.contains("family") ? meta.at("family").get<std::string>() : "";
  const std::size_t n = net.input_dim();

  RegionOptions opt;
  opt.max_cells = a.max_cells;
  opt.threads = a.threads;
  std::string domain_text;
  std::string mode = a.domain;
  if (mode == "auto") {
    if (!a.box.empty()) mode = "box";
    else if (family == "sawtooth") mode = "family";
    else if (family == "zonotope-family") mode = "polar";
    else mode = "box";
  }
  if (mode == "box") {
    auto [lo, hi] = a.box.empty() ? std::pair<Rational, Rational>(-1024, 1024) : parse_box(a.box);
    opt.domain = box_domain(n, lo, hi);
    domain_text = "box [" + to_string(lo) + ", " + to_string(hi) + "]^" + std::to_string(n);
  } else if (mode == "family") {
    if (family != "sawtooth") throw ValidationError("count: --domain family needs a sawtooth net");
    const Rational M = rational_from_json(meta.at("M"));
    opt.domain = box_domain(n, 0, M);
    domain_text = "box [0, " + to_string(M) + "]";
  } else if (mode == "polar") {
    if (family != "zonotope-family") throw ValidationError("count: --domain polar needs a zonotope-family net");
    opt.domain = polar_domain(zonotope_from_json(meta.at("zonotope")), 1);
    domain_text = "polar {r : h_Z(r) <= 1}";
  } else if (mode == "all") {
    domain_text = "all of R^" + std::to_string(n);
  } else {
    throw ValidationError("count: --domain must be auto, box, family, polar or all");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = enumerate_cells(net, opt);
  const std::size_t pieces = merge_cells(cells, opt.threads);
  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();

  if (!a.cells_out.empty()) {
    std::string text;
    for (const auto& c : cells) text += cell_to_json(c).dump() + "\n";
    write_text_file(a.cells_out, text);
  }
  if (!a.summary_csv.empty()) {
    write_text_file(a.summary_csv, "cells,merged_pieces,wall_ms\r\n" + std::to_string(cells.size()) + "," +
                                       std::to_string(pieces) + "," + (a.timing ? std::to_string(wall_ms) : "") + "\r\n");
  }

  std::ostringstream r;
  r << "domain: " << domain_text << "\n";
  r << "cells: " << cells.size() << "\n";
  r << "pieces: " << pieces << "\n";
  if (n == 1) r << "lemma_bound: " << pieces_upper_bound(net.widths()) << "\n";
  if (family == "sawtooth" && mode == "family") {
    const auto predicted = ipow(meta.at("w").get<std::uint64_t>(), meta.at("k").get<std::uint64_t>());
    r << "predicted_pieces: " << predicted << " " << verdict(pieces == predicted) << "\n";
  }
  if (family == "zonotope-family" && mode == "polar") {
    const auto w = meta.at("w").get<std::uint64_t>(), k = meta.at("k").get<std::uint64_t>();
    const auto z = zonotope_from_json(meta.at("zonotope"));
    const auto f = zonotope_piece_formulas(z.n, z.m(), w, k);
    const auto verts = vertices(z).size();
    r << "vertices_times_w^k: " << verts * ipow(w, k) << " " << verdict(pieces == verts * ipow(w, k)) << "\n";
    r << "formula_power: " << f.power_form << " " << verdict(pieces == f.power_form) << "\n";
    r << "formula_binomial: " << f.binomial_form << " " << verdict(pieces == f.binomial_form) << "\n";
    r << "formula_classical: " << f.classical_form << " " << verdict(pieces == f.classical_form) << "\n";
  }
  if (a.timing) r << "wall_ms: " << wall_ms << "\n";
  out << r.str();
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string data;
  std::uint64_t width = 1;
  std::string loss = "squared";
  double tol = 1e-8;
  std::uint64_t budget = 5'000'000;
  bool verify = false, output_bias = false;
  std::string method = "auto";
  unsigned threads = 1;
  std::string out, net_out;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.data);
  if (!in) throw ValidationError("cannot open '" + a.data + "'");
  const auto data = read_dataset_csv(in);
  TrainOptions opt;
  opt.width = a.width;
  opt.loss = parse_loss(a.loss);
  opt.tol = a.tol;
  opt.budget = a.budget;
  opt.verify = a.verify;
  opt.output_bias = a.output_bias;
  opt.threads = a.threads;

  std::string method = a.method;
  if (method == "auto") method = data.n == 1 ? "1d" : "global";
  Sink sink(out, err, a.out);
  std::ostringstream r;
  TrainCertificate cert;
  double loss = 0;
  if (method == "global" || method == "1d") {
    const auto res = method == "1d" ? train_global_1d(data, opt) : train_global(data, opt);
    sink.artifact(dump(train_result_to_json(res, opt.loss)));
    if (!a.net_out.empty()) write_text_file(a.net_out, dump(network_to_json(res.to_network())));
    cert = res.certificate;
    loss = res.loss;
  } else if (method == "pwl") {
    const auto res = fit_pwl_1d(data, opt);
    sink.artifact(dump(pwl_fit_to_json(res, opt.loss)));
    if (!a.net_out.empty()) write_text_file(a.net_out, dump(network_to_json(res.to_network())));
    cert = res.certificate;
    loss = res.loss;
  } else {
    throw ValidationError("train: --method must be auto, global, 1d or pwl");
  }
  r << "points: " << data.size() << "\n";
  r << "input_dim: " << data.n << "\n";
  r << "method: " << cert.method << "\n";
  r << "loss: " << fmt_double(loss) << "\n";
  r << "sign_vectors: " << cert.sign_vectors << "\n";
  r << (method == "pwl" ? "interval_tuples: " : "dichotomies: ") << cert.dichotomies << "\n";
  r << "tuples_total: " << cert.tuples_total << "\n";
  r << "subproblems_solved: " << cert.subproblems_solved << "\n";
  r << "pruned: " << cert.pruned << "\n";
  r << "nonconverged: " << cert.nonconverged << "\n";
  sink.flush_report(r.str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string topic;
  std::uint64_t w = 2, k = 3, p = 3, n = 2, m = 4, count = 50, seed = 0;
};

class Checks {
 public:
  explicit Checks(std::ostream& out) : out_(out) {}
  void check(bool ok, const std::string& what) {
    out_ << (ok ? "PASS " : "FAIL ") << what << "\n";
    failed_ = failed_ || !ok;
  }
  bool failed() const { return failed_; }

 private:
  std::ostream& out_;
  bool failed_ = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  Checks c(out);
  Rng rng(a.seed);
  if (a.topic == "sawtooth") {
    for (std::uint64_t w = 2; w <= std::max<std::uint64_t>(2, a.w); ++w)
      for (std::uint64_t k = 1; k <= std::max<std::uint64_t>(1, a.k); ++k) {
        const auto params = SawtoothParams::uniform(w, k);
        const auto net = sawtooth_net(params);
        const auto f = extract_pwl(net);
        const auto pieces = f.pieces_in(0, 1);
        c.check(pieces == ipow(w, k) && f == sawtooth(params) && net.size() == w * k && net.depth() == k + 1,
                "sawtooth w=" + std::to_string(w) + " k=" + std::to_string(k) + " pieces=" + std::to_string(pieces) +
                    " size=" + std::to_string(net.size()) + " depth=" + std::to_string(net.depth()));
      }
  } else if (a.topic == "flaps") {
    for (std::uint64_t t = 0; t < a.count; ++t) {
      const auto p = static_cast<std::size_t>(rng.uniform_int(2, 10));
      const bool zl = rng.uniform_int(0, 3) == 0, zr = rng.uniform_int(0, 3) == 0;
      const auto f = random_pwl(rng, p, zl, zr);
      const auto net = from_pwl_2layer(f);
      bool equal = true;
      for (const auto& x : probe_points_1d(f)) equal = equal && forward_scalar(net, x) == f(x);
      const bool flat = f.left_slope() == 0 || f.right_slope() == 0;
      c.check(equal && net.size() <= p && (!flat || net.size() == p - 1),
              "flaps pieces=" + std::to_string(p) + " size=" + std::to_string(net.size()));
    }
  } else if (a.topic == "bounds") {
    for (std::uint64_t t = 0; t < a.count; ++t) {
      std::vector<std::size_t> widths;
      const auto depth = rng.uniform_int(1, 3);
      for (int i = 0; i < depth; ++i) widths.push_back(static_cast<std::size_t>(rng.uniform_int(1, 4)));
      const auto net = random_network(rng, 1, widths);
      const auto pieces = extract_pwl(net).pieces();
      const auto bound = pieces_upper_bound(widths);
      c.check(pieces <= bound, "pieces " + std::to_string(pieces) + " <= bound " + std::to_string(bound));
    }
  } else if (a.topic == "gap") {
    const auto s = sawtooth(SawtoothParams::uniform(a.w, a.k));
    const Rational bound = gap_lower_bound(a.w, a.k, a.p);
    Rational best = -1;
    for (std::uint64_t t = 0; t < a.count; ++t) {
      // comparators with breakpoints inside [0, 1]
      RationalVector bps;
      for (std::uint64_t i = 0; i + 1 < a.p; ++i) bps.push_back(rng.rational_between(0, 1, 64));
      std::sort(bps.begin(), bps.end());
      bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
      RationalVector ys;
      RationalVector xs = bps;
      for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(rng.rational_between(0, 1, 32));
      const Rational left = rng.rational(2, 1), right = rng.rational(2, 1);
      const auto g = xs.empty() ? PwlFunction1D::affine(left, rng.rational_between(0, 1, 32))
                                : PwlFunction1D::from_vertices(left, xs, ys, right);
      const Rational d = l1_distance(s, g, 0, 1);
      if (best < 0 || d < best) best = d;
      c.check(d >= bound, "comparator " + std::to_string(t) + " distance " + to_string(d) + " >= " + to_string(bound));
    }
    out << "best_distance: " << to_string(best) << "\n";
  } else if (a.topic == "zonotope") {
    for (std::uint64_t t = 0; t < a.count; ++t) {
      const auto z = random_zonotope(rng, a.n, a.m);
      const auto verts = vertices(z);
      const auto net = support_net(z);
      bool ok = net.size() == 2 * z.m();
      for (int probe = 0; probe < 20; ++probe) {
        RationalVector r(z.n);
        for (auto& v : r) v = rng.rational(9, 7);
        Rational by_vertex = dot(r, verts.front());
        for (const auto& v : verts) by_vertex = std::max(by_vertex, dot(r, v));
        const Rational h = support(z, r);
        ok = ok && h == by_vertex && forward(net, r)[0] == h;
      }
      c.check(ok, "zonotope " + std::to_string(t) + " vertices=" + std::to_string(verts.size()));
    }
  } else {
    throw ValidationError("verify: unknown topic '" + a.topic + "' (sawtooth, flaps, bounds, gap, zonotope)");
  }
  out << (c.failed() ? "result: FAIL\n" : "result: PASS\n");
  return c.failed() ? 4 : 0;
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::string file;
  std::string x = "0:1:5", y;
  bool exact = false;
  std::string out;
};

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
  const auto loaded = load(a.file);
  const Grid gx = parse_grid(a.x, "--x");
  std::function<Rational(const RationalVector&)> fn;
  std::size_t n = 0;
  std::vector<std::string> header;
  if (loaded.format == "relu-net-v1") {
    const auto net = network_from_json(loaded.json);
    if (net.output_dim() != 1) throw ValidationError("sample: network must have a single output");
    n = net.input_dim();
    fn = [net](const RationalVector& x) { return forward(net, x)[0]; };
    header = n == 1 ? std::vector<std::string>{"x", "f"} : std::vector<std::string>{"x1", "x2", "f"};
  } else if (loaded.format == "pwl-v1") {
    const auto f = pwl_from_json(loaded.json);
    n = 1;
    fn = [f](const RationalVector& x) { return f(x[0]); };
    header = {"x", "f"};
  } else if (loaded.format == "zonotope-v1") {
    const auto z = zonotope_from_json(loaded.json);
    n = z.n;
    fn = [z](const RationalVector& r) { return support(z, r); };
    header = n == 1 ? std::vector<std::string>{"r", "h"} : std::vector<std::string>{"r1", "r2", "h"};
  } else {
    throw ValidationError("sample: cannot sample format " + loaded.format);
  }
  if (n > 2) throw ValidationError("sample: only one- and two-dimensional inputs can be sampled");
  if (n == 2 && a.y.empty()) throw ValidationError("sample: two-dimensional input needs --y lo:hi:count");
  const Grid gy = n == 2 ? parse_grid(a.y, "--y") : Grid{};
  if (n == 2 && gx.count * gy.count > 4'000'000) throw ValidationError("sample: grid too large");

  auto text = [&](const Rational& q) { return a.exact ? to_string(q) : fmt_double(to_double(q)); };
  std::string csv;
  for (std::size_t i = 0; i < header.size(); ++i) csv += (i ? "," : "") + header[i];
  csv += "\r\n";
  for (std::size_t i = 0; i < gx.count; ++i) {
    if (n == 1) {
      const Rational x = gx.at(i);
      csv += text(x) + "," + text(fn({x})) + "\r\n";
    } else {
      for (std::size_t j = 0; j < gy.count; ++j) {
        const Rational x = gx.at(i), y = gy.at(j);
        csv += text(x) + "," + text(y) + "," + text(fn({x, y})) + "\r\n";
      }
    }
  }
  Sink sink(out, err, a.out);
  sink.artifact(csv);
  sink.report() << "samples: " << (n == 1 ? gx.count : gx.count * gy.count) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact piecewise-linear toolkit for ReLU networks", "reluexact"};
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a hard-family network, random PWL function or zonotope");
  gen->add_option("kind", ga.kind, "sawtooth | zonotope-family | random-pwl | random-zonotope")->required();
  gen->add_option("--w", ga.w, "Pieces per sawtooth layer");
  gen->add_option("--k", ga.k, "Number of sawtooth layers");
  gen->add_option("--M", ga.M, "Sawtooth height (rational)");
  gen->add_option("--n", ga.n, "Input dimension");
  gen->add_option("--m", ga.m, "Number of zonotope generators");
  gen->add_option("--pieces", ga.pieces, "Pieces of the random PWL function");
  gen->add_option("--seed", ga.seed, "Random seed");
  gen->add_option("--out", ga.out, "Output file (default: stdout)");
  gen->add_option("--pwl-out", ga.pwl_out, "Also write the sawtooth function as pwl-v1");

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "Build or combine networks");
  build->add_option("op", ba.op, "from-pwl | support | hinge | compose | add | max | scale | pad | random | l1 | extract")
      ->required();
  build->add_option("inputs", ba.inputs, "Input files");
  build->add_option("--factor", ba.factor, "Scale factor (rational)");
  build->add_option("--depth", ba.depth, "Target depth for pad");
  build->add_option("--n", ba.n, "Input dimension for random and l1");
  build->add_option("--widths", ba.widths, "Hidden widths for random, e.g. 3,2");
  build->add_option("--seed", ba.seed, "Random seed");
  build->add_option("--out", ba.out, "Output file (default: stdout)");

  CountArgs ca;
  auto* count = app.add_subcommand("count", "Count activation cells and linear pieces");
  count->add_option("net", ca.net, "relu-net-v1 file")->required();
  count->add_option("--box", ca.box, "Domain [lo,hi]^n given as lo,hi");
  count->add_option("--domain", ca.domain, "auto | box | family | polar | all");
  count->add_option("--max-cells", ca.max_cells, "Cell budget");
  count->add_option("--threads", ca.threads, "Worker threads");
  count->add_option("--cells-out", ca.cells_out, "Write cells as JSON lines");
  count->add_option("--summary-csv", ca.summary_csv, "Write a one-row CSV summary");
  count->add_flag("--timing", ca.timing, "Report wall-clock time (makes output run-dependent)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Globally optimal training of a two-layer network");
  train->add_option("data", ta.data, "CSV with columns x1..xn,y")->required();
  train->add_option("--width", ta.width, "Hidden units (pieces for --method pwl)");
  train->add_option("--loss", ta.loss, "squared | hinge");
  train->add_option("--tol", ta.tol, "Subproblem tolerance");
  train->add_option("--budget", ta.budget, "Maximum number of subproblems");
  train->add_flag("--verify", ta.verify, "Disable symmetry pruning");
  train->add_flag("--output-bias", ta.output_bias, "Allow an output bias");
  train->add_option("--method", ta.method, "auto | global | 1d | pwl");
  train->add_option("--threads", ta.threads, "Worker threads");
  train->add_option("--out", ta.out, "Result JSON (default: stdout)");
  train->add_option("--net-out", ta.net_out, "Write the fitted network as relu-net-v1");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check construction and bound claims on generated instances");
  verify->add_option("topic", va.topic, "sawtooth | flaps | bounds | gap | zonotope")->required();
  verify->add_option("--w", va.w, "Largest w (sawtooth) or w (gap)");
  verify->add_option("--k", va.k, "Largest k (sawtooth) or k (gap)");
  verify->add_option("--p", va.p, "Comparator pieces (gap)");
  verify->add_option("--n", va.n, "Dimension (zonotope)");
  verify->add_option("--m", va.m, "Generators (zonotope)");
  verify->add_option("--count", va.count, "Number of random instances");
  verify->add_option("--seed", va.seed, "Random seed");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sample a network, PWL function or zonotope support function on a grid");
  sample->add_option("file", sa.file, "relu-net-v1, pwl-v1 or zonotope-v1 file")->required();
  sample->add_option("--x", sa.x, "lo:hi:count for the first axis");
  sample->add_option("--y", sa.y, "lo:hi:count for the second axis");
  sample->add_flag("--exact", sa.exact, "Write exact num/den values");
  sample->add_option("--out", sa.out, "CSV file (default: stdout)");

  std::vector<std::string> storage{"reluexact"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(ga, out, err);
    if (*build) return cmd_build(ba, out, err);
    if (*count) return cmd_count(ca, out, err);
    if (*train) return cmd_train(ta, out, err);
    if (*verify) return cmd_verify(va, out);
    if (*sample) return cmd_sample(sa, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace reluexact
