// Thin binding layer: every structured value crosses the boundary as the same
// JSON text the CLI reads and writes, so the Python side sees exact rationals
// as "num/den" strings and can turn them into fractions.Fraction.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <tuple>

#include "reluexact/errors.hpp"
#include "reluexact/regions.hpp"
#include "reluexact/serialize.hpp"
#include "reluexact/trainer.hpp"
#include "reluexact/zonotope.hpp"

namespace py = pybind11;
using namespace reluexact;

namespace {

RationalVector to_rationals(const std::vector<std::string>& xs) {
  RationalVector v;
  for (const auto& s : xs) v.push_back(parse_rational(s));
  return v;
}

std::vector<std::string> to_strings(const RationalVector& v) {
  std::vector<std::string> out;
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

ReluNetwork net_of(const std::string& text) { return network_from_json(parse_json(text)); }

Dataset dataset_of(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  Dataset d;
  d.n = x.empty() ? 0 : x.front().size();
  d.x = x;
  d.y = y;
  return d;
}

TrainOptions options_of(std::size_t width, const std::string& loss, double tol, bool verify, bool output_bias,
                        unsigned threads, std::uint64_t budget) {
  TrainOptions o;
  o.width = width;
  o.loss = parse_loss(loss);
  o.tol = tol;
  o.verify = verify;
  o.output_bias = output_bias;
  o.threads = threads;
  o.budget = budget;
  return o;
}

RegionOptions regions_of(const std::optional<std::pair<std::string, std::string>>& box, std::size_t n, unsigned threads,
                         std::size_t max_cells) {
  RegionOptions opt;
  if (box) opt.domain = box_domain(n, parse_rational(box->first), parse_rational(box->second));
  opt.threads = threads;
  opt.max_cells = max_cells;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_reluexact, m) {
  m.doc() = "Exact piecewise-linear toolkit for ReLU networks (JSON-level bindings)";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  m.def("sawtooth_net", [](std::uint64_t w, std::uint64_t k, const std::string& M) {
    const auto p = SawtoothParams::uniform(w, k, parse_rational(M));
    return dump(network_to_json(sawtooth_net(p), {{"family", "sawtooth"}, {"w", w}, {"k", k}, {"M", to_string(p.M)}}));
  });
  m.def("sawtooth_pwl", [](std::uint64_t w, std::uint64_t k, const std::string& M) {
    return dump(pwl_to_json(sawtooth(SawtoothParams::uniform(w, k, parse_rational(M)))));
  });
  m.def("extract_pwl", [](const std::string& net) { return dump(pwl_to_json(extract_pwl(net_of(net)))); });
  m.def("from_pwl_2layer", [](const std::string& f) {
    return dump(network_to_json(from_pwl_2layer(pwl_from_json(parse_json(f)))));
  });
  m.def("pwl_eval", [](const std::string& f, const std::string& x) {
    return to_string(pwl_from_json(parse_json(f))(parse_rational(x)));
  });
  m.def("forward", [](const std::string& net, const std::vector<std::string>& x) {
    return to_strings(forward(net_of(net), to_rationals(x)));
  });
  m.def("compose_nets", [](const std::string& outer, const std::string& inner) {
    return dump(network_to_json(compose_nets(net_of(outer), net_of(inner))));
  });
  m.def("add_nets", [](const std::string& f, const std::string& g) {
    return dump(network_to_json(add_nets(net_of(f), net_of(g))));
  });
  m.def("max_nets", [](const std::vector<std::string>& nets) {
    std::vector<ReluNetwork> v;
    for (const auto& t : nets) v.push_back(net_of(t));
    return dump(network_to_json(max_nets(v)));
  });
  m.def("random_network", [](std::uint64_t seed, std::size_t n, const std::vector<std::size_t>& widths) {
    Rng rng(seed);
    return dump(network_to_json(random_network(rng, n, widths)));
  });
  m.def(
      "count_regions",
      [](const std::string& net, std::optional<std::pair<std::string, std::string>> box, unsigned threads,
         std::size_t max_cells) {
        const auto nn = net_of(net);
        const auto r = count_regions(nn, regions_of(box, nn.input_dim(), threads, max_cells));
        return std::make_pair(r.cells, r.pieces);
      },
      py::arg("net"), py::arg("box") = py::none(), py::arg("threads") = 1, py::arg("max_cells") = 200000);

  m.def("zonotope_vertices", [](const std::string& z) {
    std::vector<std::vector<std::string>> out;
    for (const auto& v : vertices(zonotope_from_json(parse_json(z)))) out.push_back(to_strings(v));
    return out;
  });
  m.def("zonotope_support", [](const std::string& z, const std::vector<std::string>& r) {
    return to_string(support(zonotope_from_json(parse_json(z)), to_rationals(r)));
  });
  m.def("support_net", [](const std::string& z) {
    return dump(network_to_json(support_net(zonotope_from_json(parse_json(z)))));
  });
  m.def("zonotope_family_net", [](const std::string& z, std::uint64_t w, std::uint64_t k) {
    return dump(network_to_json(zonotope_family_net({zonotope_from_json(parse_json(z)), SawtoothParams::uniform(w, k)})));
  });
  m.def("random_zonotope", [](std::uint64_t seed, std::size_t n, std::size_t m) {
    Rng rng(seed);
    return dump(zonotope_to_json(random_zonotope(rng, n, m)));
  });

  m.def("enumerate_dichotomies", [](const std::vector<std::vector<double>>& x) {
    const auto d = enumerate_dichotomies(dataset_of(x, std::vector<double>(x.size(), 0.0)));
    std::vector<std::vector<std::size_t>> out;
    for (const auto& e : d) out.push_back(e.positive);
    return out;
  });
  const auto train_args = std::make_tuple(py::arg("x"), py::arg("y"), py::arg("width") = 1, py::arg("loss") = "squared",
                                          py::arg("tol") = 1e-8, py::arg("verify") = false,
                                          py::arg("output_bias") = false, py::arg("threads") = 1,
                                          py::arg("budget") = 5000000);
  auto train = [](auto fn) {
    return [fn](const std::vector<std::vector<double>>& x, const std::vector<double>& y, std::size_t width,
                const std::string& loss, double tol, bool verify, bool output_bias, unsigned threads,
                std::uint64_t budget) {
      const auto opt = options_of(width, loss, tol, verify, output_bias, threads, budget);
      const auto r = fn(dataset_of(x, y), opt);
      Json j = train_result_to_json(r, opt.loss);
      j["network"] = network_to_json(r.to_network());
      return dump(j);
    };
  };
  std::apply([&](auto... a) { m.def("train_global", train(train_global), a...); }, train_args);
  std::apply([&](auto... a) { m.def("train_global_1d", train(train_global_1d), a...); }, train_args);
  std::apply(
      [&](auto... a) {
        m.def(
            "fit_pwl_1d",
            [](const std::vector<std::vector<double>>& x, const std::vector<double>& y, std::size_t width,
               const std::string& loss, double tol, bool verify, bool output_bias, unsigned threads,
               std::uint64_t budget) {
              const auto opt = options_of(width, loss, tol, verify, output_bias, threads, budget);
              const auto r = fit_pwl_1d(dataset_of(x, y), opt);
              Json j = pwl_fit_to_json(r, opt.loss);
              j["network"] = network_to_json(r.to_network());
              return dump(j);
            },
            a...);
      },
      train_args);
  m.def("empirical_loss", [](const std::string& net, const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y, const std::string& loss) {
    return empirical_loss(net_of(net), dataset_of(x, y), parse_loss(loss));
  });
}
