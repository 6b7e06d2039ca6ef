#include "reluexact/serialize.hpp"

#include <fstream>
#include <sstream>

#include "reluexact/errors.hpp"

namespace reluexact {

namespace {

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(std::string(what) + ": missing field '" + key + "'");
  return j.at(key);
}

void expect_format(const Json& j, const char* format) {
  const std::string found = format_of(j);
  if (found != format) throw ValidationError(std::string("expected format '") + format + "', found '" + found + "'");
}

std::size_t natural(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ValidationError(std::string(what) + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

}  // namespace

Json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ValidationError("expected a rational as a \"num/den\" string or an integer");
}

Json vector_to_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(rational_to_json(q));
  return out;
}

RationalVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of rationals");
  RationalVector v;
  for (const auto& e : j) v.push_back(rational_from_json(e));
  return v;
}

Json pwl_to_json(const PwlFunction1D& f) {
  Json j;
  j["format"] = "pwl-v1";
  j["left_slope"] = rational_to_json(f.left_slope());
  j["anchor"] = {{"x", rational_to_json(f.anchor_x())}, {"y", rational_to_json(f.anchor_y())}};
  j["breakpoints"] = vector_to_json(f.breakpoints());
  j["slopes"] = vector_to_json(f.slopes());
  return j;
}

PwlFunction1D pwl_from_json(const Json& j) {
  expect_format(j, "pwl-v1");
  const auto& anchor = field(j, "anchor", "pwl-v1");
  auto bps = vector_from_json(field(j, "breakpoints", "pwl-v1"));
  auto slopes = vector_from_json(field(j, "slopes", "pwl-v1"));
  const Rational left = rational_from_json(field(j, "left_slope", "pwl-v1"));
  if (slopes.empty() || slopes.front() != left) throw ValidationError("pwl-v1: left_slope disagrees with slopes[0]");
  if (slopes.size() != bps.size() + 1) throw ValidationError("pwl-v1: need one more slope than breakpoints");
  return PwlFunction1D::from_slopes(std::move(bps), std::move(slopes), rational_from_json(field(anchor, "x", "anchor")),
                                    rational_from_json(field(anchor, "y", "anchor")));
}

Json affine_to_json(const AffineMap& T) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < T.out_dim; ++r) rows.push_back(vector_to_json(T.row(r)));
  return {{"weights", rows}, {"bias", vector_to_json(T.bias)}};
}

AffineMap affine_from_json(const Json& j, std::size_t in_dim) {
  const auto& w = field(j, "weights", "affine map");
  if (!w.is_array()) throw ValidationError("affine map: weights must be an array of rows");
  std::vector<RationalVector> rows;
  for (const auto& r : w) {
    rows.push_back(vector_from_json(r));
    if (rows.back().size() != in_dim)
      throw ValidationError("affine map: row of length " + std::to_string(rows.back().size()) + ", expected " +
                            std::to_string(in_dim));
  }
  auto bias = vector_from_json(field(j, "bias", "affine map"));
  if (bias.size() != rows.size()) throw ValidationError("affine map: bias length differs from the row count");
  return AffineMap::from_rows(in_dim, rows, std::move(bias));
}

Json network_to_json(const ReluNetwork& net, const Json& meta) {
  Json j;
  j["format"] = "relu-net-v1";
  j["input_dim"] = net.input_dim();
  Json layers = Json::array();
  for (const auto& layer : net.hidden()) layers.push_back(affine_to_json(layer));
  j["layers"] = layers;
  j["output"] = affine_to_json(net.output());
  j["output_bias_allowed"] = net.output_bias_allowed();
  if (!meta.is_null()) j["meta"] = meta;
  return j;
}

ReluNetwork network_from_json(const Json& j) {
  expect_format(j, "relu-net-v1");
  const std::size_t n = natural(field(j, "input_dim", "relu-net-v1"), "input_dim");
  const auto& layers = field(j, "layers", "relu-net-v1");
  if (!layers.is_array()) throw ValidationError("relu-net-v1: layers must be an array");
  std::vector<AffineMap> hidden;
  std::size_t in = n;
  for (const auto& layer : layers) {
    hidden.push_back(affine_from_json(layer, in));
    in = hidden.back().out_dim;
  }
  auto output = affine_from_json(field(j, "output", "relu-net-v1"), in);
  const auto& flag = field(j, "output_bias_allowed", "relu-net-v1");
  if (!flag.is_boolean()) throw ValidationError("relu-net-v1: output_bias_allowed must be a boolean");
  return ReluNetwork(n, std::move(hidden), std::move(output), flag.get<bool>());
}

Json zonotope_to_json(const Zonotope& z) {
  Json gens = Json::array();
  for (const auto& g : z.generators) gens.push_back(vector_to_json(g));
  Json j;
  j["format"] = "zonotope-v1";
  j["n"] = z.n;
  j["generators"] = gens;
  return j;
}

Zonotope zonotope_from_json(const Json& j) {
  expect_format(j, "zonotope-v1");
  Zonotope z{natural(field(j, "n", "zonotope-v1"), "n"), {}};
  const auto& gens = field(j, "generators", "zonotope-v1");
  if (!gens.is_array()) throw ValidationError("zonotope-v1: generators must be an array");
  for (const auto& g : gens) z.generators.push_back(vector_from_json(g));
  z.validate();
  return z;
}

Json hinge_to_json(const HingeForm& h) {
  Json terms = Json::array();
  for (const auto& t : h.terms) {
    Json affines = Json::array();
    for (const auto& a : t.affines) affines.push_back(affine_to_json(a));
    terms.push_back({{"sign", t.sign}, {"affines", affines}});
  }
  Json j;
  j["format"] = "hinge-v1";
  j["input_dim"] = h.input_dim;
  j["terms"] = terms;
  return j;
}

HingeForm hinge_from_json(const Json& j) {
  expect_format(j, "hinge-v1");
  HingeForm h;
  h.input_dim = natural(field(j, "input_dim", "hinge-v1"), "input_dim");
  const auto& terms = field(j, "terms", "hinge-v1");
  if (!terms.is_array()) throw ValidationError("hinge-v1: terms must be an array");
  for (const auto& t : terms) {
    HingeTerm term;
    const auto& s = field(t, "sign", "hinge term");
    if (!s.is_number_integer()) throw ValidationError("hinge term: sign must be an integer");
    term.sign = s.get<int>();
    for (const auto& a : field(t, "affines", "hinge term")) term.affines.push_back(affine_from_json(a, h.input_dim));
    h.terms.push_back(std::move(term));
  }
  h.validate();
  return h;
}

Json cell_to_json(const RegionCell& cell) {
  Json rows = Json::array();
  for (const auto& c : cell.constraints) {
    const char* sense = c.sense == LinearConstraint::Sense::LessEqual ? "<=" : c.sense == LinearConstraint::Sense::Less ? "<" : "=";
    rows.push_back({{"normal", vector_to_json(c.normal)}, {"sense", sense}, {"offset", rational_to_json(c.offset)}});
  }
  Json j;
  j["pattern"] = cell.pattern;
  j["constraints"] = rows;
  j["affine"] = affine_to_json(cell.affine);
  j["interior"] = vector_to_json(cell.interior);
  return j;
}

Json dichotomy_to_json(const Dichotomy& d) { return {{"positive", d.positive}, {"negative", d.negative}}; }

Json certificate_to_json(const TrainCertificate& c) {
  Json j;
  j["method"] = c.method;
  j["sign_vectors"] = c.sign_vectors;
  j["dichotomies"] = c.dichotomies;
  j["tuples_total"] = c.tuples_total;
  j["subproblems_solved"] = c.subproblems_solved;
  j["pruned"] = c.pruned;
  j["nonconverged"] = c.nonconverged;
  j["best_index"] = c.best_index;
  j["tol"] = c.tol;
  return j;
}

Json train_result_to_json(const TrainResult& r, LossKind loss) {
  Json units = Json::array();
  for (std::size_t i = 0; i < r.signs.size(); ++i) {
    units.push_back({{"sign", r.signs[i]}, {"a", r.a[i]}, {"b", r.b[i]}, {"dichotomy", dichotomy_to_json(r.dichotomies[i])}});
  }
  Json j;
  j["format"] = "train-result-v1";
  j["input_dim"] = r.n;
  j["width"] = r.signs.size();
  j["loss_kind"] = loss_name(loss);
  j["loss"] = r.loss;
  j["objective"] = r.objective;
  j["units"] = units;
  if (r.has_output_bias) j["output_bias"] = r.output_bias;
  j["certificate"] = certificate_to_json(r.certificate);
  return j;
}

Json pwl_fit_to_json(const PwlFitResult& r, LossKind loss) {
  Json j;
  j["format"] = "pwl-fit-v1";
  j["loss_kind"] = loss_name(loss);
  j["loss"] = r.loss;
  j["objective"] = r.objective;
  j["cuts"] = r.cuts;
  j["turn_signs"] = r.turn_signs;
  j["slopes"] = r.slopes;
  j["intercepts"] = r.intercepts;
  j["function"] = pwl_to_json(r.f);
  j["certificate"] = certificate_to_json(r.certificate);
  return j;
}

std::string format_of(const Json& j) {
  if (j.is_object() && j.contains("format") && j.at("format").is_string()) return j.at("format").get<std::string>();
  return "";
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::string& path) {
  try {
    return parse_json(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

}  // namespace reluexact
