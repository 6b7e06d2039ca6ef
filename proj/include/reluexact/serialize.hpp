#pragma once

#include <json.hpp>
#include <string>

#include "reluexact/network.hpp"
#include "reluexact/pwl.hpp"
#include "reluexact/regions.hpp"
#include "reluexact/trainer.hpp"
#include "reluexact/zonotope.hpp"

namespace reluexact {

/// Key order is preserved so that the same object always dumps to the same bytes.
using Json = nlohmann::ordered_json;

// Rationals are written as "num/den" strings. Readers also accept integers,
// decimal strings and "p/q" with a non-canonical fraction.
Json rational_to_json(const Rational& q);
Rational rational_from_json(const Json& j);
Json vector_to_json(const RationalVector& v);
RationalVector vector_from_json(const Json& j);

/// {"format":"pwl-v1", left_slope, anchor:{x,y}, breakpoints, slopes}
Json pwl_to_json(const PwlFunction1D& f);
PwlFunction1D pwl_from_json(const Json& j);

/// {"format":"relu-net-v1", input_dim, layers:[{weights, bias}], output, output_bias_allowed[, meta]}.
/// `meta` is free-form provenance (for example which family built the net).
Json network_to_json(const ReluNetwork& net, const Json& meta = nullptr);
ReluNetwork network_from_json(const Json& j);

/// {"format":"zonotope-v1", n, generators}
Json zonotope_to_json(const Zonotope& z);
Zonotope zonotope_from_json(const Json& j);

/// {"format":"hinge-v1", input_dim, terms:[{sign, affines:[{weights, bias}]}]}
Json hinge_to_json(const HingeForm& h);
HingeForm hinge_from_json(const Json& j);

Json affine_to_json(const AffineMap& T);
AffineMap affine_from_json(const Json& j, std::size_t in_dim);

/// One JSON-lines record: {pattern, constraints:[{normal, sense, offset}], affine}.
Json cell_to_json(const RegionCell& cell);

Json dichotomy_to_json(const Dichotomy& d);
Json certificate_to_json(const TrainCertificate& c);
Json train_result_to_json(const TrainResult& r, LossKind loss);
Json pwl_fit_to_json(const PwlFitResult& r, LossKind loss);

/// The "format" field, or "" when absent.
std::string format_of(const Json& j);

/// Pretty printed with a trailing newline.
std::string dump(const Json& j);
Json parse_json(const std::string& text);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace reluexact
