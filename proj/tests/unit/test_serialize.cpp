#include <doctest.h>

#include "reluexact/errors.hpp"
#include "reluexact/serialize.hpp"

using namespace reluexact;

TEST_CASE("rationals") {
  CHECK(rational_to_json(ratio(-3, 6)) == "-1/2");
  CHECK(rational_to_json(Rational(4)) == "4/1");
  CHECK(rational_from_json(Json("6/4")) == ratio(3, 2));
  CHECK(rational_from_json(Json("0.125")) == ratio(1, 8));
  CHECK(rational_from_json(Json(7)) == 7);
  CHECK_THROWS_AS(rational_from_json(Json(0.5)), ValidationError);
  CHECK_THROWS_AS(rational_from_json(Json("1/0")), ValidationError);
  CHECK_THROWS_AS(rational_from_json(Json("abc")), ValidationError);
}

TEST_CASE("pwl round trip is bit-exact") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_pwl(rng, static_cast<std::size_t>(rng.uniform_int(1, 9)));
    const auto text = dump(pwl_to_json(f));
    const auto g = pwl_from_json(parse_json(text));
    CHECK(g == f);
    CHECK(dump(pwl_to_json(g)) == text);
  }
  const auto j = pwl_to_json(PwlFunction1D::affine(2, 3));
  CHECK(j["format"] == "pwl-v1");
  CHECK(j["breakpoints"].empty());
  auto bad = j;
  bad["left_slope"] = "5/1";
  CHECK_THROWS_AS(pwl_from_json(bad), ValidationError);
  bad = j;
  bad.erase("anchor");
  CHECK_THROWS_AS(pwl_from_json(bad), ValidationError);
  bad = j;
  bad["format"] = "relu-net-v1";
  CHECK_THROWS_AS(pwl_from_json(bad), ValidationError);
}

TEST_CASE("network round trip is bit-exact") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3));
    std::vector<std::size_t> widths;
    for (int i = 0, d = static_cast<int>(rng.uniform_int(0, 3)); i < d; ++i)
      widths.push_back(static_cast<std::size_t>(rng.uniform_int(1, 4)));
    const auto net = random_network(rng, n, widths);
    const auto text = dump(network_to_json(net));
    const auto back = network_from_json(parse_json(text));
    CHECK(back == net);
    CHECK(dump(network_to_json(back)) == text);
  }
  const auto meta = network_to_json(sawtooth_net(SawtoothParams::uniform(2, 2)), {{"family", "sawtooth"}});
  CHECK(meta["meta"]["family"] == "sawtooth");
  CHECK(network_from_json(meta) == sawtooth_net(SawtoothParams::uniform(2, 2)));
  CHECK(meta["output_bias_allowed"] == true);

  auto bad = meta;
  bad["layers"][0]["weights"][0].push_back("1/1");
  CHECK_THROWS_AS(network_from_json(bad), ValidationError);
  bad = meta;
  bad["output"]["bias"][0] = "1/2";
  bad["output_bias_allowed"] = false;
  CHECK_THROWS_AS(network_from_json(bad), ValidationError);
  bad = meta;
  bad["layers"][0]["bias"].erase(0);
  CHECK_THROWS_AS(network_from_json(bad), ValidationError);
  CHECK_THROWS_AS(parse_json("{\"format\": "), ValidationError);
}

TEST_CASE("zonotope and hinge round trips") {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto z = random_zonotope(rng, 3, 4);
    const auto back = zonotope_from_json(parse_json(dump(zonotope_to_json(z))));
    CHECK(back == z);
  }
  HingeForm h;
  h.input_dim = 2;
  h.terms.push_back({1, {AffineMap::from_rows(2, {{1, 0}}, {0}), AffineMap::from_rows(2, {{0, 1}}, {ratio(1, 3)})}});
  h.terms.push_back({-1, {AffineMap::from_rows(2, {{-1, 2}}, {1})}});
  const auto back = hinge_from_json(parse_json(dump(hinge_to_json(h))));
  REQUIRE(back.terms.size() == 2);
  CHECK(back.terms[0].affines == h.terms[0].affines);
  CHECK(back.terms[1].sign == -1);
  auto bad = hinge_to_json(h);
  bad["terms"][0]["sign"] = 2;
  CHECK_THROWS_AS(hinge_from_json(bad), ValidationError);
  auto zbad = zonotope_to_json(Zonotope{2, {{1, 2}}});
  zbad["generators"][0].push_back("3/1");
  CHECK_THROWS_AS(zonotope_from_json(zbad), ValidationError);
}

TEST_CASE("cells and training results") {
  const auto net = support_net(Zonotope{2, {{1, 0}, {0, 1}}});
  const auto cells = enumerate_cells(net);
  const auto j = cell_to_json(cells.front());
  CHECK(j["pattern"].get<std::string>().size() == 4);
  CHECK(j["constraints"][0]["sense"] == "<=");
  CHECK(j["affine"]["weights"].size() == 1);
  CHECK(j.dump().find('\n') == std::string::npos);

  Dataset d;
  d.n = 1;
  d.x = {{0}, {1}};
  d.y = {0, 1};
  TrainOptions opt;
  const auto r = train_global(d, opt);
  const auto tj = train_result_to_json(r, opt.loss);
  CHECK(tj["units"].size() == 1);
  CHECK(tj["certificate"]["tuples_total"] == r.certificate.tuples_total);
  CHECK(tj["loss_kind"] == "squared");
}
