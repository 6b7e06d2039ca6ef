#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "reluexact/cli.hpp"
#include "reluexact/serialize.hpp"

using namespace reluexact;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("reluexact_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l))
    if (l == line) return true;
  return false;
}

}  // namespace

TEST_CASE("generate and count the hard families") {
  TempDir dir;
  const auto saw = dir.file("saw.json");
  auto r = cli({"generate", "sawtooth", "--w", "2", "--k", "2", "--M", "1", "--out", saw});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "depth: 3"));
  CHECK(has_line(r.out, "size: 4"));
  CHECK(has_line(r.out, "predicted_pieces_in_[0,M]: 4"));

  r = cli({"count", saw});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "pieces: 4"));
  CHECK(has_line(r.out, "lemma_bound: 12"));
  CHECK(has_line(r.out, "predicted_pieces: 4 MATCH"));

  for (int w = 2; w <= 3; ++w)
    for (int k = 1; k <= 3; ++k) {
      const auto f = dir.file("s" + std::to_string(w) + std::to_string(k) + ".json");
      REQUIRE(cli({"generate", "sawtooth", "--w", std::to_string(w), "--k", std::to_string(k), "--out", f}).code == 0);
      CHECK(cli({"count", f}).out.find("MATCH\n") != std::string::npos);
      CHECK(cli({"count", f}).out.find("MISMATCH") == std::string::npos);
    }

  const auto zf = dir.file("zf.json");
  r = cli({"generate", "zonotope-family", "--n", "2", "--m", "2", "--w", "2", "--k", "1", "--out", zf});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "depth: 3"));
  CHECK(has_line(r.out, "size: 6"));

  const auto zf4 = dir.file("zf4.json");
  REQUIRE(cli({"generate", "zonotope-family", "--n", "2", "--m", "4", "--w", "2", "--k", "1", "--out", zf4}).code == 0);
  r = cli({"count", zf4});
  REQUIRE(r.code == 0);
  for (const char* key : {"vertices_times_w^k:", "formula_power:", "formula_binomial:", "formula_classical:"})
    CHECK(r.out.find(key) != std::string::npos);
}

TEST_CASE("constant and l1 networks") {
  TempDir dir;
  const auto zero = dir.file("zero.json");
  write_text_file(zero, dump(network_to_json(pad_depth(zero_network(2), 3))));
  auto r = cli({"count", zero});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "pieces: 1"));

  const auto l1 = dir.file("l1.json");
  REQUIRE(cli({"build", "l1", "--n", "2", "--out", l1}).code == 0);
  r = cli({"count", l1});
  CHECK(has_line(r.out, "pieces: 4"));
  r = cli({"sample", l1, "--x", "1:1:1", "--y", "1:1:1"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "x1,x2,f\r\n1,1,2\r\n");
}

TEST_CASE("sample the triangle and a composed surface") {
  TempDir dir;
  const auto tri = dir.file("tri.json");
  REQUIRE(cli({"generate", "sawtooth", "--w", "2", "--k", "1", "--out", tri}).code == 0);
  auto r = cli({"sample", tri, "--x", "0:1:5"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "x,f\r\n0,0\r\n0.25,0.5\r\n0.5,1\r\n0.75,0.5\r\n1,0\r\n");

  // sawtooth of a zonotope support function on a 41 x 41 grid against direct evaluation
  ZonotopeFamilyParams p{Zonotope{2, {{1, 0}, {0, 1}, {1, 1}, {1, -1}}}, SawtoothParams{}};
  p.sawtooth.layers = {{ratio(1, 2)}, {ratio(1, 2)}};
  const auto fam = dir.file("fam.json");
  write_text_file(fam, dump(network_to_json(zonotope_family_net(p))));
  const auto csv = dir.file("fam.csv");
  REQUIRE(cli({"sample", fam, "--x", "-1:1:41", "--y", "-1:1:41", "--exact", "--out", csv}).code == 0);
  std::istringstream in(read_text_file(csv));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,f\r");
  const auto H = sawtooth(p.sawtooth);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream cells(line);
    std::string a, b, f;
    std::getline(cells, a, ',');
    std::getline(cells, b, ',');
    std::getline(cells, f, ',');
    CHECK(parse_rational(f) == H(support(p.zonotope, {parse_rational(a), parse_rational(b)})));
    ++rows;
  }
  CHECK(rows == 41 * 41);
}

TEST_CASE("train from csv") {
  TempDir dir;
  const auto data = dir.file("d.csv");
  write_text_file(data, "x,y\n0,0\n1,1\n2,2\n3,2\n");
  const auto out = dir.file("r.json"), net = dir.file("n.json");
  auto r = cli({"train", data, "--width", "2", "--out", out, "--net-out", net});
  REQUIRE(r.code == 0);
  const auto j = read_json_file(out);
  CHECK(j["loss"].get<double>() <= 1e-10);
  CHECK(network_from_json(read_json_file(net)).size() == 2);
  CHECK(r.out.find("subproblems_solved:") != std::string::npos);

  const auto one = dir.file("one.csv");
  write_text_file(one, "0.5,-1,3\n");
  r = cli({"train", one, "--width", "2", "--out", dir.file("one.json")});
  REQUIRE(r.code == 0);
  CHECK(read_json_file(dir.file("one.json"))["loss"].get<double>() <= 1e-12);

  r = cli({"train", data, "--width", "2", "--method", "pwl", "--out", dir.file("pwl.json")});
  REQUIRE(r.code == 0);
  CHECK(read_json_file(dir.file("pwl.json"))["format"] == "pwl-fit-v1");
}

TEST_CASE("determinism across runs and thread counts") {
  TempDir dir;
  const auto a = dir.file("a.json"), b = dir.file("b.json");
  REQUIRE(cli({"generate", "random-pwl", "--pieces", "5", "--seed", "7", "--out", a}).code == 0);
  REQUIRE(cli({"generate", "random-pwl", "--pieces", "5", "--seed", "7", "--out", b}).code == 0);
  CHECK(read_text_file(a) == read_text_file(b));

  const auto net = dir.file("net.json");
  REQUIRE(cli({"build", "random", "--n", "2", "--widths", "4,3", "--seed", "3", "--out", net}).code == 0);
  auto c1 = cli({"count", net, "--box", "-3,3", "--threads", "1", "--cells-out", dir.file("c1.jsonl"),
                 "--summary-csv", dir.file("s1.csv")});
  auto c8 = cli({"count", net, "--box", "-3,3", "--threads", "8", "--cells-out", dir.file("c8.jsonl"),
                 "--summary-csv", dir.file("s8.csv")});
  REQUIRE(c1.code == 0);
  CHECK(c1.out == c8.out);
  CHECK(read_text_file(dir.file("c1.jsonl")) == read_text_file(dir.file("c8.jsonl")));
  CHECK(read_text_file(dir.file("s1.csv")) == read_text_file(dir.file("s8.csv")));

  const auto data = dir.file("d.csv");
  write_text_file(data, "x1,x2,y\n0,0,1\n1,0,-1\n0,1,0.5\n1,1,2\n-1,0.5,0\n");
  auto t1 = cli({"train", data, "--width", "2", "--threads", "1", "--out", dir.file("t1.json")});
  auto t8 = cli({"train", data, "--width", "2", "--threads", "8", "--out", dir.file("t8.json")});
  REQUIRE(t1.code == 0);
  CHECK(t1.out == t8.out);
  CHECK(read_text_file(dir.file("t1.json")) == read_text_file(dir.file("t8.json")));
}

TEST_CASE("verify subcommand") {
  auto r = cli({"verify", "sawtooth", "--w", "3", "--k", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("result: PASS") != std::string::npos);
  CHECK(cli({"verify", "flaps", "--count", "20"}).code == 0);
  CHECK(cli({"verify", "bounds", "--count", "20"}).code == 0);
  CHECK(cli({"verify", "gap", "--w", "2", "--k", "3", "--p", "3", "--count", "30"}).code == 0);
  CHECK(cli({"verify", "zonotope", "--count", "5"}).code == 0);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"generate", "bogus"}).code == 2);
  CHECK(cli({"generate", "sawtooth", "--w", "1"}).code == 2);
  CHECK(cli({"count", dir.file("missing.json")}).code == 2);
  const auto bad = dir.file("bad.json");
  write_text_file(bad, "{\"format\": \"relu-net-v1\", \"input_dim\": 1}");
  CHECK(cli({"count", bad}).code == 2);
  const auto big = dir.file("big.json");
  REQUIRE(cli({"build", "random", "--n", "2", "--widths", "6,6", "--seed", "1", "--out", big}).code == 0);
  const auto r = cli({"count", big, "--max-cells", "3"});
  CHECK(r.code == 3);
  CHECK(r.err.find("error:") != std::string::npos);
  const auto csv = dir.file("bad.csv");
  write_text_file(csv, "x,y\n1,2\n3\n");
  CHECK(cli({"train", csv}).code == 2);
  write_text_file(csv, "x,y\n0,0\n1,1\n2,0\n3,1\n4,0\n");
  CHECK(cli({"train", csv, "--width", "3", "--budget", "10"}).code == 3);
}
