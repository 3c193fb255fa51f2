#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sepint/cli.hpp"

using namespace sepint;
using namespace sepint::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sepint");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t data_rows(const std::string& table) {
  std::istringstream is(table);
  std::string line;
  std::size_t n = 0;
  std::getline(is, line);  // header
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sepint_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("list") {
  auto r = run_cli({"list"});
  CHECK(r.code == kOk);
  CHECK(data_rows(r.out) == 29);
  CHECK(data_rows(run_cli({"list", "--filter", "Q.1"}).out) == 1);
  r = run_cli({"list", "--filter", "NOPE"});
  CHECK(r.code == kOk);
  CHECK(data_rows(r.out) == 0);
  CHECK(data_rows(run_cli({"list", "--filter", "C*"}).out) == 8);
  CHECK(filter_matches("Vo", "Q.15", "Vo"));
  CHECK(!filter_matches("Q.1", "Q.13", "Vm"));
  CHECK(filter_matches("Q.1*", "Q.13", "Vm"));
}

TEST_CASE("verify exit codes and report schema") {
  TempDir tmp;
  auto r = run_cli({"verify", "Q.14", "--report", tmp.file("q14.json")});
  CHECK(r.code == kOk);
  const json rep = json::parse(slurp(tmp.file("q14.json")));
  CHECK(rep["schema"] == 1);
  CHECK(rep["entry_id"] == "Q.14");
  CHECK(rep["mode"] == "quantum");
  CHECK(rep["status"] == "pass");
  for (const char* k : {"eq6", "eq7", "eq8", "eq9", "eq10"}) {
    REQUIRE(rep["residuals"].contains(k));
    CHECK(rep["residuals"][k].get<double>() <= 1e-9);
  }
  CHECK(rep.contains("grid"));
  CHECK(rep.contains("params"));
  CHECK(rep.contains("tolerances"));
  CHECK(!rep.contains("pointwise_pb"));

  CHECK(run_cli({"verify", "NOPE"}).code == kUnknownEntry);
  r = run_cli({"verify", "Q.18", "--param", "K2=0.5", "--report", tmp.file("q18.json")});
  CHECK(r.code == kOk);
  CHECK(json::parse(slurp(tmp.file("q18.json")))["tolerances"]["residual"].get<double>() == 1e-6);

  CHECK(run_cli({"verify", "Q.20", "--mode", "classical"}).code == kSchemaViolation);
  CHECK(run_cli({"verify", "C.1", "--mode", "quantum"}).code == kSchemaViolation);
  CHECK(run_cli({"verify", "Q.5", "--param", "alpha=0"}).code == kSchemaViolation);
  CHECK(run_cli({"verify", "Q.14", "--bogus"}).code == kSchemaViolation);
  // the largest code of a batch wins
  CHECK(run_cli({"verify", "Q.14", "NOPE"}).code == kUnknownEntry);
}

TEST_CASE("classical verification samples the Poisson bracket") {
  TempDir tmp;
  const auto r = run_cli({"verify", "C.3", "--report", tmp.file("c3.json")});
  CHECK(r.code == kOk);
  const json rep = json::parse(slurp(tmp.file("c3.json")));
  CHECK(rep["mode"] == "classical");
  CHECK(rep["pointwise_pb"]["samples"] == 100);
  CHECK(rep["pointwise_pb"]["max_abs"].get<double>() <= 1e-9);

  const auto both = run_cli({"verify", "Q.14", "--mode", "both", "--report", tmp.file("both.json")});
  CHECK(both.code == kOk);
  const json arr = json::parse(slurp(tmp.file("both.json")));
  REQUIRE(arr.is_array());
  CHECK(arr.size() == 2);
}

TEST_CASE("reports are deterministic for a fixed seed") {
  TempDir tmp;
  run_cli({"verify", "C.2", "--seed", "5", "--report", tmp.file("a.json")});
  run_cli({"verify", "C.2", "--seed", "5", "--report", tmp.file("b.json")});
  CHECK(slurp(tmp.file("a.json")) == slurp(tmp.file("b.json")));
}

TEST_CASE("report merge") {
  TempDir tmp;
  run_cli({"verify", "Q.14", "--report", tmp.file("a.json")});
  run_cli({"verify", "C.1", "--report", tmp.file("b.json")});
  const auto r = run_cli({"report-merge", tmp.file("b.json"), tmp.file("a.json"), "-o", tmp.file("m.json")});
  CHECK(r.code == kOk);
  const json m = json::parse(slurp(tmp.file("m.json")));
  REQUIRE(m.size() == 2);
  CHECK(m[0]["entry_id"] == "C.1");
  CHECK(m[1]["entry_id"] == "Q.14");
  std::ofstream(tmp.file("bad.json")) << "{\"schema\": 2}";
  CHECK(run_cli({"report-merge", tmp.file("bad.json")}).code == kSchemaViolation);
}

TEST_CASE("trajectory") {
  TempDir tmp;
  auto r = run_cli({"trajectory", "C.1", "--state", "1,0,0,1", "--t", "100", "--csv", tmp.file("t.csv"), "--summary",
                    tmp.file("s.json")});
  CHECK(r.code == kOk);
  const json s = json::parse(slurp(tmp.file("s.json")));
  CHECK(s["status"] == "pass");
  CHECK(s["completed"] == true);
  CHECK(s["drift"]["H"]["relative"].get<double>() <= 1e-8);
  CHECK(slurp(tmp.file("t.csv")).rfind("t,x,y,px,py,H,X1,X2,X3,X4\n", 0) == 0);

  CHECK(run_cli({"trajectory", "Q.3"}).code == kSchemaViolation);

  r = run_cli({"trajectory", "C.6", "--seed-scan"});
  CHECK(r.code == kOk);
  const json b = json::parse(r.out);
  REQUIRE(b.contains("branch"));
  CHECK(b["branch"]["roots"].size() >= 1);
  CHECK(b["branch"]["relation"] == "eq24");

  r = run_cli({"trajectory", "C.7", "--param", "b=1", "--state", "0.5,0,-3,0", "--csv", tmp.file("p.csv")});
  CHECK(r.code == kSingularity);
  CHECK(fs::exists(tmp.file("p.csv")));

  r = run_cli({"trajectory", "C.4", "--state", "0.3,-0.5,0.2,0.9", "--integrator", "verlet", "--dt", "1e-3", "--t", "10"});
  CHECK(json::parse(r.out)["integrator"] == "verlet");
}

TEST_CASE("special functions") {
  TempDir tmp;
  auto r = run_cli({"specfun", "p2", "--alpha", "1", "--ic", "1,-1,1", "--interval", "1,3", "--step", "0.5"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("\n2,-0.49999999999999") != std::string::npos);

  r = run_cli({"specfun", "wp", "--g2", "0", "--g3", "0", "--interval", "0.1,1", "--step", "0.1"});
  CHECK(r.code == kOk);
  std::istringstream is(r.out);
  std::string line;
  bool found = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    std::istringstream ls(line);
    std::string xs, vs;
    std::getline(ls, xs, ',');
    std::getline(ls, vs, ',');
    if (std::abs(std::stod(xs) - 0.5) < 1e-12) {
      found = true;
      CHECK(std::stod(vs) == doctest::Approx(4.0).epsilon(1e-9));
    }
  }
  CHECK(found);

  r = run_cli({"specfun", "p4", "--alpha", "-8", "--K1", "0", "--K2", "-1/18", "--ic", "1,-1/3,-1/3", "--interval", "1,3",
               "--n", "21"});
  CHECK(r.code == kOk);
  std::istringstream p4(r.out);
  double worst = 0;
  while (std::getline(p4, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    std::istringstream ls(line);
    std::string xs, vs;
    std::getline(ls, xs, ',');
    std::getline(ls, vs, ',');
    worst = std::max(worst, std::abs(std::stod(vs) + std::stod(xs) / 3));
  }
  CHECK(worst <= 1e-8);

  r = run_cli({"specfun", "p1", "--ic", "0,1,0", "--interval", "0,4"});
  CHECK(r.code == kSingularity);
  CHECK(r.out.find("# poles:") != std::string::npos);
  CHECK(run_cli({"specfun", "p3"}).code == kSchemaViolation);
}

TEST_CASE("config files") {
  TempDir tmp;
  std::ofstream(tmp.file("c.toml")) << "[entry]\nid = \"Q.18\"\nparams = { K2 = 0.5 }\n"
                                       "[grid]\nnx = 11\nny = 9\nmargin = 0.01\n"
                                       "[output]\nreport = \""
                                    << tmp.file("r.json") << "\"\n";
  const RunConfig c = load_config(tmp.file("c.toml"));
  REQUIRE(c.entries.size() == 1);
  CHECK(c.entries[0] == "Q.18");
  CHECK(c.params.at("K2") == 0.5);
  CHECK(c.nx == 11);
  CHECK(c.ny == 9);
  CHECK(c.margin == 0.01);

  auto r = run_cli({"verify", "--config", tmp.file("c.toml"), "--nx", "7"});
  CHECK(r.code == kOk);
  const json rep = json::parse(slurp(tmp.file("r.json")));
  CHECK(rep["grid"]["nx"] == 7);
  CHECK(rep["grid"]["ny"] == 9);

  std::ofstream(tmp.file("bad.toml")) << "[grid]\nnx = \"many\"\n";
  CHECK_THROWS_AS(load_config(tmp.file("bad.toml")), SchemaError);
  std::ofstream(tmp.file("broken.toml")) << "[grid\n";
  CHECK_THROWS_AS(load_config(tmp.file("broken.toml")), SchemaError);
}

TEST_CASE("number parsing and serialization") {
  CHECK(parse_number("-1/18") == -1.0 / 18);
  CHECK(parse_number("2.5e-3") == 2.5e-3);
  CHECK_THROWS_AS(parse_number("1/0"), SchemaError);
  CHECK_THROWS_AS(parse_number("abc"), SchemaError);
  CHECK(parse_list("1,-1/3, 2") == std::vector<double>{1, -1.0 / 3, 2});

  const json j = {{"a", 0.1}, {"b", std::nan("")}, {"c", 3}, {"d", {1.0 / 3}}};
  const std::string s = dump17(j, -1);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"b\":null") != std::string::npos);
  CHECK(s.find("\"c\":3") != std::string::npos);
  // round trip
  CHECK(json::parse(s)["d"][0].get<double>() == 1.0 / 3);
}

TEST_CASE("reference document") {
  TempDir tmp;
  CHECK(run_cli({"reference", "-o", tmp.file("ref.md")}).code == kOk);
  CHECK(slurp(tmp.file("ref.md")).find("## C.8") != std::string::npos);
}
