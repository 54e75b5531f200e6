#include <doctest.h>

#include "degen/cli.hpp"
#include "degen/errors.hpp"
#include "degen/examples.hpp"
#include "degen/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace degen;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  auto d = fs::temp_directory_path() / "degen_cli_test";
  fs::create_directories(d);
  return d;
}

fs::path write(const std::string& name, const std::string& text) {
  auto p = workdir() / name;
  write_text_file(p, text);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
};

Result shell(const std::string& args) {
  auto out = workdir() / "stdout.txt";
  std::string cmd = std::string(DEGEN_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

Result in_process(RunConfig cfg) {
  std::ostringstream out, err;
  int code = run(cfg, out, err);
  return {code, out.str() + err.str()};
}

}  // namespace

TEST_CASE("L schedules") {
  CHECK(parse_L_schedule("1,10,100") == std::vector<double>{1, 10, 100});
  auto g = parse_L_schedule("10:1000:3");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(100.0));
  CHECK(g[2] == 1000.0);
  for (const char* bad : {"", "0,1", "a", "1:10", "10:1:3", "1:10:1", "-1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_L_schedule(bad), ValidationError);
  }
}

TEST_CASE("check reports the offending horizontal with exit 3") {
  auto m = builtin_example("p1").model;
  m.horizontals[1].beta = Rational(3, 2);
  auto path = write("bad.json", model_to_json(m).dump());
  auto r = shell("check --model " + path.string());
  CHECK(r.code == 3);
  CHECK(r.out.find("sub-log-canonical: no") != std::string::npos);
  CHECK(r.out.find("B2 (beta=3/2)") != std::string::npos);
  auto good = write("good.json", model_to_json(builtin_example("p1").model).dump());
  auto ok = shell("check --model " + good.string());
  CHECK(ok.code == 0);
  CHECK(ok.out.find("sub-log-canonical: yes") != std::string::npos);
}

TEST_CASE("usage and input errors exit 2") {
  CHECK(shell("").code == 2);
  CHECK(shell("weights --bogus").code == 2);
  CHECK(shell("weights --model " + (workdir() / "absent.json").string()).code == 2);
  CHECK(shell("demo nosuch").code == 2);
  auto bad = write("broken.json", R"({"verticals": [{"id": "E0", "b": "0", "a": "0"}], "strata": []})");
  CHECK(shell("weights --model " + bad.string()).code == 2);
}

TEST_CASE("weights and limit") {
  auto path = write("torus2.json", model_to_json(builtin_example("torus2").model).dump());
  auto w = shell("weights --model " + path.string());
  CHECK(w.code == 0);
  CHECK(w.out.find("\"d\": 2") != std::string::npos);
  auto masses = write("torus2_masses.json", masses_to_json(builtin_example("torus2").masses).dump());
  auto out = workdir() / "limit.json";
  auto l = shell("limit --model " + path.string() + " --masses " + masses.string() + " --out " + out.string());
  CHECK(l.code == 0);
  auto doc = read_json_file(out);
  CHECK(doc.at("components").size() == 3);
}

TEST_CASE("converge and fit write CSV") {
  auto chart = write("chart.json", R"({"b": ["1", "1"], "a": ["0", "0"]})");
  auto f = write("f.json", R"({"terms": [{"factors": [{"var": "x1", "profile": {"type": "bump", "left": 0.1, "right": 0.9}}]}]})");
  auto c = shell("converge --chart " + chart.string() + " --testfn " + f.string() + " --L 1,10,100");
  CHECK(c.code == 0);
  CHECK(c.out.find("L,integral,limit_estimate,kappa_hat,d_hat,log_unscaled_mass\n") != std::string::npos);
  auto fit = shell("fit --chart " + chart.string() + " --testfn " + f.string() + " --L 10:10000:4");
  CHECK(fit.code == 0);
  CHECK(fit.out.find("# fit: kappa_hat=") != std::string::npos);
  auto mc = shell("converge --chart " + chart.string() + " --testfn " + f.string() +
                  " --L 2 --seed 5 --samples 20000 --workers 2");
  CHECK(mc.code == 0);
  CHECK(mc.out.find(",mc,mc_stderr") != std::string::npos);
  CHECK(shell("fit --chart " + chart.string() + " --testfn " + f.string() + " --L 1,2").code == 2);
}

TEST_CASE("beta > 1 charts: refused unless probing") {
  auto chart = write("big.json", R"({"b": ["1"], "beta": ["3/2"]})");
  auto f = write("fy.json", R"({"terms": [{"factors": [{"var": "y1", "profile": {"type": "hat", "left": 0, "right": 1}}]}]})");
  CHECK(shell("converge --chart " + chart.string() + " --testfn " + f.string() + " --L 1,10").code == 3);
  CHECK(shell("converge --chart " + chart.string() + " --testfn " + f.string() + " --L 1,10 --probe").code == 0);
}

TEST_CASE("blowup writes model and map") {
  auto path = write("node.json", model_to_json(builtin_example("node").model).dump());
  auto dir = workdir() / "blown";
  fs::remove_all(dir);
  auto r = shell("blowup --model " + path.string() + " --center E0,E1 --out " + dir.string());
  CHECK(r.code == 0);
  auto m = model_from_json(read_json_file(dir / "model.json"));
  CHECK(m.verticals.size() == 3);
  auto map = read_json_file(dir / "map.json");
  CHECK(map.at("retraction").contains("faces"));
  CHECK(map.at("record").at("new_vertical").at("b") == "2");
  CHECK(shell("blowup --model " + path.string() + " --center E0,E9").code == 2);
}

TEST_CASE("runs are idempotent") {
  RunConfig cfg;
  cfg.command = "demo";
  cfg.example = "node";
  auto a = in_process(cfg), b = in_process(cfg);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  cfg.seed = 3;
  cfg.samples = 5000;
  cfg.L_schedule = "2,4";
  auto c = in_process(cfg), d = in_process(cfg);
  CHECK(c.out == d.out);
  CHECK(c.out.find("# mc: seed=3") != std::string::npos);
  CHECK(shell("demo node").out == a.out);
}

TEST_CASE("column help names every column") {
  auto help = csv_columns_help();
  for (const char* col : {"L", "integral", "limit_estimate", "kappa_hat", "d_hat", "log_unscaled_mass", "mc_stderr"})
    CHECK(help.find(col) != std::string::npos);
}
