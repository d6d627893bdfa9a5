#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdqkd/figures.hpp"

using namespace hdqkd;
using nlohmann::json;

namespace {

struct RunOutput {
  int exit_code;
  std::string stdout_text;
};

RunOutput run_cli(const std::string& args) {
  const std::string out_path = std::string(HDQKD_CLI_PATH) + ".out.tmp";
  const std::string cmd =
      std::string(HDQKD_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream is(out_path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  std::remove(out_path.c_str());
  return {WEXITSTATUS(status), buffer.str()};
}

// Minimal CSV reader matching the writer's schema; re-rendering must give
// back the original bytes.
struct ParsedCsv {
  std::string version_line, params_line, header;
  std::vector<std::string> data_lines;
};

ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv p;
  std::stringstream ss(text);
  std::string line;
  REQUIRE(std::getline(ss, line));
  p.version_line = line;
  REQUIRE(std::getline(ss, line));
  p.params_line = line;
  REQUIRE(std::getline(ss, line));
  while (!line.empty() && line[0] == '#') {  // optional extra annotations
    p.params_line += "\n" + line;
    REQUIRE(std::getline(ss, line));
  }
  p.header = line;
  while (std::getline(ss, line))
    if (!line.empty()) p.data_lines.push_back(line);
  return p;
}

}  // namespace

TEST_CASE("csv schema and round trip") {
  SweepSpec spec;
  spec.variable = "Q";
  spec.range = {0.0, 0.1, 5, false};
  spec.dim = 3;
  spec.num_bases = 2;
  spec.label = "m2";
  const CsvTable table = run_sweep(spec);
  const std::string text = render_csv(table);

  const ParsedCsv parsed = parse_csv(text);
  CHECK(parsed.version_line == std::string("# ") + kToolName + " v" + kVersion);
  CHECK(parsed.params_line.find("d=3") != std::string::npos);
  CHECK(parsed.header == "Q,rate");
  REQUIRE(parsed.data_lines.size() == 5);

  // parse numbers back and re-render: byte-identical
  CsvTable rebuilt;
  rebuilt.params = table.params;
  rebuilt.columns = table.columns;
  for (const auto& line : parsed.data_lines) {
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rebuilt.rows.push_back(row);
  }
  CHECK(render_csv(rebuilt) == text);

  // row 0 is Q=0 with the noiseless rate
  CHECK(std::strtod(parsed.data_lines[0].substr(parsed.data_lines[0].find(',') + 1).c_str(),
                    nullptr) == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
}

TEST_CASE("figure output is bitwise deterministic across thread counts") {
  setenv("HDQKD_THREADS", "1", 1);
  const auto once = make_figure("fig4");
  const auto twice = make_figure("fig4");
  setenv("HDQKD_THREADS", "4", 1);
  const auto threaded = make_figure("fig4");
  unsetenv("HDQKD_THREADS");
  REQUIRE(once.size() == twice.size());
  REQUIRE(once.size() == threaded.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].content == twice[i].content);
    CHECK(once[i].content == threaded[i].content);
    CHECK(once[i].filename == threaded[i].filename);
  }
}

TEST_CASE("unknown figure is rejected") {
  CHECK_THROWS_AS(make_figure("fig9"), std::invalid_argument);
}

TEST_CASE("cli asymptotic") {
  const RunOutput noiseless = run_cli("asymptotic --d 5 --m 2 --q 0");
  CHECK(noiseless.exit_code == 0);
  CHECK(noiseless.stdout_text.find("2.32192809489") != std::string::npos);

  // six-state threshold: rate ~ 0
  const RunOutput at_threshold = run_cli("asymptotic --d 2 --m 3 --q 0.1262 --json");
  CHECK(at_threshold.exit_code == 0);
  const json rec = json::parse(at_threshold.stdout_text);
  CHECK(std::abs(rec["results"]["rate"].get<double>()) < 1e-3);

  // asymmetric closed-form check through the CLI
  const RunOutput asym = run_cli("asymptotic --d 3 --m 2 --qx 0.03 --qz 0.07 --json");
  CHECK(asym.exit_code == 0);
  CHECK(json::parse(asym.stdout_text)["results"]["rate"].get<double>() ==
        doctest::Approx(0.924646991989357).epsilon(1e-10));

  // infeasible rates: exit 2
  CHECK(run_cli("asymptotic --d 5 --m 3 --rates 0.5,0.01,0.01").exit_code == 2);

  // usage errors: exit 64
  CHECK(run_cli("asymptotic --d 5 --m 2").exit_code == 64);       // no rates
  CHECK(run_cli("asymptotic --bogus 3").exit_code == 64);
  CHECK(run_cli("nonsense").exit_code == 64);
  CHECK(run_cli("asymptotic --d 6 --m 5 --q 0.01").exit_code == 64);  // gated
}

TEST_CASE("cli threshold") {
  const RunOutput bb = run_cli("threshold --d 2 --m 2");
  CHECK(bb.exit_code == 0);
  CHECK(bb.stdout_text.find("Q_max = 0.110028") != std::string::npos);
  const RunOutput six = run_cli("threshold --d 2 --m 3");
  CHECK(six.exit_code == 0);
  CHECK(six.stdout_text.find("Q_max = 0.126193") != std::string::npos);
}

TEST_CASE("cli finite") {
  const RunOutput ok = run_cli(
      "finite --N 1e6 --d 5 --m 3 --q 0.05 --eps-tot 1e-10 --bound aep --attack collective --json");
  CHECK(ok.exit_code == 0);
  const json rec = json::parse(ok.stdout_text);
  CHECK(rec["results"]["rate"].get<double>() > 0);
  CHECK(rec["results"]["feasible"].get<bool>());

  const RunOutput tiny = run_cli(
      "finite --N 1e3 --d 5 --m 3 --q 0.05 --eps-tot 1e-10 --bound aep --attack collective --json");
  CHECK(tiny.exit_code == 0);
  const json tiny_rec = json::parse(tiny.stdout_text);
  CHECK(tiny_rec["results"]["rate"].get<double>() == 0.0);
  CHECK(!tiny_rec["results"]["feasible"].get<bool>());

  // EUR with three bases is a usage error
  CHECK(run_cli("finite --N 1e6 --d 5 --m 3 --q 0.05 --eps-tot 1e-10 --bound eur").exit_code == 64);
}

TEST_CASE("cli config file merging") {
  const std::string cfg_path = std::string(HDQKD_CLI_PATH) + ".cfg.tmp";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"d": 5, "m": 2, "q": 0.0})";
  }
  const RunOutput from_cfg = run_cli("asymptotic --config " + cfg_path + " --json");
  CHECK(from_cfg.exit_code == 0);
  json rec = json::parse(from_cfg.stdout_text);
  CHECK(rec["inputs"]["d"].get<int>() == 5);
  CHECK(rec["results"]["rate"].get<double>() == doctest::Approx(std::log2(5.0)));

  // explicit flags win over config values
  const RunOutput overridden =
      run_cli("asymptotic --config " + cfg_path + " --d 3 --json");
  CHECK(overridden.exit_code == 0);
  rec = json::parse(overridden.stdout_text);
  CHECK(rec["inputs"]["d"].get<int>() == 3);
  CHECK(rec["results"]["rate"].get<double>() == doctest::Approx(std::log2(3.0)));
  std::remove(cfg_path.c_str());
}

TEST_CASE("cli run record round-trips") {
  const RunOutput out = run_cli("asymptotic --d 3 --m 3 --q 0.04 --json");
  REQUIRE(out.exit_code == 0);
  const json rec = json::parse(out.stdout_text);
  CHECK(rec["tool"] == kToolName);
  CHECK(rec["version"] == kVersion);
  CHECK(rec["command"] == "asymptotic");
  CHECK(rec.contains("wall_time_ms"));
  // lossless serialization
  CHECK(json::parse(rec.dump()) == rec);
  const double rate = rec["results"]["rate"].get<double>();
  CHECK(json::parse(rec.dump())["results"]["rate"].get<double>() == rate);
}

TEST_CASE("cli verify") {
  const RunOutput quick = run_cli("verify --level quick --seed 7");
  CHECK(quick.exit_code == 0);
  CHECK(quick.stdout_text.find("all suites passed") != std::string::npos);

  const RunOutput corrupted = run_cli("verify --level quick --seed 7 --inject-fault");
  CHECK(corrupted.exit_code == 1);
  CHECK(corrupted.stdout_text.find("FAIL") != std::string::npos);
}
