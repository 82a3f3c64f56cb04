#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;  // stdout only; stderr is routed to a scratch file
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path err_file =
      fs::temp_directory_path() / ("lbm_cli_err_" + std::to_string(counter++));
  std::string cmd =
      std::string(LBM_CLI_PATH) + " " + args + " 2>" + err_file.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.out.append(buf.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  fs::remove(err_file);
  return result;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream os(p);
  os << content;
  return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

const char* kNixonKb =
    "1000 : n -> r\n"
    "1000 : n -> q\n"
    "10 : r -> ~p\n"
    "10 : q -> p\n";

}  // namespace

TEST_CASE("cli compile emits the diamond model") {
  fs::path kb = write_temp("cli_nixon.kb", kNixonKb);
  fs::path model = fs::temp_directory_path() / "cli_nixon.json";
  CliResult r = run_cli("compile " + kb.string() + " --out " + model.string());
  CHECK(r.exit_code == 0);

  std::ifstream is(model);
  nlohmann::json j = nlohmann::json::parse(is);
  CHECK(j["n_hidden"] == 7);
  CHECK(j["n_visible"] == 4);
  CHECK(j["var_table"][0] == "n");
}

TEST_CASE("cli compile of the xor formula yields four hidden units") {
  fs::path kb = write_temp("cli_xor.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor.json";
  CliResult r = run_cli("compile " + kb.string() + " --out " + model.string());
  CHECK(r.exit_code == 0);
  std::ifstream is(model);
  nlohmann::json j = nlohmann::json::parse(is);
  CHECK(j["n_hidden"] == 4);
}

TEST_CASE("cli compile rejects an empty knowledge base") {
  fs::path kb = write_temp("cli_empty.kb", "# nothing here\n\n");
  fs::path model = fs::temp_directory_path() / "cli_empty.json";
  CliResult r = run_cli("compile " + kb.string() + " --out " + model.string());
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli enumerate reproduces the worked table") {
  fs::path formula = write_temp("cli_xor.txt", "(x ^ y) <-> z\n");
  CliResult r = run_cli("enumerate " + formula.string());
  CHECK(r.exit_code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "z", "truth", "min_energy",
                                            "free_energy"});
  const std::vector<std::string> truth{"1", "0", "0", "1", "0", "1", "1", "0"};
  for (int i = 0; i < 8; ++i) {
    CHECK(rows[i + 1][3] == truth[i]);
    CHECK(rows[i + 1][4] == (truth[i] == "1" ? "-0.5" : "0"));
  }
}

TEST_CASE("cli enumerate cross-checks model against formula") {
  fs::path formula = write_temp("cli_xor2.txt", "(x ^ y) <-> z\n");
  fs::path kb = write_temp("cli_xor2.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor2.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  CliResult r = run_cli("enumerate " + formula.string() + " --model " +
                        model.string() + " --check");
  CHECK(r.exit_code == 0);
}

TEST_CASE("cli enumerate guards wide formulas") {
  std::string big;
  for (int i = 1; i <= 21; ++i) big += (i > 1 ? " & v" : "v") + std::to_string(i);
  fs::path formula = write_temp("cli_wide.txt", big + "\n");
  CliResult r = run_cli("enumerate " + formula.string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("cli solve respects clamps and reports assignments") {
  fs::path kb = write_temp("cli_xor3.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor3.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);

  CliResult r = run_cli("solve " + model.string() +
                        " --clamp z=0 --max-samples 20000 --seed 5");
  CHECK(r.exit_code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    // Only (0,0,0) and (1,1,0) satisfy the formula with z clamped false.
    CHECK(rows[i][0] == rows[i][1]);
    CHECK(rows[i][2] == "0");
  }
}

TEST_CASE("cli solve accepts a fully clamped satisfying assignment") {
  fs::path kb = write_temp("cli_xor4.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor4.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  CliResult r = run_cli("solve " + model.string() +
                        " --clamp x=1,y=1,z=0 --max-samples 10 --seed 1");
  CHECK(r.exit_code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "1");
  CHECK(rows[1][1] == "1");
  CHECK(rows[1][2] == "0");
}

TEST_CASE("cli solve rejects unknown clamp variables") {
  fs::path kb = write_temp("cli_xor5.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor5.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  CHECK(run_cli("solve " + model.string() + " --clamp w=1").exit_code == 1);
  CHECK(run_cli("solve " + model.string() + " --clamp z=2").exit_code == 1);
}

TEST_CASE("cli solve returns no-result on an unsatisfiable model") {
  fs::path kb = write_temp("cli_unsat.kb", "x & ~x\n");
  fs::path model = fs::temp_directory_path() / "cli_unsat.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  CliResult r = run_cli("solve " + model.string() + " --max-samples 500 --seed 2");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli rank orders the diamond completions") {
  fs::path kb = write_temp("cli_nixon2.kb", kNixonKb);
  fs::path model = fs::temp_directory_path() / "cli_nixon2.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  CliResult r = run_cli("rank " + model.string() +
                        " --clamp n=1 --confidence 0.01 --top 2");
  CHECK(r.exit_code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  // Header n,r,q,p,...; the top completions set r and q.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][1] == "1");
    CHECK(rows[i][2] == "1");
  }
}

TEST_CASE("cli runs are deterministic given the seed") {
  fs::path kb = write_temp("cli_xor6.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor6.json";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  std::string args = "solve " + model.string() + " --max-samples 5000 --seed 11";
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  CHECK(a.exit_code == b.exit_code);
  CHECK(a.out == b.out);
}

TEST_CASE("cli solve streams a per-sample log") {
  fs::path kb = write_temp("cli_xor7.kb", "(x ^ y) <-> z\n");
  fs::path model = fs::temp_directory_path() / "cli_xor7.json";
  fs::path log = fs::temp_directory_path() / "cli_xor7.csv";
  REQUIRE(run_cli("compile " + kb.string() + " --out " + model.string()).exit_code == 0);
  CliResult r = run_cli("solve " + model.string() +
                        " --max-samples 200 --seed 4 --log " + log.string());
  CHECK(r.exit_code == 0);
  std::ifstream is(log);
  std::string header;
  std::getline(is, header);
  CHECK(header == "sample_index,chain_id,free_energy,accepted_flag,coverage_so_far");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 200);
}

TEST_CASE("cli train fits a dataset and writes a model") {
  // y <-> (x1 & ~x2) over the four input patterns, repeated.
  std::string csv = "y,x1,x2\n";
  for (int rep = 0; rep < 20; ++rep)
    csv += "0,0,0\n0,0,1\n1,1,0\n0,1,1\n";
  fs::path data = write_temp("cli_train.csv", csv);
  fs::path sidecar = write_temp("cli_train_targets.json", R"({"targets":["y"]})");
  fs::path model = fs::temp_directory_path() / "cli_train.json";
  CliResult r = run_cli("train --data " + data.string() + " --sidecar " +
                        sidecar.string() + " --out " + model.string() +
                        " --epochs 200 --lr 0.5 --extra-hidden 8 "
                        "--init-scale 0.1 --seed 13");
  CHECK(r.exit_code == 0);
  std::ifstream is(model);
  nlohmann::json j = nlohmann::json::parse(is);
  CHECK(j["n_visible"] == 3);
  CHECK(j["n_hidden"] == 8);
  CHECK(j["var_table"][0] == "y");
}

TEST_CASE("cli bench timing mode emits the long-format table") {
  fs::path out = fs::temp_directory_path() / "cli_timing.csv";
  CliResult r = run_cli("bench --M 3 --timing-n 2 --runs 2 --seed 9 "
                        "--max-samples 200000 --timing-out " + out.string());
  CHECK(r.exit_code == 0);
  std::ifstream is(out);
  std::string header;
  std::getline(is, header);
  CHECK(header == "M,N,run_id,seconds,censored");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("cli bench writes coverage csv and gates large scale") {
  fs::path out = fs::temp_directory_path() / "cli_cov.csv";
  CliResult r = run_cli("bench --M 4 --N 3 --runs 2 --max-samples 100000 "
                        "--checkpoint-every 1000 --seed 3 --coverage-out " +
                        out.string());
  CHECK(r.exit_code == 0);
  std::ifstream is(out);
  std::string header;
  std::getline(is, header);
  CHECK(header == "run_id,samples,coverage,accuracy");

  CHECK(run_cli("bench --M 20 --N 10 --runs 1").exit_code == 1);
}
