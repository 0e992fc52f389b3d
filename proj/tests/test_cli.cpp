#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string g_cli;
fs::path g_tmp;

struct RunResult {
  int exit_code;
  std::string out, err;
};

RunResult run(const std::string& args, const std::string& stdin_file = "") {
  const fs::path out = g_tmp / "stdout.txt";
  const fs::path err = g_tmp / "stderr.txt";
  std::string cmd = g_cli + " " + args + " >" + out.string() + " 2>" + err.string();
  if (!stdin_file.empty()) cmd += " <" + stdin_file;
  const int rc = std::system(cmd.c_str());
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  return RunResult{WEXITSTATUS(rc), slurp(out), slurp(err)};
}

std::string slurp_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("test subcommand with a preset writes summary.json with the decision") {
  const fs::path out = g_tmp / "runs1";
  const auto r = run("test --preset mean_sd_beta --alpha 0.05 --seed 7 --horizon 120 --out " +
                     out.string());
  CHECK(r.exit_code == 0);
  const fs::path dir = out / "test" / "mean_sd_beta" / "7";
  REQUIRE(fs::exists(dir / "summary.json"));
  const json summary = json::parse(slurp_file(dir / "summary.json"));
  CHECK(summary.contains("rejected"));
  CHECK(summary["alpha"] == 0.05);
  CHECK(summary["config"]["preset"] == "mean_sd_beta");
  if (summary["rejected"].get<bool>()) CHECK(summary.contains("rejected_at"));
  REQUIRE(fs::exists(dir / "path.csv"));
}

TEST_CASE("invalid alpha fails config validation") {
  const auto r = run("test --preset mean_sd_beta --alpha 1.5");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("alpha") != std::string::npos);
}

TEST_CASE("unknown preset names the known ones") {
  const auto r = run("montecarlo --scenario bogus --reps 1");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("alt_mean_sd_beta") != std::string::npos);
}

TEST_CASE("malformed csv row reports its line number and exits nonzero") {
  const fs::path csv = g_tmp / "bad.csv";
  {
    std::ofstream f(csv);
    f << "x\n0.4\n0.5\noops\n";
  }
  const auto r = run("test --functional mean --null 0.45 --family bounded_ident "
                     "--data-range 0,1 --data " +
                     csv.string() + " --out " + (g_tmp / "runs2").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line 4") != std::string::npos);
}

TEST_CASE("csv with a wrong column count names the line") {
  const fs::path csv = g_tmp / "bad2.csv";
  {
    std::ofstream f(csv);
    f << "0.4\n0.5,0.6\n";
  }
  const auto r = run("test --functional mean --null 0.45 --family bounded_ident "
                     "--data-range 0,1 --data " +
                     csv.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("stdin streaming mode") {
  const fs::path csv = g_tmp / "stream.csv";
  {
    std::ofstream f(csv);
    for (int i = 0; i < 50; ++i) f << (i % 2 ? 0.9 : 0.1) << "\n";
  }
  const auto r = run("test --functional mean --null 0.5 --family bounded_ident "
                     "--data-range 0,1 --strategy ogd --data - --out " +
                         (g_tmp / "runs3").string(),
                     csv.string());
  CHECK(r.exit_code == 0);
  const fs::path dir = g_tmp / "runs3" / "test" / "custom" / "1";
  const json summary = json::parse(slurp_file(dir / "summary.json"));
  CHECK(summary["steps_consumed"] == 50);
}

TEST_CASE("experiment bundle reruns byte-identically from the recorded config") {
  const fs::path out = g_tmp / "runs4";
  const auto r1 = run("experiment --preset ar1_coeff --seed 11 --horizon 80 --out " +
                      out.string());
  REQUIRE(r1.exit_code == 0);
  const fs::path dir = out / "ar1_coeff" / "11";
  REQUIRE(fs::exists(dir / "confseq.csv"));
  const std::string path1 = slurp_file(dir / "path.csv");
  const std::string band1 = slurp_file(dir / "confseq.csv");

  const auto r2 = run("experiment --config " + (dir / "config.txt").string());
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp_file(dir / "path.csv") == path1);
  CHECK(slurp_file(dir / "confseq.csv") == band1);
}

TEST_CASE("confseq: resolution-1 grid degenerates to the single test's duality") {
  const fs::path out = g_tmp / "runs5";
  const auto r = run("confseq --preset ar1_coeff --grid 0.65:0.65:1 --seed 3 --horizon 150 "
                     "--out " +
                     out.string());
  REQUIRE(r.exit_code == 0);
  const fs::path dir = out / "confseq" / "ar1_coeff" / "3";
  const std::string band = slurp_file(dir / "confseq.csv");
  // One candidate: the mask column is a single character per row.
  std::istringstream is(band);
  std::string line;
  std::getline(is, line);  // header
  CHECK(line == "t,hull_lo,hull_hi,members,mask");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    const auto comma = line.rfind(',');
    CHECK(line.size() - comma - 1 == 1);
  }
  CHECK(rows == 150);

  // t=0 is the full grid by definition; the first written row is t=1.
  const json summary = json::parse(slurp_file(dir / "summary.json"));
  CHECK(summary["grid"] == "0.65:0.65:1");
}

TEST_CASE("montecarlo with one replication yields degenerate frequencies") {
  const fs::path out = g_tmp / "mc1.json";
  const auto r = run("montecarlo --scenario alt_mean_sd_beta --reps 1 --horizon 150 --seed 5 "
                     "--out " +
                     out.string());
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(slurp_file(out));
  const double freq = j["rejection_frequency"].get<double>();
  CHECK((freq == 0.0 || freq == 1.0));
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-avseq-binary> [doctest args]\n");
    return 1;
  }
  g_cli = argv[1];
  g_tmp = fs::temp_directory_path() / "avseq_cli_test";
  fs::remove_all(g_tmp);
  fs::create_directories(g_tmp);
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  const int rc = ctx.run();
  fs::remove_all(g_tmp);
  return rc;
}
