#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crtrig/artifacts.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::vector<json> lines;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(CRTRIG_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) r.lines.push_back(json::parse(line));
  return r;
}

bool is_hex(const json& v, std::size_t digits) {
  if (!v.is_string()) return false;
  const std::string s = v;
  return s.size() == digits + 2 && s.rfind("0x", 0) == 0 &&
         s.find_first_not_of("0123456789abcdef", 2) == std::string::npos;
}

void check_verify_schema(const json& j) {
  REQUIRE(j.is_object());
  CHECK(j.at("kind") == "verify");
  for (const char* k : {"func", "mode", "strategy", "scope"}) CHECK(j.at(k).is_string());
  for (const char* k : {"fmt", "total", "mismatches"}) CHECK(j.at(k).is_number_unsigned());
  CHECK(j.at("wall_time_seconds").is_number());
  const int fmt = j.at("fmt");
  CHECK(fmt >= 10);
  CHECK(fmt <= 32);
  const json& f = j.at("first_failures");
  REQUIRE(f.is_array());
  CHECK(f.size() <= 100);
  CHECK(f.size() <= j.at("mismatches").get<std::size_t>());
  for (const json& r : f) {
    CHECK(is_hex(r.at("input_bits"), 8));
    CHECK(is_hex(r.at("expected_bits"), (fmt + 3) / 4));
    CHECK(is_hex(r.at("got_bits"), (fmt + 3) / 4));
  }
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("crtrig_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p / "data");
  fs::create_directories(p / "src" / "generated");
  return p;
}

std::string slurp(const fs::path& p) { return crtrig::read_text_file(p.string()); }

}  // namespace

TEST_CASE("exhaustive bfloat16 sin passes") {
  const Run r = run_cli("verify --func sin --fmt 16..16 --mode rne --scope exhaustive");
  CHECK(r.code == 0);
  REQUIRE(r.lines.size() == 1);
  check_verify_schema(r.lines[0]);
  CHECK(r.lines[0]["total"] == 65536);
  CHECK(r.lines[0]["mismatches"] == 0);
  CHECK(r.lines[0]["wall_time_seconds"].get<double>() < 1.0);
}

TEST_CASE("binary32 cos in every mode on a million random inputs") {
  const Run r = run_cli("verify --func cos --fmt 32 --mode all --scope random:1000000:42");
  CHECK(r.code == 0);
  REQUIRE(r.lines.size() == 5);
  for (const json& j : r.lines) {
    check_verify_schema(j);
    CHECK(j["total"] == 1000000);
    CHECK(j["mismatches"] == 0);
  }
}

TEST_CASE("report fan-out follows the requested sets") {
  const Run r = run_cli("verify --func sin,tan --fmt 10..12 --mode rtz,rtp --strategy all --scope random:2000:1");
  CHECK(r.code == 0);
  CHECK(r.lines.size() == 2 * 3 * 2 * 4);
  for (const json& j : r.lines) check_verify_schema(j);
}

TEST_CASE("input files are read as patterns") {
  const fs::path dir = scratch("file");
  std::ofstream(dir / "inputs.txt") << "# some inputs\n0x3f800000\n0x40490fdb\n1\n";
  const Run r = run_cli("verify --func all --scope file:" + (dir / "inputs.txt").string());
  CHECK(r.code == 0);
  REQUIRE(r.lines.size() == 3);
  for (const json& j : r.lines) CHECK(j["total"] == 3);
}

TEST_CASE("a corrupted coefficient file produces mismatches and exit 1") {
  const fs::path dir = scratch("corrupt");
  fs::copy_file(fs::path(CRTRIG_DATA_DIR) / "poly_reduced.txt", dir / "poly_reduced.txt");
  fs::copy_file(fs::path(CRTRIG_DATA_DIR) / "poly_small.txt", dir / "poly_small.txt");
  std::string text = slurp(dir / "poly_reduced.txt");
  const auto at = text.find("\nsin 1 ");
  REQUIRE(at != std::string::npos);
  text.replace(at + 7, text.find('\n', at + 1) - (at + 7), "0x0p+0");
  crtrig::write_text_file((dir / "poly_reduced.txt").string(), text);
  const Run r = run_cli("verify --func sin --scope random:20000:3 --artifacts " + dir.string());
  CHECK(r.code == 1);
  REQUIRE(r.lines.size() == 1);
  check_verify_schema(r.lines[0]);
  CHECK(r.lines[0]["mismatches"].get<int>() > 100);
  CHECK(r.lines[0]["first_failures"].size() == 100);
}

TEST_CASE("usage errors and missing artifacts exit 2") {
  CHECK(run_cli("verify --fmt 9").code == 2);
  CHECK(run_cli("verify --fmt 12..40").code == 2);
  CHECK(run_cli("verify --mode rno").code == 2);
  CHECK(run_cli("verify --func sec").code == 2);
  CHECK(run_cli("verify --strategy fpv3").code == 2);
  CHECK(run_cli("verify --scope random:10").code == 2);
  CHECK(run_cli("verify --scope file:/nonexistent/inputs.txt").code == 2);
  CHECK(run_cli("verify --artifacts /nonexistent").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("generate coefficients").code == 2);
}

TEST_CASE("generate constants and table reproduce the shipped files") {
  const fs::path root = scratch("gen");
  for (const char* what : {"constants", "table"}) {
    const Run r = run_cli(std::string("generate ") + what + " --root " + root.string());
    CHECK(r.code == 0);
    REQUIRE(r.lines.size() == 1);
    CHECK(r.lines[0]["kind"] == "generate");
    CHECK(r.lines[0]["what"] == what);
    CHECK(r.lines[0]["files"].size() == 2);
  }
  const std::string constants = slurp(root / "data" / "pi_constants.txt");
  CHECK(constants.rfind("pieces28 0 0x1.45f306cp+6 ", 0) == 0);
  const std::string table = slurp(root / "data" / "sin_table.txt");
  CHECK(std::count(table.begin(), table.end(), '\n') == 512);
  CHECK(table.find("\n128 0x1p+0 0x0p+0\n") != std::string::npos);
  const fs::path src(CRTRIG_SOURCE_DIR);
  CHECK(constants == slurp(src / "data" / "pi_constants.txt"));
  CHECK(table == slurp(src / "data" / "sin_table.txt"));
  CHECK(slurp(root / "src" / "generated" / "pi_constants.inc") == slurp(src / "src" / "generated" / "pi_constants.inc"));
  CHECK(slurp(root / "src" / "generated" / "sin_table.inc") == slurp(src / "src" / "generated" / "sin_table.inc"));
}

TEST_CASE("generate poly on a sample writes coefficient files idempotently") {
  const fs::path root = scratch("poly");
  const std::string args = "generate poly --func sin --degrees 7 6 --scope random:30000:5 --root " + root.string();
  const Run r = run_cli(args);
  CHECK(r.code == 0);
  REQUIRE(r.lines.size() == 1);
  const json& j = r.lines[0];
  CHECK(j["kind"] == "generate");
  CHECK(j["what"] == "poly");
  CHECK(j["ok"] == true);
  CHECK(j["tan_failures"].empty());
  REQUIRE(j["domains"].size() == 2);
  for (const json& d : j["domains"]) {
    CHECK(d["failures"].empty());
    CHECK(d["feasible"] == true);
    CHECK(d["rounds"].get<int>() <= 50);
    CHECK(d["rational_recheck"]["checked"] == d["rational_recheck"]["passed"]);
    CHECK(d["hard"].is_array());
    CHECK(d["lp_constraints"].is_number_unsigned());
    CHECK(d["simplex_iterations"].is_number_unsigned());
  }
  CHECK(j["domains"][0]["coefficients"]["sin_degree"] == 7);
  CHECK(j["domains"][0]["coefficients"]["cos_degree"] == 6);
  const std::string reduced = slurp(root / "data" / "poly_reduced.txt");
  const std::string inc = slurp(root / "src" / "generated" / "polys.inc");
  CHECK(run_cli(args).code == 0);
  CHECK(slurp(root / "data" / "poly_reduced.txt") == reduced);
  CHECK(slurp(root / "src" / "generated" / "polys.inc") == inc);
  CHECK(run_cli("generate poly --degrees 6 6 --scope random:10:1 --root " + root.string()).code == 2);
}

TEST_CASE("bench reports every strategy and the speedups") {
  const Run r = run_cli("bench --func tan --workload large --n 20000 --reps 3");
  CHECK(r.code == 0);
  REQUIRE(r.lines.size() == 5);
  for (int i = 0; i < 4; ++i) {
    CHECK(r.lines[i]["kind"] == "bench");
    CHECK(r.lines[i]["median_ns_per_call"].get<double>() > 0);
    CHECK(r.lines[i]["ns_per_call"].size() == 3);
  }
  CHECK(r.lines[4]["kind"] == "bench_summary");
  CHECK(r.lines[4]["hybrid_speedup_vs_fpv1"].is_number());
  CHECK(r.lines[4]["hybrid_speedup_vs_int"].is_number());
}
