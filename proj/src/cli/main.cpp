// crtrig: verify, bench and generate.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "crtrig/artifacts.hpp"
#include "crtrig/bench.hpp"
#include "crtrig/generator.hpp"
#include "crtrig/tables.hpp"
#include "crtrig/verify.hpp"
#include "json.hpp"

namespace {

using namespace crtrig;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_set(const std::string& text, std::span<const T> all, Parse parse) {
  if (text == "all") return {all.begin(), all.end()};
  std::vector<T> out;
  try {
    for (const std::string& s : split(text)) out.push_back(parse(s));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (out.empty()) throw UsageError("empty list: " + text);
  return out;
}

std::pair<int, int> parse_fmt(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used == text.size()) return {n, n};
    } else {
      const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
      std::size_t ua = 0, ub = 0;
      const int lo = std::stoi(a, &ua), hi = std::stoi(b, &ub);
      if (ua == a.size() && ub == b.size()) return {lo, hi};
    }
  } catch (const std::exception&) {
  }
  throw UsageError("bad --fmt '" + text + "': expected N or N..M");
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::trunc);
    if (!file_) throw UsageError("cannot write " + path);
  }
  void line(const std::string& s) {
    std::cout << s << '\n';
    if (file_.is_open()) file_ << s << '\n';
  }

 private:
  std::ofstream file_;
};

struct VerifyArgs {
  std::string func = "sin", fmt = "32", mode = "rne", strategy = "hybrid", scope = "exhaustive";
  std::string cache, out, artifacts;
  int jobs = 0;
  bool progress = false;
};

int cmd_verify(const VerifyArgs& a) {
  VerifyOptions o;
  o.funcs = parse_set<Func>(a.func, kAllFuncs, parse_func);
  o.modes = parse_set<RoundingMode>(a.mode, kUserModes, [](const std::string& s) {
    const RoundingMode m = parse_rounding_mode(s);
    if (m == RoundingMode::ToOdd) throw std::invalid_argument("round-to-odd is internal");
    return m;
  });
  o.strategies = parse_set<ReductionStrategy>(a.strategy, kAllStrategies, parse_strategy);
  std::tie(o.fmt_lo, o.fmt_hi) = parse_fmt(a.fmt);
  if (o.fmt_lo < 10 || o.fmt_hi > 32 || o.fmt_lo > o.fmt_hi) throw UsageError("--fmt must lie in 10..32");
  try {
    o.scope = InputScope::parse(a.scope);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.jobs = a.jobs;
  o.oracle_cache = a.cache;
  o.progress = a.progress;
  if (!a.artifacts.empty()) o.polys = load_kernel_polys(a.artifacts);
  Output out(a.out);
  bool pass = true;
  for (const VerifyReport& r : run_verify(o)) {
    out.line(r.json());
    pass = pass && r.pass();
  }
  return pass ? kExitPass : kExitFail;
}

struct BenchArgs {
  std::string func = "sin", strategy = "all", workload = "uniform", out;
  std::uint64_t n = 10'000'000, seed = 1;
  int reps = 5;
};

int cmd_bench(const BenchArgs& a) {
  BenchOptions o;
  try {
    o.func = parse_func(a.func);
    o.workload = parse_workload(a.workload);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.strategies = parse_set<ReductionStrategy>(a.strategy, kAllStrategies, parse_strategy);
  o.n = a.n;
  o.seed = a.seed;
  o.repetitions = a.reps;
  if (o.n == 0 || o.repetitions <= 0) throw UsageError("--n and --reps must be positive");
  Output out(a.out);
  for (const std::string& s : run_bench(o).json_lines()) out.line(s);
  return kExitPass;
}

struct GenerateArgs {
  std::string what, root = ".", out, scope = "exhaustive", func = "sin,cos", candidates_out;
  std::vector<int> degrees{7, 6}, small_degrees{9, 8};
  int jobs = 0;
  std::uint64_t seed = 1;
  bool progress = false;
};

void write_files(const std::string& root, const std::vector<std::pair<std::string, std::string>>& files,
                 nlohmann::json& report) {
  nlohmann::json names = nlohmann::json::array();
  for (const auto& [rel, text] : files) {
    write_text_file(root + "/" + rel, text);
    names.push_back(rel);
  }
  report["files"] = names;
}

int cmd_generate(const GenerateArgs& a) {
  Output out(a.out);
  nlohmann::json report = {{"kind", "generate"}, {"what", a.what}};
  if (a.what == "constants") {
    const PiConstants c = gen_pi_constants(1024);
    write_files(a.root, {{"data/pi_constants.txt", format_pi_constants(c)},
                         {"src/generated/pi_constants.inc", pi_constants_inc(c)}}, report);
    out.line(report.dump());
    return kExitPass;
  }
  if (a.what == "table") {
    const SinTable t = build_sin_table();
    write_files(a.root, {{"data/sin_table.txt", format_sin_table(t)},
                         {"src/generated/sin_table.inc", sin_table_inc(t)}}, report);
    report["table_checksum"] = table_checksum(t);
    out.line(report.dump());
    return kExitPass;
  }
  // Sin and cos share one linear program; tan is validated against it.
  for (const std::string& f : split(a.func))
    if (f != "sin" && f != "cos" && f != "tan") throw UsageError("unknown function: " + f);
  if (a.degrees.size() != 2 || a.small_degrees.size() != 2) throw UsageError("degrees take two values");
  GenerateOptions o;
  o.sin_degree = a.degrees[0];
  o.cos_degree = a.degrees[1];
  o.small_sin_degree = a.small_degrees[0];
  o.small_cos_degree = a.small_degrees[1];
  for (int d : {o.sin_degree, o.small_sin_degree})
    if (d < 3 || d % 2 == 0 || d > 2 * kMaxTerms - 1) throw UsageError("sin degrees must be odd, 3..15");
  for (int d : {o.cos_degree, o.small_cos_degree})
    if (d < 2 || d % 2 != 0 || d > 2 * kMaxTerms - 2) throw UsageError("cos degrees must be even, 2..14");
  o.jobs = a.jobs;
  o.seed = a.seed;
  o.quiet = !a.progress;
  o.candidates_out = a.candidates_out;
  InputScope scope;
  try {
    scope = InputScope::parse(a.scope);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (scope.kind == InputScope::Kind::Random) o.inputs = random_patterns(scope.n, scope.seed);
  if (scope.kind == InputScope::Kind::File) o.inputs = read_pattern_file(scope.path);
  if (scope.kind != InputScope::Kind::Exhaustive && o.inputs.empty()) throw UsageError("scope has no inputs");
  const GenerateReport r = generate_polys(o);
  nlohmann::json j = nlohmann::json::parse(r.json());
  j["what"] = "poly";
  j["scope"] = scope.str();
  if (r.ok()) {
    const std::uint64_t sum = table_checksum(sin_table());
    const std::string order(kEvalOrder);
    write_files(a.root, {{"data/poly_reduced.txt", format_poly_file({r.polys.reduced, "reduced", order, sum, kGeneratorVersion})},
                         {"data/poly_small.txt", format_poly_file({r.polys.small, "small", order, sum, kGeneratorVersion})},
                         {"src/generated/polys.inc", polys_inc(r.polys)}}, j);
  }
  out.line(j.dump());
  return r.ok() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correctly rounded sin, cos and tan for 8-exponent-bit formats"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Compare kernel results with the oracle");
  verify->add_option("--func", va.func, "sin, cos, tan, a comma list or all")->capture_default_str();
  verify->add_option("--fmt", va.fmt, "Total bits N or a range N..M (10..32)")->capture_default_str();
  verify->add_option("--mode", va.mode, "rne, rna, rtz, rtp, rtn, a comma list or all")->capture_default_str();
  verify->add_option("--strategy", va.strategy, "fpv1, fpv2, int, hybrid, a comma list or all")->capture_default_str();
  verify->add_option("--scope", va.scope, "exhaustive, random:N:SEED or file:PATH")->capture_default_str();
  verify->add_option("--jobs", va.jobs, "Worker threads (0: all cores)");
  verify->add_option("--oracle-cache", va.cache, "Directory of <func>.ro34 oracle caches");
  verify->add_option("--artifacts", va.artifacts, "Directory with poly_reduced.txt and poly_small.txt");
  verify->add_option("--out", va.out, "Also write the JSON lines here");
  verify->add_flag("--progress", va.progress, "Report progress on stderr");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Time eval34 per reduction strategy");
  bench->add_option("--func", ba.func, "sin, cos or tan")->capture_default_str();
  bench->add_option("--strategy", ba.strategy, "Strategies to time")->capture_default_str();
  bench->add_option("--workload", ba.workload, "uniform, small or large")->capture_default_str();
  bench->add_option("--n", ba.n, "Calls per repetition")->capture_default_str();
  bench->add_option("--seed", ba.seed, "Input stream seed")->capture_default_str();
  bench->add_option("--reps", ba.reps, "Repetitions; the median is reported")->capture_default_str();
  bench->add_option("--out", ba.out, "Also write the JSON lines here");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Regenerate constants, the sin table or coefficients");
  gen->add_option("what", ga.what, "constants, table or poly")->required()->check(CLI::IsMember({"constants", "table", "poly"}));
  gen->add_option("--root", ga.root, "Source tree receiving data/ and src/generated/ files")->capture_default_str();
  gen->add_option("--func", ga.func, "Functions to fit; sin and cos are always fitted together")->capture_default_str();
  gen->add_option("--degrees", ga.degrees, "sin and cos degrees for reduced inputs")->expected(2);
  gen->add_option("--small-degrees", ga.small_degrees, "sin and cos degrees for unreduced inputs")->expected(2);
  gen->add_option("--scope", ga.scope, "Inputs supplying constraints")->capture_default_str();
  gen->add_option("--jobs", ga.jobs, "Worker threads (0: all cores)");
  gen->add_option("--seed", ga.seed, "Sampling seed")->capture_default_str();
  gen->add_option("--out", ga.out, "Also write the JSON report here");
  gen->add_option("--candidates-out", ga.candidates_out, "Write the candidate inputs here (for --scope file:)");
  gen->add_flag("--progress", ga.progress, "Report progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  try {
    if (*verify) return cmd_verify(va);
    if (*bench) return cmd_bench(ba);
    return cmd_generate(ga);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "crtrig: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "crtrig: %s\n", e.what());
    return kExitUsage;
  } catch (const ArtifactError& e) {
    std::fprintf(stderr, "crtrig: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "crtrig: %s\n", e.what());
    return kExitFail;
  }
}
