#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mpslab/runner.hpp"
#include "mpslab/table.hpp"

using namespace mpslab;
namespace fs = std::filesystem;

namespace {

std::optional<ExperimentConfig> parse_and_build(const std::string& text,
                                                std::vector<ConfigError>& errors) {
  ConfigDoc doc = ConfigDoc::parse_text(text, errors);
  return build_config(doc, errors);
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return std::string(std::istreambuf_iterator<char>(is), {});
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("mpslab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing: scalars, lists, sections, comments") {
  std::vector<ConfigError> errors;
  ConfigDoc doc = ConfigDoc::parse_text(
      "# header comment\n"
      "experiment = audenaert   # trailing comment\n"
      "seed = 7\n"
      "name = \"with spaces # not a comment\"\n"
      "flag = true\n"
      "rate = 0.25\n"
      "grid = [1, 2, 3]\n"
      "[section]\n"
      "inner = 4\n",
      errors);
  CHECK(errors.empty());
  CHECK(doc.find("experiment")->s == "audenaert");
  CHECK(doc.find("seed")->i == 7);
  CHECK(doc.find("name")->s == "with spaces # not a comment");
  CHECK(doc.find("flag")->b);
  CHECK(doc.find("rate")->r == doctest::Approx(0.25));
  CHECK(doc.find("grid")->items.size() == 3);
  CHECK(doc.find("section.inner")->i == 4);
}

TEST_CASE("config parsing collects every syntax error") {
  std::vector<ConfigError> errors;
  ConfigDoc::parse_text(
      "this line is broken\n"
      "key =\n"
      "[unclosed\n"
      "a = 1\n"
      "a = 2\n",
      errors);
  CHECK(errors.size() == 4);
}

TEST_CASE("minimal audenaert config fills documented defaults") {
  std::vector<ConfigError> errors;
  auto cfg = parse_and_build("experiment = audenaert\nseed = 1\n", errors);
  REQUIRE(errors.empty());
  REQUIRE(cfg.has_value());
  CHECK(cfg->get_int("trials", 1000) == 1000);
  CHECK(cfg->get_int_list("dims", {2, 4, 8, 16}) == std::vector<std::int64_t>{2, 4, 8, 16});
}

TEST_CASE("config validation names the offending keys") {
  std::vector<ConfigError> errors;
  auto cfg = parse_and_build(
      "experiment = audenaert\n"
      "seed = 1\n"
      "bogus_key = 12\n",
      errors);
  CHECK(!cfg.has_value());
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].key == "bogus_key");

  errors.clear();
  cfg = parse_and_build("experiment = table1_scan\nN = [0, 4]\n", errors);
  CHECK(!cfg.has_value());
  REQUIRE(!errors.empty());
  CHECK(errors[0].key == "N");
  CHECK(errors[0].message.find("N >= 1") != std::string::npos);

  errors.clear();
  cfg = parse_and_build("experiment = frobnicate\n", errors);
  CHECK(!cfg.has_value());
  CHECK(errors[0].key == "experiment");
}

TEST_CASE("stochastic experiments demand a seed") {
  std::vector<ConfigError> errors;
  auto cfg = parse_and_build("experiment = eps_bounds\n", errors);
  CHECK(!cfg.has_value());
  bool seed_error = false;
  for (const auto& e : errors) seed_error = seed_error || e.key == "seed";
  CHECK(seed_error);

  // deterministic experiments do not
  errors.clear();
  cfg = parse_and_build("experiment = multiplicativity\n", errors);
  CHECK(errors.empty());
  CHECK(cfg.has_value());
}

TEST_CASE("config output_dir beats the environment variable") {
  setenv("MPSLAB_OUTPUT_DIR", "/tmp/from-env", 1);
  std::vector<ConfigError> errors;
  auto from_env = parse_and_build("experiment = multiplicativity\n", errors);
  REQUIRE(from_env.has_value());
  CHECK(from_env->output_dir == "/tmp/from-env");

  auto from_cfg = parse_and_build(
      "experiment = multiplicativity\noutput_dir = \"/tmp/from-config\"\n", errors);
  REQUIRE(from_cfg.has_value());
  CHECK(from_cfg->output_dir == "/tmp/from-config");
  unsetenv("MPSLAB_OUTPUT_DIR");
}

TEST_CASE("experiment registry exposes the documented keys") {
  const auto& reg = experiment_registry();
  std::vector<std::string> names;
  for (const auto& info : reg) names.push_back(info.name);
  for (const char* expected :
       {"eps_bounds", "audenaert", "majorization", "multiplicativity", "product_structure",
        "table1_scan", "smooth_renyi_check", "quench_exact", "quench_tebd", "quench_hardness"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
  CHECK(find_experiment("eps_bounds") != nullptr);
  CHECK(find_experiment("eps_bounds")->stochastic);
  CHECK(find_experiment("nope") == nullptr);
}

TEST_CASE("table emission: header-only, single row, and round trip") {
  fs::path dir = temp_dir("tables");
  Table empty;
  empty.name = "empty";
  empty.header = {"a", "b"};
  write_table(empty, dir / "empty.csv");
  CHECK(read_file(dir / "empty.csv") == "a,b\n");

  Table one;
  one.name = "one";
  one.header = {"a", "b", "c"};
  one.add_row({static_cast<long long>(3), 0.1, std::string("x")});
  write_table(one, dir / "one.csv");
  const std::string text = read_file(dir / "one.csv");
  CHECK(text == "a,b,c\n3,0.10000000000000001,x\n");

  Table back = read_csv(dir / "one.csv");
  CHECK(back.header == one.header);
  CHECK(formatted_rows(back) == formatted_rows(one));

  CHECK_THROWS_AS(one.add_row({static_cast<long long>(1)}), ValidationError);
}

TEST_CASE("reals are emitted at 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("run_experiment writes artifacts, a manifest, and is rerun-identical") {
  fs::path dir = temp_dir("eps_run");
  std::vector<ConfigError> errors;
  auto cfg = parse_and_build(
      "experiment = eps_bounds\n"
      "seed = 5\n"
      "states = [\"ghz(6)\"]\n"
      "D = [1, 2]\n"
      "trials = 25\n"
      "output_dir = \"" + dir.string() + "\"\n",
      errors);
  REQUIRE(errors.empty());
  REQUIRE(cfg.has_value());

  RunOutcome first = run_experiment(*cfg);
  CHECK(first.status == RunStatus::ok);
  CHECK(first.violations == 0);
  CHECK(fs::exists(dir / "eps_bounds.csv"));
  CHECK(fs::exists(dir / "eps_bounds.json"));
  CHECK(fs::exists(dir / "manifest.json"));
  const std::string csv1 = read_file(dir / "eps_bounds.csv");
  CHECK(csv1.find("seed=5") != std::string::npos);

  // rerun with a different thread count: byte-identical CSV
  cfg->thread_count = 4;
  RunOutcome second = run_experiment(*cfg);
  CHECK(second.status == RunStatus::ok);
  CHECK(read_file(dir / "eps_bounds.csv") == csv1);
}

TEST_CASE("run_experiment surfaces resource rejections with the distinct status") {
  fs::path dir = temp_dir("resource");
  std::vector<ConfigError> errors;
  auto cfg = parse_and_build(
      "experiment = quench_exact\n"
      "N = 24\n"
      "output_dir = \"" + dir.string() + "\"\n",
      errors);
  REQUIRE(cfg.has_value());
  RunOutcome outcome = run_experiment(*cfg);
  CHECK(outcome.status == RunStatus::resource_limit);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("tiny table1 scan produces the scan table and cached states") {
  fs::path dir = temp_dir("table1");
  std::vector<ConfigError> errors;
  auto cfg = parse_and_build(
      "experiment = table1_scan\n"
      "family = magic\n"
      "N = [2, 3]\n"
      "alpha = [\"0.5\", \"1\"]\n"
      "delta = [0.1]\n"
      "output_dir = \"" + dir.string() + "\"\n",
      errors);
  REQUIRE(errors.empty());
  REQUIRE(cfg.has_value());
  RunOutcome outcome = run_experiment(*cfg);
  CHECK(outcome.status == RunStatus::ok);
  CHECK(fs::exists(dir / "table1_magic.csv"));
  CHECK(fs::exists(dir / "cache" / "magic_N2.mps"));
  MatrixProductState cached = load_mps_file((dir / "cache" / "magic_N2.mps").string());
  CHECK(cached.num_sites() == 4);

  Table t = read_csv(dir / "table1_magic.csv");
  CHECK(t.rows.size() == 2 * (2 + 3));
}

TEST_CASE("selftest passes") {
  std::ostringstream sink;
  CHECK(run_selftest(sink) == 0);
}
