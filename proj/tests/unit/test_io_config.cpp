#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "vcmc/config.hpp"
#include "vcmc/rng.hpp"
#include "vcmc/sample_io.hpp"
#include "vcmc/toml_lite.hpp"

using namespace vcmc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vcmc_test_" + std::to_string(RandomEngine(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SubposteriorSampleSet small_set(int k, int t, ParamShape shape, std::uint64_t seed) {
  RandomEngine rng(seed);
  SubposteriorSampleSet s;
  s.shape = shape;
  s.mode = TemperingMode::subposterior(k);
  s.draws.resize(k);
  s.seeds.resize(k);
  for (int i = 0; i < k; ++i) {
    s.seeds[i] = derive_seed(seed, i);
    for (int j = 0; j < t; ++j) {
      Eigen::VectorXd v(shape.size());
      for (int c = 0; c < shape.size(); ++c) v[c] = rng.normal();
      s.draws[i].push_back(std::move(v));
    }
  }
  return s;
}

constexpr const char* kTomlConfig = R"(
schema = "vcmc-experiment/1"
seed = 99

[model]
kind = "probit"
sigma2 = 1.0

[model.synthetic]
seed = 5
n = 40
d = 2

[partitions]
counts = [2, 4]   # sweep
mode = "subposterior"

[sampler]
iterations = 60
burnin = 10
thin = 5
serial_draw_multiplier = 2

[objective]
batch_size = 8
iterations = 3

[evaluation]
algorithms = ["uniform_cmc", "vcmc"]

[output]
directory = "out"
format = "csv"
)";

}  // namespace

TEST_CASE("sample files round-trip in both formats") {
  TempDir tmp;
  for (SampleFileFormat format : {SampleFileFormat::Binary, SampleFileFormat::Csv}) {
    const SubposteriorSampleSet original = small_set(3, 7, {2, 2}, 11);
    const std::string dir =
        (tmp.path / sample_file_format_name(format)).string();
    write_sample_set(dir, ModelKind::NormalInverseWishart, original, format);

    ModelKind kind;
    const SubposteriorSampleSet loaded = read_sample_set(dir, 3, format, &kind);
    CHECK(kind == ModelKind::NormalInverseWishart);
    CHECK(loaded.shape == original.shape);
    CHECK(loaded.mode == original.mode);
    CHECK(loaded.seeds == original.seeds);
    REQUIRE(loaded.K() == 3);
    REQUIRE(loaded.T() == 7);
    for (int k = 0; k < 3; ++k) {
      for (int t = 0; t < 7; ++t) {
        // %.17g and binary both round-trip doubles exactly
        CHECK(loaded.draws[k][t] == original.draws[k][t]);
      }
    }
  }
}

TEST_CASE("sample file headers are validated on read") {
  TempDir tmp;
  const SubposteriorSampleSet s = small_set(2, 3, {1, 2}, 13);
  write_sample_set(tmp.path.string(), ModelKind::Probit, s, SampleFileFormat::Binary);
  // Asking for the wrong partition count trips the header check.
  CHECK_THROWS(read_sample_set(tmp.path.string(), 1, SampleFileFormat::Binary));
  CHECK_THROWS(read_sample_file((tmp.path / "missing.bin").string()));
}

TEST_CASE("atomic writes leave no temp files behind") {
  TempDir tmp;
  const std::string path = (tmp.path / "file.txt").string();
  write_file_atomic(path, "hello");
  CHECK(read_file(path) == "hello");
  CHECK_FALSE(fs::exists(path + ".tmp"));
}

TEST_CASE("csv tables parse header and rows") {
  TempDir tmp;
  const std::string path = (tmp.path / "data.csv").string();
  write_file_atomic(path, "x0,x1,y\n1.5,2.5,1\n-0.5,0.25,0\n");
  const CsvTable table = load_csv_table(path);
  CHECK(table.columns == std::vector<std::string>({"x0", "x1", "y"}));
  CHECK(table.values.rows() == 2);
  CHECK(table.column_index("y") == 2);
  CHECK(table.column_index("nope") == -1);
  CHECK(table.values(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("toml subset parses tables, arrays, and scalars") {
  const auto j = parse_toml_lite(R"(
# comment
top = 3
[a]
s = "hi # not a comment"
flag = true
xs = [1, 2, 3]
fs = [1.5, 2e-3]
[a.b]
deep = -4.25
)");
  CHECK(j.at("top").get<int>() == 3);
  CHECK(j.at("a").at("s").get<std::string>() == "hi # not a comment");
  CHECK(j.at("a").at("flag").get<bool>() == true);
  CHECK(j.at("a").at("xs").get<std::vector<int>>() == std::vector<int>({1, 2, 3}));
  CHECK(j.at("a").at("fs").at(1).get<double>() == doctest::Approx(2e-3));
  CHECK(j.at("a").at("b").at("deep").get<double>() == doctest::Approx(-4.25));
}

TEST_CASE("toml errors carry line numbers") {
  try {
    parse_toml_lite("ok = 1\nbroken line\n");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_toml_lite("x = 1\nx = 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toml_lite("[[tables]]\n"), std::invalid_argument);
}

TEST_CASE("experiment config parses from TOML with defaults applied") {
  TempDir tmp;
  const std::string path = (tmp.path / "config.toml").string();
  write_file_atomic(path, kTomlConfig);
  const ExperimentConfig cfg = load_experiment_config(path);

  CHECK(cfg.seed == 99);
  CHECK(cfg.model.kind == ModelKind::Probit);
  CHECK(cfg.partition_counts == std::vector<int>({2, 4}));
  CHECK(cfg.sampler.iterations == 60);
  CHECK(cfg.sampler.seed == 99);
  CHECK(cfg.serial_draw_multiplier == 2);
  CHECK(cfg.objective.batch_size == 8);
  CHECK(cfg.evaluation.algorithms == std::vector<std::string>({"uniform_cmc", "vcmc"}));
  // Default suites for probit.
  CHECK(cfg.evaluation.suites.size() == 3);
  CHECK(cfg.format == SampleFileFormat::Csv);
}

TEST_CASE("config json mirror reproduces the same configuration") {
  TempDir tmp;
  const std::string toml_path = (tmp.path / "config.toml").string();
  write_file_atomic(toml_path, kTomlConfig);
  const ExperimentConfig cfg = load_experiment_config(toml_path);

  const std::string json_path = (tmp.path / "config.json").string();
  write_file_atomic(json_path, config_to_json(cfg).dump(2));
  const ExperimentConfig mirrored = load_experiment_config(json_path);
  CHECK(config_hash(mirrored) == config_hash(cfg));
}

TEST_CASE("config validation failures are ConfigError with field context") {
  TempDir tmp;
  const std::string path = (tmp.path / "bad.toml").string();

  write_file_atomic(path, "x = 1\n");
  CHECK_THROWS_AS(load_experiment_config(path), ConfigError);

  write_file_atomic(path, R"(
schema = "vcmc-experiment/1"
[model]
kind = "probit"
[model.synthetic]
seed = 1
n = 10
d = 1
[partitions]
counts = [0]
)");
  CHECK_THROWS_WITH_AS(load_experiment_config(path), doctest::Contains("partition"),
                       ConfigError);

  write_file_atomic(path, R"(
schema = "vcmc-experiment/1"
[model]
kind = "probit"
data = "no_such_file.csv"
[partitions]
counts = [2]
)");
  CHECK_THROWS_WITH_AS(load_experiment_config(path), doctest::Contains("no_such_file"),
                       ConfigError);

  CHECK_THROWS_AS(load_experiment_config((tmp.path / "absent.toml").string()), ConfigError);
}

TEST_CASE("synthetic model building is deterministic and CSV loading honors the y column") {
  ModelConfig mc;
  mc.kind = ModelKind::Probit;
  mc.synthetic_seed = 4;
  mc.n = 25;
  mc.d = 3;
  const ModelSpec a = build_model(mc);
  const ModelSpec b = build_model(mc);
  CHECK(std::get<ProbitSpec>(a).X == std::get<ProbitSpec>(b).X);
  CHECK(std::get<ProbitSpec>(a).y == std::get<ProbitSpec>(b).y);

  TempDir tmp;
  const std::string csv = (tmp.path / "probit.csv").string();
  write_file_atomic(csv, "f0,y,f1\n0.5,1,2.0\n-0.25,0,1.0\n0.1,1,-3.0\n");
  ModelConfig from_csv;
  from_csv.kind = ModelKind::Probit;
  from_csv.data_path = csv;
  const auto model = std::get<ProbitSpec>(build_model(from_csv));
  CHECK(model.X.rows() == 3);
  CHECK(model.X.cols() == 2);
  CHECK(model.y[0] == 1);
  CHECK(model.y[1] == 0);
  CHECK(model.X(0, 1) == doctest::Approx(2.0));  // y column skipped in order
}

TEST_CASE("niw csv default mean is the data mean") {
  TempDir tmp;
  const std::string csv = (tmp.path / "niw.csv").string();
  write_file_atomic(csv, "a,b\n1.0,2.0\n3.0,6.0\n");
  ModelConfig mc;
  mc.kind = ModelKind::NormalInverseWishart;
  mc.data_path = csv;
  const auto model = std::get<NiwSpec>(build_model(mc));
  CHECK(model.mu[0] == doctest::Approx(2.0));
  CHECK(model.mu[1] == doctest::Approx(4.0));
  CHECK(model.nu == doctest::Approx(4.0));  // d + 2 default
}
