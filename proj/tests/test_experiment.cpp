#include "cli.hpp"

#include "speckleloc/csv.hpp"
#include "speckleloc/errors.hpp"
#include "speckleloc/experiment.hpp"
#include "speckleloc/random.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace speckleloc;
namespace fs = std::filesystem;

namespace
{

/// Fresh empty directory under the system temp dir.
fs::path scratch(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / ("speckleloc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_config(const fs::path& out)
{
  ExperimentConfig c;
  c.grid = {1024, 20.0};
  c.speckle.nSpikes = 100;
  c.speckle.spikeExtent = 20.0;
  c.evolution.kickCount = 200;
  c.evolution.recordStride = 50;
  c.baseSeed = 42;
  c.nRealizations = 3;
  c.outputs.directory = out.string();
  return c;
}

void write_text(const fs::path& p, const std::string& text)
{
  std::ofstream(p) << text;
}

} // namespace

TEST_CASE("load_config: defaults and round trip")
{
  const ExperimentConfig d = load_config("");
  CHECK(d.grid.nPoints == 4096);
  CHECK(d.grid.halfExtent == 30.0);
  CHECK(d.speckle.nSpikes == 300);
  CHECK(d.speckle.spikeWidth == 0.1);
  CHECK(d.evolution.kickCount == 10000);
  CHECK(d.evolution.driftDistance == 0.01);
  CHECK(d.evolution.dt == 0.01);
  CHECK(d.inputBeam.sigma0 == 1.0);

  const ExperimentConfig again = load_config(to_json(d).dump());
  CHECK(to_json(again) == to_json(d));

  const auto c = load_config(R"({"grid": {"n_points": 2048}, "base_seed": 18446744073709551615,
                                 "evolution": {"kick_sign": -1, "loss_per_kick": 0.01}})");
  CHECK(c.grid.nPoints == 2048);
  CHECK(c.baseSeed == 18446744073709551615ull);
  CHECK(c.evolution.kickSign == -1);
  CHECK(c.evolution.lossPerKick == 0.01);
}

TEST_CASE("load_config: rejects bad documents")
{
  auto message = [](const std::string& doc) {
    try
    {
      load_config(doc);
    }
    catch (const ConfigError& e)
    {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"evolution": {"dt": 0.02}})").find("evolution.dt") != std::string::npos);
  CHECK(message(R"({"evolution": {"dt": 0.02}, "allow_dt_mismatch": true})").empty());
  CHECK(message(R"({"grid": {"n_pionts": 10}})").find("grid.n_pionts") != std::string::npos);
  CHECK(message(R"({"grid": {"n_points": 1000}})").find("grid.n_points") != std::string::npos);
  CHECK(message(R"({"speckle": {"n_spikes": -3}})").find("speckle.n_spikes") != std::string::npos);
  CHECK(message(R"({"speckle": {"spike_extent": 40}})").find("speckle.spike_extent") != std::string::npos);
  CHECK(message(R"({"evolution": {"kick_sign": 2}})").find("kick_sign") != std::string::npos);
  CHECK(message(R"({"evolution": {"loss_per_kick": 1.0}})").find("loss_per_kick") != std::string::npos);
  CHECK(message(R"({"input_beam": {"sigma0": "wide"}})").find("input_beam.sigma0") != std::string::npos);
  CHECK(!message("{not json").empty());
}

TEST_CASE("run_realization: zero kicks records the input only")
{
  ExperimentConfig c = small_config(scratch("zero_kicks"));
  c.evolution.kickCount = 0;
  const auto r = run_realization(c, 0);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].step == 0);
  CHECK(r.series[0].z == 0.0);
  CHECK(r.series[0].norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.series[0].sqrtVariance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("run_realization: control run follows free spreading")
{
  ExperimentConfig c = small_config(scratch("control"));
  c.disablePotential = true;
  const auto r = run_realization(c, 0);
  for (double v : r.potential.values)
    CHECK(v == 0.0);
  REQUIRE(r.series.size() == 5);
  for (const ObservableRecord& rec : r.series)
  {
    const double expected = std::sqrt(free_gaussian_variance(1.0, 1.0, rec.z));
    CHECK(std::abs(rec.sqrtVariance - expected) < 1e-8);
  }
}

TEST_CASE("run_realization: deterministic per index")
{
  const ExperimentConfig c = small_config(scratch("det"));
  const auto a = run_realization(c, 1);
  const auto b = run_realization(c, 1);
  CHECK(a.seed == realization_seed(42, 1));
  CHECK(a.potential.values == b.potential.values);
  CHECK(a.finalProfile.intensity == b.finalProfile.intensity);
  const auto other = run_realization(c, 2);
  CHECK(other.potential.values != a.potential.values);
}

TEST_CASE("run_ensemble: empty ensemble")
{
  const fs::path out = scratch("empty");
  ExperimentConfig c = small_config(out);
  c.nRealizations = 0;
  const RunManifest m = run_ensemble(c);
  CHECK(m.seeds.empty());
  CHECK(m.realizations.empty());
  CHECK(m.digests.empty());
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(out))
  {
    CHECK(entry.path().filename() == "manifest.json");
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("run_ensemble: artifacts, digests and worker independence")
{
  const fs::path serialDir = scratch("serial");
  const fs::path parallelDir = scratch("parallel");
  const fs::path repeatDir = scratch("repeat");

  const RunManifest serial = run_ensemble(small_config(serialDir), {1});
  const RunManifest parallel = run_ensemble(small_config(parallelDir), {4});
  const RunManifest repeat = run_ensemble(small_config(repeatDir), {1});

  CHECK(serial.digests.size() == 3 * 3 + 2);
  CHECK(serial.digests == parallel.digests);
  CHECK(serial.digests == repeat.digests);
  CHECK(serial.seeds == parallel.seeds);
  CHECK(!fs::exists(serialDir / "PARTIAL"));

  for (const auto& [name, digest] : serial.digests)
    CHECK(sha256_hex(csv::read_file((serialDir / name).string())) == digest);

  const auto manifest = nlohmann::json::parse(csv::read_file((serialDir / "manifest.json").string()));
  CHECK(manifest["seeds"].size() == 3);
  CHECK(manifest["seeds"][0].get<std::uint64_t>() == realization_seed(42, 0));
  CHECK(manifest["rng_algorithm"] == std::string(kRngAlgorithm));
  CHECK(manifest["config"]["grid"]["n_points"] == 1024);

  // The ensemble mean is the plain average of the per-realization files.
  const auto mean = csv::parse(csv::read_file((serialDir / "observables_mean.csv").string()));
  std::vector<double> recomputed(mean.rows.size(), 0.0);
  for (int i = 0; i < 3; ++i)
  {
    const auto t = csv::parse(csv::read_file((serialDir / ("observables_" + std::to_string(i) + ".csv")).string()));
    const auto v = t.values("sqrt_variance");
    REQUIRE(v.size() == recomputed.size());
    for (std::size_t r = 0; r < v.size(); ++r)
      recomputed[r] += v[r] / 3.0;
  }
  const auto reported = mean.values("sqrt_variance");
  for (std::size_t r = 0; r < reported.size(); ++r)
    CHECK(std::abs(reported[r] - recomputed[r]) < 1e-12);
}

TEST_CASE("run_ensemble: write failures raise IoError")
{
  const fs::path base = scratch("blocked");
  write_text(base / "file", "x");
  ExperimentConfig c = small_config(base / "file" / "sub");
  c.nRealizations = 1;
  CHECK_THROWS_AS(run_ensemble(c, {1}), IoError);

  // A directory squatting on an artifact name breaks the write midway.
  const fs::path out = scratch("squat");
  fs::create_directories(out / "profile_0.csv");
  ExperimentConfig d = small_config(out);
  d.nRealizations = 1;
  CHECK_THROWS_AS(run_ensemble(d, {1}), IoError);
  CHECK(fs::exists(out / "PARTIAL"));
}

TEST_CASE("csv: formats and parses")
{
  CHECK(csv::format_real(0.1) == "0.10000000000000001");
  CHECK(csv::format_real(1e-300) == "1e-300");
  CHECK(csv::format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(csv::format_real(-2.0) == "-2");

  const auto g = make_grid(8, 2.0);
  ObservableRecord r;
  r.step = 3;
  r.z = 0.03;
  r.norm = 1.0;
  const std::vector<ObservableRecord> series{r};
  const std::string text = csv::observables(series);
  CHECK(text.rfind(std::string(csv::kObservablesHeader) + "\n", 0) == 0);
  const auto t = csv::parse(text);
  CHECK(t.values("z") == std::vector<double>{0.03});
  CHECK(t.values("step") == std::vector<double>{3.0});
  CHECK_THROWS_AS(t.column("nope"), std::out_of_range);

  ComplexField f(g);
  f[2] = Complex(0.0, 1.5);
  const auto p = intensity_profile(f);
  const auto back = csv::parse_profile(csv::profile(p));
  CHECK(back.x == p.x);
  CHECK(back.intensity == p.intensity);
}

TEST_CASE("cli: exit codes and outputs")
{
  const fs::path dir = scratch("cli");
  ExperimentConfig c = small_config(dir / "out");
  c.nRealizations = 1;
  write_text(dir / "cfg.json", to_json(c).dump());

  std::ostringstream out;
  std::ostringstream err;
  CHECK(cli_main({"run", "--bogus"}, out, err) == kExitConfigError);

  out.str("");
  CHECK(cli_main({"run", "--config", (dir / "bad.json").string()}, out, err) == kExitConfigError);

  write_text(dir / "mismatch.json", R"({"evolution": {"dt": 0.5}})");
  CHECK(cli_main({"run", "--config", (dir / "mismatch.json").string()}, out, err) == kExitConfigError);

  out.str("");
  REQUIRE(cli_main({"potential", "--config", (dir / "cfg.json").string(), "--seed", "7"}, out, err) == kExitOk);
  const auto table = csv::parse(out.str());
  CHECK(table.columns == std::vector<std::string>{"x", "V"});
  CHECK(table.rows.size() == 1024);

  REQUIRE(cli_main({"run", "--config", (dir / "cfg.json").string(), "--out", (dir / "run").string()}, out, err) ==
          kExitOk);
  CHECK(fs::exists(dir / "run" / "manifest.json"));
  CHECK(fs::exists(dir / "run" / "profile_0.csv"));

  REQUIRE(cli_main({"free", "--config", (dir / "cfg.json").string(), "--out", (dir / "free").string()}, out, err) ==
          kExitOk);
  const auto freePot = csv::parse(csv::read_file((dir / "free" / "potential_0.csv").string()));
  for (double v : freePot.values("V"))
    CHECK(v == 0.0);

  // A flat profile has no tail.
  std::string flat = "x,intensity\n";
  for (int j = 0; j < 64; ++j)
    flat += std::to_string(j) + ",1\n";
  write_text(dir / "flat.csv", flat);
  CHECK(cli_main({"tailfit", (dir / "flat.csv").string()}, out, err) == kExitRuntimeError);

  std::string expo = "x,intensity\n";
  for (int j = -512; j < 512; ++j)
    expo += csv::format_real(j * 0.05) + "," + csv::format_real(std::exp(-std::abs(j * 0.05))) + "\n";
  write_text(dir / "expo.csv", expo);
  out.str("");
  REQUIRE(cli_main({"tailfit", (dir / "expo.csv").string()}, out, err) == kExitOk);
  const std::string fit = out.str();
  CHECK(fit.find("left,") != std::string::npos);
  CHECK(fit.find("exponential") != std::string::npos);
}

TEST_CASE("resolve_workers honours options and environment")
{
  CHECK(resolve_workers({3}) == 3);
  ::setenv(kWorkersEnv, "2", 1);
  CHECK(resolve_workers({}) == 2);
  ::unsetenv(kWorkersEnv);
  CHECK(resolve_workers({}) >= 1);
}
