#include "speckleloc/experiment.hpp"

#include "speckleloc/csv.hpp"
#include "speckleloc/errors.hpp"
#include "speckleloc/random.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <thread>

namespace speckleloc
{

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes)
{
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i)
  {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

RealizationResult run_realization(const ExperimentConfig& config, std::size_t index,
                                  const Observer& extra)
{
  validate(config);
  const auto start = std::chrono::steady_clock::now();

  RealizationResult r;
  r.index = index;
  r.seed = realization_seed(config.baseSeed, index);

  const GridPtr grid = make_grid(config.grid.nPoints, config.grid.halfExtent);
  if (config.disablePotential)
  {
    r.potential = zero_potential(grid);
  }
  else
  {
    SpeckleConfig speckle = config.speckle;
    speckle.seed = r.seed;
    r.potential = generate_potential(speckle, grid);
    r.warnings = r.potential.warnings;
  }

  const ComplexField input = gaussian_input(grid, config.inputBeam.sigma0, config.inputBeam.center);
  auto recorder = [&](std::size_t step, double z, const ComplexField& field) {
    r.series.push_back(observe(field, step, z));
    if (extra)
      extra(step, z, field);
  };
  EvolveResult evolved = evolve(input, r.potential, config.evolution, recorder);
  if (evolved.boundaryLeakStep)
    r.warnings.push_back("boundary leak above " + csv::format_real(kBoundaryLeakThreshold) +
                         " of peak from step " + std::to_string(*evolved.boundaryLeakStep));
  r.finalProfile = intensity_profile(evolved.field);

  r.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::ordered_json RunManifest::to_json() const
{
  nlohmann::ordered_json j;
  j["software"] = "speckleloc";
  j["software_version"] = softwareVersion;
  j["rng_algorithm"] = rngAlgorithm;
  j["seed_mixer"] = seedMixer;
  j["config"] = config;
  j["seeds"] = seeds;
  auto& list = j["realizations"] = nlohmann::ordered_json::array();
  for (const RealizationEntry& e : realizations)
  {
    nlohmann::ordered_json item;
    item["index"] = e.index;
    item["seed"] = e.seed;
    item["status"] = e.ok ? "ok" : "error";
    item["wall_seconds"] = e.wallSeconds;
    if (!e.ok)
      item["error"] = e.error;
    item["warnings"] = e.warnings;
    list.push_back(std::move(item));
  }
  j["digest_algorithm"] = "sha256";
  j["files"] = digests;
  return j;
}

std::size_t resolve_workers(const EnsembleOptions& options)
{
  if (options.workers > 0)
    return options.workers;
  if (const char* env = std::getenv(kWorkersEnv))
  {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace
{

class OutputWriter
{
public:
  explicit OutputWriter(fs::path dir) : mDir(std::move(dir))
  {
    std::error_code ec;
    fs::create_directories(mDir, ec);
    if (ec)
      throw IoError("cannot create output directory '" + mDir.string() + "': " + ec.message());
    fs::remove(mDir / "PARTIAL", ec);
  }

  void write(const std::string& name, const std::string& contents, RunManifest& manifest)
  {
    writeRaw(name, contents);
    manifest.digests[name] = sha256_hex(contents);
  }

  void writeRaw(const std::string& name, const std::string& contents)
  {
    const fs::path path = mDir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out)
    {
      markPartial("failed writing " + name);
      throw IoError("failed to write '" + path.string() + "'");
    }
  }

  void markPartial(const std::string& reason) noexcept
  {
    try
    {
      std::ofstream marker(mDir / "PARTIAL", std::ios::trunc);
      marker << reason << '\n';
    }
    catch (...)
    {
    }
  }

private:
  fs::path mDir;
};

std::vector<ObservableRecord> mean_series(const std::vector<const RealizationResult*>& ok)
{
  const std::vector<ObservableRecord>& first = ok.front()->series;
  std::vector<ObservableRecord> mean(first.size());
  const auto n = static_cast<double>(ok.size());
  for (std::size_t i = 0; i < first.size(); ++i)
  {
    ObservableRecord m;
    m.step = first[i].step;
    m.z = first[i].z;
    for (const RealizationResult* r : ok)
    {
      const ObservableRecord& s = r->series.at(i);
      m.norm += s.norm;
      m.centroid += s.centroid;
      m.sqrtVariance += s.sqrtVariance;
      m.participationRatio += s.participationRatio;
      m.peakIntensity += s.peakIntensity;
      m.boundaryLeak += s.boundaryLeak;
    }
    m.norm /= n;
    m.centroid /= n;
    m.sqrtVariance /= n;
    m.participationRatio /= n;
    m.peakIntensity /= n;
    m.boundaryLeak /= n;
    mean[i] = m;
  }
  return mean;
}

} // namespace

RunManifest run_ensemble(const ExperimentConfig& config, const EnsembleOptions& options)
{
  validate(config);

  RunManifest manifest;
  manifest.config = to_json(config);
  manifest.softwareVersion = SPECKLELOC_VERSION;
  manifest.rngAlgorithm = std::string(kRngAlgorithm);
  manifest.seedMixer = std::string(kSeedMixAlgorithm);

  const std::size_t count = config.nRealizations;
  for (std::size_t i = 0; i < count; ++i)
    manifest.seeds.push_back(realization_seed(config.baseSeed, i));

  OutputWriter writer(config.outputs.directory);

  std::vector<std::optional<RealizationResult>> results(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        results[i] = run_realization(config, i);
      }
      catch (const std::exception& e)
      {
        errors[i] = e.what();
      }
    }
  };

  const std::size_t workers = std::min(resolve_workers(options), std::max<std::size_t>(count, 1));
  if (workers <= 1)
  {
    work();
  }
  else
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(work);
  }

  std::vector<const RealizationResult*> ok;
  for (std::size_t i = 0; i < count; ++i)
  {
    RealizationEntry entry;
    entry.index = i;
    entry.seed = manifest.seeds[i];
    if (results[i])
    {
      const RealizationResult& r = *results[i];
      entry.ok = true;
      entry.wallSeconds = r.wallSeconds;
      entry.warnings = r.warnings;
      ok.push_back(&r);

      const std::string suffix = "_" + std::to_string(i) + ".csv";
      if (config.outputs.observables)
        writer.write("observables" + suffix, csv::observables(r.series), manifest);
      if (config.outputs.profiles)
        writer.write("profile" + suffix, csv::profile(r.finalProfile), manifest);
      if (config.outputs.potentials)
        writer.write("potential" + suffix, csv::potential(r.potential), manifest);
    }
    else
    {
      entry.error = errors[i];
    }
    manifest.realizations.push_back(std::move(entry));
  }

  if (config.outputs.ensemble && !ok.empty())
  {
    writer.write("observables_mean.csv", csv::observables(mean_series(ok)), manifest);

    const IntensityProfile& first = ok.front()->finalProfile;
    std::vector<double> logMean(first.size(), 0.0);
    for (const RealizationResult* r : ok)
      for (std::size_t j = 0; j < logMean.size(); ++j)
        logMean[j] += r->finalProfile.log10Intensity[j];
    for (double& v : logMean)
      v /= static_cast<double>(ok.size());
    writer.write("profile_logmean.csv", csv::log_mean_profile(first.x, logMean), manifest);
  }

  writer.writeRaw("manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

} // namespace speckleloc
