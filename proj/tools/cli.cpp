#include "cli.hpp"

#include "speckleloc/config.hpp"
#include "speckleloc/csv.hpp"
#include "speckleloc/errors.hpp"
#include "speckleloc/experiment.hpp"
#include "speckleloc/random.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace speckleloc
{

namespace
{

struct CommonFlags
{
  std::string configPath;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> realizations;
  std::optional<std::string> outDir;
  std::optional<std::size_t> stride;
  bool noPotential = false;
  std::optional<double> loss;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool ensembleFlags)
{
  cmd->add_option("--config", f.configPath, "JSON config file (defaults reproduce the reference run)");
  cmd->add_option("--seed", f.seed, "Base seed (u64)");
  cmd->add_option("--out", f.outDir, "Output directory");
  if (ensembleFlags)
  {
    cmd->add_option("--realizations", f.realizations, "Number of disorder realizations");
    cmd->add_option("--stride", f.stride, "Record observables every N kicks")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-potential", f.noPotential, "Control run with V = 0");
    cmd->add_option("--loss", f.loss, "Intensity fraction absorbed per kick, in [0, 1)");
  }
}

ExperimentConfig build_config(const CommonFlags& f)
{
  ExperimentConfig cfg;
  if (!f.configPath.empty())
  {
    std::string text;
    try
    {
      text = csv::read_file(f.configPath);
    }
    catch (const std::exception& e)
    {
      throw ConfigError(e.what());
    }
    cfg = load_config(text);
  }
  if (f.seed)
    cfg.baseSeed = *f.seed;
  if (f.realizations)
    cfg.nRealizations = *f.realizations;
  if (f.outDir)
    cfg.outputs.directory = *f.outDir;
  if (f.stride)
    cfg.evolution.recordStride = *f.stride;
  if (f.noPotential)
    cfg.disablePotential = true;
  if (f.loss)
    cfg.evolution.lossPerKick = *f.loss;
  validate(cfg);
  return cfg;
}

int report_manifest(const RunManifest& m, const ExperimentConfig& cfg, std::ostream& out,
                    std::ostream& err)
{
  std::size_t failed = 0;
  for (const RealizationEntry& e : m.realizations)
  {
    if (!e.ok)
    {
      ++failed;
      err << "realization " << e.index << " failed: " << e.error << '\n';
    }
    for (const std::string& w : e.warnings)
      err << "realization " << e.index << ": warning: " << w << '\n';
  }
  out << "wrote " << m.digests.size() << " data files and manifest.json to "
      << cfg.outputs.directory << " (" << m.realizations.size() - failed << "/"
      << m.realizations.size() << " realizations ok)\n";
  return failed == 0 ? kExitOk : kExitRuntimeError;
}

int cmd_potential(const CommonFlags& f, std::ostream& out, std::ostream& err)
{
  const ExperimentConfig cfg = build_config(f);
  const GridPtr grid = make_grid(cfg.grid.nPoints, cfg.grid.halfExtent);
  SpeckleConfig speckle = cfg.speckle;
  speckle.seed = realization_seed(cfg.baseSeed, 0);
  const PotentialField pot = generate_potential(speckle, grid);
  for (const std::string& w : pot.warnings)
    err << "warning: " << w << '\n';

  const std::string text = csv::potential(pot);
  if (f.outDir)
  {
    std::filesystem::create_directories(*f.outDir);
    const auto path = std::filesystem::path(*f.outDir) / "potential_0.csv";
    std::ofstream file(path, std::ios::binary);
    file << text;
    if (!file)
      throw IoError("failed to write '" + path.string() + "'");
    const DisorderStats s = disorder_stats(pot, speckle, 4.0 * speckle.spikeWidth);
    out << "wrote " << path.string() << " (mean " << csv::format_real(s.meanV) << ", V_S "
        << csv::format_real(s.spikeHeight) << ")\n";
  }
  else
  {
    out << text;
  }
  return kExitOk;
}

int cmd_tailfit(const std::string& path, std::size_t smooth, double relLo, double relHi,
                std::ostream& out)
{
  const IntensityProfile profile = csv::parse_profile(csv::read_file(path));
  TailFitOptions opts;
  opts.smoothingWindow = smooth;
  opts.relLo = relLo;
  opts.relHi = relHi;
  const auto [left, right] = fit_tails(profile, opts);
  out << "side,slope,intercept,rms_residual,curvature_index,samples,window_inner,window_outer,"
         "localization_length,classification\n";
  for (const TailFit& t : {left, right})
  {
    out << to_string(t.side) << ',' << csv::format_real(t.slope) << ','
        << csv::format_real(t.intercept) << ',' << csv::format_real(t.rmsResidual) << ','
        << csv::format_real(t.curvatureIndex) << ',' << t.samples << ','
        << csv::format_real(t.windowInner) << ',' << csv::format_real(t.windowOuter) << ','
        << csv::format_real(t.localizationLength()) << ',' << to_string(t.classification) << '\n';
  }
  return kExitOk;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Kicked-wavepacket localization simulator (split-step kick/drift map)", "speckleloc"};
  app.footer(std::string("Environment:\n  ") + kWorkersEnv +
             "  worker threads for ensembles (default: hardware concurrency)\n"
             "Exit status: 0 success, 1 configuration error, 2 runtime error.");
  app.require_subcommand(1);

  CommonFlags runFlags;
  CommonFlags freeFlags;
  CommonFlags potFlags;
  auto* run = app.add_subcommand("run", "Run the disorder ensemble and write CSVs + manifest");
  add_common(run, runFlags, true);
  auto* free = app.add_subcommand("free", "Control run without potential (ballistic spreading)");
  add_common(free, freeFlags, true);
  auto* potential = app.add_subcommand("potential", "Emit one potential realization as x,V CSV");
  add_common(potential, potFlags, false);

  std::string profilePath;
  std::size_t smooth = 1;
  TailFitOptions defaults;
  double relLo = defaults.relLo;
  double relHi = defaults.relHi;
  auto* tailfit = app.add_subcommand("tailfit", "Fit exponential tails of a profile CSV");
  tailfit->add_option("profile", profilePath, "profile_r.csv file")->required();
  tailfit->add_option("--smooth", smooth, "Moving-average window on ln I (odd, 1 = raw)");
  tailfit->add_option("--rel-lo", relLo, "Lower window bound relative to peak");
  tailfit->add_option("--rel-hi", relHi, "Upper window bound relative to peak");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::CallForHelp& e)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::CallForAllHelp& e)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  }
  catch (const CLI::ParseError& e)
  {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }

  try
  {
    if (run->parsed())
    {
      const ExperimentConfig cfg = build_config(runFlags);
      return report_manifest(run_ensemble(cfg), cfg, out, err);
    }
    if (free->parsed())
    {
      ExperimentConfig cfg = build_config(freeFlags);
      cfg.disablePotential = true;
      return report_manifest(run_ensemble(cfg), cfg, out, err);
    }
    if (potential->parsed())
      return cmd_potential(potFlags, out, err);
    if (tailfit->parsed())
      return cmd_tailfit(profilePath, smooth, relLo, relHi, out);
  }
  catch (const ConfigError& e)
  {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitConfigError;
}

} // namespace speckleloc
