#include "speckleloc/config.hpp"

#include "speckleloc/errors.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace speckleloc
{

namespace
{

using json = nlohmann::json;

/// Pulls typed fields out of one JSON object and remembers which keys were
/// used so that leftovers can be reported as unknown.
class Section
{
public:
  Section(const json& node, std::string path) : mNode(node), mPath(std::move(path))
  {
    if (!mNode.is_object())
      throw ConfigError(label() + ": expected an object");
  }

  void real(const char* key, double& out)
  {
    if (const json* v = take(key))
    {
      if (!v->is_number())
        throw ConfigError(field(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out))
        throw ConfigError(field(key) + ": must be finite");
    }
  }

  template <typename Unsigned>
  void count(const char* key, Unsigned& out)
  {
    if (const json* v = take(key))
    {
      if (v->is_number_unsigned())
        out = static_cast<Unsigned>(v->get<std::uint64_t>());
      else if (v->is_number_integer() && v->get<std::int64_t>() >= 0)
        out = static_cast<Unsigned>(v->get<std::int64_t>());
      else if (v->is_number_float() && v->get<double>() >= 0 &&
               v->get<double>() == std::floor(v->get<double>()) &&
               v->get<double>() <= static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
        out = static_cast<Unsigned>(v->get<double>());
      else
        throw ConfigError(field(key) + ": expected a non-negative integer");
    }
  }

  void integer(const char* key, int& out)
  {
    if (const json* v = take(key))
    {
      if (!v->is_number_integer())
        throw ConfigError(field(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const char* key, bool& out)
  {
    if (const json* v = take(key))
    {
      if (!v->is_boolean())
        throw ConfigError(field(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out)
  {
    if (const json* v = take(key))
    {
      if (!v->is_string())
        throw ConfigError(field(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  /// Nested section, or nullptr when the key is absent.
  const json* child(const char* key) { return take(key); }

  std::string field(const char* key) const { return mPath.empty() ? key : mPath + "." + key; }

  void finish() const
  {
    for (const auto& item : mNode.items())
      if (!mUsed.count(item.key()))
        throw ConfigError(field(item.key().c_str()) + ": unknown key");
  }

private:
  std::string label() const { return mPath.empty() ? "config" : mPath; }

  const json* take(const char* key)
  {
    mUsed.insert(key);
    const auto it = mNode.find(key);
    return it == mNode.end() ? nullptr : &*it;
  }

  const json& mNode;
  std::string mPath;
  std::set<std::string> mUsed;
};

} // namespace

void validate(const ExperimentConfig& config)
{
  if (config.grid.nPoints < 2 || (config.grid.nPoints & (config.grid.nPoints - 1)) != 0)
    throw ConfigError("grid.n_points: must be a power of two >= 2");
  if (!(config.grid.halfExtent > 0.0))
    throw ConfigError("grid.half_extent: must be positive");

  if (!(config.speckle.spikeWidth > 0.0))
    throw ConfigError("speckle.spike_width: must be positive");
  if (!(config.speckle.spikeExtent > 0.0))
    throw ConfigError("speckle.spike_extent: must be positive");
  if (config.speckle.spikeExtent > config.grid.halfExtent)
    throw ConfigError("speckle.spike_extent: must not exceed grid.half_extent");

  if (!(config.inputBeam.sigma0 > 0.0))
    throw ConfigError("input_beam.sigma0: must be positive");
  if (config.inputBeam.center < -config.grid.halfExtent ||
      config.inputBeam.center >= config.grid.halfExtent)
    throw ConfigError("input_beam.center: must lie inside the grid");

  validate(config.evolution);

  if (!config.allowDtMismatch && config.evolution.dt != config.evolution.driftDistance)
    throw ConfigError("evolution.dt: must equal evolution.drift_distance (z plays the role of "
                      "time); set allow_dt_mismatch to override");
}

ExperimentConfig load_config(std::string_view document)
{
  ExperimentConfig cfg;
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos)
  {
    validate(cfg);
    return cfg;
  }

  json root;
  try
  {
    root = json::parse(document);
  }
  catch (const json::parse_error& e)
  {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }

  Section top(root, "");
  if (const json* node = top.child("grid"))
  {
    Section s(*node, "grid");
    s.count("n_points", cfg.grid.nPoints);
    s.real("half_extent", cfg.grid.halfExtent);
    s.finish();
  }
  if (const json* node = top.child("speckle"))
  {
    Section s(*node, "speckle");
    s.count("n_spikes", cfg.speckle.nSpikes);
    s.real("spike_strength", cfg.speckle.spikeStrength);
    s.real("spike_width", cfg.speckle.spikeWidth);
    s.real("spike_extent", cfg.speckle.spikeExtent);
    s.finish();
  }
  if (const json* node = top.child("input_beam"))
  {
    Section s(*node, "input_beam");
    s.real("sigma0", cfg.inputBeam.sigma0);
    s.real("center", cfg.inputBeam.center);
    s.finish();
  }
  if (const json* node = top.child("evolution"))
  {
    Section s(*node, "evolution");
    s.real("wavenumber", cfg.evolution.wavenumber);
    s.real("drift_distance", cfg.evolution.driftDistance);
    s.count("kick_count", cfg.evolution.kickCount);
    s.real("dt", cfg.evolution.dt);
    s.integer("kick_sign", cfg.evolution.kickSign);
    s.real("loss_per_kick", cfg.evolution.lossPerKick);
    s.count("record_stride", cfg.evolution.recordStride);
    s.finish();
  }
  top.count("base_seed", cfg.baseSeed);
  top.count("n_realizations", cfg.nRealizations);
  if (const json* node = top.child("outputs"))
  {
    Section s(*node, "outputs");
    s.string("directory", cfg.outputs.directory);
    s.boolean("observables", cfg.outputs.observables);
    s.boolean("profiles", cfg.outputs.profiles);
    s.boolean("potentials", cfg.outputs.potentials);
    s.boolean("ensemble", cfg.outputs.ensemble);
    s.finish();
  }
  top.boolean("disable_potential", cfg.disablePotential);
  top.boolean("allow_dt_mismatch", cfg.allowDtMismatch);
  top.finish();

  validate(cfg);
  return cfg;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c)
{
  nlohmann::ordered_json j;
  j["grid"] = {{"n_points", c.grid.nPoints}, {"half_extent", c.grid.halfExtent}};
  j["speckle"] = {{"n_spikes", c.speckle.nSpikes},
                  {"spike_strength", c.speckle.spikeStrength},
                  {"spike_width", c.speckle.spikeWidth},
                  {"spike_extent", c.speckle.spikeExtent}};
  j["input_beam"] = {{"sigma0", c.inputBeam.sigma0}, {"center", c.inputBeam.center}};
  j["evolution"] = {{"wavenumber", c.evolution.wavenumber},
                    {"drift_distance", c.evolution.driftDistance},
                    {"kick_count", c.evolution.kickCount},
                    {"dt", c.evolution.dt},
                    {"kick_sign", c.evolution.kickSign},
                    {"loss_per_kick", c.evolution.lossPerKick},
                    {"record_stride", c.evolution.recordStride}};
  j["base_seed"] = c.baseSeed;
  j["n_realizations"] = c.nRealizations;
  j["outputs"] = {{"directory", c.outputs.directory},
                  {"observables", c.outputs.observables},
                  {"profiles", c.outputs.profiles},
                  {"potentials", c.outputs.potentials},
                  {"ensemble", c.outputs.ensemble}};
  j["disable_potential"] = c.disablePotential;
  j["allow_dt_mismatch"] = c.allowDtMismatch;
  return j;
}

} // namespace speckleloc
