#pragma once

#include <map>
#include <optional>
#include <string>

#include "carnotflow/game.hpp"
#include "carnotflow/grid.hpp"

namespace carnotflow {

struct OutputOptions {
  std::string dir = "out";
  int stride = 1;
  bool track_level_set = false;
  int n_rays = 32;
};

struct InitialDataSpec {
  std::string name = "constant";  // constant | quadratic-cylinder | capped-quadratic | smooth-bump
  double value = 0.0;
  double r0 = 0.0;
  double cap = 1.0;
  double amplitude = 1.0;
  double rho = 1.0;
  // C1 saturation half-width for the capped quadratics: 0 keeps the hard min,
  // w > 0 replaces the kink by a quadratic blend over [cap - w, cap + w].
  // Large gradients must stay below the game's eps^{-1/4} control bound or
  // Player I cannot price the junction.
  double blend = 0.0;
};

/// A full run description as read from one config file.
struct RunConfig {
  std::string group_name;
  std::string operator_name;
  GameConfig game;
  Vec box_lo, box_hi, box_h;
  InitialDataSpec data;
  OutputOptions output;

  // Deterministic key=value echo; hashing this gives the manifest content hash.
  std::string canonical() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

struct InitialDatum {
  std::function<double(const Vec&)> fn;
  double far_field = 0.0;
  std::optional<double> r0;  // set when a level-set radius is meaningful
};

InitialDatum make_initial_datum(const InitialDataSpec& spec, const GroupDescriptor& g);

// Exact zero-level radius law for this run, when one applies.
std::optional<double> exact_radius(const RunConfig& cfg, const GroupDescriptor& g, double t);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace carnotflow
