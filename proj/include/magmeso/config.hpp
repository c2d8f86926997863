#pragma once

#include <string>
#include <vector>

#include "magmeso/core.hpp"
#include "magmeso/elliptic.hpp"
#include "magmeso/increment.hpp"

namespace magmeso {

struct DictionaryOptions {
  int n1d = 33;
  int angles = 12;
  int radii = 9;
};

struct RunOptions {
  unsigned seed = 0;
  int snapshot_every = 0;  // 0: initial and final snapshots only
  bool isothermal = false; // skip the heat step and keep theta frozen
  bool semistability = true;  // audit semistability when a projector is configured
  // kappa_sweep
  std::vector<double> kappa_ladder;
  // tau_study
  int tau_levels = 5;
  double tau_coarse = 0.0;  // 0: T_end/25
  int checkpoints = 5;
  // hysteresis: the last `period` of the schedule is the measured cycle
  double period = 0.0;
  // curie_sweep
  std::vector<double> theta_values;
};

struct Config {
  Grid grid;
  Material mat;
  Schedule schedule;
  double theta0 = 0.5;  // uniform initial temperature
  IncrementOptions inc;
  DictionaryOptions dict;
  EllipticOptions elliptic;
  RunOptions run;
};

// Parses the JSON text; throws ConfigError on malformed input or invalid values.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
// Throws ConfigError listing every violated condition.
void validate_config(const Config& cfg);

Dictionary make_dictionary(const Config& cfg);

}  // namespace magmeso
