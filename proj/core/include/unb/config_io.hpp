#ifndef UNB_CONFIG_IO_HPP
#define UNB_CONFIG_IO_HPP

#include <istream>
#include <optional>
#include <string>

#include "unb/model.hpp"
#include "unb/simulate.hpp"

namespace unb {

/// Everything a configuration file can set.
struct ExperimentConfig {
  NetworkConfig net;
  IncumbentConfig inc;
  ProtocolSpec proto;
  std::string protocol_name = "no-assoc";
  sim::SimConfig sim;
  double gamma = 0.98;   // capacity target
  double epsilon = 0.9;  // resource-bound target
  int n_max = 20;
};

/// Flat `key = value` text, `#` starts a comment, lists are comma separated.
/// dB-valued keys carry a `_db` or `_dbm` suffix. Densities may be given per
/// BS with a `_per_bs` suffix. Throws ConfigError listing every bad line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// A protocol by its command-line name: nearest, no-assoc, sigfox,
/// sigfox-nearest, benchmark, band-constrained, band-hopped; a `-pn` suffix
/// selects PN hopping. The sigfox names run on a single band.
struct NamedProtocol {
  std::string name;
  ProtocolSpec spec;
  bool single_band = false;
};

NamedProtocol parse_protocol(const std::string& name);

/// Scenario a protocol runs on: the single-band view for sigfox variants.
Scenario scenario_for(const Scenario& sc, const NamedProtocol& proto);

}  // namespace unb

#endif  // UNB_CONFIG_IO_HPP
