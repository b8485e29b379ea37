#ifndef UNB_CLI_COMMANDS_HPP
#define UNB_CLI_COMMANDS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "unb/config_io.hpp"

namespace unb::cli {

/// Variables a sweep can range over.
enum class Variable { TauDb, Bands, Repetitions, Gamma, DeviceDensity, DevicesPerBs, IncumbentDensity, IncumbentPerBs };

struct SweepSpec {
  std::optional<Variable> variable;  // empty: a single point at the config values
  std::vector<double> values;
  std::vector<NamedProtocol> protocols;
};

Variable parse_variable(const std::string& name);
const char* to_string(Variable v);

/// "a:b:step" (inclusive, tolerant to rounding) or "v1,v2,...".
std::vector<double> parse_range(const std::string& text);

/// Builds a sweep; an empty protocol list falls back to the config's protocol.
SweepSpec make_sweep(const ExperimentConfig& cfg, const std::string& variable,
                     const std::string& range, const std::vector<std::string>& protocols);

/// The config with the sweep variable set to x. Gamma leaves it unchanged.
ExperimentConfig apply(const ExperimentConfig& cfg, Variable var, double x);

struct AnalyticOptions {
  bool exact_noise = false;  // add quadrature rows with the noise term kept
};

struct SimulateOptions {
  std::vector<double> sinr_quantiles;  // extra rows: quantiles of the best SINR, dB
};

/// Each command writes CSV with a header row and returns the process exit code.
int cmd_analytic(const ExperimentConfig& cfg, const SweepSpec& sweep, const AnalyticOptions& opts,
                 std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentConfig& cfg, const SweepSpec& sweep, const SimulateOptions& opts,
                 std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep, std::ostream& out,
              std::ostream& err);
int cmd_optimize(const ExperimentConfig& cfg, const SweepSpec& sweep, std::ostream& out,
                 std::ostream& err);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double x);

}  // namespace unb::cli

#endif  // UNB_CLI_COMMANDS_HPP
