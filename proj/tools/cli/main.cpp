#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "unb/simulate.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::int64_t realizations = 0;
  unsigned workers = 0;
  std::vector<std::string> protocols;
  std::string var;
  std::string range;
  std::string dump;
  std::int64_t dump_limit = 10;
  bool exact_noise = false;
  std::vector<double> quantiles;
  double epsilon = -1.0;
  double gamma = -1.0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Configuration file (key = value)");
  cmd->add_option("--out", o.out, "Output CSV path (default: stdout)");
  cmd->add_option("--protocol", o.protocols, "Protocol name(s), comma separated")->delimiter(',');
  cmd->add_option("--var", o.var, "Sweep variable: tau_db, m, n, gamma, lambda_iot, lambda_iot_per_bs, lambda_i, lambda_i_per_bs");
  cmd->add_option("--range", o.range, "Sweep values: start:stop:step or v1,v2,...");
}

void add_sim(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--realizations", o.realizations, "Spatial realizations per point");
  cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultra-narrowband IoT network analysis and simulation"};
  app.require_subcommand(1);
  Options o;

  auto* analytic = app.add_subcommand("analytic", "Closed-form success probability or capacity");
  add_common(analytic, o);
  analytic->add_flag("--exact-noise", o.exact_noise, "Add quadrature rows with the noise term");
  analytic->add_option("--gamma", o.gamma, "Capacity target when not sweeping gamma");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo success probability");
  add_common(simulate, o);
  add_sim(simulate, o);
  simulate->add_option("--sinr-quantiles", o.quantiles, "Quantiles of the best SINR to report (dB)")
      ->delimiter(',');
  simulate->add_option("--dump", o.dump, "Write realizations as JSON lines to this path");
  simulate->add_option("--dump-limit", o.dump_limit, "Number of realizations to dump");

  auto* sweep = app.add_subcommand("sweep", "Analytic and Monte Carlo side by side");
  add_common(sweep, o);
  add_sim(sweep, o);

  auto* optimize = app.add_subcommand("optimize", "Repetition count, resource bound, band probabilities");
  add_common(optimize, o);
  optimize->add_option("--epsilon", o.epsilon, "Target success probability of the resource bound");

  CLI11_PARSE(app, argc, argv);

  unb::ExperimentConfig cfg;
  unb::cli::SweepSpec spec;
  try {
    if (!o.config.empty()) cfg = unb::load_config(o.config);
    if (o.seed != 0) cfg.sim.seed = o.seed;
    if (o.realizations > 0) cfg.sim.realizations = o.realizations;
    if (o.workers > 0) cfg.sim.workers = o.workers;
    if (o.epsilon >= 0.0) cfg.epsilon = o.epsilon;
    if (o.gamma >= 0.0) cfg.gamma = o.gamma;
    spec = unb::cli::make_sweep(cfg, o.var, o.range, o.protocols);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) {
      std::cerr << "error: cannot write " << o.out << '\n';
      return 2;
    }
    out = &file;
  }

  if (analytic->parsed()) return unb::cli::cmd_analytic(cfg, spec, {o.exact_noise}, *out, std::cerr);
  if (simulate->parsed()) {
    if (!o.dump.empty()) {
      std::ofstream dump(o.dump);
      if (!dump) {
        std::cerr << "error: cannot write " << o.dump << '\n';
        return 2;
      }
      try {
        const auto& proto = spec.protocols.front();
        unb::ProtocolSpec p = proto.spec;
        if (!cfg.proto.band_probs.empty()) p.band_probs = cfg.proto.band_probs;
        unb::sim::dump_realizations(unb::scenario_for(unb::make_scenario(cfg.net, cfg.inc), proto),
                                    p, cfg.sim, o.dump_limit, dump);
      } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
      }
    }
    return unb::cli::cmd_simulate(cfg, spec, {o.quantiles}, *out, std::cerr);
  }
  if (sweep->parsed()) return unb::cli::cmd_sweep(cfg, spec, *out, std::cerr);
  return unb::cli::cmd_optimize(cfg, spec, *out, std::cerr);
}
