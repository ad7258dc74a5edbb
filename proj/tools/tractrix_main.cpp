#include "tractrix/harness/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using tractrix::harness::Config;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->required();
  cmd->add_option("--seed", o.seed, "random seed (overrides the config)");
  cmd->add_option("--delta", o.delta, "partition step (overrides the config)");
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
}

Config load(const Options& o) {
  Config c = Config::load(o.config);
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  if (o.delta) c.set("delta", tractrix::format_double(*o.delta));
  if (o.out) c.set("out", *o.out);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  namespace h = tractrix::harness;
  CLI::App app{"Tractrix flows and short retractions in CAT(1) spaces"};
  app.require_subcommand(1);
  Options opt;
  auto* run = app.add_subcommand("run", "tractrix flow: trajectory, convergence table, plot");
  auto* retract = app.add_subcommand("retract", "retraction pipeline: Lipschitz report and fixed-point table");
  auto* flow = app.add_subcommand("flow", "gradient flow: EVI and distance-estimate reports");
  auto* verify = app.add_subcommand("verify-all", "full acceptance suite and run manifest");
  for (auto* c : {run, retract, flow, verify}) add_common(c, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return h::kUsage;
  }

  try {
    const Config cfg = load(opt);
    if (*run) return h::cmd_run(cfg);
    if (*retract) return h::cmd_retract(cfg);
    if (*flow) return h::cmd_flow(cfg);
    return h::cmd_verify_all(cfg);
  } catch (const tractrix::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n  witness: " << e.witness() << '\n';
    return h::kPrecondition;
  } catch (const tractrix::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return h::kUsage;
  } catch (const tractrix::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return h::kUsage;
  } catch (const tractrix::DomainError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return h::kPrecondition;
  } catch (const tractrix::NonUniqueGeodesicError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return h::kPrecondition;
  } catch (const tractrix::CapabilityError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return h::kUsage;
  } catch (const tractrix::ConsistencyError& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return h::kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kUsage;
  }
}
