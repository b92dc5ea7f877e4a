// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adaptkit/alloc_hooks.hpp"
#include "commands.hpp"

namespace {

using namespace adaptkit;
using namespace adaptkit::cli;

void add_processor_flags(CLI::App* cmd, ProcessorOptions& p) {
  cmd->add_option("--builtin", p.builtin, "identity | gain | clipper | delayline:N | tcn (| all for bench)");
  cmd->add_option("--bundle", p.bundle, "Bundle file to load instead of a builtin");
  cmd->add_option("--channels", p.channels, "Processor channel count (1 or 2)");
  cmd->add_option("--model-size", p.model_sizes, "Native model buffer sizes (default any)")->delimiter(',');
  cmd->add_option("--model-rate", p.model_rates, "Native model sample rates (default any)")->delimiter(',');
  cmd->add_option("--resampler", p.resampler, "hermite | linear");
}

std::pair<std::int64_t, std::int64_t> parse_rate_pair(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--rates", "expected host:model, got '" + s + "'");
  return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream adaptation toolkit: render, simulate, tabulate delays, benchmark, bundle"};
  app.require_subcommand(1);

  RenderOptions render;
  auto* r = app.add_subcommand("render", "Process a WAV file through a wrapped processor");
  add_processor_flags(r, render.processor);
  r->add_option("--in", render.in_path, "Input WAV")->required();
  r->add_option("--out", render.out_path, "Output WAV (32-bit float)")->required();
  r->add_option("--rate", render.rate, "Host sample rate to run at (default: input file rate)");
  r->add_option("--buffer", render.buffer, "Host buffer size");
  r->add_option("--param", render.params, "Parameter assignment name=value (repeatable)");
  r->add_option("--seed", render.seed, "Seed (printed for reproducibility)");

  SimulateOptions sim;
  std::size_t sim_fixed = 512;
  std::string sim_walk;
  std::vector<std::size_t> sim_script;
  std::vector<std::string> sim_events;
  std::int64_t sim_rate = 48000;
  auto* s = app.add_subcommand("simulate", "Drive the wrapper through a host buffer-size schedule");
  add_processor_flags(s, sim.processor);
  s->add_option("--rate", sim_rate, "Host sample rate");
  s->add_option("--host-channels", sim.scenario.channels, "Host channel count");
  auto* fixed_opt = s->add_option("--buffer", sim_fixed, "Fixed host buffer size");
  auto* walk_opt = s->add_option("--random-walk", sim_walk, "Random-walk sizes MIN:MAX");
  auto* script_opt = s->add_option("--script", sim_script, "Comma-separated buffer sizes, cycled")->delimiter(',');
  fixed_opt->excludes(walk_opt)->excludes(script_opt);
  walk_opt->excludes(script_opt);
  s->add_option("--callbacks", sim.scenario.callbacks, "Number of host callbacks");
  s->add_option("--reconfigure", sim_events, "Event callback:rate[:size] (repeatable)");
  s->add_option("--seed", sim.scenario.seed, "Seed for the schedule and test signal");
  s->add_flag("--verify", sim.verify, "Check bit-exact delayed identity per segment");

  DelayTableOptions table;
  std::vector<std::string> table_rates;
  auto* t = app.add_subcommand("delay-table", "Print reported delay for size and rate combinations");
  t->add_option("--model-sizes", table.model_sizes, "Model buffer sizes")->delimiter(',');
  t->add_option("--host-sizes", table.host_sizes, "Host buffer sizes")->delimiter(',');
  t->add_option("--rates", table_rates, "Rate pairs host:model")->delimiter(',');
  t->add_option("--resampler", table.resampler, "hermite | linear");
  t->add_option("--format", table.format, "text | csv");
  t->add_option("--seed", table.seed, "Seed (printed for reproducibility)");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Real-time factor, latency, and allocation benchmarks");
  add_processor_flags(b, bench.processor);
  b->add_flag("--rtf", bench.rtf, "Measure real-time factor");
  b->add_flag("--latency", bench.latency, "Compare reported and measured delay");
  b->add_flag("--alloc", bench.alloc, "Count allocations inside process_buffer");
  b->add_option("--rates", bench.rates, "Host sample rates")->delimiter(',');
  b->add_option("--buffers", bench.buffers, "Host buffer sizes")->delimiter(',');
  b->add_option("--duration", bench.duration_s, "Seconds of audio per RTF run");
  b->add_option("--runs", bench.runs, "RTF runs (median reported)");
  b->add_option("--alloc-buffers", bench.alloc_buffers, "Buffers per allocation audit");
  b->add_option("--seed", bench.seed, "Seed (printed for reproducibility)");

  InspectOptions inspect;
  auto* i = app.add_subcommand("inspect", "Validate and print a bundle");
  i->add_option("--bundle", inspect.bundle, "Bundle file")->required();
  i->add_option("--seed", inspect.seed, "Seed (printed for reproducibility)");

  ExportOptions exp;
  auto* e = app.add_subcommand("export", "Write a builtin processor as a bundle");
  add_processor_flags(e, exp.processor);
  e->add_option("--out", exp.out_path, "Bundle file to write")->required();
  e->add_option("--example", exp.example_inputs, "Example input WAV, rendered and stored (repeatable)");
  e->add_option("--buffer", exp.buffer, "Host buffer size used to render examples");
  e->add_option("--seed", exp.seed, "Seed (printed for reproducibility)");

  try {
    app.parse(argc, argv);
    if (!table_rates.empty()) table.rates.clear();
    for (const auto& pair : table_rates) table.rates.push_back(parse_rate_pair(pair));
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kConfigError;
  }

  if (*r) return cmd_render(render, std::cout, std::cerr);
  if (*s) {
    return guarded(std::cerr, [&] {
      sim.scenario.f_daw = SampleRate(sim_rate);
      if (!sim_walk.empty()) {
        const auto colon = sim_walk.find(':');
        if (colon == std::string::npos) fail(ErrorKind::InvalidConfig, "--random-walk expects MIN:MAX");
        sim.scenario.schedule = RandomWalkSchedule{std::stoull(sim_walk.substr(0, colon)),
                                                   std::stoull(sim_walk.substr(colon + 1)), sim.scenario.seed};
      } else if (!sim_script.empty()) {
        sim.scenario.schedule = ScriptSchedule{sim_script};
      } else {
        sim.scenario.schedule = FixedSchedule{sim_fixed};
      }
      for (const auto& ev : sim_events) sim.scenario.events.push_back(parse_reconfigure(ev));
      return cmd_simulate(sim, std::cout, std::cerr);
    });
  }
  if (*t) return cmd_delay_table(table, std::cout, std::cerr);
  if (*b) return cmd_bench(bench, std::cout, std::cerr);
  if (*i) return cmd_inspect(inspect, std::cout, std::cerr);
  if (*e) return cmd_export(exp, std::cout, std::cerr);
  return kConfigError;
}
