#include "app.hpp"

#include <iostream>
#include <new>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "ttsketch/errors.hpp"

namespace ttsketch::cli {

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void add_generator_flags(CLI::App& app, GenOptions& g) {
  app.add_option("--family", g.family, "tt-noise | tt-snr | func-sin | func-hilbert");
  app.add_option("--dims", g.dims, "Extents for tt-* families, e.g. 20,20,20,20,20");
  app.add_option("--core-ranks", g.core_ranks, "TT ranks of the signal cores, e.g. 5,5,5,5");
  app.add_option("--gamma", g.gamma, "Relative noise level (tt-noise)");
  app.add_option("--snr-db", g.snr_db, "Signal-to-noise ratio in dB (tt-snr)");
  app.add_option("--extent", g.extent, "Grid size per mode for func-* families (default 40)");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Randomized tensor-train decompositions: data generation, decomposition, benchmarks"};
  app.require_subcommand(1);

  GenOptions gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a test tensor and write it as DNT1");
  add_generator_flags(*gen_cmd, gen);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen_out, "Output DNT1 path")->required();

  DecomposeOptions dec;
  auto* dec_cmd = app.add_subcommand("decompose", "Decompose a DNT1 tensor and report one CSV line");
  dec_cmd->add_option("--method", dec.method, "tt-svd | tt-svd-rank | rand | rand-gram | greedy | adaptive")
      ->required();
  dec_cmd->add_option("--in", dec.in, "Input DNT1 path")->required();
  dec_cmd->add_option("--out", dec.out, "Output TTC1 path");
  dec_cmd->add_option("--ranks", dec.ranks, "Target TT ranks, e.g. 4,4,4,4");
  dec_cmd->add_option("--eps", dec.eps, "Relative accuracy in (0, 1)");
  dec_cmd->add_option("--oversample", dec.oversample, "Extra sketch columns R (default 10)");
  dec_cmd->add_option("--power", dec.power, "Power iterations q (default 0; 1 for rand-gram)");
  dec_cmd->add_option("--block", dec.block, "Adaptive block size b (default 10)");
  dec_cmd->add_option("--sketch", dec.sketch, "gaussian | kr-gaussian | kron-gaussian | spemb | sdct");
  dec_cmd->add_option("--seed", dec.seed, "Sketch seed");
  dec_cmd->add_option("--report", dec.report, "Write the CSV report here instead of stdout");
  dec_cmd->add_flag("--verify", dec.verify, "Contract the result and report the relative error");
  dec_cmd->add_option("--verify-budget", dec.verify_budget, "Largest tensor (entries) --verify will contract");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep one parameter and emit one CSV row per run");
  add_generator_flags(*bench_cmd, bench.data);
  bench_cmd->add_option("--in", bench.in, "Input DNT1 path instead of a generator");
  bench_cmd->add_option("--ranks-sweep", bench.ranks_sweep, "Uniform ranks mu, e.g. 2:20:2 or 2,4,8");
  bench_cmd->add_option("--eps-sweep", bench.eps_sweep, "Accuracies, e.g. 1e-1,1e-2");
  bench_cmd->add_option("--snr-sweep", bench.snr_sweep, "SNR values in dB for tt-snr data, e.g. -30:30:5");
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods (default rand)");
  bench_cmd->add_option("--powers", bench.powers, "Comma-separated q values (default 0)");
  bench_cmd->add_option("--sketches", bench.sketches, "Comma-separated sketch kinds (default gaussian)");
  bench_cmd->add_option("--ranks", bench.ranks, "Fixed ranks for rank methods in an SNR sweep");
  bench_cmd->add_option("--eps", bench.eps, "Fixed eps for eps methods in an SNR sweep");
  bench_cmd->add_option("--oversample", bench.oversample, "Extra sketch columns R (default 10)");
  bench_cmd->add_option("--block", bench.block, "Adaptive block size b (default 10)");
  bench_cmd->add_option("--trials", bench.trials, "Repetitions per point; trial t uses seed + t");
  bench_cmd->add_flag("--aggregate", bench.aggregate, "Emit per-point mean and std instead of rows");
  bench_cmd->add_flag("--parallel-trials", bench.parallel_trials,
                      "Run trials concurrently (capped by TT_SKETCH_THREADS)");
  bench_cmd->add_option("--seed", bench.seed, "Base seed for data and sketches");
  bench_cmd->add_option("--report", bench.report, "Write CSV here instead of stdout");
  bench_cmd->add_option("--verify-budget", bench.verify_budget, "Largest tensor (entries) to contract for RE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == gen_cmd) {
      cmd_gen(gen, gen_out, std::cout);
    } else if (active == dec_cmd) {
      cmd_decompose(dec, std::cout);
    } else {
      cmd_bench(bench, std::cout);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace ttsketch::cli
