#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <string>

#include "mrl/harness.hpp"

namespace {

void usage() {
  std::fprintf(stderr,
               "usage: mrl <run|sweep|containment|eluder|diagnostics> --config PATH\n"
               "           [--seed N] [--out DIR] [--workers N] [--svg|--no-svg]\n"
               "\n"
               "  run          execute the experiment described by the config\n"
               "  sweep        same, honoring sweep_M / sweep_T lists\n"
               "  containment  Monte-Carlo containment frequency of the truth\n"
               "  eluder       eluder dimensions of a configured scalar class\n"
               "  diagnostics  bonus-vs-error scatter and representation kernel\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage();
    return 1;
  }
  const std::string command = argv[1];
  std::string config_path;
  std::string out_override;
  std::string seed_override;
  std::string workers_override;
  int svg_override = -1;

  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    auto need_value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "mrl: %s needs a value\n", flag);
        std::exit(1);
      }
      return argv[++i];
    };
    if (arg == "--config") config_path = need_value("--config");
    else if (arg == "--seed") seed_override = need_value("--seed");
    else if (arg == "--out") out_override = need_value("--out");
    else if (arg == "--workers") workers_override = need_value("--workers");
    else if (arg == "--svg") svg_override = 1;
    else if (arg == "--no-svg") svg_override = 0;
    else if (arg == "--help" || arg == "-h") {
      usage();
      return 0;
    } else {
      std::fprintf(stderr, "mrl: unknown flag '%s'\n", arg.c_str());
      return 1;
    }
  }

  try {
    if (config_path.empty()) throw std::runtime_error("--config PATH is required");
    mrl::harness::ExperimentConfig cfg = mrl::harness::parse_config_file(config_path);
    if (!seed_override.empty()) cfg.seed = std::stoull(seed_override);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!workers_override.empty()) cfg.workers = std::stoi(workers_override);
    if (svg_override >= 0) cfg.svg = svg_override == 1;

    if (command == "run") {
      mrl::harness::run_experiment(cfg);
    } else if (command == "sweep") {
      if (cfg.sweep_tasks.empty() && cfg.sweep_horizon.empty())
        throw std::runtime_error("sweep: config needs sweep_M or sweep_T");
      mrl::harness::run_experiment(cfg);
    } else if (command == "containment") {
      cfg.kind = "bandit";
      mrl::harness::validate(cfg);
      const double freq = mrl::harness::containment_monte_carlo(cfg, cfg.n_seeds);
      std::filesystem::create_directories(cfg.out_dir);
      mrl::harness::write_csv(cfg.out_dir + "/summary.csv",
                              {"metric", "M", "T", "delta", "n_runs", "value"},
                              {{"containment_frequency", std::to_string(cfg.num_tasks),
                                std::to_string(cfg.horizon),
                                mrl::harness::format_double(cfg.delta),
                                std::to_string(cfg.n_seeds),
                                mrl::harness::format_double(freq)}});
      std::printf("containment_frequency %s\n", mrl::harness::format_double(freq).c_str());
    } else if (command == "eluder") {
      cfg.kind = "eluder";
      mrl::harness::run_experiment(cfg);
    } else if (command == "diagnostics") {
      cfg.kind = "diagnostics";
      mrl::harness::run_experiment(cfg);
    } else {
      usage();
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mrl: %s\n", e.what());
    return 1;
  }
  return 0;
}
