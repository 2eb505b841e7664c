#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "warpcone/errors.hpp"
#include "warpcone/experiments.hpp"

using namespace warpcone;

namespace {

enum Exit { kPass = 0, kWindow = 1, kConfig = 2, kCapacity = 3 };

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nullptr;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

void print_summary(const ExperimentReport& r, std::ostream& out) {
  for (const auto& w : r.windows)
    out << (w.pass ? "pass " : "FAIL ") << r.preset << " [" << w.level << "] " << w.name << ": " << w.measured
        << " (" << w.bound << ", " << w.source << ")\n";
  out << r.preset << ": " << (r.passed() ? "all windows pass" : "window failure") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact warped-cone experiments"};
  std::string preset, config_path, out_dir = "out";
  RunOptions opt;
  bool quiet = false, show_config = false;
  app.add_option("preset", preset, "Experiment preset")->required()->check(CLI::IsMember(preset_names()));
  app.add_option("--config", config_path, "JSON config; missing keys take their defaults");
  app.add_option("--out", out_dir, "Output directory for <preset>.csv and <preset>.json");
  app.add_option("--depth", opt.depth, "Continued-fraction depth for irrational angles")->check(CLI::Range(2, 100000));
  app.add_option("--cap", opt.cap, "Group ball cap")->check(CLI::PositiveNumber);
  app.add_option("--workers", opt.workers, "Levels evaluated concurrently")->check(CLI::Range(1, 256));
  app.add_flag("--print-config", show_config, "Print the effective config and exit");
  app.add_flag("-q,--quiet", quiet, "Only the final status line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    auto config = load_config(config_path);
    if (show_config) {
      auto eff = default_config(preset);
      if (config.is_object())
        for (auto it = config.begin(); it != config.end(); ++it) eff[it.key()] = it.value();
      std::cout << eff.dump(2) << '\n';
      return kPass;
    }
    auto report = run_preset(preset, config, opt);
    write_report(report, out_dir);
    if (quiet)
      std::cout << preset << ": " << (report.passed() ? "pass" : "window failure") << '\n';
    else
      print_summary(report, std::cout);
    return report.passed() ? kPass : kWindow;
  } catch (const CapacityError& e) {
    std::cerr << "warpcone " << preset << ": capacity: " << e.what() << '\n';
    return kCapacity;
  } catch (const ValidationError& e) {
    std::cerr << "warpcone " << preset << ": invalid config: " << e.what() << '\n';
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "warpcone " << preset << ": " << e.what() << '\n';
    return kConfig;
  } catch (const UndecidableError& e) {
    std::cerr << "warpcone " << preset << ": undecidable at this depth: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "warpcone " << preset << ": " << e.what() << '\n';
    return kWindow;
  }
}
