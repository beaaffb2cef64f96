#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tdscat/errors.hpp"
#include "tdscat/scenario.hpp"

using namespace tdscat;

int main(int argc, char** argv) {
  CLI::App app{"Scattering of wave packets off time-dependent barriers"};
  std::string config_path, preset_name, out_dir;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--preset", preset_name, "fig2, fig3 or fig4")->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  app.add_option("--set", sets, "key=value override (repeatable, applied last)")->allow_extra_args(false);
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = preset_name.empty() ? RunConfig{} : preset(preset_name);
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    for (const auto& s : sets) apply_assignment(cfg, s);
    if (!out_dir.empty()) cfg.out = out_dir;

    std::cout << "# resolved configuration\n" << format_config(cfg) << std::flush;
    const ScenarioOutput out = run_scenario(cfg, std::cout);
    for (const auto& f : out.files) std::cout << "wrote " << (cfg.out / f).string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
