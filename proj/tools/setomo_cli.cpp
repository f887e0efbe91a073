#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "setomo/errors.hpp"
#include "setomo/io.hpp"
#include "setomo/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int report_errors(const std::vector<std::string>& errors) {
  for (const auto& e : errors) std::cerr << "config-error: " << e << "\n";
  return kExitConfig;
}

int run(const std::string& scenario, const std::string& config_path, const std::optional<std::string>& out_dir,
        const std::optional<std::uint64_t>& seed) {
  setomo::ConfigReport rep = setomo::load_config(config_path);
  if (!rep.ok()) return report_errors(rep.errors);
  if (seed) rep.config.rng_seed = *seed;
  const auto errors = setomo::check_scenario(rep.config, scenario);
  if (!errors.empty()) return report_errors(errors);

  const setomo::ScenarioOutput out = setomo::run_scenario(rep.config, scenario);
  const std::filesystem::path dir = out_dir ? *out_dir : rep.config.output_dir;
  setomo::write_outputs(out, dir);
  std::cout << scenario << ": wrote " << out.files.size() << " files to " << dir.string() << "\n";
  return kExitOk;
}

int validate(const std::string& config_path) {
  const setomo::ConfigReport rep = setomo::load_config(config_path);
  if (!rep.ok()) return report_errors(rep.errors);
  std::cout << "ok\n" << setomo::dump_json(setomo::config_to_json(rep.config));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stimulated-emission tomography toolkit"};
  app.set_version_flag("--version", std::string(setomo::toolkit_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::string chosen;

  for (const auto& name : setomo::kScenarioNames) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "top-level RNG seed (overrides rng_seed)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI::App* val = app.add_subcommand("validate", "check a config and print its effective values");
  val->add_option("--config", config_path, "JSON config file")->required();
  val->callback([&chosen] { chosen = "validate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (chosen == "validate") return validate(config_path);
    return run(chosen, config_path, out_dir, seed);
  } catch (const setomo::Error& e) {
    std::cerr << setomo::error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == setomo::ErrorKind::kConfig ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
