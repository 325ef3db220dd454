// Command line front end.
//
//   dlrfem run <config>
//   dlrfem study --axis spatial|temporal --levels L <config>
//   dlrfem presets list
//   dlrfem presets show <name>
//   dlrfem version
//
// Exit codes: 0 success, 1 I/O or internal error, 2 configuration or input
// error, 3 numerical failure.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dlrfem/config.hpp"
#include "dlrfem/errors.hpp"
#include "dlrfem/runner.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

int run_command(const std::string& path) {
  const dlrfem::RunConfig config = dlrfem::load_config(path);
  const dlrfem::RunSummary s = dlrfem::execute_run(config, std::cout);
  std::cout << "wrote " << (s.output_dir / "diagnostics.csv").string() << "\n";
  return 0;
}

int study_command(const std::string& path, const std::string& axis, int levels) {
  const dlrfem::RunConfig config = dlrfem::load_config(path);
  const dlrfem::RatesTable t =
      dlrfem::run_convergence_study(config, dlrfem::study_axis_from_string(axis), levels);
  const std::filesystem::path dir = dlrfem::resolve_output_dir(config);
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / "rates.csv");
  if (!f) throw std::runtime_error("cannot write " + (dir / "rates.csv").string());
  f << dlrfem::rates_csv(t);
  std::cout << dlrfem::rates_csv(t);
  if (t.exact) std::cout << "errors are at rounding level: the scheme is exact on this axis\n";
  else std::cout << "fitted order: " << t.slope << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank and full-rank mass-lumped FEM solvers for 2D Allen-Cahn equations"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a configuration and write diagnostics");
  run->add_option("config", config_path, "configuration file")->required();

  std::string axis;
  int levels = 4;
  auto* study = app.add_subcommand("study", "self-convergence study");
  study->add_option("--axis", axis, "spatial or temporal")->required();
  study->add_option("--levels", levels, "number of refinement levels (>= 3)");
  study->add_option("config", config_path, "configuration file")->required();

  auto* presets = app.add_subcommand("presets", "named experiment configurations");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "list preset names");
  std::string preset_name;
  auto* show = presets->add_subcommand("show", "print a preset as a configuration file");
  show->add_option("name", preset_name)->required();

  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_command(config_path);
    if (*study) return study_command(config_path, axis, levels);
    if (*presets) {
      if (presets->got_subcommand("list")) {
        for (const auto& n : dlrfem::preset_names())
          std::cout << n << "\t" << dlrfem::preset_description(n) << "\n";
      } else {
        std::cout << "preset = " << preset_name << "\n\n" << dlrfem::emit_config(dlrfem::preset(preset_name));
      }
      return 0;
    }
    std::cout << "dlrfem " << kVersion << "\n";
    return 0;
  } catch (const dlrfem::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const dlrfem::InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const dlrfem::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 2;
  } catch (const dlrfem::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
