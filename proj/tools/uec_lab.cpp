#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "ueclab/report.hpp"

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ueclab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ueclab::NumericContractError& e) {
    std::cerr << "numeric contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uec-lab: equicontinuity analyses on truncated operator balls"};
  app.require_subcommand(1);

  std::string config_path, report_path, out_dir;

  auto* run = app.add_subcommand("run", "run the analyses of a config");
  run->add_option("config", config_path, "config JSON")->required();
  run->add_option("--out", out_dir, "output directory");

  auto* describe =
      app.add_subcommand("describe", "summarize the configured family");
  describe->add_option("config", config_path, "config JSON")->required();

  auto* curves =
      app.add_subcommand("curves", "emit curve CSVs from a report");
  curves->add_option("report", report_path, "report JSON")->required();
  curves->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return guarded([&] {
      auto cfg = ueclab::ExperimentConfig::parse_file(config_path);
      ueclab::json report = ueclab::run_experiment(cfg);
      std::string dir = !out_dir.empty() ? out_dir : cfg.out_dir;
      if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        std::ofstream os(dir + "/report.json");
        os << report.dump(2) << "\n";
        try {
          auto files = ueclab::emit_curves(report, dir);
          for (const auto& f : files) std::cout << "wrote " << f << "\n";
        } catch (const ueclab::ValidationError&) {
          // no curves in this report
        }
        std::cout << "wrote " << dir << "/report.json\n";
      } else {
        std::cout << report.dump(2) << "\n";
      }
      return 0;
    });
  }
  if (describe->parsed()) {
    return guarded([&] {
      auto cfg = ueclab::ExperimentConfig::parse_file(config_path);
      std::cout << ueclab::describe_family(cfg) << "\n";
      return 0;
    });
  }
  return guarded([&] {
    std::ifstream is(report_path);
    if (!is) throw ueclab::ValidationError("unreadable report " + report_path);
    ueclab::json report = ueclab::json::parse(is);
    auto files = ueclab::emit_curves(report, out_dir);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
  });
}
