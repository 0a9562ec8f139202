#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "biped/sim/scenario.hpp"

namespace {

// Exit codes: 0 run completed, 2 model fell, 1 any error.
constexpr int kExitFell = 2;

void apply_thread_cap() {
  if (const char* cap = std::getenv("BIPED_LAB_THREADS")) {
    const int n = std::atoi(cap);
    if (n > 0) omp_set_num_threads(std::min(n, omp_get_max_threads()));
  }
}

nlohmann::json* pointer_at(nlohmann::json& doc, const std::string& dotted) {
  nlohmann::json* cur = &doc;
  std::string part;
  std::istringstream ss(dotted);
  while (std::getline(ss, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) {
      (*cur)[part] = nullptr;
    }
    cur = &(*cur)[part];
  }
  return cur;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar bipedal locomotion lab: template and 5-link walking scenarios"};
  app.require_subcommand(1);
  apply_thread_cap();

  std::string config_path;
  std::string csv_override, metrics_override, out_path;
  std::string sweep_param;
  std::vector<double> sweep_values;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario and report metrics");
  run->add_option("config", config_path, "scenario JSON document")->required();
  run->add_option("--csv", csv_override, "override the CSV output path");
  run->add_option("--metrics", metrics_override, "override the metrics output path");

  CLI::App* analyze =
      app.add_subcommand("analyze", "Poincare fixed point, eigenvalues and DLQR gain");
  analyze->add_option("config", config_path, "scenario JSON document")->required();
  analyze->add_option("-o,--output", out_path, "write the analysis JSON here (default stdout)");
  bool parallel = false;
  analyze->add_flag("--parallel", parallel, "probe the Jacobians with OpenMP");

  CLI::App* sweep = app.add_subcommand("sweep", "batch runs over one scalar config field");
  sweep->add_option("config", config_path, "scenario JSON document")->required();
  sweep->add_option("--param", sweep_param, "dotted config path, e.g. gains.c")->required();
  sweep->add_option("--values", sweep_values, "values to substitute")->required()->expected(1, -1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      biped::sim::ScenarioConfig cfg = biped::sim::load_config(config_path);
      if (!csv_override.empty()) cfg.csv_path = csv_override;
      if (!metrics_override.empty()) cfg.metrics_path = metrics_override;
      const biped::sim::ScenarioResult result = biped::sim::run_scenario(cfg);
      std::cout << result.metrics.to_json().dump(2) << "\n";
      return result.metrics.fell ? kExitFell : 0;
    }

    if (analyze->parsed()) {
      const biped::sim::ScenarioConfig cfg = biped::sim::load_config(config_path);
      const nlohmann::json j = biped::sim::analyze_scenario(cfg, parallel);
      if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
        out << j.dump(2) << "\n";
      }
      return 0;
    }

    // sweep: one metrics line per value, input order, scenarios independent.
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
    nlohmann::json base;
    in >> base;

    std::vector<std::string> lines(sweep_values.size());
    std::vector<std::string> errors(sweep_values.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(sweep_values.size()); ++i) {
      try {
        nlohmann::json doc = base;
        *pointer_at(doc, sweep_param) = sweep_values[i];
        biped::sim::ScenarioConfig cfg = biped::sim::parse_config(doc);
        // Batch runs never share output files.
        cfg.csv_path.clear();
        cfg.metrics_path.clear();
        nlohmann::json m = biped::sim::run_scenario(cfg).metrics.to_json();
        m["param"] = sweep_param;
        m["value"] = sweep_values[i];
        m.erase("events");
        lines[i] = m.dump();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
    bool any_error = false;
    for (size_t i = 0; i < lines.size(); ++i) {
      if (!errors[i].empty()) {
        std::cerr << "value " << sweep_values[i] << ": " << errors[i] << "\n";
        any_error = true;
      } else {
        std::cout << lines[i] << "\n";
      }
    }
    return any_error ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
