/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

// ddvar <subcommand> [args]
//
//   run <config>                            one experiment, method from the config
//   compare <config>                        forces method = compare
//   check                                   built-in property suite
//   sweep <config> --key k --values a,b,c   one output directory per value
//
// DDVAR_THREADS caps the number of worker threads used for subdomain solves.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddvar/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Domain-decomposed 3D-Var on a 1-D grid: global, DD-DA and parallel Schwarz solves"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "key = value config file")->required();

  auto* compare = app.add_subcommand("compare", "Compare DD-DA and MPS on a config (method = compare)");
  compare->add_option("config", config_path, "key = value config file")->required();

  app.add_subcommand("check", "Run the built-in property suite on small configurations");

  std::string sweep_key;
  std::vector<std::string> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over values of one config key");
  sweep->add_option("config", config_path, "key = value config file")->required();
  sweep->add_option("--key", sweep_key, "config key to vary")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    ddvar::RunOptions run_opts;
    run_opts.threads = ddvar::threads_from_env();

    if (app.got_subcommand("check")) return ddvar::run_property_checks(std::cout, run_opts) ? 0 : 1;

    ddvar::ExperimentConfig cfg = ddvar::load_config(config_path);
    if (app.got_subcommand("compare")) cfg.method = ddvar::ExperimentMethod::Compare;
    if (app.got_subcommand("sweep"))
      return ddvar::run_sweep(cfg, sweep_key, sweep_values, run_opts, std::cout, std::cerr);
    return ddvar::run_experiment(cfg, run_opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "ddvar: " << e.what() << '\n';
    return 1;
  }
}
