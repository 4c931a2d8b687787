// coordctl: command-line front end for the coordination-region toolkit.
//
// Subcommands:
//   region    sample auxiliary factorizations, emit inner-bound corners (JSONL)
//   outer     sample consistent joints, emit outer-bound corners (JSONL)
//   sumrate   encryptor output sum-rate curve over a (CSV)
//   rd        rate-distortion corner families D1/D2 (CSV)
//   simulate  Monte Carlo runs of the coding schemes (JSONL + summary CSV)
//   check     closed forms vs the generic corner evaluators
//
// COORDCTL_THREADS caps the worker count for parallel sections.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coordcap/harness.hpp"

namespace hn = coordcap::harness;
using coordcap::JointPmf;
using coordcap::json;

namespace {

JointPmf load_pmf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  in >> j;
  return coordcap::joint_pmf_from_json(j);
}

struct TargetOpts {
  std::string file;
  std::string inline_json;
  std::string preset;
  double agree = 0.7;
  double alpha = 0.2;

  void attach(CLI::App* cmd, bool with_preset = true) {
    auto* f = cmd->add_option("--target", file, "target pmf over (X,Y,Z), JSON file")
                  ->check(CLI::ExistingFile);
    auto* i = cmd->add_option("--target-json", inline_json, "target pmf over (X,Y,Z), inline JSON");
    f->excludes(i);
    if (with_preset) {
      auto* p = cmd->add_option("--preset", preset, "built-in target")
                    ->check(CLI::IsMember({"keydist"}));
      p->excludes(f)->excludes(i);
      cmd->add_option("--agree", agree, "preset: Pr(X=Y)")->check(CLI::Range(0.0, 1.0));
      cmd->add_option("--alpha", alpha, "preset: BSC parameter of p(u|x)")
          ->check(CLI::Range(0.0, 0.5));
    }
  }

  JointPmf resolve_target() const {
    if (!file.empty()) return load_pmf_file(file);
    if (!inline_json.empty()) return coordcap::joint_pmf_from_json(json::parse(inline_json));
    if (preset == "keydist") return hn::keydist_target(agree);
    throw CLI::ValidationError("target", "one of --target/--target-json/--preset is required");
  }

  json describe() const {
    if (!file.empty()) return json{{"target_file", file}};
    if (!inline_json.empty()) return json{{"target_json", json::parse(inline_json)}};
    return json{{"preset", preset}, {"agree", agree}, {"alpha", alpha}};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-alphabet coordination toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  // --- region ---
  auto* region = app.add_subcommand("region", "sample the inner-bound region cloud");
  TargetOpts region_target;
  region_target.attach(region);
  std::string region_sampler = "random";
  std::size_t region_samples = 10000;
  double region_step = 0.25, region_tol = 1e-3;
  std::uint64_t region_seed = 1;
  std::vector<std::size_t> aux_sizes = {2, 2, 2};
  std::string region_out = "region.jsonl";
  region->add_option("--sampler", region_sampler)->check(CLI::IsMember({"random", "grid"}));
  region->add_option("--samples", region_samples)->check(CLI::PositiveNumber);
  region->add_option("--grid-step", region_step)->check(CLI::Range(1e-6, 1.0));
  region->add_option("--tolerance", region_tol)->check(CLI::PositiveNumber);
  region->add_option("--seed", region_seed);
  region->add_option("--aux-sizes", aux_sizes, "|U|,|V|,|W|")->expected(3);
  region->add_option("--out", region_out);

  // --- outer ---
  auto* outer = app.add_subcommand("outer", "sample outer-bound corner points");
  TargetOpts outer_target;
  outer_target.attach(outer);
  std::size_t outer_samples = 1000;
  std::uint64_t outer_seed = 1;
  std::vector<std::size_t> outer_aux = {2, 2, 2};
  std::string outer_out = "outer.jsonl";
  outer->add_option("--samples", outer_samples)->check(CLI::PositiveNumber);
  outer->add_option("--seed", outer_seed);
  outer->add_option("--aux-sizes", outer_aux)->expected(3);
  outer->add_option("--out", outer_out);

  // --- sumrate ---
  auto* sumrate = app.add_subcommand("sumrate", "encryptor output sum-rate curve");
  std::string a_grid_spec = "0:0.5:0.005", alpha_grid_spec = "0:0.5:0.005";
  std::string sumrate_out = "sumrate.csv";
  sumrate->add_option("--a-grid", a_grid_spec);
  sumrate->add_option("--alpha-grid", alpha_grid_spec);
  sumrate->add_option("--out", sumrate_out);

  // --- rd ---
  auto* rd = app.add_subcommand("rd", "rate-distortion corner families D1/D2");
  double rd_a = 0.3, rd_D = 0.2;
  std::string rd_alpha_spec = "0:0.5:0.005", rd_d_spec = "0:0.5:0.005";
  std::string rd_out = "rd.csv";
  rd->add_option("--a", rd_a)->check(CLI::Range(0.0, 0.5));
  rd->add_option("--D", rd_D)->check(CLI::Range(0.0, 0.5));
  rd->add_option("--alpha-grid", rd_alpha_spec);
  rd->add_option("--d-grid", rd_d_spec);
  rd->add_option("--out", rd_out);

  // --- simulate ---
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of the coding schemes");
  std::string sim_joint6_file;
  std::string sim_preset = "keydist";
  double sim_agree = 0.7, sim_alpha = 0.2, sim_delta = 0.25, sim_epsilon = 0.35;
  int sim_scheme = 2;
  std::string sim_n_spec = "8,12,16";
  std::size_t sim_trials = 500;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "simout";
  simulate->add_option("--joint6", sim_joint6_file, "six-variable joint (X,Y,U,V,W,Z), JSON file")
      ->check(CLI::ExistingFile);
  simulate->add_option("--preset", sim_preset)->check(CLI::IsMember({"keydist"}));
  simulate->add_option("--agree", sim_agree, "preset: Pr(X=Y)")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--alpha", sim_alpha, "preset: BSC parameter of p(u|x)")
      ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--scheme", sim_scheme)->check(CLI::IsMember({1, 2}));
  simulate->add_option("--n", sim_n_spec, "comma-separated block lengths");
  simulate->add_option("--delta", sim_delta)->check(CLI::PositiveNumber);
  simulate->add_option("--epsilon", sim_epsilon)->check(CLI::PositiveNumber);
  simulate->add_option("--trials", sim_trials)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--out", sim_out, "output directory");

  // --- check ---
  auto* check = app.add_subcommand("check", "closed forms vs generic corner evaluators");
  std::size_t check_grid = 21;
  check->add_option("--grid-points", check_grid)->check(CLI::Range(std::size_t(2), std::size_t(201)));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*region) {
      hn::RegionConfig cfg{region_target.resolve_target(),
                           {aux_sizes[0], aux_sizes[1], aux_sizes[2]},
                           coordcap::RandomSampler{region_samples, region_seed},
                           region_tol,
                           region_out,
                           json{}};
      if (region_sampler == "grid") cfg.sampler = coordcap::GridSampler{region_step};
      cfg.resolved = region_target.describe();
      cfg.resolved["sampler"] = region_sampler;
      cfg.resolved["samples"] = region_samples;
      cfg.resolved["grid_step"] = region_step;
      cfg.resolved["tolerance"] = region_tol;
      cfg.resolved["seed"] = region_seed;
      cfg.resolved["aux_sizes"] = aux_sizes;
      const auto cloud = hn::run_region(cfg);
      std::cout << "region: " << cloud.size() << " corner points -> " << region_out << "\n";
    } else if (*outer) {
      hn::OuterConfig cfg{outer_target.resolve_target(),
                          {outer_aux[0], outer_aux[1], outer_aux[2]},
                          outer_samples,
                          outer_seed,
                          outer_out,
                          json{}};
      cfg.resolved = outer_target.describe();
      cfg.resolved["samples"] = outer_samples;
      cfg.resolved["seed"] = outer_seed;
      cfg.resolved["aux_sizes"] = outer_aux;
      const auto cloud = hn::run_outer(cfg);
      std::cout << "outer: " << cloud.size() << " corner points -> " << outer_out << "\n";
    } else if (*sumrate) {
      hn::SumrateConfig cfg{hn::parse_grid(a_grid_spec), hn::parse_grid(alpha_grid_spec),
                            sumrate_out,
                            json{{"a_grid", a_grid_spec}, {"alpha_grid", alpha_grid_spec}}};
      hn::run_sumrate(cfg);
      std::cout << "sumrate: " << cfg.a_grid.size() << " grid points -> " << sumrate_out << "\n";
    } else if (*rd) {
      hn::RdConfig cfg{rd_a,
                       rd_D,
                       hn::parse_grid(rd_alpha_spec),
                       hn::parse_grid(rd_d_spec),
                       rd_out,
                       json{{"a", rd_a},
                            {"D", rd_D},
                            {"alpha_grid", rd_alpha_spec},
                            {"d_grid", rd_d_spec}}};
      const auto records = hn::run_rd(cfg);
      std::cout << "rd: " << records.size() << " corner records -> " << rd_out << "\n";
    } else if (*simulate) {
      JointPmf joint6 = sim_joint6_file.empty() ? hn::keydist_joint6(sim_agree, sim_alpha)
                                                : load_pmf_file(sim_joint6_file);
      JointPmf target =
          coordcap::marginalize(joint6, coordcap::var_indices(joint6, {"X", "Y", "Z"}));
      hn::SimulateConfig cfg{std::move(joint6),
                             std::move(target),
                             sim_scheme == 1 ? coordcap::Scheme::r1 : coordcap::Scheme::r2,
                             hn::parse_int_list(sim_n_spec),
                             sim_delta,
                             sim_epsilon,
                             sim_trials,
                             sim_seed,
                             sim_out,
                             json{}};
      cfg.resolved = sim_joint6_file.empty()
                         ? json{{"preset", sim_preset}, {"agree", sim_agree}, {"alpha", sim_alpha}}
                         : json{{"joint6_file", sim_joint6_file}};
      cfg.resolved["scheme"] = sim_scheme;
      cfg.resolved["n"] = sim_n_spec;
      cfg.resolved["delta"] = sim_delta;
      cfg.resolved["epsilon"] = sim_epsilon;
      cfg.resolved["trials"] = sim_trials;
      cfg.resolved["seed"] = sim_seed;
      const auto out = hn::run_simulate(cfg);
      for (const auto& [n, summary] : out.per_n)
        std::cout << "simulate: n=" << n << " mean_tv=" << summary.mean_tv << "\n";
      std::cout << "simulate: wrote " << (std::filesystem::path(sim_out) / "trials.jsonl").string()
                << " and summary.csv\n";
    } else if (*check) {
      const auto lines = hn::run_check(check_grid);
      bool all_pass = true;
      for (const auto& line : lines) {
        std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << line.name
                  << " (max deviation " << line.max_deviation << ")";
        if (!line.note.empty()) std::cout << " -- " << line.note;
        std::cout << "\n";
        all_pass = all_pass && line.pass;
      }
      if (!all_pass) {
        json err{{"error", "consistency check failed"}, {"command", "check"}};
        std::cerr << err.dump() << "\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
