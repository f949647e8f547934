// banditlab: synthetic-instance generators, experiment runner, design
// inspection, pure-exploration model selection, and active learning with
// abstention behind one CLI.

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "banditlab/al_abstain.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/parallel.hpp"
#include "banditlab/pe_select.hpp"
#include "banditlab/spanner.hpp"

using namespace banditlab;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void apply_config(const std::string& path, harness::ExperimentConfig& cfg) {
  if (path.empty()) return;
  for (const auto& [k, v] : harness::parse_config_file(path)) {
    if (k == "algo") cfg.algo = v;
    else if (k == "trials") cfg.trials = std::stoi(v);
    else if (k == "seed") cfg.seed = std::stoull(v);
    else if (k == "T") cfg.horizon = std::stoll(v);
    else if (k == "instance") cfg.instance_path = v;
    else if (k == "out") cfg.out_path = v;
    else cfg.params[k] = v;
  }
}

int cmd_run(const std::string& config_path, harness::ExperimentConfig cfg) {
  apply_config(config_path, cfg);
  const auto table = harness::run_experiment(cfg);
  if (cfg.out_path.empty()) std::cout << table.to_string();
  else std::cout << "wrote " << table.rows.size() << " rows to " << cfg.out_path << "\n";
  return 0;
}

int cmd_design_spanner(const std::string& instance_path, double C) {
  const Instance inst = load_instance(instance_path);
  const auto oracle = spanner::make_exhaustive_oracle(inst.action_features);
  const auto s = spanner::barycentric_spanner(inst.action_features, C, oracle);
  std::cout << "members:";
  for (int m : s.members) std::cout << ' ' << m;
  std::cout << "\n|det|: " << fmt(std::abs(s.det)) << "\n";
  std::cout << "certificate max-coefficient: "
            << fmt(spanner::certificate(s, inst.action_features)) << "\n";
  std::cout << "swaps: " << s.swap_count << "\n";
  return 0;
}

int cmd_purex(const std::string& instance_path, const std::string& mode, double delta,
              std::int64_t budget, std::uint64_t seed, int trials, double epsilon,
              const std::string& out) {
  const Instance inst = load_instance(instance_path);
  const int truth = inst.best_target();
  std::ostringstream os;
  os << "trial,phase,samples,recommended,correct\n";
  struct Lines {
    std::string text;
  };
  std::vector<Lines> per_trial(trials);
  par::for_each_trial(trials, [&](int trial) {
    Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(trial));
    std::ostringstream ls;
    if (mode == "fb") {
      const int rec = pe::adaptive_fb_run(inst, budget, rng);
      ls << trial << ",final," << budget << ',' << rec << ',' << (rec == truth ? 1 : 0)
         << '\n';
    } else {
      const auto gmode = mode == "fc-robust" ? pe::GemsMode::Robust : pe::GemsMode::Exact;
      const auto trace = pe::adaptive_fc_run(inst, delta, gmode, rng, budget, epsilon);
      int phase = 0;
      for (const auto& [samples, rec] : trace.events)
        ls << trial << ',' << phase++ << ',' << samples << ',' << rec << ','
           << (rec == truth ? 1 : 0) << '\n';
      ls << trial << ",final," << trace.total_samples << ','
         << trace.final_recommendation() << ','
         << (trace.final_recommendation() == truth ? 1 : 0) << '\n';
    }
    per_trial[trial].text = ls.str();
  });
  for (const auto& l : per_trial) os << l.text;
  if (out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out);
    f << os.str();
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_al(const std::string& pool_path, double gamma, double epsilon, double delta,
           const std::string& algo, std::uint64_t seed, std::int64_t T,
           const std::string& out) {
  const al::AlInstance inst = harness::load_al_instance(pool_path);
  Rng rng(seed);
  al::AlResult res;
  if (algo == "epoch") res = al::epoch_al_run(inst, epsilon, gamma, delta, rng);
  else if (algo == "eluder") res = al::eluder_al_run(inst, T, gamma, delta, rng);
  else if (algo == "mis") res = al::mis_al_run(inst, epsilon, gamma, delta, rng);
  else throw CLI::ValidationError("--algo must be epoch, eluder, or mis");
  std::ostringstream os;
  os << "round,queried,chow_excess_running\n";
  for (const auto& [round, labels, excess] : res.csv_rows)
    os << round << ',' << labels << ',' << fmt(excess) << '\n';
  if (out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out);
    f << os.str();
  }
  std::cerr << "labels: " << res.labels << " rounds: " << res.rounds << "\n";
  return 0;
}

int cmd_gen(const std::string& kind, const std::string& out, std::uint64_t seed, int n,
            int m, double alpha, std::int64_t T, int d, int K, int dstar, double sigma,
            double eps, int copies, const std::string& base_path, double p_easy) {
  Rng rng(seed);
  if (kind == "multiple-best-arms") {
    save_instance(harness::gen_multiple_best_arms(n, alpha, T, rng), out);
  } else if (kind == "caption") {
    save_instance(harness::gen_caption_style(n, m, rng), out);
  } else if (kind == "linear-intrinsic") {
    save_instance(harness::gen_linear_intrinsic(d, K, dstar, sigma, rng), out);
  } else if (kind == "hard") {
    save_instance(harness::gen_hard_instance(dstar, eps), out);
  } else if (kind == "duplicate") {
    save_instance(harness::gen_duplicate_augmented(load_instance(base_path), copies), out);
  } else if (kind == "massart-pool") {
    harness::save_al_instance(harness::gen_massart_pool(n, 0.1, 0.9, m, rng), out);
  } else if (kind == "noise-seeking-pool") {
    harness::save_al_instance(harness::gen_noise_seeking(p_easy, 5, 0.1), out);
  } else {
    throw CLI::ValidationError("unknown --kind " + kind);
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banditlab: oracle-efficient bandit and active-learning laboratory"};
  app.require_subcommand(1);

  // run
  harness::ExperimentConfig cfg;
  std::string config_path;
  auto* run = app.add_subcommand("run", "run a regret-minimization experiment");
  run->add_option("--algo", cfg.algo,
                  "moss|mosspp|empmosspp|parallel|linucb|linucbpp|linucbpp-corral");
  run->add_option("--beta", cfg.params["beta"], "schedule parameter in [1/2,1)");
  run->add_option("--T", cfg.horizon, "horizon");
  run->add_option("--trials", cfg.trials, "independent trials");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--out", cfg.out_path, "output CSV path");
  run->add_option("--instance", cfg.instance_path, "instance file (else generated)");
  run->add_option("--config", config_path, "flat key=value config file");
  run->add_option("--n", cfg.params["n"], "generated instance: number of arms");
  run->add_option("--alpha", cfg.params["alpha"], "generated instance: hardness");
  run->add_option("--d", cfg.params["d"], "linear instance: ambient dimension");
  run->add_option("--K", cfg.params["K"], "linear instance: number of arms");
  run->add_option("--dstar", cfg.params["dstar"], "linear instance: intrinsic dim");
  run->add_option("--sigma", cfg.params["sigma"], "noise level");
  run->add_option("--delta", cfg.params["delta"], "confidence parameter");

  // design spanner
  auto* design = app.add_subcommand("design", "design computations");
  auto* span = design->add_subcommand("spanner", "barycentric spanner of an instance");
  std::string span_instance;
  double span_C = 2.0;
  span->add_option("--instance", span_instance, "instance file")->required();
  span->add_option("--C", span_C, "approximation factor (> 1)");

  // purex
  auto* purex = app.add_subcommand("purex", "pure-exploration model selection");
  std::string px_instance, px_mode = "fc", px_out;
  double px_delta = 0.05, px_eps = 1e-2;
  std::int64_t px_budget = 10000000;
  std::uint64_t px_seed = 0;
  int px_trials = 1;
  purex->add_option("--instance", px_instance, "instance file")->required();
  purex->add_option("--mode", px_mode, "fc|fb|fc-robust");
  purex->add_option("--delta", px_delta, "confidence parameter");
  purex->add_option("--budget", px_budget, "sample cap (fc) or total 2T (fb)");
  purex->add_option("--seed", px_seed, "master seed");
  purex->add_option("--trials", px_trials, "independent trials");
  purex->add_option("--epsilon", px_eps, "target optimality (robust mode)");
  purex->add_option("--out", px_out, "output CSV path");

  // al
  auto* alc = app.add_subcommand("al", "active learning with abstention");
  std::string al_pool, al_algo = "epoch", al_out;
  double al_gamma = 0.1, al_eps = 1e-2, al_delta = 0.05;
  std::uint64_t al_seed = 0;
  std::int64_t al_T = 16384;
  alc->add_option("--pool", al_pool, "pool file")->required();
  alc->add_option("--gamma", al_gamma, "abstention price offset in (0, 1/2)");
  alc->add_option("--epsilon", al_eps, "target Chow excess");
  alc->add_option("--delta", al_delta, "confidence parameter");
  alc->add_option("--algo", al_algo, "epoch|eluder|mis");
  alc->add_option("--seed", al_seed, "seed");
  alc->add_option("--T", al_T, "horizon (eluder variant)");
  alc->add_option("--out", al_out, "output CSV path");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  std::string gen_kind, gen_out = "instance.txt", gen_base;
  std::uint64_t gen_seed = 0;
  int gen_n = 2000, gen_m = 54, gen_d = 120, gen_K = 240, gen_dstar = 12,
      gen_copies = 16;
  double gen_alpha = 0.25, gen_sigma = 0.1, gen_eps = 1e-3, gen_p = 0.02;
  std::int64_t gen_T = 100000;
  gen->add_option("--kind", gen_kind,
                  "multiple-best-arms|caption|linear-intrinsic|hard|duplicate|"
                  "massart-pool|noise-seeking-pool")
      ->required();
  gen->add_option("--out", gen_out, "output path");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--n", gen_n, "arms / pool points");
  gen->add_option("--m", gen_m, "best arms / class members");
  gen->add_option("--alpha", gen_alpha, "hardness level");
  gen->add_option("--T", gen_T, "horizon used to size the instance");
  gen->add_option("--d", gen_d, "ambient dimension");
  gen->add_option("--K", gen_K, "number of arms");
  gen->add_option("--dstar", gen_dstar, "intrinsic dimension");
  gen->add_option("--sigma", gen_sigma, "noise level");
  gen->add_option("--eps", gen_eps, "hard-instance runner-up gap");
  gen->add_option("--copies", gen_copies, "duplicate count");
  gen->add_option("--base", gen_base, "base instance for duplication");
  gen->add_option("--p-easy", gen_p, "noise-seeking easy-region mass");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      // Drop empty passthrough params so defaults apply.
      for (auto it = cfg.params.begin(); it != cfg.params.end();)
        it = it->second.empty() ? cfg.params.erase(it) : std::next(it);
      return cmd_run(config_path, std::move(cfg));
    }
    if (span->parsed()) return cmd_design_spanner(span_instance, span_C);
    if (purex->parsed())
      return cmd_purex(px_instance, px_mode, px_delta, px_budget, px_seed, px_trials,
                       px_eps, px_out);
    if (alc->parsed())
      return cmd_al(al_pool, al_gamma, al_eps, al_delta, al_algo, al_seed, al_T, al_out);
    if (gen->parsed())
      return cmd_gen(gen_kind, gen_out, gen_seed, gen_n, gen_m, gen_alpha, gen_T, gen_d,
                     gen_K, gen_dstar, gen_sigma, gen_eps, gen_copies, gen_base, gen_p);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
