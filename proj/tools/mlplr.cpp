// mlplr: command-line harness for constrained MLP fitting, LR statistics,
// architecture selection and limit-law simulation.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "mlplr/estimation.hpp"
#include "mlplr/experiment.hpp"
#include "mlplr/gram.hpp"
#include "mlplr/io.hpp"
#include "mlplr/likelihood.hpp"
#include "mlplr/limit_law.hpp"
#include "mlplr/reparam.hpp"
#include "mlplr/score_basis.hpp"
#include "mlplr/selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mlplr;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfig = 2, kFit = 3, kLimit = 4 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::string out_dir = ".";
  bool extended = false;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RegressionSpec load_spec(const std::string& path) {
  if (path.empty()) return default_desk_spec();
  auto spec = read_json_file(path).get<RegressionSpec>();
  spec.validate();
  return spec;
}

ConstraintBox load_box(const std::string& path) {
  if (path.empty()) return default_desk_box();
  auto box = read_json_file(path).get<ConstraintBox>();
  box.validate();
  return box;
}

FitConfig load_fit(const std::string& path, const Globals& g) {
  FitConfig cfg;
  if (!path.empty()) cfg = read_json_file(path).get<FitConfig>();
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  return os;
}

void stamp(json& doc, const json& config, std::uint64_t seed) {
  doc["config_hash"] = config_hash(config);
  doc["base_seed"] = seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mlplr: likelihood-ratio tools for one-hidden-layer MLP regression"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Base seed (overrides config seeds)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_flag("--extended-index-set", g.extended,
               "limit: add free extra-unit columns phi(w^T x) on a weight grid");

  std::string spec_path, box_path, fit_path, data_path, schedule_path, config_path;
  std::size_t n = 500, k = 1, k_max = 3, draws = 10000, gram_draws = 200000, gh_nodes = 129;
  std::string gram_mode = "mc", h4_mode = "both";
  double sigma2 = -1.0;

  auto* gen = app.add_subcommand("gen", "Generate a dataset from a regression spec");
  gen->add_option("--spec", spec_path, "RegressionSpec JSON (default: desk spec)");
  gen->add_option("-n,--n", n, "Sample size")->check(CLI::PositiveNumber);

  auto add_data_opts = [&](CLI::App* sc) {
    sc->add_option("--data", data_path, "Dataset CSV")->required();
    sc->add_option("--spec", spec_path, "RegressionSpec JSON (default: desk spec)");
    sc->add_option("--sigma2", sigma2, "Noise variance (default: from the model spec file)");
    sc->add_option("--box", box_path, "ConstraintBox JSON (default: eta=0.1, M=50)");
    sc->add_option("--fit-config", fit_path, "FitConfig JSON");
  };
  auto* fit = app.add_subcommand("fit", "Constrained MLE at width k");
  add_data_opts(fit);
  fit->add_option("-k,--k", k, "Hidden units")->check(CLI::PositiveNumber);
  auto* lr = app.add_subcommand("lr", "LR statistic 2 lambda at width k");
  add_data_opts(lr);
  lr->add_option("-k,--k", k, "Hidden units")->check(CLI::PositiveNumber);
  auto* sel = app.add_subcommand("select", "Penalized-likelihood architecture selection");
  add_data_opts(sel);
  sel->add_option("--k-max", k_max, "Largest width")->check(CLI::PositiveNumber);
  sel->add_option("--schedule", schedule_path, "PenaltySchedule JSON (default: bic_like)");

  auto* lim = app.add_subcommand("limit", "Simulate the limiting LR distribution at width k");
  lim->add_option("--spec", spec_path, "RegressionSpec JSON (default: desk spec)");
  lim->add_option("--box", box_path, "ConstraintBox JSON (grid for --extended-index-set)");
  lim->add_option("-k,--k", k, "Fitted width")->check(CLI::PositiveNumber);
  lim->add_option("--draws", draws, "Limit draws")->check(CLI::PositiveNumber);
  lim->add_option("--gram-draws", gram_draws, "Monte Carlo draws for the Gram matrix")->check(CLI::PositiveNumber);
  lim->add_option("--gram-mode", gram_mode, "mc or gh")->check(CLI::IsMember({"mc", "gh"}));

  auto* h4 = app.add_subcommand("check-h4", "Numerical linear-independence certificate");
  h4->add_option("--spec", spec_path, "RegressionSpec JSON (default: desk spec)");
  h4->add_option("--gram-draws", gram_draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
  h4->add_option("--gh-nodes", gh_nodes, "Gauss-Hermite nodes")->check(CLI::PositiveNumber);
  h4->add_option("--mode", h4_mode, "mc, gh or both")->check(CLI::IsMember({"mc", "gh", "both"}));

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the derivative catalog");
  gc->add_option("--spec", spec_path, "RegressionSpec JSON (default: desk spec)");
  gc->add_option("-k,--k", k, "Fitted width")->check(CLI::PositiveNumber);
  gc->add_option("--draws", draws, "Random (z, base point) draws")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("experiment", "Replicated LR and selection experiment");
  exp->add_option("--config", config_path, "ExperimentConfig JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  if (*seed_opt) g.seed = seed_value;
  const std::uint64_t seed = g.seed.value_or(0);

  try {
    if (*gen) {
      const auto spec = load_spec(spec_path);
      const auto data = generate_dataset(spec, n, seed);
      const json cfg{{"command", "gen"}, {"spec", spec}, {"n", n}};
      auto os = open_out(out_path(g, "dataset.csv"));
      write_provenance_line(os, config_hash(cfg), seed);
      write_dataset_csv(os, data);
      if (!os) throw std::runtime_error("write failed for dataset.csv");
      return kOk;
    }

    if (*fit || *lr || *sel) {
      const auto spec = load_spec(spec_path);
      const double s2 = sigma2 > 0.0 ? sigma2 : spec.sigma2;
      if (!(s2 > 0.0)) throw ConfigError("sigma2 must be > 0");
      const auto data = read_dataset_csv_file(data_path, s2);
      const auto box = load_box(box_path);
      const auto cfg = load_fit(fit_path, g);
      json stamp_cfg{{"data", data_path}, {"box", box}, {"fit", cfg}, {"sigma2", s2}};

      if (*fit) {
        const auto res = fit_mle(data, k, box, cfg, g.threads);
        json doc = res;
        stamp_cfg["command"] = "fit";
        stamp_cfg["k"] = k;
        stamp(doc, stamp_cfg, cfg.seed);
        write_json_file(out_path(g, "fit_result.json").string(), doc);
        std::cout << std::setprecision(12) << "loglik " << res.loglik
                  << (res.converged ? "" : " (not converged)") << '\n';
        return res.converged ? kOk : kFit;
      }
      if (*lr) {
        if (data.d != spec.input_dim) throw ConfigError("dataset dimension differs from the model spec");
        FitConfig c = cfg;
        c.warm_starts.push_back(spec.theta0);
        const auto res = fit_mle(data, k, box, c, g.threads);
        double value = 0.0;
        try {
          value = lr_statistic(res.loglik, spec, data);
        } catch (const LrStatisticError& e) {
          throw FitError(e.what());
        }
        stamp_cfg["command"] = "lr";
        stamp_cfg["k"] = k;
        stamp_cfg["spec"] = spec;
        json doc{{"k", k}, {"n", data.size()}, {"lr", value}, {"sup_loglik", res.loglik},
                 {"loglik_at_truth", conditional_loglik(spec.theta0, data)}, {"converged", res.converged}};
        stamp(doc, stamp_cfg, cfg.seed);
        write_json_file(out_path(g, "lr.json").string(), doc);
        std::cout << std::setprecision(12) << value << '\n';
        return kOk;
      }
      PenaltySchedule schedule = PenaltySchedule::bic_like(data.d);
      if (!schedule_path.empty()) {
        const json sj = read_json_file(schedule_path);
        schedule = sj.get<PenaltySchedule>();
        if (!sj.contains("input_dim")) schedule.input_dim = data.d;
      }
      const auto report = select_architecture(data, k_max, box, cfg, schedule, g.threads);
      stamp_cfg["command"] = "select";
      stamp_cfg["k_max"] = k_max;
      stamp_cfg["schedule"] = schedule;
      json doc = report;
      stamp(doc, stamp_cfg, cfg.seed);
      write_json_file(out_path(g, "selection.json").string(), doc);
      std::cout << "k_hat " << report.k_hat << '\n';
      return kOk;
    }

    if (*lim) {
      const auto spec = load_spec(spec_path);
      const auto box = load_box(box_path);
      std::vector<std::vector<double>> extras;
      if (g.extended) extras = extended_weight_grid(spec, box);
      const auto basis = ScoreBasis::from_spec(spec, extras);
      const std::uint64_t gram_seed = derive_seed(seed, 0x6a09e667ULL);
      const GramMatrix gram = gram_mode == "gh" ? gram_matrix_gauss_hermite(spec, basis)
                                                : gram_matrix(spec, gram_draws, gram_seed, basis, g.threads);
      LimitOptions opt;
      opt.extended = g.extended;
      opt.threads = g.threads;
      const auto sample = simulate_limit(spec, k, gram, draws, seed, opt);
      const json cfg{{"command", "limit"}, {"spec", spec}, {"box", box}, {"k", k}, {"draws", draws},
                     {"gram_draws", gram_draws}, {"gram_mode", gram_mode}, {"extended", g.extended}};
      const std::string hash = config_hash(cfg);
      {
        auto os = open_out(out_path(g, "limit.csv"));
        write_provenance_line(os, hash, seed);
        write_limit_csv(os, sample);
      }
      {
        auto os = open_out(out_path(g, "gram.txt"));
        write_provenance_line(os, hash, seed);
        write_matrix_text(os, gram.x_gram);
      }
      json meta = gram_metadata(gram, config_hash(json(spec)));
      stamp(meta, cfg, seed);
      write_json_file(out_path(g, "gram.json").string(), meta);
      const auto stats = summarize(sample.values);
      std::size_t bad = 0;
      for (bool c : sample.converged) bad += c ? 0 : 1;
      std::cout << std::setprecision(6) << "mean " << stats.mean << " q95 " << stats.quantiles[4]
                << " unconverged " << bad << '\n';
      return kOk;
    }

    if (*h4) {
      const auto spec = load_spec(spec_path);
      json doc;
      bool pass = true;
      if (h4_mode != "gh") {
        const auto r = check_h4(gram_matrix(spec, gram_draws, seed));
        doc["monte_carlo"] = r;
        pass = pass && r.pass;
      }
      if (h4_mode != "mc") {
        const auto r = check_h4(gram_matrix_gauss_hermite(spec, gh_nodes));
        doc["gauss_hermite"] = r;
        pass = pass && r.pass;
      }
      doc["pass"] = pass;
      stamp(doc, json{{"command", "check-h4"}, {"spec", spec}, {"gram_draws", gram_draws}, {"mode", h4_mode}}, seed);
      write_json_file(out_path(g, "h4.json").string(), doc);
      std::cout << std::setw(2) << doc << '\n';
      return pass ? kOk : kLimit;
    }

    if (*gc) {
      const auto spec = load_spec(spec_path);
      const auto r = gradcheck_sweep(spec, k, draws, seed);
      json doc{{"draws", r.draws}, {"max_first_error", r.max_first_error},
               {"max_second_error", r.max_second_error}};
      stamp(doc, json{{"command", "gradcheck"}, {"spec", spec}, {"k", k}, {"draws", draws}}, seed);
      write_json_file(out_path(g, "gradcheck.json").string(), doc);
      std::cout << std::setw(2) << doc << '\n';
      return kOk;
    }

    if (*exp) {
      const json raw = read_json_file(config_path);
      auto cfg = raw.get<ExperimentConfig>();
      if (g.seed) cfg.base_seed = *g.seed;
      cfg.validate();
      const json cfg_json = cfg;
      const std::string hash = config_hash(cfg_json);
      const auto m = run_replicates(cfg, g.threads);
      std::map<std::size_t, std::vector<double>> limits;
      bool limit_failed = false;
      if (cfg.limit_draws > 0) {
        try {
          const auto gram = gram_matrix(cfg.spec, 200000, derive_seed(cfg.base_seed, 0x6a09e667ULL),
                                        ScoreBasis::from_spec(cfg.spec), g.threads);
          for (auto kk : cfg.k_grid) {
            if (kk < cfg.spec.true_width()) continue;
            LimitOptions opt;
            opt.threads = g.threads;
            limits[kk] = simulate_limit(cfg.spec, kk, gram, cfg.limit_draws,
                                        derive_seed(cfg.base_seed, 0x11117ULL), opt)
                             .values;
          }
        } catch (const LimitSimulationError& e) {
          std::cerr << "limit simulation failed: " << e.what() << '\n';
          limit_failed = true;
        }
      }
      {
        auto os = open_out(out_path(g, "replicates.csv"));
        write_provenance_line(os, hash, cfg.base_seed);
        write_replicate_csv(os, m);
      }
      {
        auto os = open_out(out_path(g, "lr.csv"));
        write_provenance_line(os, hash, cfg.base_seed);
        write_lr_csv(os, m);
      }
      const auto summary = summarize_experiment(m, cfg.spec.true_width(), limits);
      json doc;
      doc["config"] = cfg_json;
      doc["cells"] = json::array();
      for (const auto& c : summary.cells) {
        doc["cells"].push_back(json{{"n", c.n}, {"k", c.k}, {"lr", c.lr}, {"failures", c.failures}});
      }
      json freq = json::object();
      for (const auto& [nn, f] : summary.k_hat_frequency) freq[std::to_string(nn)] = f;
      doc["k_hat_frequency"] = freq;
      stamp(doc, cfg_json, cfg.base_seed);
      write_json_file(out_path(g, "summary.json").string(), doc);
      if (m.failures() > 0) {
        std::cerr << m.failures() << " cell(s) failed\n";
        return kFit;
      }
      return limit_failed ? kLimit : kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const FitError& e) {
    std::cerr << "fit failure: " << e.what() << '\n';
    return kFit;
  } catch (const ProjectionError& e) {
    std::cerr << "fit failure: " << e.what() << '\n';
    return kFit;
  } catch (const LimitSimulationError& e) {
    std::cerr << "limit failure: " << e.what() << '\n';
    return kLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
