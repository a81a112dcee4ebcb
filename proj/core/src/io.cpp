#include "mlplr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mlplr {

using nlohmann::json;

void to_json(json& j, const HiddenUnit& v) { j = json{{"a", v.a}, {"w", v.w}}; }
void from_json(const json& j, HiddenUnit& v) {
  j.at("a").get_to(v.a);
  j.at("w").get_to(v.w);
}

void to_json(json& j, const MlpParams& v) { j = json{{"beta", v.beta}, {"units", v.units}}; }
void from_json(const json& j, MlpParams& v) {
  j.at("beta").get_to(v.beta);
  j.at("units").get_to(v.units);
}

void to_json(json& j, const ConstraintBox& v) {
  j = json{{"eta", v.eta}, {"M", v.M}, {"positive_amplitudes", v.positive_amplitudes}};
}
void from_json(const json& j, ConstraintBox& v) {
  const ConstraintBox def;
  v.eta = j.value("eta", def.eta);
  v.M = j.value("M", def.M);
  v.positive_amplitudes = j.value("positive_amplitudes", def.positive_amplitudes);
}

void to_json(json& j, const InputLaw& v) { j = json{{"kind", v.name()}, {"scale", v.scale}}; }
void from_json(const json& j, InputLaw& v) {
  if (j.is_string()) {
    v = InputLaw::from_name(j.get<std::string>());
    return;
  }
  v = InputLaw::from_name(j.value("kind", std::string("standard_normal")), j.value("scale", 1.0));
}

void to_json(json& j, const RegressionSpec& v) {
  j = json{{"theta0", v.theta0},       {"sigma2", v.sigma2},
           {"input_dim", v.input_dim}, {"input_law", v.input_law},
           {"noise_scale", v.noise_scale}};
}
void from_json(const json& j, RegressionSpec& v) {
  j.at("theta0").get_to(v.theta0);
  v.sigma2 = j.value("sigma2", 1.0);
  v.input_dim = j.contains("input_dim") ? j.at("input_dim").get<std::size_t>() : v.theta0.input_dim();
  v.input_law = j.contains("input_law") ? j.at("input_law").get<InputLaw>() : InputLaw{};
  v.noise_scale = j.value("noise_scale", 1.0);
}

void to_json(json& j, const FitConfig& v) {
  j = json{{"n_starts", v.n_starts}, {"max_iters", v.max_iters}, {"grad_tol", v.grad_tol},
           {"step_tol", v.step_tol}, {"seed", v.seed},           {"init_scale", v.init_scale},
           {"warm_starts", v.warm_starts}};
}
void from_json(const json& j, FitConfig& v) {
  const FitConfig def;
  v.n_starts = j.value("n_starts", def.n_starts);
  v.max_iters = j.value("max_iters", def.max_iters);
  v.grad_tol = j.value("grad_tol", def.grad_tol);
  v.step_tol = j.value("step_tol", def.step_tol);
  v.seed = j.value("seed", def.seed);
  v.init_scale = j.value("init_scale", def.init_scale);
  v.warm_starts = j.contains("warm_starts") ? j.at("warm_starts").get<std::vector<MlpParams>>()
                                            : std::vector<MlpParams>{};
}

void to_json(json& j, const StartSummary& v) {
  j = json{{"loglik", v.loglik},
           {"iterations", v.iterations},
           {"converged", v.converged},
           {"projected_grad_norm", v.projected_grad_norm},
           {"warm", v.warm}};
}

void to_json(json& j, const FitResult& v) {
  j = json{{"theta_hat", v.theta_hat},
           {"loglik", v.loglik},
           {"converged", v.converged},
           {"n_starts_used", v.n_starts_used},
           {"per_start_logliks", v.per_start_logliks},
           {"per_start", v.per_start}};
}

void to_json(json& j, const PenaltySchedule& v) {
  j = json{{"kind", v.kind == PenaltySchedule::Kind::bic_like ? "bic_like" : "custom"},
           {"input_dim", v.input_dim},
           {"table", v.table},
           {"offset", v.offset}};
}
void from_json(const json& j, PenaltySchedule& v) {
  const std::string kind = j.value("kind", std::string("bic_like"));
  if (kind == "bic_like") {
    v.kind = PenaltySchedule::Kind::bic_like;
  } else if (kind == "custom") {
    v.kind = PenaltySchedule::Kind::custom;
  } else {
    throw ConfigError("unknown penalty schedule kind '" + kind + "'");
  }
  v.input_dim = j.value("input_dim", std::size_t{1});
  v.table = j.value("table", std::vector<double>{});
  v.offset = j.value("offset", 0.0);
}

void to_json(json& j, const SelectionRow& v) {
  j = json{{"k", v.k}, {"sup_loglik", v.sup_loglik}, {"penalty", v.penalty}, {"T_n", v.T_n},
           {"converged", v.converged}};
}
void to_json(json& j, const SelectionReport& v) {
  j = json{{"per_k", v.per_k}, {"k_hat", v.k_hat}, {"n", v.n}, {"all_converged", v.all_converged}};
}

void to_json(json& j, const ExperimentConfig& v) {
  j = json{{"spec", v.spec},
           {"box", v.box},
           {"fit", v.fit},
           {"schedule", v.schedule},
           {"n_grid", v.n_grid},
           {"k_grid", v.k_grid},
           {"replicates", v.replicates},
           {"base_seed", v.base_seed},
           {"limit_draws", v.limit_draws},
           {"warm_start_truth", v.warm_start_truth}};
}
void from_json(const json& j, ExperimentConfig& v) {
  v = default_desk_experiment();
  if (j.contains("spec")) j.at("spec").get_to(v.spec);
  if (j.contains("box")) j.at("box").get_to(v.box);
  if (j.contains("fit")) j.at("fit").get_to(v.fit);
  v.schedule = PenaltySchedule::bic_like(v.spec.input_dim);
  if (j.contains("schedule")) {
    j.at("schedule").get_to(v.schedule);
    if (!j.at("schedule").contains("input_dim")) v.schedule.input_dim = v.spec.input_dim;
  }
  v.k_grid = {v.spec.true_width()};
  if (j.contains("n_grid")) j.at("n_grid").get_to(v.n_grid);
  if (j.contains("k_grid")) j.at("k_grid").get_to(v.k_grid);
  v.replicates = j.value("replicates", v.replicates);
  v.base_seed = j.value("base_seed", v.base_seed);
  v.limit_draws = j.value("limit_draws", v.limit_draws);
  v.warm_start_truth = j.value("warm_start_truth", v.warm_start_truth);
}

void to_json(json& j, const SummaryStats& v) {
  json q = json::object();
  for (std::size_t i = 0; i < SummaryStats::probs.size(); ++i) {
    std::ostringstream key;
    key << SummaryStats::probs[i];
    q[key.str()] = v.quantiles[i];
  }
  j = json{{"quantiles", q}, {"mean", v.mean}, {"variance", v.variance}, {"count", v.count}};
  j["ks"] = v.ks ? json(*v.ks) : json(nullptr);
}

void to_json(json& j, const Partition& v) { j = json{{"t", v.t}}; }

void to_json(json& j, const DerivativeCheckReport& v) {
  j = json{{"labels", v.labels},
           {"max_first_error", v.max_first_error},
           {"max_second_error", v.max_second_error}};
  j["first_errors"] = std::vector<double>(v.first_errors.data(), v.first_errors.data() + v.first_errors.size());
}

void to_json(json& j, const H4Report& v) {
  j = json{{"min_eigenvalue", v.min_eigenvalue},
           {"pass", v.pass},
           {"min_correlation_eigenvalue", v.min_correlation_eigenvalue}};
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << std::setw(2) << doc << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  for (std::size_t l = 1; l <= data.d; ++l) os << 'x' << l << ',';
  os << "y\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t l = 0; l < data.d; ++l) os << data.x[i * data.d + l] << ',';
    os << data.y[i] << '\n';
  }
}

Dataset read_dataset_csv(std::istream& is, double sigma2) {
  Dataset data;
  data.sigma2 = sigma2;
  std::string line;
  bool header = false;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!header) {
      if (fields.empty() || fields.back() != "y") throw ConfigError("dataset CSV: header must end with 'y'");
      for (std::size_t l = 0; l + 1 < fields.size(); ++l) {
        if (fields[l] != "x" + std::to_string(l + 1)) throw ConfigError("dataset CSV: bad header column '" + fields[l] + "'");
      }
      cols = fields.size();
      data.d = cols - 1;
      header = true;
      continue;
    }
    if (fields.size() != cols) {
      throw ConfigError("dataset CSV: line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(fields[c], &used);
        if (used != fields[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("dataset CSV: line " + std::to_string(line_no) + ": bad number '" + fields[c] + "'");
      }
      (c + 1 < cols ? data.x : data.y).push_back(v);
    }
  }
  if (!header) throw ConfigError("dataset CSV: missing header");
  if (data.size() == 0) throw ConfigError("dataset CSV: no rows");
  return data;
}

Dataset read_dataset_csv_file(const std::string& path, double sigma2) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_dataset_csv(in, sigma2);
}

void write_limit_csv(std::ostream& os, const LimitSample& s) {
  os << "draw,value,best_partition,restarts,converged\n" << std::setprecision(17);
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    os << j << ',' << s.values[j] << ',';
    const auto& t = s.partitions.at(s.best_partition[j]).t;
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ";" : "") << t[i];
    os << ',' << s.restarts[j] << ',' << (s.converged[j] ? 1 : 0) << '\n';
  }
}

void write_matrix_text(std::ostream& os, const Eigen::MatrixXd& m) {
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c);
    os << '\n';
  }
}

Eigen::MatrixXd read_matrix_text(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError("matrix text: ragged rows");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

json gram_metadata(const GramMatrix& g, const std::string& spec_hash) {
  return json{{"seed", g.seed},
              {"mc_draws", g.mc_draws},
              {"mode", g.mode == GramMatrix::Mode::monte_carlo ? "monte_carlo" : "gauss_hermite"},
              {"basis_dim", g.basis_dim()},
              {"core_dim", g.basis.core_dim()},
              {"sigma2", g.sigma2},
              {"spec_hash", spec_hash}};
}

namespace {

void put(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
  } else {
    os << v;
  }
}

}  // namespace

void write_replicate_csv(std::ostream& os, const ReplicateMatrix& m) {
  os << "replicate,n,k_hat";
  for (std::size_t k = 1; k <= m.k_max; ++k) os << ",T_" << k;
  os << '\n' << std::setprecision(17);
  for (const auto& c : m.cells) {
    os << c.replicate << ',' << c.n << ',' << c.k_hat;
    for (double t : c.T) {
      os << ',';
      put(os, t);
    }
    os << '\n';
  }
}

void write_lr_csv(std::ostream& os, const ReplicateMatrix& m) {
  os << "replicate,n,k,lr,converged,failed\n" << std::setprecision(17);
  for (const auto& c : m.cells) {
    for (std::size_t ki = 0; ki < m.k_grid.size(); ++ki) {
      os << c.replicate << ',' << c.n << ',' << m.k_grid[ki] << ',';
      put(os, c.lr.at(ki));
      os << ',' << (c.converged ? 1 : 0) << ',' << (c.failed ? 1 : 0) << '\n';
    }
  }
}

void write_provenance_line(std::ostream& os, const std::string& hash, std::uint64_t seed) {
  os << "# config_hash=" << hash << " base_seed=" << seed << '\n';
}

}  // namespace mlplr
