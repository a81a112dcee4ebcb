#pragma once

#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "mlplr/experiment.hpp"
#include "mlplr/gram.hpp"
#include "mlplr/limit_law.hpp"
#include "mlplr/reparam.hpp"
#include "mlplr/selection.hpp"

namespace mlplr {

/// Malformed input file or JSON document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void to_json(nlohmann::json& j, const HiddenUnit& v);
void from_json(const nlohmann::json& j, HiddenUnit& v);
void to_json(nlohmann::json& j, const MlpParams& v);
void from_json(const nlohmann::json& j, MlpParams& v);
void to_json(nlohmann::json& j, const ConstraintBox& v);
void from_json(const nlohmann::json& j, ConstraintBox& v);
void to_json(nlohmann::json& j, const InputLaw& v);
void from_json(const nlohmann::json& j, InputLaw& v);
void to_json(nlohmann::json& j, const RegressionSpec& v);
void from_json(const nlohmann::json& j, RegressionSpec& v);
void to_json(nlohmann::json& j, const FitConfig& v);
void from_json(const nlohmann::json& j, FitConfig& v);
void to_json(nlohmann::json& j, const StartSummary& v);
void to_json(nlohmann::json& j, const FitResult& v);
void to_json(nlohmann::json& j, const PenaltySchedule& v);
void from_json(const nlohmann::json& j, PenaltySchedule& v);
void to_json(nlohmann::json& j, const SelectionRow& v);
void to_json(nlohmann::json& j, const SelectionReport& v);
void to_json(nlohmann::json& j, const ExperimentConfig& v);
void from_json(const nlohmann::json& j, ExperimentConfig& v);
void to_json(nlohmann::json& j, const SummaryStats& v);
void to_json(nlohmann::json& j, const Partition& v);
void to_json(nlohmann::json& j, const DerivativeCheckReport& v);
void to_json(nlohmann::json& j, const H4Report& v);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Reads a JSON document; throws ConfigError on I/O or parse failure.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

/// CSV with header x1,...,xd,y. Lines starting with '#' are comments.
void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is, double sigma2);
Dataset read_dataset_csv_file(const std::string& path, double sigma2);

/// One row per draw: draw,value,best_partition,restarts,converged.
void write_limit_csv(std::ostream& os, const LimitSample& sample);

/// Row-major text matrix, one row per line, 17 significant digits.
void write_matrix_text(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_text(std::istream& is);
nlohmann::json gram_metadata(const GramMatrix& gram, const std::string& spec_hash);

/// replicate,n,k_hat,T_1..T_K
void write_replicate_csv(std::ostream& os, const ReplicateMatrix& m);
/// replicate,n,k,lr,converged,failed
void write_lr_csv(std::ostream& os, const ReplicateMatrix& m);

/// "# config_hash=<hash> base_seed=<seed>" comment line.
void write_provenance_line(std::ostream& os, const std::string& hash, std::uint64_t seed);

}  // namespace mlplr
