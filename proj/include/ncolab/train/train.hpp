#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ncolab/datagen/dataset.hpp"
#include "ncolab/operator/model.hpp"

namespace ncolab::train {

/// Adam with lr(epoch) = lr0 * decay^floor(epoch / decay_period) on batches of
/// min(max_batch, N) records; one pass over the shuffled data per epoch.
struct TrainConfig {
  int epochs = 10000;
  std::size_t max_batch = 10000;
  double lr0 = 0.01;
  double decay = 0.9;
  int decay_period = 1000;
  std::uint64_t seed = 0;
  int validate_every = 100;

  void validate() const;
  nlohmann::json to_json() const;
};

TrainConfig train_config_from_json(const nlohmann::json& j);

/// Continued training on a shifted dataset at a fixed learning rate with part
/// of the parameters frozen. The record and epoch budgets are fractions of
/// the ID training run (id_records, id_epochs).
struct FinetuneConfig {
  double dataset_fraction = 0.2;
  double epoch_fraction = 0.2;
  double lr = 0.001;
  op::FreezeSet freeze = op::FreezeSet::Default;
  std::size_t id_records = 5000;
  int id_epochs = 10000;
  std::size_t max_batch = 10000;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t records() const;
  int epochs() const;
  nlohmann::json to_json() const;
};

/// Encoded inputs (m x N), normalized times t / tf (N) and targets (d_u x N).
struct TrainingArrays {
  Eigen::MatrixXd e;
  Eigen::VectorXd t;
  Eigen::MatrixXd u;

  std::size_t size() const { return static_cast<std::size_t>(t.size()); }
};

/// Throws SchemaError when the dataset environment differs from the encoder's.
TrainingArrays make_arrays(const datagen::Dataset& d, const op::EncoderSpec& enc,
                           std::size_t max_records = 0);

struct TrainResult {
  std::vector<double> train_loss;                   // per epoch, before its updates
  std::vector<std::pair<int, double>> val_loss;     // (epoch, loss)
  double final_loss = 0.0;                          // full-data loss after training
  double seconds = 0.0;
};

/// Throws NumericalError naming the epoch when the loss or gradient stops
/// being finite. Parameters with frozen[i] set are never written.
TrainResult train(op::OperatorModel& model, const TrainingArrays& data, const TrainConfig& cfg,
                  const TrainingArrays* validation = nullptr,
                  const std::vector<bool>* frozen = nullptr);

/// Trains on the first cfg.records() records for cfg.epochs() epochs at the
/// fixed rate cfg.lr with model.frozen_mask(cfg.freeze) held fixed.
TrainResult finetune(op::OperatorModel& model, const TrainingArrays& ood_data,
                     const FinetuneConfig& cfg);

nlohmann::json train_result_to_json(const TrainResult& r);

}  // namespace ncolab::train
