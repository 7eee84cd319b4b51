#include "ncolab/train/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ncolab/core/adam.hpp"
#include "ncolab/core/error.hpp"
#include "ncolab/core/util.hpp"

namespace ncolab::train {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (max_batch < 1) throw ConfigError("max_batch must be >= 1");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw ConfigError("lr0 must be positive");
  if (!(decay > 0.0) || decay > 1.0) throw ConfigError("decay must lie in (0, 1]");
  if (decay_period < 1) throw ConfigError("decay_period must be >= 1");
  if (validate_every < 1) throw ConfigError("validate_every must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},           {"max_batch", max_batch},
          {"lr0", lr0},                 {"decay", decay},
          {"decay_period", decay_period}, {"seed", seed},
          {"validate_every", validate_every}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.max_batch = j.value("max_batch", c.max_batch);
    c.lr0 = j.value("lr0", c.lr0);
    c.decay = j.value("decay", c.decay);
    c.decay_period = j.value("decay_period", c.decay_period);
    c.seed = j.value("seed", c.seed);
    c.validate_every = j.value("validate_every", c.validate_every);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

void FinetuneConfig::validate() const {
  auto in_unit = [](double f) { return f > 0.0 && f <= 1.0; };
  if (!in_unit(dataset_fraction) || !in_unit(epoch_fraction)) {
    throw ConfigError("finetune fractions must lie in (0, 1]");
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("finetune lr must be positive");
  if (id_records < 1 || id_epochs < 1) throw ConfigError("finetune needs the ID budget");
  if (max_batch < 1) throw ConfigError("max_batch must be >= 1");
}

std::size_t FinetuneConfig::records() const {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(dataset_fraction * static_cast<double>(id_records))));
}

int FinetuneConfig::epochs() const {
  return std::max(1, static_cast<int>(std::lround(epoch_fraction * id_epochs)));
}

nlohmann::json FinetuneConfig::to_json() const {
  return {{"dataset_fraction", dataset_fraction},
          {"epoch_fraction", epoch_fraction},
          {"lr", lr},
          {"freeze", op::to_string(freeze)},
          {"id_records", id_records},
          {"id_epochs", id_epochs},
          {"max_batch", max_batch},
          {"seed", seed}};
}

TrainingArrays make_arrays(const datagen::Dataset& d, const op::EncoderSpec& enc,
                           std::size_t max_records) {
  if (d.header.env != enc.env) {
    throw SchemaError("dataset is for " + envs::to_string(d.header.env) + ", model encodes " +
                      envs::to_string(enc.env));
  }
  const std::size_t n = max_records == 0 ? d.records.size()
                                         : std::min(max_records, d.records.size());
  if (n == 0) throw ConfigError("dataset has no records");
  const auto d_u = d.records.front().u.size();
  TrainingArrays a;
  a.e.resize(enc.dim(), static_cast<Eigen::Index>(n));
  a.t.resize(static_cast<Eigen::Index>(n));
  a.u.resize(d_u, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = d.records[i];
    const auto c = static_cast<Eigen::Index>(i);
    a.e.col(c) = op::encode_instance(r.inst, enc);
    a.t[c] = r.t / r.inst.tf;
    a.u.col(c) = r.u;
  }
  return a;
}

namespace {

TrainingArrays take_columns(const TrainingArrays& a, const std::vector<Eigen::Index>& idx,
                            std::size_t begin, std::size_t end) {
  TrainingArrays b;
  const auto n = static_cast<Eigen::Index>(end - begin);
  b.e.resize(a.e.rows(), n);
  b.t.resize(n);
  b.u.resize(a.u.rows(), n);
  for (std::size_t i = begin; i < end; ++i) {
    const auto c = static_cast<Eigen::Index>(i - begin);
    b.e.col(c) = a.e.col(idx[i]);
    b.t[c] = a.t[idx[i]];
    b.u.col(c) = a.u.col(idx[i]);
  }
  return b;
}

void check_data(const op::OperatorModel& model, const TrainingArrays& data, const char* what) {
  if (data.size() == 0) throw ConfigError(std::string(what) + " set is empty");
  if (data.u.rows() != model.d_u()) {
    throw SchemaError(std::string(what) + " targets have " + std::to_string(data.u.rows()) +
                      " control dims, model has " + std::to_string(model.d_u()));
  }
  if (data.e.rows() != model.encoder().dim()) {
    throw SchemaError(std::string(what) + " inputs have " + std::to_string(data.e.rows()) +
                      " features, model expects " + std::to_string(model.encoder().dim()));
  }
}

}  // namespace

TrainResult train(op::OperatorModel& model, const TrainingArrays& data, const TrainConfig& cfg,
                  const TrainingArrays* validation, const std::vector<bool>* frozen) {
  cfg.validate();
  check_data(model, data, "training");
  if (validation) check_data(model, *validation, "validation");
  const double start = core::now_seconds();
  const std::size_t n = data.size();
  const std::size_t batch = std::min(cfg.max_batch, n);
  const bool single_batch = batch == n;

  Eigen::VectorXd params = model.params();
  auto adam = core::AdamState::for_size(params.size(), cfg.lr0, cfg.decay, cfg.decay_period);
  auto rng = core::make_stream(cfg.seed, "train-shuffle");
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;
  result.train_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    if (single_batch) {
      epoch_loss = model.loss(data.e, data.t, data.u, &grad);
      if (!std::isfinite(epoch_loss)) {
        throw NumericalError("training loss is not finite at epoch " + std::to_string(epoch));
      }
      if (!grad.allFinite()) {
        throw NumericalError("training gradient is not finite at epoch " + std::to_string(epoch));
      }
      adam.apply(params, grad, epoch, frozen);
      model.set_params(params);
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t b = 0; b < n; b += batch) {
        const std::size_t end = std::min(n, b + batch);
        const TrainingArrays mb = take_columns(data, order, b, end);
        const double l = model.loss(mb.e, mb.t, mb.u, &grad);
        if (!std::isfinite(l)) {
          throw NumericalError("training loss is not finite at epoch " + std::to_string(epoch));
        }
        if (!grad.allFinite()) {
          throw NumericalError("training gradient is not finite at epoch " +
                               std::to_string(epoch));
        }
        epoch_loss += l * static_cast<double>(end - b) / static_cast<double>(n);
        adam.apply(params, grad, epoch, frozen);
        model.set_params(params);
      }
    }
    result.train_loss.push_back(epoch_loss);
    if (validation && ((epoch + 1) % cfg.validate_every == 0 || epoch + 1 == cfg.epochs)) {
      result.val_loss.emplace_back(
          epoch + 1, model.loss(validation->e, validation->t, validation->u, nullptr));
    }
  }
  result.final_loss = model.loss(data.e, data.t, data.u, nullptr);
  if (!std::isfinite(result.final_loss)) {
    throw NumericalError("training loss is not finite after epoch " + std::to_string(cfg.epochs));
  }
  result.seconds = core::now_seconds() - start;
  return result;
}

TrainResult finetune(op::OperatorModel& model, const TrainingArrays& ood_data,
                     const FinetuneConfig& cfg) {
  cfg.validate();
  const std::size_t n = std::min(cfg.records(), ood_data.size());
  std::vector<Eigen::Index> idx(ood_data.size());
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const TrainingArrays subset = take_columns(ood_data, idx, 0, n);
  TrainConfig tc;
  tc.epochs = cfg.epochs();
  tc.max_batch = cfg.max_batch;
  tc.lr0 = cfg.lr;
  tc.decay = 1.0;
  tc.decay_period = 1;
  tc.seed = cfg.seed;
  const std::vector<bool> frozen = model.frozen_mask(cfg.freeze);
  return train(model, subset, tc, nullptr, &frozen);
}

nlohmann::json train_result_to_json(const TrainResult& r) {
  nlohmann::json val = nlohmann::json::array();
  for (const auto& [epoch, loss] : r.val_loss) val.push_back({epoch, loss});
  return {{"train_loss", r.train_loss},
          {"val_loss", val},
          {"final_loss", r.final_loss},
          {"seconds", r.seconds}};
}

}  // namespace ncolab::train
