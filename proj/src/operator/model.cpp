#include "ncolab/operator/model.hpp"

#include <cmath>
#include <limits>

#include "ncolab/core/checkpoint.hpp"
#include "ncolab/core/error.hpp"
#include "ncolab/core/util.hpp"

namespace ncolab::op {

using core::MlpParams;

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::NASM: return "nasm";
    case OperatorKind::SNO: return "sno";
    case OperatorKind::DON: return "don";
    case OperatorKind::MLP: return "mlp";
  }
  return "nasm";
}

OperatorKind operator_kind_from_string(const std::string& s) {
  if (s == "nasm") return OperatorKind::NASM;
  if (s == "sno") return OperatorKind::SNO;
  if (s == "don") return OperatorKind::DON;
  if (s == "mlp") return OperatorKind::MLP;
  throw ConfigError("unknown operator kind '" + s + "' (nasm, sno, don, mlp)");
}

std::string to_string(Aggregation a) { return a == Aggregation::Sum ? "sum" : "neural"; }

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "sum") return Aggregation::Sum;
  if (s == "neural") return Aggregation::Neural;
  throw ConfigError("unknown aggregation '" + s + "' (sum, neural)");
}

std::string to_string(FreezeSet f) {
  switch (f) {
    case FreezeSet::None: return "none";
    case FreezeSet::Default: return "default";
    case FreezeSet::All: return "all";
  }
  return "default";
}

FreezeSet freeze_set_from_string(const std::string& s) {
  if (s == "none") return FreezeSet::None;
  if (s == "default") return FreezeSet::Default;
  if (s == "all") return FreezeSet::All;
  throw ConfigError("unknown freeze set '" + s + "' (none, default, all)");
}

namespace {

void check_hidden(const std::vector<int>& hidden, const std::string& what) {
  for (int w : hidden) {
    if (w < 1) throw ConfigError(what + " hidden widths must be positive");
  }
}

bool is_nasm_like(OperatorKind k) { return k == OperatorKind::NASM || k == OperatorKind::SNO; }

std::vector<int> chain(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

int coef_in(const NasmConfig& c, int m) { return m + (c.non_static_coef ? 1 : 0); }
int coef_out(const NasmConfig& c, int d_u) { return d_u * c.basis.p + c.basis.n_theta(); }

std::vector<std::pair<std::string, std::vector<int>>> layout(const OperatorConfig& c, int m,
                                                             int d_u) {
  switch (c.kind) {
    case OperatorKind::NASM:
    case OperatorKind::SNO: {
      std::vector<std::pair<std::string, std::vector<int>>> l{
          {"coef", chain(coef_in(c.nasm, m), c.nasm.coef_hidden, coef_out(c.nasm, d_u))}};
      if (c.nasm.aggregation == Aggregation::Neural) {
        l.push_back({"agg", chain(c.nasm.basis.p, c.nasm.agg_hidden, 1)});
      }
      return l;
    }
    case OperatorKind::DON:
      return {{"branch", chain(m, c.don.branch_hidden, d_u * c.don.latent)},
              {"trunk", chain(1, c.don.trunk_hidden, c.don.latent)}};
    case OperatorKind::MLP:
      return {{"net", chain(m + 1, c.mlp.hidden, d_u)}};
  }
  return {};
}

std::size_t layout_params(const OperatorConfig& c, int m, int d_u) {
  std::size_t n = 0;
  for (const auto& [name, w] : layout(c, m, d_u)) n += core::mlp_param_count(w);
  return n;
}

nlohmann::json widths_json(const std::vector<int>& w) { return nlohmann::json(w); }

}  // namespace

void OperatorConfig::validate() const {
  if (is_nasm_like(kind)) {
    nasm.basis.validate();
    check_hidden(nasm.coef_hidden, "coefficient net");
    if (nasm.aggregation == Aggregation::Neural) check_hidden(nasm.agg_hidden, "aggregation net");
    if (kind == OperatorKind::SNO &&
        (nasm.basis.adaptive || nasm.non_static_coef || nasm.aggregation != Aggregation::Sum)) {
      throw ConfigError(
          "sno requires a fixed basis, a static coefficient net and sum aggregation");
    }
  } else if (kind == OperatorKind::DON) {
    check_hidden(don.branch_hidden, "branch");
    check_hidden(don.trunk_hidden, "trunk");
    if (don.latent < 1) throw ConfigError("don latent width must be positive");
  } else {
    check_hidden(mlp.hidden, "mlp");
  }
}

nlohmann::json config_to_json(const OperatorConfig& c) {
  nlohmann::json j{{"kind", to_string(c.kind)}, {"activation", core::to_string(c.activation)}};
  if (is_nasm_like(c.kind)) {
    j["basis"] = basis_to_json(c.nasm.basis);
    j["coef_hidden"] = widths_json(c.nasm.coef_hidden);
    j["non_static_coef"] = c.nasm.non_static_coef;
    j["aggregation"] = to_string(c.nasm.aggregation);
    j["agg_hidden"] = widths_json(c.nasm.agg_hidden);
  } else if (c.kind == OperatorKind::DON) {
    j["branch_hidden"] = widths_json(c.don.branch_hidden);
    j["trunk_hidden"] = widths_json(c.don.trunk_hidden);
    j["latent"] = c.don.latent;
  } else {
    j["hidden"] = widths_json(c.mlp.hidden);
  }
  return j;
}

OperatorConfig config_from_json(const nlohmann::json& j) {
  OperatorConfig c;
  try {
    c.kind = operator_kind_from_string(j.at("kind").get<std::string>());
    c.activation = core::activation_from_string(j.at("activation").get<std::string>());
    if (is_nasm_like(c.kind)) {
      c.nasm.basis = basis_from_json(j.at("basis"));
      c.nasm.coef_hidden = j.at("coef_hidden").get<std::vector<int>>();
      c.nasm.non_static_coef = j.at("non_static_coef").get<bool>();
      c.nasm.aggregation = aggregation_from_string(j.at("aggregation").get<std::string>());
      c.nasm.agg_hidden = j.at("agg_hidden").get<std::vector<int>>();
    } else if (c.kind == OperatorKind::DON) {
      c.don.branch_hidden = j.at("branch_hidden").get<std::vector<int>>();
      c.don.trunk_hidden = j.at("trunk_hidden").get<std::vector<int>>();
      c.don.latent = j.at("latent").get<int>();
    } else {
      c.mlp.hidden = j.at("hidden").get<std::vector<int>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("operator config: ") + e.what());
  }
  c.validate();
  return c;
}

OperatorConfig make_sno_config(const NasmConfig& nasm) {
  OperatorConfig c;
  c.kind = OperatorKind::SNO;
  c.nasm = nasm;
  c.nasm.basis.adaptive = false;
  c.nasm.non_static_coef = false;
  c.nasm.aggregation = Aggregation::Sum;
  return c;
}

int param_target(envs::EnvId env) {
  switch (env) {
    case envs::EnvId::Pendulum: return 3153;
    case envs::EnvId::RobotArm: return 1593;
    case envs::EnvId::CartPole: return 3233;
    case envs::EnvId::Quadrotor: return 13732;
    case envs::EnvId::Rocket: return 10299;
    case envs::EnvId::Brachistochrone: return 3153;
    case envs::EnvId::Zermelo: return 4993;
    case envs::EnvId::Linear: return 3153;
  }
  return 3153;
}

OperatorConfig default_config(OperatorKind kind, envs::EnvId env, int encoder_dim, int d_u) {
  OperatorConfig c;
  c.kind = kind;
  if (kind == OperatorKind::SNO) c = make_sno_config(c.nasm);
  const auto target = static_cast<double>(param_target(env));
  int best_w = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int w = 1; w <= 512; ++w) {
    OperatorConfig trial = c;
    trial.nasm.coef_hidden = {w, w};
    trial.don.branch_hidden = {w, w};
    trial.don.trunk_hidden = {w, w};
    trial.mlp.hidden = {w, w};
    const double gap =
        std::abs(static_cast<double>(layout_params(trial, encoder_dim, d_u)) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_w = w;
    }
  }
  c.nasm.coef_hidden = {best_w, best_w};
  c.don.branch_hidden = {best_w, best_w};
  c.don.trunk_hidden = {best_w, best_w};
  c.mlp.hidden = {best_w, best_w};
  c.validate();
  return c;
}

struct OperatorModel::Cache {
  Eigen::VectorXd t;
  std::vector<core::MlpCache> nets;
  Eigen::MatrixXd out0;    // coef / branch / mlp output
  Eigen::MatrixXd trunk;   // DON trunk output
  Eigen::MatrixXd theta_unit;  // tanh of the raw theta rows
  Eigen::MatrixXd basis;   // p x B
  Eigen::MatrixXd db_da;   // p x B
  Eigen::MatrixXd db_ds;   // p x B
};

OperatorModel::OperatorModel(OperatorConfig config, EncoderSpec encoder, int d_u,
                             std::uint64_t seed)
    : config_(std::move(config)), encoder_(std::move(encoder)), d_u_(d_u) {
  config_.validate();
  encoder_.validate();
  if (d_u_ < 1) throw ConfigError("operator needs d_u >= 1");
  std::uint64_t index = 0;
  for (const auto& [name, widths] : layout(config_, encoder_.dim(), d_u_)) {
    auto rng = core::make_stream(seed, "operator-init", index++);
    names_.push_back(name);
    nets_.push_back(core::make_mlp(widths, config_.activation, rng));
  }
}

MlpParams& OperatorModel::net(const std::string& name) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return nets_[i];
  }
  throw ConfigError("operator has no net named '" + name + "'");
}

std::size_t OperatorModel::num_params() const {
  std::size_t n = 0;
  for (const auto& p : nets_) n += p.num_params();
  return n;
}

Eigen::VectorXd OperatorModel::params() const {
  std::vector<double> flat;
  flat.reserve(num_params());
  for (const auto& p : nets_) core::append_flat(p, flat);
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

void OperatorModel::set_params(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != num_params()) {
    throw DimensionError("operator has " + std::to_string(num_params()) + " parameters, got " +
                         std::to_string(flat.size()));
  }
  std::span<const double> rest(flat.data(), static_cast<std::size_t>(flat.size()));
  for (auto& p : nets_) rest = rest.subspan(core::assign_flat(p, rest));
}

std::vector<bool> OperatorModel::frozen_mask(FreezeSet set) const {
  std::vector<bool> mask(num_params(), set == FreezeSet::All);
  if (set != FreezeSet::Default) return mask;
  std::size_t offset = 0;
  for (std::size_t n = 0; n < nets_.size(); ++n) {
    const auto& net = nets_[n];
    const std::string& name = names_[n];
    const std::size_t net_size = net.num_params();
    if (name == "trunk") {
      std::fill(mask.begin() + static_cast<std::ptrdiff_t>(offset),
                mask.begin() + static_cast<std::ptrdiff_t>(offset + net_size), true);
    }
    std::size_t layer_off = offset;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
      const auto& l = net.layers[k];
      const auto rows = static_cast<std::size_t>(l.weight.rows());
      const auto cols = static_cast<std::size_t>(l.weight.cols());
      const bool first = k == 0 && (name == "coef" || name == "net");
      const bool theta_rows = k + 1 == net.layers.size() && name == "coef";
      const std::size_t first_theta = static_cast<std::size_t>(d_u_ * config_.nasm.basis.p);
      for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
          if (first || (theta_rows && r >= first_theta)) mask[layer_off + c * rows + r] = true;
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        if (first || (theta_rows && r >= first_theta)) mask[layer_off + rows * cols + r] = true;
      }
      layer_off += rows * cols + rows;
    }
    offset += net_size;
  }
  return mask;
}

void OperatorModel::check_inputs(const Eigen::MatrixXd& e, const Eigen::VectorXd& t) const {
  if (e.rows() != encoder_.dim()) {
    throw SchemaError("operator expects encoded inputs of length " +
                      std::to_string(encoder_.dim()) + ", got " + std::to_string(e.rows()));
  }
  if (e.cols() != t.size()) {
    throw SchemaError("operator batch has " + std::to_string(e.cols()) + " inputs and " +
                      std::to_string(t.size()) + " times");
  }
}

Eigen::MatrixXd OperatorModel::run(const Eigen::MatrixXd& e, const Eigen::VectorXd& t,
                                   Cache* cache) const {
  check_inputs(e, t);
  const Eigen::Index batch = e.cols();
  auto net_cache = [&](std::size_t i) -> core::MlpCache* {
    return cache ? &cache->nets[i] : nullptr;
  };
  if (cache) {
    cache->t = t;
    cache->nets.assign(nets_.size(), core::MlpCache{});
  }
  Eigen::MatrixXd u(d_u_, batch);

  if (config_.kind == OperatorKind::MLP) {
    Eigen::MatrixXd x(e.rows() + 1, batch);
    x.topRows(e.rows()) = e;
    x.bottomRows(1) = t.transpose();
    u = core::mlp_forward_batch(nets_[0], x, net_cache(0));
    return u;
  }

  if (config_.kind == OperatorKind::DON) {
    const int q = config_.don.latent;
    const Eigen::MatrixXd br = core::mlp_forward_batch(nets_[0], e, net_cache(0));
    const Eigen::MatrixXd tr = core::mlp_forward_batch(nets_[1], t.transpose(), net_cache(1));
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) {
        u(d, b) = br.col(b).segment(d * q, q).dot(tr.col(b));
      }
    }
    if (cache) {
      cache->out0 = br;
      cache->trunk = tr;
    }
    return u;
  }

  const NasmConfig& nc = config_.nasm;
  const BasisSpec& bs = nc.basis;
  const int p = bs.p;
  const int n_theta = bs.n_theta();
  Eigen::MatrixXd x;
  if (nc.non_static_coef) {
    x.resize(e.rows() + 1, batch);
    x.topRows(1) = t.transpose();
    x.bottomRows(e.rows()) = e;
  } else {
    x = e;
  }
  const Eigen::MatrixXd out = core::mlp_forward_batch(nets_[0], x, net_cache(0));
  Eigen::MatrixXd basis(p, batch);
  Eigen::MatrixXd da(p, batch);
  Eigen::MatrixXd ds(p, batch);
  BasisEval ev;
  std::vector<double> theta(static_cast<std::size_t>(n_theta));
  const Eigen::Index theta_row = static_cast<Eigen::Index>(d_u_) * p;
  const Eigen::MatrixXd unit =
      core::tanh_array(out.bottomRows(out.rows() - theta_row).array()).matrix();
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int k = 0; k < n_theta; ++k) {
      theta[static_cast<std::size_t>(k)] = bs.theta_bound * unit(k, b);
    }
    eval_basis(bs, t[b], theta, ev);
    basis.col(b) = ev.b;
    da.col(b) = ev.db_da;
    ds.col(b) = ev.db_ds;
  }
  if (nc.aggregation == Aggregation::Sum) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) {
        u(d, b) = out.col(b).segment(static_cast<Eigen::Index>(d) * p, p).dot(basis.col(b));
      }
    }
  } else {
    Eigen::MatrixXd prod(p, batch * d_u_);
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) {
        prod.col(b * d_u_ + d) =
            out.col(b).segment(static_cast<Eigen::Index>(d) * p, p).cwiseProduct(basis.col(b));
      }
    }
    const Eigen::MatrixXd agg = core::mlp_forward_batch(nets_[1], prod, net_cache(1));
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) u(d, b) = agg(0, b * d_u_ + d);
    }
  }
  if (cache) {
    cache->out0 = out;
    cache->theta_unit = unit;
    cache->basis = std::move(basis);
    cache->db_da = std::move(da);
    cache->db_ds = std::move(ds);
  }
  return u;
}

void OperatorModel::backward(const Cache& cache, const Eigen::MatrixXd& g,
                             std::vector<MlpParams>& grads) const {
  const Eigen::Index batch = g.cols();
  if (config_.kind == OperatorKind::MLP) {
    core::mlp_backward_batch(nets_[0], cache.nets[0], g, grads[0]);
    return;
  }
  if (config_.kind == OperatorKind::DON) {
    const int q = config_.don.latent;
    Eigen::MatrixXd d_br(cache.out0.rows(), batch);
    Eigen::MatrixXd d_tr = Eigen::MatrixXd::Zero(q, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) {
        d_br.col(b).segment(d * q, q) = g(d, b) * cache.trunk.col(b);
        d_tr.col(b) += g(d, b) * cache.out0.col(b).segment(d * q, q);
      }
    }
    core::mlp_backward_batch(nets_[0], cache.nets[0], d_br, grads[0]);
    core::mlp_backward_batch(nets_[1], cache.nets[1], d_tr, grads[1]);
    return;
  }

  const NasmConfig& nc = config_.nasm;
  const int p = nc.basis.p;
  const Eigen::MatrixXd& out = cache.out0;
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(out.rows(), batch);
  Eigen::MatrixXd d_basis = Eigen::MatrixXd::Zero(p, batch);
  if (nc.aggregation == Aggregation::Sum) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) {
        const Eigen::Index row = static_cast<Eigen::Index>(d) * p;
        d_out.col(b).segment(row, p) = g(d, b) * cache.basis.col(b);
        d_basis.col(b) += g(d, b) * out.col(b).segment(row, p);
      }
    }
  } else {
    Eigen::MatrixXd d_agg(1, batch * d_u_);
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) d_agg(0, b * d_u_ + d) = g(d, b);
    }
    const Eigen::MatrixXd d_prod =
        core::mlp_backward_batch(nets_[1], cache.nets[1], d_agg, grads[1]);
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int d = 0; d < d_u_; ++d) {
        const Eigen::Index row = static_cast<Eigen::Index>(d) * p;
        const auto dp = d_prod.col(b * d_u_ + d);
        d_out.col(b).segment(row, p) = dp.cwiseProduct(cache.basis.col(b));
        d_basis.col(b) += dp.cwiseProduct(out.col(b).segment(row, p));
      }
    }
  }
  if (nc.basis.adaptive) {
    const Eigen::Index theta_row = static_cast<Eigen::Index>(d_u_) * p;
    const double bound = nc.basis.theta_bound;
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int j = 1; j < p; ++j) {
        const Eigen::Index ka = theta_row + 2 * (j - 1);
        const double ta = cache.theta_unit(2 * (j - 1), b);
        const double ts = cache.theta_unit(2 * (j - 1) + 1, b);
        d_out(ka, b) = d_basis(j, b) * cache.db_da(j, b) * bound * (1.0 - ta * ta);
        d_out(ka + 1, b) = d_basis(j, b) * cache.db_ds(j, b) * bound * (1.0 - ts * ts);
      }
    }
  }
  core::mlp_backward_batch(nets_[0], cache.nets[0], d_out, grads[0]);
}

Eigen::MatrixXd OperatorModel::forward(const Eigen::MatrixXd& e, const Eigen::VectorXd& t) const {
  return run(e, t, nullptr);
}

Eigen::VectorXd OperatorModel::forward(const Eigen::VectorXd& e, double t) const {
  Eigen::VectorXd tv(1);
  tv[0] = t;
  return run(Eigen::MatrixXd(e), tv, nullptr).col(0);
}

Eigen::MatrixXd OperatorModel::theta(const Eigen::MatrixXd& e, const Eigen::VectorXd& t) const {
  check_inputs(e, t);
  if (!is_nasm_like(config_.kind) || !config_.nasm.basis.adaptive) {
    return Eigen::MatrixXd(0, e.cols());
  }
  const NasmConfig& nc = config_.nasm;
  Eigen::MatrixXd x;
  if (nc.non_static_coef) {
    x.resize(e.rows() + 1, e.cols());
    x.topRows(1) = t.transpose();
    x.bottomRows(e.rows()) = e;
  } else {
    x = e;
  }
  const Eigen::MatrixXd out = core::mlp_forward_batch(nets_[0], x);
  const Eigen::Index row = static_cast<Eigen::Index>(d_u_) * nc.basis.p;
  return (nc.basis.theta_bound * core::tanh_array(out.bottomRows(out.rows() - row).array()))
      .matrix();
}

double OperatorModel::loss(const Eigen::MatrixXd& e, const Eigen::VectorXd& t,
                           const Eigen::MatrixXd& target, Eigen::VectorXd* grad) const {
  if (target.rows() != d_u_ || target.cols() != e.cols()) {
    throw SchemaError("targets must be " + std::to_string(d_u_) + " x " +
                      std::to_string(e.cols()));
  }
  Cache cache;
  const Eigen::MatrixXd u = run(e, t, grad ? &cache : nullptr);
  const Eigen::MatrixXd r = u - target;
  const double n = static_cast<double>(e.cols());
  const double l = r.squaredNorm() / n;
  if (grad) {
    std::vector<MlpParams> grads;
    for (const auto& p : nets_) grads.push_back(core::zeros_like(p));
    backward(cache, (2.0 / n) * r, grads);
    std::vector<double> flat;
    flat.reserve(num_params());
    for (const auto& gp : grads) core::append_flat(gp, flat);
    *grad = Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  }
  return l;
}

envs::ControlGrid OperatorModel::predict_grid(const envs::OcpInstance& inst) const {
  const Eigen::VectorXd e = encode_instance(inst, encoder_);
  const int n = inst.n_grid;
  const Eigen::MatrixXd batch = e.replicate(1, n);
  const Eigen::VectorXd t =
      Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  const Eigen::MatrixXd u = run(batch, t, nullptr);
  return envs::ControlGrid{u.transpose()};
}

nlohmann::json OperatorModel::descriptor() const {
  nlohmann::json nets = nlohmann::json::array();
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    nets.push_back({{"name", names_[i]},
                    {"widths", nets_[i].widths()},
                    {"activation", core::to_string(nets_[i].activation)}});
  }
  return {{"arch", to_string(config_.kind)},
          {"config", config_to_json(config_)},
          {"encoder", encoder_to_json(encoder_)},
          {"d_u", d_u_},
          {"nets", nets}};
}

void OperatorModel::save(const std::filesystem::path& stem) const {
  const Eigen::VectorXd p = params();
  core::write_checkpoint(stem, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                         descriptor());
}

OperatorModel OperatorModel::load(const std::filesystem::path& stem) {
  const core::Checkpoint ck = core::read_checkpoint(stem);
  const auto& d = ck.descriptor;
  OperatorConfig cfg;
  EncoderSpec enc;
  int d_u = 0;
  try {
    cfg = config_from_json(d.at("config"));
    enc = encoder_from_json(d.at("encoder"));
    d_u = d.at("d_u").get<int>();
    if (d.at("arch").get<std::string>() != to_string(cfg.kind)) {
      throw SchemaError("checkpoint arch tag does not match its config");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("checkpoint " + stem.string() + ": " + e.what());
  }
  OperatorModel m(cfg, enc, d_u, 0);
  if (m.num_params() != ck.params.size()) {
    throw SchemaError("checkpoint " + stem.string() + " holds " + std::to_string(ck.params.size()) +
                      " parameters (hash " + d.value("params_hash", std::string("?")) +
                      "), architecture needs " + std::to_string(m.num_params()));
  }
  m.set_params(Eigen::Map<const Eigen::VectorXd>(ck.params.data(),
                                                 static_cast<Eigen::Index>(ck.params.size())));
  return m;
}

}  // namespace ncolab::op
