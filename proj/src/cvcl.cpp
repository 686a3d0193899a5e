#include "sqcsef/cvcl.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sqcsef/error.hpp"

namespace sqcsef::cvcl {

using nlohmann::json;

Config Config::desk_scale() { return Config{}; }

Config Config::paper_scale() {
  Config c;
  c.encoder_hidden = {64, 128, 256, 512, 1024};
  c.latent_dim = 2048;
  c.head_hidden = {2048, 1024, 1024};
  return c;
}

Config preset(const std::string& name) {
  if (name == "desk-scale") return Config::desk_scale();
  if (name == "paper-scale") return Config::paper_scale();
  throw ConfigError("unknown preset '" + name + "' (expected desk-scale or paper-scale)");
}

void Config::validate() const {
  if (k < 2) throw ConfigError(fmt::format("cvcl needs k >= 2, got {}", k));
  if (latent_dim < 1) throw ConfigError("latent_dim must be positive");
  for (int w : encoder_hidden) {
    if (w < 1) throw ConfigError("encoder widths must be positive");
  }
  for (int w : head_hidden) {
    if (w < 1) throw ConfigError("head widths must be positive");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("alpha and beta must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (pre_epochs < 0 || train_epochs < 0) throw ConfigError("epoch counts must be non-negative");
}

// -- views -------------------------------------------------------------------

ViewData build_views(const Eigen::MatrixXd& standardized, const factors::ViewPartition& partition) {
  factors::validate_partition(partition, static_cast<int>(standardized.cols()));
  ViewData out;
  for (const auto& view : partition.views) {
    Eigen::MatrixXd m(standardized.rows(), static_cast<Eigen::Index>(view.indicators.size()));
    for (std::size_t c = 0; c < view.indicators.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = standardized.col(view.indicators[c]);
    out.views.push_back(std::move(m));
    out.columns.push_back(view.indicators);
  }
  return out;
}

ViewData build_views(const StandardizedDataset& d, const factors::ViewPartition& partition) {
  return build_views(d.matrix, partition);
}

// -- model -------------------------------------------------------------------

std::vector<Eigen::MatrixXd*> Model::parameters() {
  std::vector<Eigen::MatrixXd*> out;
  for (auto& v : views) {
    for (auto* p : v.encoder.parameters()) out.push_back(p);
    for (auto* p : v.decoder.parameters()) out.push_back(p);
  }
  for (auto* p : head.parameters()) out.push_back(p);
  return out;
}

std::vector<const Eigen::MatrixXd*> Model::parameters() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (const auto& v : views) {
    for (const auto* p : v.encoder.parameters()) out.push_back(p);
    for (const auto* p : v.decoder.parameters()) out.push_back(p);
  }
  for (const auto* p : head.parameters()) out.push_back(p);
  return out;
}

Model init_model(const std::vector<int>& view_dims, const Config& cfg) {
  cfg.validate();
  if (view_dims.empty()) throw DataError("cvcl needs at least one view");
  Model m;
  m.config = cfg;
  Rng rng(cfg.seed);
  for (int d : view_dims) {
    std::vector<int> enc{d};
    enc.insert(enc.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
    enc.push_back(cfg.latent_dim);
    const std::vector<int> dec(enc.rbegin(), enc.rend());
    ViewNetwork v;
    v.encoder = nn::Mlp(enc, nn::Activation::relu, rng);
    v.decoder = nn::Mlp(dec, nn::Activation::relu, rng);
    m.views.push_back(std::move(v));
  }
  std::vector<int> head{cfg.latent_dim};
  head.insert(head.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
  head.push_back(cfg.k);
  m.head = nn::Mlp(head, nn::Activation::relu, rng);
  return m;
}

Model init_model(const ViewData& data, const Config& cfg) {
  std::vector<int> dims;
  for (const auto& v : data.views) dims.push_back(static_cast<int>(v.cols()));
  return init_model(dims, cfg);
}

namespace {

void check_data(const Model& model, const ViewData& data) {
  if (data.views.size() != model.views.size()) {
    throw DataError(fmt::format("model has {} views, data has {}", model.views.size(), data.views.size()));
  }
  for (std::size_t v = 0; v < data.views.size(); ++v) {
    if (data.views[v].cols() != model.views[v].encoder.layers().front().weight.rows()) {
      throw DataError(fmt::format("view {} width does not match its encoder", v));
    }
    if (data.views[v].rows() != data.views.front().rows()) throw DataError("views disagree on the sample count");
  }
}

// Column-wise cosine similarity S(j, k) = s(x_j, y_k) plus the unit columns.
struct CosineBlock {
  Eigen::MatrixXd xn, yn, s;
  Eigen::VectorXd xnorm, ynorm;
};

Eigen::VectorXd column_norms(const Eigen::MatrixXd& x) {
  Eigen::VectorXd n = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < n.size(); ++j) {
    if (!(n(j) > 0.0)) throw NumericError(fmt::format("cosine similarity undefined: column {} is zero", j));
  }
  return n;
}

CosineBlock cosine_block(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  CosineBlock b;
  b.xnorm = column_norms(x);
  b.ynorm = column_norms(y);
  b.xn = x * b.xnorm.cwiseInverse().asDiagonal();
  b.yn = y * b.ynorm.cwiseInverse().asDiagonal();
  b.s = b.xn.transpose() * b.yn;
  return b;
}

// d/dx of a function of the unit column xn = x / |x|.
Eigen::MatrixXd unit_backward(const Eigen::MatrixXd& xn, const Eigen::VectorXd& norm, const Eigen::MatrixXd& dxn) {
  Eigen::MatrixXd out = dxn;
  for (Eigen::Index j = 0; j < xn.cols(); ++j) {
    const double proj = xn.col(j).dot(dxn.col(j));
    out.col(j) = (dxn.col(j) - proj * xn.col(j)) / norm(j);
  }
  return out;
}

struct Forward {
  std::vector<nn::Trace> enc, dec, head;
  std::vector<Eigen::MatrixXd> z, recon, h, p;
};

Forward run_forward(const Model& model, const ViewData& data, bool need_head) {
  Forward f;
  const std::size_t nv = data.views.size();
  f.enc.resize(nv);
  f.dec.resize(nv);
  f.head.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    f.z.push_back(model.views[v].encoder.forward(data.views[v], &f.enc[v]));
    f.recon.push_back(model.views[v].decoder.forward(f.z[v], &f.dec[v]));
    if (need_head) {
      f.h.push_back(nn::softmax_rows(model.head.forward(f.z[v], &f.head[v])));
      f.p.push_back(target_distribution(f.h[v]));
    }
  }
  return f;
}

Losses combine(double pre, double lc, double la, const Config& cfg) {
  return {pre, lc, la, pre + cfg.alpha * lc + cfg.beta * la};
}

}  // namespace

std::vector<Eigen::MatrixXd> soft_assign(const Model& model, const ViewData& data) {
  check_data(model, data);
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t v = 0; v < data.views.size(); ++v) {
    out.push_back(nn::softmax_rows(model.head.forward(model.views[v].encoder.forward(data.views[v]))));
  }
  return out;
}

Eigen::MatrixXd target_distribution(const Eigen::MatrixXd& h) {
  const Eigen::RowVectorXd f = h.colwise().sum();
  for (Eigen::Index c = 0; c < f.size(); ++c) {
    if (!(f(c) > 0.0)) throw NumericError(fmt::format("degenerate assignment: cluster column {} is identically zero", c));
  }
  Eigen::MatrixXd u = h.cwiseProduct(h);
  for (Eigen::Index c = 0; c < u.cols(); ++c) u.col(c) /= f(c);
  const Eigen::VectorXd s = u.rowwise().sum();
  for (Eigen::Index r = 0; r < u.rows(); ++r) u.row(r) /= s(r);
  return u;
}

Eigen::MatrixXd target_distribution_backward(const Eigen::MatrixXd& h, const Eigen::MatrixXd& p,
                                             const Eigen::MatrixXd& grad_p) {
  const Eigen::RowVectorXd f = h.colwise().sum();
  Eigen::MatrixXd u = h.cwiseProduct(h);
  for (Eigen::Index c = 0; c < u.cols(); ++c) u.col(c) /= f(c);
  const Eigen::VectorXd s = u.rowwise().sum();
  // p = u / s (row-wise)
  Eigen::MatrixXd du = grad_p;
  const Eigen::VectorXd dot = grad_p.cwiseProduct(p).rowwise().sum();
  du.colwise() -= dot;
  for (Eigen::Index r = 0; r < du.rows(); ++r) du.row(r) /= s(r);
  // u = h^2 / f (column-wise), f = column sums of h
  Eigen::MatrixXd dh(h.rows(), h.cols());
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    const double df = -(du.col(c).cwiseProduct(h.col(c)).cwiseProduct(h.col(c))).sum() / (f(c) * f(c));
    dh.col(c) = (2.0 / f(c)) * du.col(c).cwiseProduct(h.col(c));
    dh.col(c).array() += df;
  }
  return dh;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw NumericError("cosine similarity: length mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw NumericError("cosine similarity undefined for a zero vector");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

double contrastive_loss(const std::vector<Eigen::MatrixXd>& p, std::vector<Eigen::MatrixXd>* grads) {
  const std::size_t nv = p.size();
  if (nv < 2) throw NumericError("contrastive loss needs at least two views");
  const Eigen::Index k = p.front().cols();
  if (grads != nullptr) {
    grads->clear();
    for (const auto& m : p) grads->push_back(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
  }
  const double kk = static_cast<double>(k);
  double total = 0.0;
  for (std::size_t v1 = 0; v1 < nv; ++v1) {
    const CosineBlock self = cosine_block(p[v1], p[v1]);
    for (std::size_t v2 = 0; v2 < nv; ++v2) {
      if (v2 == v1) continue;
      const CosineBlock cross = cosine_block(p[v1], p[v2]);
      const Eigen::MatrixXd e_self = self.s.array().exp().matrix();
      const Eigen::MatrixXd e_cross = cross.s.array().exp().matrix();
      Eigen::MatrixXd g_self = Eigen::MatrixXd::Zero(k, k);
      Eigen::MatrixXd g_cross = Eigen::MatrixXd::Zero(k, k);
      double l = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) {
        const double a = e_self.col(c).sum() - e_self(c, c);
        const double b = e_cross.col(c).sum();
        l += std::log(a + b) - cross.s(c, c);
        for (Eigen::Index j = 0; j < k; ++j) {
          if (j != c) g_self(j, c) = e_self(j, c) / (a + b);
          g_cross(j, c) = e_cross(j, c) / (a + b);
        }
        g_cross(c, c) -= 1.0;
      }
      total += 0.5 * l / kk;
      if (grads != nullptr) {
        const double scale = 0.5 / kk;
        g_self *= scale;
        g_cross *= scale;
        // S_self = Xn^T Xn, S_cross = Xn^T Yn
        const Eigen::MatrixXd dxn = self.xn * (g_self + g_self.transpose()) + cross.yn * g_cross.transpose();
        const Eigen::MatrixXd dyn = cross.xn * g_cross;
        (*grads)[v1] += unit_backward(self.xn, self.xnorm, dxn);
        (*grads)[v2] += unit_backward(cross.yn, cross.ynorm, dyn);
      }
    }
  }
  return total;
}

double entropy_regularizer(const std::vector<Eigen::MatrixXd>& p, std::vector<Eigen::MatrixXd>* grads) {
  if (grads != nullptr) grads->clear();
  double total = 0.0;
  for (const auto& m : p) {
    const double rows = static_cast<double>(m.rows());
    const Eigen::RowVectorXd q = m.colwise().sum() / rows;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      if (q(j) > 0.0) {
        total += q(j) * std::log(q(j));
        g.col(j).setConstant((std::log(q(j)) + 1.0) / rows);
      }
    }
    if (grads != nullptr) grads->push_back(std::move(g));
  }
  return total;
}

Losses total_loss(const Model& model, const ViewData& data, const Config& cfg) {
  check_data(model, data);
  const Forward f = run_forward(model, data, true);
  double pre = 0.0;
  for (std::size_t v = 0; v < data.views.size(); ++v) pre += (f.recon[v] - data.views[v]).squaredNorm();
  const double lc = f.p.size() >= 2 ? contrastive_loss(f.p) : 0.0;
  const double la = entropy_regularizer(f.p);
  return combine(pre, lc, la, cfg);
}

Losses loss_and_gradient(const Model& model, const ViewData& data, const Config& cfg, Stage stage,
                         std::vector<Eigen::MatrixXd>& grads) {
  check_data(model, data);
  const auto params = model.parameters();
  grads.clear();
  for (const auto* p : params) grads.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));

  const std::size_t nv = data.views.size();
  // Offsets of each network's tensors within parameters().
  std::vector<std::size_t> enc_off(nv), dec_off(nv);
  std::size_t off = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    enc_off[v] = off;
    off += model.views[v].encoder.layers().size() * 2;
    dec_off[v] = off;
    off += model.views[v].decoder.layers().size() * 2;
  }
  const std::size_t head_off = off;
  const auto slice = [&](std::size_t start, std::size_t count) {
    std::vector<Eigen::MatrixXd*> s;
    for (std::size_t i = 0; i < count; ++i) s.push_back(&grads[start + i]);
    return s;
  };

  const Forward f = run_forward(model, data, true);
  double pre = 0.0;
  std::vector<Eigen::MatrixXd> dz(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const Eigen::MatrixXd diff = f.recon[v] - data.views[v];
    pre += diff.squaredNorm();
    dz[v] = model.views[v].decoder.backward(f.dec[v], 2.0 * diff,
                                            slice(dec_off[v], model.views[v].decoder.layers().size() * 2));
  }
  std::vector<Eigen::MatrixXd> gc, ga;
  const double lc = nv >= 2 ? contrastive_loss(f.p, stage == Stage::train ? &gc : nullptr) : 0.0;
  const double la = entropy_regularizer(f.p, stage == Stage::train ? &ga : nullptr);
  if (stage == Stage::train) {
    const auto head_grads = slice(head_off, model.head.layers().size() * 2);
    for (std::size_t v = 0; v < nv; ++v) {
      Eigen::MatrixXd dp = cfg.beta * ga[v];
      if (nv >= 2) dp += cfg.alpha * gc[v];
      const Eigen::MatrixXd dh = target_distribution_backward(f.h[v], f.p[v], dp);
      const Eigen::MatrixXd dlogits = nn::softmax_rows_backward(f.h[v], dh);
      dz[v] += model.head.backward(f.head[v], dlogits, head_grads);
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    model.views[v].encoder.backward(f.enc[v], dz[v], slice(enc_off[v], model.views[v].encoder.layers().size() * 2));
  }
  return combine(pre, lc, la, cfg);
}

namespace {

Model run_stage(Model model, const ViewData& data, const Config& cfg, Stage stage, int epochs) {
  check_data(model, data);
  auto params = model.parameters();
  nn::Adam opt(params, cfg.lr);
  std::vector<Eigen::MatrixXd> grads;
  const int offset = model.log.empty() ? 0 : model.log.back().epoch;
  for (int e = 1; e <= epochs; ++e) {
    const Losses l = loss_and_gradient(model, data, cfg, stage, grads);
    const double objective = stage == Stage::pretrain ? l.pre : l.total;
    if (!std::isfinite(objective) || !std::isfinite(l.total)) {
      throw NumericError(fmt::format("{} diverged at epoch {} (loss {})",
                                     stage == Stage::pretrain ? "pretraining" : "training", offset + e, objective));
    }
    model.log.push_back({stage, offset + e, l.pre, l.contrastive, l.regularizer, l.total});
    opt.step(params, grads);
  }
  return model;
}

}  // namespace

Model pretrain(Model model, const ViewData& data, const Config& cfg) {
  return run_stage(std::move(model), data, cfg, Stage::pretrain, cfg.pre_epochs);
}

Model train(Model model, const ViewData& data, const Config& cfg) {
  return run_stage(std::move(model), data, cfg, Stage::train, cfg.train_epochs);
}

std::vector<int> weighted_argmax(const std::vector<Eigen::MatrixXd>& p, std::span<const double> weights) {
  if (p.empty()) throw DataError("weighted assignment needs at least one view");
  if (weights.size() != p.size()) {
    throw ConfigError(fmt::format("{} view weights for {} views", weights.size(), p.size()));
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError(fmt::format("view weight {} is not a non-negative number", w));
    wsum += w;
  }
  if (!(wsum > 0.0)) throw ConfigError("view weights are all zero");
  const double nv = static_cast<double>(p.size());
  Eigen::MatrixXd score = Eigen::MatrixXd::Zero(p.front().rows(), p.front().cols());
  for (std::size_t v = 0; v < p.size(); ++v) score += (weights[v] / nv) * p[v];
  std::vector<int> out(score.rows());
  for (Eigen::Index i = 0; i < score.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < score.cols(); ++c) {
      if (score(i, c) > score(i, best)) best = c;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

ClusteringResult assign(const Model& model, const ViewData& data, std::span<const double> weights,
                        const Eigen::MatrixXd& standardized) {
  if (standardized.rows() != data.samples()) throw DataError("standardized matrix and views disagree on sample count");
  std::vector<Eigen::MatrixXd> p;
  for (const auto& h : soft_assign(model, data)) p.push_back(target_distribution(h));
  std::vector<int> raw = weighted_argmax(p, weights);
  const int k = model.config.k;
  std::vector<int> count(k, 0);
  for (int a : raw) ++count[a];
  std::vector<int> relabel(k, -1);
  int next = 0;
  ClusteringResult r;
  for (int c = 0; c < k; ++c) {
    if (count[c] > 0) {
      relabel[c] = next++;
    } else {
      r.warnings.push_back(fmt::format("cvcl cluster {} received no samples and is dropped from grading", c));
    }
  }
  for (int& a : raw) a = relabel[a];
  r.assignments = std::move(raw);
  r.centroids = cluster_means(standardized, r.assignments, next);
  r.inertia = inertia(standardized, r.assignments, r.centroids);
  r.iterations = static_cast<int>(model.log.size());
  r.method = ClusterMethod::cvcl;
  return r;
}

// -- checkpoint --------------------------------------------------------------

namespace {

constexpr const char* kCheckpointFormat = "sqcsef-cvcl-checkpoint";
constexpr int kCheckpointVersion = 1;

json config_to_json(const Config& c) {
  return json{{"k", c.k},
              {"encoder_hidden", c.encoder_hidden},
              {"latent_dim", c.latent_dim},
              {"head_hidden", c.head_hidden},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"lr", c.lr},
              {"pre_epochs", c.pre_epochs},
              {"train_epochs", c.train_epochs},
              {"seed", c.seed},
              {"view_weights", c.view_weights}};
}

Config config_from_json(const json& j) {
  Config c;
  c.k = j.at("k").get<int>();
  c.encoder_hidden = j.at("encoder_hidden").get<std::vector<int>>();
  c.latent_dim = j.at("latent_dim").get<int>();
  c.head_hidden = j.at("head_hidden").get<std::vector<int>>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.lr = j.at("lr").get<double>();
  c.pre_epochs = j.at("pre_epochs").get<int>();
  c.train_epochs = j.at("train_epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.view_weights = j.at("view_weights").get<std::vector<double>>();
  return c;
}

json tensor_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

void tensor_from_json(const json& j, Eigen::MatrixXd& m) {
  const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
      static_cast<Eigen::Index>(data.size()) != m.size()) {
    throw DataError("checkpoint tensor shape does not match the configured architecture");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = data[static_cast<std::size_t>(i * m.cols() + c)];
  }
}

}  // namespace

std::string checkpoint_json(const Model& model) {
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["config"] = config_to_json(model.config);
  std::vector<int> dims;
  for (const auto& v : model.views) dims.push_back(v.encoder.widths().front());
  j["view_dims"] = dims;
  json tensors = json::array();
  for (const auto* p : model.parameters()) tensors.push_back(tensor_to_json(*p));
  j["parameters"] = std::move(tensors);
  json log = json::array();
  for (const auto& e : model.log) {
    log.push_back({{"stage", e.stage == Stage::pretrain ? "pretrain" : "train"},
                   {"epoch", e.epoch},
                   {"pre", e.pre},
                   {"contrastive", e.contrastive},
                   {"regularizer", e.regularizer},
                   {"total", e.total}});
  }
  j["log"] = std::move(log);
  return j.dump(1) + "\n";
}

Model load_checkpoint_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) throw DataError("not a cvcl checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw DataError(fmt::format("unsupported checkpoint version {}", j.at("version").get<int>()));
    }
    Model m = init_model(j.at("view_dims").get<std::vector<int>>(), config_from_json(j.at("config")));
    const auto params = m.parameters();
    const auto& tensors = j.at("parameters");
    if (tensors.size() != params.size()) throw DataError("checkpoint tensor count does not match the architecture");
    for (std::size_t i = 0; i < params.size(); ++i) tensor_from_json(tensors[i], *params[i]);
    for (const auto& e : j.at("log")) {
      m.log.push_back({e.at("stage").get<std::string>() == "pretrain" ? Stage::pretrain : Stage::train,
                       e.at("epoch").get<int>(), e.at("pre").get<double>(), e.at("contrastive").get<double>(),
                       e.at("regularizer").get<double>(), e.at("total").get<double>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << checkpoint_json(model);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_checkpoint_json(ss.str());
}

}  // namespace sqcsef::cvcl
