#pragma once

// Weighted multi-view contrastive deep clustering. Each view owns an
// autoencoder; a shared head maps every view's latent code to soft cluster
// assignments H, which are sharpened into target distributions P. Training
// minimizes L = L_pre + alpha * L_c + beta * L_a in two stages: the
// autoencoders alone (L_pre), then the whole objective.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sqcsef/dataset.hpp"
#include "sqcsef/factors.hpp"
#include "sqcsef/kmeans.hpp"
#include "sqcsef/network.hpp"

namespace sqcsef::cvcl {

struct Config {
  int k = 3;
  std::vector<int> encoder_hidden{16, 32, 64};
  int latent_dim = 128;
  std::vector<int> head_hidden{128, 64};
  double alpha = 1.0;
  double beta = 1.0;
  double lr = 0.0005;
  int pre_epochs = 50;
  int train_epochs = 150;
  std::uint64_t seed = 0;
  std::vector<double> view_weights;  ///< empty means equal weights

  static Config desk_scale();
  static Config paper_scale();
  void validate() const;
};

Config preset(const std::string& name);

struct ViewData {
  std::vector<Eigen::MatrixXd> views;     ///< M x d_v each
  std::vector<std::vector<int>> columns;  ///< source column of each view column

  [[nodiscard]] Eigen::Index samples() const { return views.empty() ? 0 : views.front().rows(); }
};

/// Column slices of the standardized matrix in partition order. Throws
/// DataError on an empty view or a partition that is not a disjoint cover.
ViewData build_views(const Eigen::MatrixXd& standardized, const factors::ViewPartition& partition);
ViewData build_views(const StandardizedDataset& d, const factors::ViewPartition& partition);

enum class Stage { pretrain, train };

struct EpochRecord {
  Stage stage = Stage::pretrain;
  int epoch = 0;  ///< 1-based, counted across both stages
  double pre = 0.0;
  double contrastive = 0.0;
  double regularizer = 0.0;
  double total = 0.0;
};

struct ViewNetwork {
  nn::Mlp encoder;
  nn::Mlp decoder;
};

struct Model {
  Config config;
  std::vector<ViewNetwork> views;
  nn::Mlp head;
  std::vector<EpochRecord> log;

  /// All tensors in a fixed order: per view encoder then decoder, then head.
  std::vector<Eigen::MatrixXd*> parameters();
  std::vector<const Eigen::MatrixXd*> parameters() const;
};

/// Seeded initialization. Decoder widths mirror the encoder.
Model init_model(const std::vector<int>& view_dims, const Config& cfg);
Model init_model(const ViewData& data, const Config& cfg);

struct Losses {
  double pre = 0.0;
  double contrastive = 0.0;
  double regularizer = 0.0;
  double total = 0.0;
};

/// Soft assignments H^(v) = softmax(head(encoder_v(E^(v)))).
std::vector<Eigen::MatrixXd> soft_assign(const Model& model, const ViewData& data);

/// p_rc = (h_rc^2 / f_c) / sum_j (h_rj^2 / f_j) with f_c = sum_i h_ic.
/// Throws NumericError if a column of H sums to zero.
Eigen::MatrixXd target_distribution(const Eigen::MatrixXd& h);
/// Gradient of a scalar through target_distribution.
Eigen::MatrixXd target_distribution_backward(const Eigen::MatrixXd& h, const Eigen::MatrixXd& p,
                                             const Eigen::MatrixXd& grad_p);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Cross-view contrastive loss over the columns of each P (>= 2 views).
/// When `grads` is non-null it receives dL_c/dP per view.
double contrastive_loss(const std::vector<Eigen::MatrixXd>& p, std::vector<Eigen::MatrixXd>* grads = nullptr);

/// sum_v sum_j q_j log q_j with q_j the mean of column j of P^(v).
double entropy_regularizer(const std::vector<Eigen::MatrixXd>& p, std::vector<Eigen::MatrixXd>* grads = nullptr);

/// L_pre, L_c, L_a and L on the current parameters. L_c is 0 for a single view.
Losses total_loss(const Model& model, const ViewData& data, const Config& cfg);

/// Loss of `stage` and its exact gradient, in parameters() order. The
/// pretrain stage differentiates L_pre only; the train stage differentiates L.
Losses loss_and_gradient(const Model& model, const ViewData& data, const Config& cfg, Stage stage,
                         std::vector<Eigen::MatrixXd>& grads);

/// Full-batch Adam on L_pre for cfg.pre_epochs epochs. Throws NumericError on
/// a non-finite loss.
Model pretrain(Model model, const ViewData& data, const Config& cfg);
/// Full-batch Adam on L for cfg.train_epochs epochs.
Model train(Model model, const ViewData& data, const Config& cfg);

/// argmax_c (1/n_v) sum_v w_v p_ic^(v); ties go to the lower index. Centroids
/// are per-cluster means of `standardized`. Clusters left empty are dropped,
/// remaining labels compacted, and a warning recorded.
ClusteringResult assign(const Model& model, const ViewData& data, std::span<const double> weights,
                        const Eigen::MatrixXd& standardized);
/// Same rule on precomputed target distributions.
std::vector<int> weighted_argmax(const std::vector<Eigen::MatrixXd>& p, std::span<const double> weights);

/// Versioned JSON checkpoint: config echo, every tensor (row-major with its
/// shape) and the training log. Doubles round-trip exactly.
std::string checkpoint_json(const Model& model);
Model load_checkpoint_json(const std::string& text);
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace sqcsef::cvcl
