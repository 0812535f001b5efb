// Interference-and-noise cancellation filter for the uncooperative case: a
// dense autoencoder (rectifier hidden layers, linear output) trained with
// minibatch momentum SGD to map interfered receive records to their clean
// desired-signal component. Inner loops run on the jcr::kernels backends.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jcr/receiver.hpp"

namespace jcr {

// Minimal row-major matrix used by the training path.
struct RowMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RowMat() = default;
  RowMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct AutoencoderNet {
  std::vector<int> layer_sizes;            // [dim, hidden..., dim]
  std::vector<RowMat> weights;             // layer i: sizes[i] x sizes[i+1]
  std::vector<std::vector<double>> biases; // layer i: sizes[i+1]
  double input_scale = 1.0;                // dataset RMS captured at training

  int input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  int output_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

// He-initialized net with the given layer sizes (first and last must match).
AutoencoderNet make_net(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Default shape used throughout: dim -> 2*dim/3 -> dim/3 -> dim.
std::vector<int> default_layer_sizes(int dim);

struct TrainingSet {
  RowMat inputs;    // one example per row
  RowMat targets;
  double validation_fraction = 0.10;
  int snapshot_variations = 0;  // bookkeeping: examples per snapshot config
};

enum class Optimizer { Adam, SgdMomentum };

struct TrainConfig {
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
  // Adam is the default: plain momentum SGD needs several thousand epochs to
  // push the rectifier bottleneck into its working regime on these records.
  Optimizer optimizer = Optimizer::Adam;
  double momentum = 0.9;   // SgdMomentum only
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int patience = 20;       // epochs without validation improvement
  std::uint64_t seed = 1;
  bool normalize = true;   // divide data by its RMS during training

  void validate() const;
};

struct TrainResult {
  std::vector<double> train_loss;  // per epoch, mean per-example loss
  std::vector<double> val_loss;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

// [Re flattened; Im flattened], antenna index slow, snapshot index fast.
Eigen::VectorXd vectorize(const ReceiveRecord& record);
Eigen::VectorXd vectorize(const CMat& samples);
CMat devectorize(const Eigen::VectorXd& chi, int n_rx, int snapshots);

// Plain composition chi' = psi(W' phi(W chi + b) + b'), no scaling applied.
Eigen::VectorXd forward(const AutoencoderNet& net, const Eigen::VectorXd& chi);

double loss(const Eigen::VectorXd& chi, const Eigen::VectorXd& chi_prime);

// Reverse-mode gradients of loss(target, forward(chi)) in every parameter.
struct Gradients {
  std::vector<RowMat> d_weights;
  std::vector<std::vector<double>> d_biases;
};
Gradients loss_gradients(const AutoencoderNet& net, const Eigen::VectorXd& chi,
                         const Eigen::VectorXd& target);

// Minibatch momentum SGD on the reconstruction loss; keeps the weights of the
// best validation epoch. Throws DivergenceError when the loss leaves the
// finite range.
TrainResult train(AutoencoderNet& net, const TrainingSet& set,
                  const TrainConfig& cfg);

// devectorize(scale * forward(net, vectorize(record) / scale)).
ReceiveRecord denoise(const AutoencoderNet& net, const ReceiveRecord& record);

// Root mean square error over all complex entries.
double rmse(const CMat& estimate, const CMat& truth);

// Weight container: one ASCII header line with the layer shapes and scale,
// then row-major float64 payload per layer (weights then bias).
void save_net(std::ostream& os, const AutoencoderNet& net);
AutoencoderNet load_net(std::istream& is);
void save_net_file(const std::string& path, const AutoencoderNet& net);
AutoencoderNet load_net_file(const std::string& path);

}  // namespace jcr
