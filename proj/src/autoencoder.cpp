#include "jcr/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "jcr/kernels.hpp"
#include "jcr/rng.hpp"

namespace jcr {

namespace ker = jcr::kernels;

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || patience < 1)
    throw DimensionError("epochs, batch size and patience must be positive");
  if (!(learning_rate > 0.0)) throw DimensionError("learning rate must be > 0");
  if (momentum < 0.0 || momentum >= 1.0)
    throw DimensionError("momentum must lie in [0, 1)");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 ||
      adam_beta2 >= 1.0 || !(adam_eps > 0.0))
    throw DimensionError("adam parameters out of range");
}

std::vector<int> default_layer_sizes(int dim) {
  if (dim < 3) throw DimensionError("input dimension too small");
  return {dim, std::max(1, 2 * dim / 3), std::max(1, dim / 3), dim};
}

AutoencoderNet make_net(const std::vector<int>& layer_sizes,
                        std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw DimensionError("need at least input and output layers");
  for (int s : layer_sizes)
    if (s < 1) throw DimensionError("layer sizes must be positive");
  if (layer_sizes.front() != layer_sizes.back())
    throw DimensionError("autoencoder input and output dimensions must match");

  AutoencoderNet net;
  net.layer_sizes = layer_sizes;
  Rng rng = Rng::child(seed, 0x57a7e);
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const int fan_in = layer_sizes[i];
    const int fan_out = layer_sizes[i + 1];
    RowMat w(fan_in, fan_out);
    const double std_dev = std::sqrt(2.0 / fan_in);
    for (double& v : w.data) v = std_dev * rng.gaussian();
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(fan_out, 0.0);
  }
  return net;
}

Eigen::VectorXd vectorize(const CMat& samples) {
  const int n = static_cast<int>(samples.rows());
  const int t = static_cast<int>(samples.cols());
  Eigen::VectorXd chi(2 * n * t);
  int k = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < t; ++c) chi[k++] = samples(r, c).real();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < t; ++c) chi[k++] = samples(r, c).imag();
  return chi;
}

Eigen::VectorXd vectorize(const ReceiveRecord& record) {
  return vectorize(record.samples);
}

CMat devectorize(const Eigen::VectorXd& chi, int n_rx, int snapshots) {
  if (chi.size() != 2 * n_rx * snapshots)
    throw DimensionError("vector length does not match 2 * n_rx * T");
  CMat m(n_rx, snapshots);
  const int half = n_rx * snapshots;
  int k = 0;
  for (int r = 0; r < n_rx; ++r)
    for (int c = 0; c < snapshots; ++c) {
      m(r, c) = {chi[k], chi[k + half]};
      ++k;
    }
  return m;
}

namespace {

// One training-step workspace: batch activations and gradients per layer.
struct BatchWork {
  std::vector<RowMat> pre;   // pre-activations per layer (batch x out)
  std::vector<RowMat> act;   // activations per layer; act[0] is the input
  std::vector<RowMat> grad;  // gradient wrt pre-activations
};

void batch_forward(const AutoencoderNet& net, const RowMat& x, BatchWork& w) {
  const std::size_t batch = x.rows;
  const int layers = net.layer_count();
  w.pre.resize(layers);
  w.act.resize(layers + 1);
  w.act[0] = x;
  for (int i = 0; i < layers; ++i) {
    const RowMat& in = w.act[i];
    const std::size_t out_dim = net.weights[i].cols;
    w.pre[i] = RowMat(batch, out_dim);
    ker::gemm_nn(batch, out_dim, net.weights[i].rows, in.data.data(),
                 net.weights[i].data.data(), w.pre[i].data.data(), 0.0);
    ker::add_bias_rows(batch, out_dim, w.pre[i].data.data(),
                       net.biases[i].data());
    w.act[i + 1] = RowMat(batch, out_dim);
    if (i + 1 < layers) {
      ker::relu_forward(batch * out_dim, w.pre[i].data.data(),
                        w.act[i + 1].data.data());
    } else {
      w.act[i + 1].data = w.pre[i].data;  // linear output
    }
  }
}

}  // namespace

Eigen::VectorXd forward(const AutoencoderNet& net, const Eigen::VectorXd& chi) {
  if (chi.size() != net.input_dim())
    throw DimensionError("input dimension does not match the network");
  RowMat x(1, chi.size());
  std::copy(chi.data(), chi.data() + chi.size(), x.data.begin());
  BatchWork w;
  batch_forward(net, x, w);
  const RowMat& out = w.act.back();
  Eigen::VectorXd res(out.cols);
  std::copy(out.data.begin(), out.data.end(), res.data());
  return res;
}

double loss(const Eigen::VectorXd& chi, const Eigen::VectorXd& chi_prime) {
  if (chi.size() != chi_prime.size())
    throw DimensionError("loss arguments differ in length");
  return ker::sq_diff_sum(chi.size(), chi.data(), chi_prime.data());
}

Gradients loss_gradients(const AutoencoderNet& net, const Eigen::VectorXd& chi,
                         const Eigen::VectorXd& target) {
  if (chi.size() != net.input_dim() || target.size() != net.output_dim())
    throw DimensionError("gradient input dimensions mismatch");
  const int layers = net.layer_count();
  RowMat x(1, chi.size());
  std::copy(chi.data(), chi.data() + chi.size(), x.data.begin());
  BatchWork w;
  batch_forward(net, x, w);

  Gradients g;
  g.d_weights.resize(layers);
  g.d_biases.resize(layers);

  // d loss / d output with loss = ||target - out||^2.
  RowMat delta(1, net.output_dim());
  for (int j = 0; j < net.output_dim(); ++j)
    delta.data[j] = 2.0 * (w.act.back().data[j] - target[j]);

  for (int i = layers - 1; i >= 0; --i) {
    if (i != layers - 1)
      ker::relu_backward(delta.data.size(), w.pre[i].data.data(),
                         delta.data.data(), delta.data.data());
    g.d_weights[i] = RowMat(net.weights[i].rows, net.weights[i].cols);
    ker::gemm_tn(net.weights[i].rows, net.weights[i].cols, 1,
                 w.act[i].data.data(), delta.data.data(),
                 g.d_weights[i].data.data(), 0.0);
    g.d_biases[i].assign(net.weights[i].cols, 0.0);
    ker::bias_grad_cols(1, net.weights[i].cols, delta.data.data(),
                        g.d_biases[i].data());
    if (i > 0) {
      RowMat next(1, net.weights[i].rows);
      ker::gemm_nt(1, net.weights[i].rows, net.weights[i].cols,
                   delta.data.data(), net.weights[i].data.data(),
                   next.data.data(), 0.0);
      delta = std::move(next);
    }
  }
  return g;
}

TrainResult train(AutoencoderNet& net, const TrainingSet& set,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (set.inputs.rows == 0) throw DimensionError("empty training set");
  if (set.inputs.rows != set.targets.rows ||
      set.inputs.cols != set.targets.cols)
    throw DimensionError("training pairs are not aligned");
  if (static_cast<int>(set.inputs.cols) != net.input_dim())
    throw DimensionError("training dimension does not match the network");
  if (set.validation_fraction < 0.0 || set.validation_fraction >= 1.0)
    throw DimensionError("validation fraction must lie in [0, 1)");

  const std::size_t total = set.inputs.rows;
  const std::size_t n_val =
      static_cast<std::size_t>(set.validation_fraction * total);
  const std::size_t n_train = total - n_val;
  if (n_train == 0) throw DimensionError("no training rows after split");
  const std::size_t dim = set.inputs.cols;

  // Dataset normalization: one RMS scale for inputs and targets so the loss
  // landscape is independent of the absolute receive power.
  double scale = 1.0;
  if (cfg.normalize) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n_train; ++r)
      for (std::size_t c = 0; c < dim; ++c) {
        const double v = set.inputs.at(r, c);
        acc += v * v;
      }
    scale = std::sqrt(acc / static_cast<double>(n_train * dim));
    if (!(scale > 0.0)) scale = 1.0;
  }
  net.input_scale = scale;
  const double inv_scale = 1.0 / scale;

  Rng rng = Rng::child(cfg.seed, 0x7ea1);
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);

  const int layers = net.layer_count();
  // First-moment (or momentum) and second-moment buffers per parameter group.
  std::vector<RowMat> opt_m_w, opt_v_w;
  std::vector<std::vector<double>> opt_m_b, opt_v_b;
  for (int i = 0; i < layers; ++i) {
    opt_m_w.emplace_back(net.weights[i].rows, net.weights[i].cols);
    opt_v_w.emplace_back(net.weights[i].rows, net.weights[i].cols);
    opt_m_b.emplace_back(net.biases[i].size(), 0.0);
    opt_v_b.emplace_back(net.biases[i].size(), 0.0);
  }
  long step = 0;
  auto apply_update = [&](int i, const RowMat& dw_i,
                          const std::vector<double>& db_i) {
    if (cfg.optimizer == Optimizer::SgdMomentum) {
      ker::sgd_momentum(dw_i.data.size(), net.weights[i].data.data(),
                        opt_m_w[i].data.data(), dw_i.data.data(),
                        cfg.learning_rate, cfg.momentum);
      ker::sgd_momentum(db_i.size(), net.biases[i].data(), opt_m_b[i].data(),
                        db_i.data(), cfg.learning_rate, cfg.momentum);
      return;
    }
    const double c1 = 1.0 / (1.0 - std::pow(cfg.adam_beta1, step));
    const double c2 = 1.0 / (1.0 - std::pow(cfg.adam_beta2, step));
    ker::adam(dw_i.data.size(), net.weights[i].data.data(),
              opt_m_w[i].data.data(), opt_v_w[i].data.data(),
              dw_i.data.data(), cfg.learning_rate, cfg.adam_beta1,
              cfg.adam_beta2, cfg.adam_eps, c1, c2);
    ker::adam(db_i.size(), net.biases[i].data(), opt_m_b[i].data(),
              opt_v_b[i].data(), db_i.data(), cfg.learning_rate,
              cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, c1, c2);
  };

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<RowMat> best_w = net.weights;
  auto best_b = net.biases;
  int stale_epochs = 0;

  BatchWork work;
  RowMat xb, tb;
  std::vector<RowMat> dw(layers);
  std::vector<std::vector<double>> db(layers);

  auto eval_loss = [&](std::size_t begin, std::size_t count) {
    // Mean per-example loss over [begin, begin+count) in dataset order.
    if (count == 0) return 0.0;
    double acc = 0.0;
    const std::size_t chunk = 256;
    for (std::size_t start = 0; start < count; start += chunk) {
      const std::size_t b = std::min(chunk, count - start);
      xb = RowMat(b, dim);
      tb = RowMat(b, dim);
      for (std::size_t r = 0; r < b; ++r) {
        const double* src_in = set.inputs.row(begin + start + r);
        const double* src_tg = set.targets.row(begin + start + r);
        for (std::size_t c = 0; c < dim; ++c) {
          xb.at(r, c) = src_in[c] * inv_scale;
          tb.at(r, c) = src_tg[c] * inv_scale;
        }
      }
      batch_forward(net, xb, work);
      acc += ker::sq_diff_sum(b * dim, work.act.back().data.data(),
                              tb.data.data());
    }
    return acc / static_cast<double>(count);
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates shuffle from the epoch stream.
    for (std::size_t i = n_train - 1; i > 0; --i) {
      const std::size_t j = rng.uniform_index(i + 1);
      std::swap(order[i], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n_train;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t b =
          std::min<std::size_t>(cfg.batch_size, n_train - start);
      xb = RowMat(b, dim);
      tb = RowMat(b, dim);
      for (std::size_t r = 0; r < b; ++r) {
        const double* src_in = set.inputs.row(order[start + r]);
        const double* src_tg = set.targets.row(order[start + r]);
        for (std::size_t c = 0; c < dim; ++c) {
          xb.at(r, c) = src_in[c] * inv_scale;
          tb.at(r, c) = src_tg[c] * inv_scale;
        }
      }
      batch_forward(net, xb, work);
      epoch_loss += ker::sq_diff_sum(b * dim, work.act.back().data.data(),
                                     tb.data.data());
      seen += b;

      // Backward pass; delta holds d(mean loss)/d(pre-activation).
      RowMat delta(b, dim);
      const double inv_b = 1.0 / static_cast<double>(b);
      for (std::size_t i = 0; i < b * dim; ++i)
        delta.data[i] = 2.0 * inv_b *
                        (work.act.back().data[i] - tb.data[i]);
      for (int i = layers - 1; i >= 0; --i) {
        if (i != layers - 1)
          ker::relu_backward(delta.data.size(), work.pre[i].data.data(),
                             delta.data.data(), delta.data.data());
        dw[i] = RowMat(net.weights[i].rows, net.weights[i].cols);
        ker::gemm_tn(net.weights[i].rows, net.weights[i].cols, b,
                     work.act[i].data.data(), delta.data.data(),
                     dw[i].data.data(), 0.0);
        db[i].assign(net.weights[i].cols, 0.0);
        ker::bias_grad_cols(b, net.weights[i].cols, delta.data.data(),
                            db[i].data());
        if (i > 0) {
          RowMat next(b, net.weights[i].rows);
          ker::gemm_nt(b, net.weights[i].rows, net.weights[i].cols,
                       delta.data.data(), net.weights[i].data.data(),
                       next.data.data(), 0.0);
          delta = std::move(next);
        }
      }
      ++step;
      for (int i = 0; i < layers; ++i) apply_update(i, dw[i], db[i]);
    }

    const double train_loss = epoch_loss / static_cast<double>(seen);
    if (!std::isfinite(train_loss))
      throw DivergenceError("training loss left the finite range at epoch " +
                            std::to_string(epoch + 1) +
                            "; lower the learning rate");
    result.train_loss.push_back(train_loss);

    const double val_loss =
        n_val > 0 ? eval_loss(n_train, n_val) : train_loss;
    result.val_loss.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best_w = net.weights;
      best_b = net.biases;
      result.best_epoch = epoch;
      stale_epochs = 0;
    } else if (++stale_epochs >= cfg.patience) {
      break;
    }
  }

  net.weights = std::move(best_w);
  net.biases = std::move(best_b);
  result.best_val_loss = best_val;
  return result;
}

ReceiveRecord denoise(const AutoencoderNet& net, const ReceiveRecord& record) {
  const int n = record.rx_count();
  const int t = record.snapshot_count();
  if (2 * n * t != net.input_dim())
    throw DimensionError("record shape does not match the network input");
  const Eigen::VectorXd chi = vectorize(record) / net.input_scale;
  const Eigen::VectorXd out = forward(net, chi) * net.input_scale;
  ReceiveRecord res;
  res.samples = devectorize(out, n, t);
  res.clean = record.clean;
  return res;
}

double rmse(const CMat& estimate, const CMat& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw DimensionError("rmse arguments differ in shape");
  const double n = static_cast<double>(estimate.size());
  return std::sqrt((estimate - truth).squaredNorm() / n);
}

void save_net(std::ostream& os, const AutoencoderNet& net) {
  os << "jcr-autoencoder 1 layers " << net.layer_sizes.size();
  for (int s : net.layer_sizes) os << " " << s;
  os.precision(17);
  os << " scale " << net.input_scale << "\n";
  for (int i = 0; i < net.layer_count(); ++i) {
    os.write(reinterpret_cast<const char*>(net.weights[i].data.data()),
             static_cast<std::streamsize>(net.weights[i].data.size() *
                                          sizeof(double)));
    os.write(reinterpret_cast<const char*>(net.biases[i].data()),
             static_cast<std::streamsize>(net.biases[i].size() *
                                          sizeof(double)));
  }
}

AutoencoderNet load_net(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty autoencoder stream");
  std::istringstream header(line);
  std::string magic, kw_layers, kw_scale;
  int version = 0;
  std::size_t n_layers = 0;
  header >> magic >> version >> kw_layers >> n_layers;
  if (magic != "jcr-autoencoder" || version != 1 || kw_layers != "layers")
    throw ConfigError("not a jcr-autoencoder v1 stream");
  AutoencoderNet net;
  net.layer_sizes.resize(n_layers);
  for (auto& s : net.layer_sizes) header >> s;
  double scale = 1.0;
  header >> kw_scale >> scale;
  if (kw_scale != "scale" || !header)
    throw ConfigError("corrupt autoencoder header");
  net.input_scale = scale;
  for (std::size_t i = 0; i + 1 < n_layers; ++i) {
    RowMat w(net.layer_sizes[i], net.layer_sizes[i + 1]);
    is.read(reinterpret_cast<char*>(w.data.data()),
            static_cast<std::streamsize>(w.data.size() * sizeof(double)));
    std::vector<double> b(net.layer_sizes[i + 1]);
    is.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
    if (!is) throw ConfigError("truncated autoencoder payload");
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void save_net_file(const std::string& path, const AutoencoderNet& net) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  save_net(os, net);
}

AutoencoderNet load_net_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  return load_net(is);
}

}  // namespace jcr
