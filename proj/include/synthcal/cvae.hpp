#pragma once

// Conditional variational autoencoder over normalized feature rows.
//
// Encoder: [x, onehot(y)] -> tanh hidden -> [mu, logvar]
// Decoder: [z, onehot(y)] -> tanh hidden -> sigmoid output
// Loss per row: sum_j (x_j - xhat_j)^2 + kl_weight * KL(N(mu, diag exp(logvar)) || N(0, I)),
// averaged over the batch. The negative of this is the ELBO being maximized.

#include "synthcal/common.hpp"
#include "synthcal/data.hpp"
#include "synthcal/nn.hpp"

#include <numeric>
#include <vector>

namespace synthcal {

struct CvaeOptions {
  int latent_dim = 8;
  int hidden = 64;
  int epochs = 200;
  int batch = 32;
  double learning_rate = 1e-3;
  double kl_weight = 1.0;
};

struct CvaeModel {
  nn::Mlp encoder;
  nn::Mlp decoder;
  int latent_dim = 0;
  int n_classes = 0;
  int n_features = 0;
  std::vector<double> epoch_loss;  // mean negative ELBO per epoch
};

struct CvaeLoss {
  double loss = 0.0;  // batch-mean negative ELBO
  double reconstruction = 0.0;
  double kl = 0.0;
  nn::Gradients encoder;
  nn::Gradients decoder;
};

inline double gaussian_kl(const Vector& mu, const Vector& logvar) {
  return 0.5 * (logvar.array().exp() + mu.array().square() - 1.0 - logvar.array()).sum();
}

inline CvaeModel make_cvae(int n_features, int n_classes, const CvaeOptions& opt, Rng& rng) {
  if (opt.latent_dim < 1 || opt.hidden < 1) throw ConfigError("cvae: latent_dim and hidden must be positive");
  using nn::Activation;
  CvaeModel m;
  m.latent_dim = opt.latent_dim;
  m.n_classes = n_classes;
  m.n_features = n_features;
  m.encoder = nn::Mlp::create({n_features + n_classes, opt.hidden, 2 * opt.latent_dim},
                              {Activation::tanh, Activation::identity}, rng);
  m.decoder = nn::Mlp::create({opt.latent_dim + n_classes, opt.hidden, n_features},
                              {Activation::tanh, Activation::sigmoid}, rng);
  return m;
}

/// Loss and parameter gradients for one batch with fixed reparameterization
/// noise `eps` (batch x latent_dim).
inline CvaeLoss cvae_loss(const CvaeModel& m, const Matrix& x, const Matrix& y_onehot, const Matrix& eps,
                          double kl_weight = 1.0) {
  const Eigen::Index b = x.rows(), L = m.latent_dim;
  Matrix enc_in(b, x.cols() + y_onehot.cols());
  enc_in << x, y_onehot;
  nn::Cache enc_cache, dec_cache;
  const Matrix enc_out = nn::forward(m.encoder, enc_in, &enc_cache);
  const Matrix mu = enc_out.leftCols(L);
  const Matrix logvar = enc_out.rightCols(L);
  const Matrix sigma = (0.5 * logvar.array()).exp().matrix();
  const Matrix z = mu + sigma.cwiseProduct(eps);

  Matrix dec_in(b, L + y_onehot.cols());
  dec_in << z, y_onehot;
  const Matrix xhat = nn::forward(m.decoder, dec_in, &dec_cache);

  CvaeLoss out;
  const double inv_b = 1.0 / static_cast<double>(b);
  out.reconstruction = (x - xhat).squaredNorm() * inv_b;
  out.kl = 0.5 * (logvar.array().exp() + mu.array().square() - 1.0 - logvar.array()).sum() * inv_b;
  out.loss = out.reconstruction + kl_weight * out.kl;

  out.decoder = nn::backward(m.decoder, dec_cache, (-2.0 * inv_b) * (x - xhat));
  const Matrix dz = out.decoder.input.leftCols(L);
  Matrix denc(b, 2 * L);
  denc.leftCols(L) = dz + (kl_weight * inv_b) * mu;
  denc.rightCols(L) = (0.5 * dz.cwiseProduct(sigma).cwiseProduct(eps)).array() +
                      (kl_weight * inv_b * 0.5) * (logvar.array().exp() - 1.0);
  out.encoder = nn::backward(m.encoder, enc_cache, denc);
  return out;
}

inline CvaeModel train_cvae(const Table& train, int n_classes, const CvaeOptions& opt, std::uint64_t seed) {
  if (opt.epochs < 1 || opt.batch < 1 || !(opt.learning_rate > 0))
    throw ConfigError("cvae: epochs, batch and learning rate must be positive");
  Rng rng(seed);
  CvaeModel m = make_cvae(static_cast<int>(train.cols()), n_classes, opt, rng);
  nn::OptimizerConfig oc;
  oc.learning_rate = opt.learning_rate;
  nn::Optimizer enc_opt(oc), dec_opt(oc);
  const Matrix y_all = one_hot(train.labels, static_cast<std::size_t>(n_classes));

  std::vector<std::size_t> order(train.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opt.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opt.batch));
      const auto bsz = static_cast<Eigen::Index>(end - start);
      Matrix xb(bsz, train.features.cols()), yb(bsz, n_classes), eps(bsz, m.latent_dim);
      for (std::size_t r = start; r < end; ++r) {
        xb.row(static_cast<Eigen::Index>(r - start)) = train.features.row(static_cast<Eigen::Index>(order[r]));
        yb.row(static_cast<Eigen::Index>(r - start)) = y_all.row(static_cast<Eigen::Index>(order[r]));
      }
      for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = rng.normal();
      CvaeLoss l = cvae_loss(m, xb, yb, eps, opt.kl_weight);
      if (!std::isfinite(l.loss))
        throw DivergenceError("cvae: non-finite loss at epoch " + std::to_string(epoch));
      total += l.loss * static_cast<double>(bsz);
      enc_opt.step(m.encoder, l.encoder);
      dec_opt.step(m.decoder, l.decoder);
    }
    m.epoch_loss.push_back(total / static_cast<double>(order.size()));
  }
  return m;
}

inline Vector decode(const CvaeModel& m, const Vector& z, int label) {
  Vector in = Vector::Zero(m.latent_dim + m.n_classes);
  in.head(m.latent_dim) = z;
  in(m.latent_dim + label) = 1.0;
  return nn::forward(m.decoder, in);
}

/// Row i = Decoder(z, onehot(labels[i])), z ~ N(0, I).
inline Matrix sample_cvae(const CvaeModel& m, const std::vector<int>& labels, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix in = Matrix::Zero(n, m.latent_dim + m.n_classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < m.latent_dim; ++k) in(i, k) = rng.normal();
    in(i, m.latent_dim + labels[static_cast<std::size_t>(i)]) = 1.0;
  }
  Matrix out = nn::forward(m.decoder, in);
  if (!out.allFinite()) throw DivergenceError("cvae: non-finite decoder output");
  return out;
}

}  // namespace synthcal
