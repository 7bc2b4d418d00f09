// Unit tests for the LSTM forecaster: forward pass, BPTT, optimizers,
// training loop, FLOP accounting and the parameter file format.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fedcast/nn/flops.hpp"
#include "fedcast/nn/lstm.hpp"
#include "fedcast/nn/optimizer.hpp"
#include "fedcast/nn/serialize.hpp"
#include "fedcast/nn/train.hpp"

namespace fedcast::nn {
namespace {

LstmConfig small_config(std::size_t d, std::size_t dp, std::size_t M, std::size_t w,
                        std::size_t L, std::size_t ffn_w, std::size_t lookback, std::size_t T) {
  LstmConfig c;
  c.input_dim = d;
  c.target_dim = dp;
  c.lstm_layers = M;
  c.hidden_width = w;
  c.ffn_layers = L;
  c.ffn_width = ffn_w;
  c.lookback = lookback;
  c.horizon = T;
  return c;
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

// Randomize every tensor, biases and h0 included, so no gradient path is trivially zero.
template <typename S>
ModelParams<S> random_params(const LstmConfig& cfg, std::uint64_t seed) {
  ModelParams<S> p(cfg);
  const auto w = random_values(p.weights.size(), seed, 0.5);
  const auto h = random_values(p.h0.size(), seed + 77, 0.3);
  for (std::size_t i = 0; i < w.size(); ++i) p.weights[i] = S(w[i]);
  for (std::size_t i = 0; i < h.size(); ++i) p.h0[i] = S(h[i]);
  return p;
}

// ---- Independent scalar evaluation oracle (single window, single LSTM layer). ----

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> oracle_forward(const ModelParams<double>& p, const std::vector<double>& window) {
  const auto& c = p.config;
  const std::size_t w = c.hidden_width, d = c.input_dim;
  // Tensors read straight from the documented layout: W (4w x d), V (4w x w), b (4w),
  // column-major, gates stacked z, s, f, o.
  auto W = [&](std::size_t r, std::size_t col) { return p.weights[col * 4 * w + r]; };
  const std::size_t voff = 4 * w * d;
  auto V = [&](std::size_t r, std::size_t col) { return p.weights[voff + col * 4 * w + r]; };
  const std::size_t boff = voff + 4 * w * w;
  auto b = [&](std::size_t r) { return p.weights[boff + r]; };

  std::vector<double> h(p.h0.begin(), p.h0.begin() + std::ptrdiff_t(w)), cell(w, 0.0);
  for (std::size_t t = 0; t < c.lookback; ++t) {
    std::vector<double> nh(w), nc(w);
    for (std::size_t j = 0; j < w; ++j) {
      auto pre = [&](std::size_t gate) {
        double a = b(gate * w + j);
        for (std::size_t k = 0; k < d; ++k) a += W(gate * w + j, k) * window[t * d + k];
        for (std::size_t k = 0; k < w; ++k) a += V(gate * w + j, k) * h[k];
        return a;
      };
      const double z = std::tanh(pre(0));
      const double s = sig(pre(1));
      const double f = sig(pre(2));
      const double o = sig(pre(3));
      nc[j] = s * z + f * cell[j];
      nh[j] = o * std::tanh(nc[j]);
    }
    h = nh;
    cell = nc;
  }
  std::size_t off = boff + 4 * w;
  std::vector<double> v = h;
  for (std::size_t l = 0; l < c.ffn_layers; ++l) {
    std::vector<double> nv(c.ffn_width, 0.0);
    for (std::size_t r = 0; r < c.ffn_width; ++r) {
      for (std::size_t k = 0; k < v.size(); ++k) nv[r] += p.weights[off + k * c.ffn_width + r] * v[k];
      nv[r] = std::max(0.0, nv[r]);
    }
    off += c.ffn_width * v.size();
    v = nv;
  }
  std::vector<double> y(c.output_dim(), 0.0);
  for (std::size_t r = 0; r < y.size(); ++r)
    for (std::size_t k = 0; k < v.size(); ++k) y[r] += p.weights[off + k * y.size() + r] * v[k];
  return y;
}

TEST(InitParams, DeterministicGivenSeed) {
  const auto cfg = small_config(3, 2, 2, 5, 1, 4, 4, 2);
  const auto a = init_params(cfg, 42);
  const auto b = init_params(cfg, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.weights, init_params(cfg, 43).weights);
}

TEST(InitParams, ParameterCountMatchesShapeEnumeration) {
  const auto cfg = small_config(2, 1, 1, 4, 1, 3, 5, 1);
  // gates: 4 x (W 4x2 + V 4x4 + b 4); ffn 3x4; projection 1x3.
  const std::size_t expected = 4 * (4 * 2 + 4 * 4 + 4) + 3 * 4 + 1 * 3;
  EXPECT_EQ(learnable_count(cfg), expected);
  EXPECT_EQ(init_params(cfg, 1).weights.size(), expected);
}

TEST(InitParams, UniformBoundsAndZeroBias) {
  const auto cfg = small_config(4, 2, 1, 9, 1, 6, 3, 1);
  const auto p = init_params(cfg, 5);
  const ParamLayout lay(cfg);
  for (std::size_t i = 0; i < 4 * 9 * 4; ++i) EXPECT_LE(std::abs(p.weights[lay.lstm[0].w_offset + i]), 0.5f);
  for (std::size_t i = 0; i < 4 * 9; ++i) EXPECT_EQ(p.weights[lay.lstm[0].b_offset + i], 0.0f);
}

TEST(InitParams, InitialHiddenStateHasVariancePointZeroOne) {
  const auto cfg = small_config(1, 1, 1, 10, 0, 1, 1, 1);
  std::vector<double> draws;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto p = init_params(cfg, seed);
    draws.insert(draws.end(), p.h0.begin(), p.h0.end());
  }
  ASSERT_EQ(draws.size(), 10000u);
  double mean = 0.0;
  for (double x : draws) mean += x;
  mean /= double(draws.size());
  double var = 0.0;
  for (double x : draws) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / double(draws.size()));
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sd, 0.1, 0.01);
}

TEST(Forward, ZeroNetworkPredictsZero) {
  const auto cfg = small_config(3, 2, 2, 4, 1, 3, 5, 3);
  ModelParams<float> p(cfg);
  const auto x = random_values(cfg.lookback * cfg.input_dim, 9);
  const auto cache = forward(p, std::span<const double>(x), 1);
  EXPECT_EQ(cache.output.cwiseAbs().maxCoeff(), 0.0f);
}

TEST(Forward, ZeroWindowZeroStateGivesZero) {
  const auto cfg = small_config(3, 2, 1, 4, 1, 3, 5, 2);
  auto p = init_params<double>(cfg, 3);
  std::fill(p.h0.begin(), p.h0.end(), 0.0);
  const auto [pred, cache] = forward(p, Eigen::MatrixXd::Zero(5, 3));
  // Zero biases and zero inputs leave c = 0 and h = 0 at every step.
  EXPECT_EQ(pred.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(pred.rows(), 2);
  EXPECT_EQ(pred.cols(), 2);
}

TEST(Forward, MatchesScalarOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto cfg = small_config(2, 2, 1, 3, 1, 4, 2, 2);
    const auto p = random_params<double>(cfg, seed);
    const auto x = random_values(cfg.lookback * cfg.input_dim, 100 + seed);
    const auto cache = forward(p, std::span<const double>(x), 1);
    const auto expected = oracle_forward(p, x);
    for (std::size_t i = 0; i < expected.size(); ++i)
      EXPECT_NEAR(cache.output(Eigen::Index(i), 0), expected[i], 1e-12);
  }
}

TEST(Forward, BatchColumnsAreIndependent) {
  const auto cfg = small_config(3, 2, 2, 4, 2, 3, 4, 2);
  const auto p = random_params<double>(cfg, 11);
  const auto x = random_values(3 * cfg.lookback * cfg.input_dim, 12);
  const auto batched = forward(p, std::span<const double>(x), 3);
  for (std::size_t b = 0; b < 3; ++b) {
    std::span<const double> one(x.data() + b * cfg.lookback * cfg.input_dim, cfg.lookback * cfg.input_dim);
    const auto single = forward(p, one, 1);
    EXPECT_LT((single.output.col(0) - batched.output.col(Eigen::Index(b))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Forward, ShapeMismatchThrows) {
  const auto cfg = small_config(3, 2, 1, 4, 1, 3, 5, 2);
  const auto p = init_params(cfg, 1);
  std::vector<double> x(7);
  try {
    forward(p, std::span<const double>(x), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeMismatch);
  }
  EXPECT_THROW(forward(p, Eigen::MatrixXd::Zero(4, 3)), Error);
}

TEST(MseLoss, Examples) {
  Eigen::MatrixXd y(1, 2);
  y << 0, 0;
  Eigen::MatrixXd yhat(1, 2);
  yhat << 2, 0;
  EXPECT_DOUBLE_EQ(mse_loss(yhat, y), 2.0);
  EXPECT_DOUBLE_EQ(mse_loss(y, y), 0.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 4), b = Eigen::MatrixXd::Random(3, 4);
  EXPECT_NEAR(mse_loss(b + 2 * (a - b), b), 4 * mse_loss(a, b), 1e-12);
  EXPECT_THROW(mse_loss(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 3)), Error);
}

// Central finite differences of batch_loss with respect to every parameter.
std::vector<double> finite_differences(ModelParams<double> p, std::span<const double> x,
                                       std::span<const double> y, std::size_t batch, double h) {
  std::vector<double> g(p.weights.size());
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    const double orig = p.weights[i];
    p.weights[i] = orig + h;
    const double up = batch_loss(forward(p, x, batch), y);
    p.weights[i] = orig - h;
    const double down = batch_loss(forward(p, x, batch), y);
    p.weights[i] = orig;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

TEST(Backward, MatchesFiniteDifferencesOnRandomInstances) {
  std::mt19937_64 rng(2024);
  int instances = 0;
  for (std::uint64_t trial = 0; trial < 8; ++trial) {
    const std::size_t M = 1 + rng() % 2, w = 1 + rng() % 8, lookback = 1 + rng() % 6;
    const std::size_t d = 1 + rng() % 4, dp = 1 + rng() % d, L = rng() % 3, T = 1 + rng() % 3;
    const auto cfg = small_config(d, dp, M, w, L, 1 + rng() % 5, lookback, T);
    const auto p = random_params<double>(cfg, trial);
    const std::size_t batch = 2;
    const auto x = random_values(batch * lookback * d, 500 + trial);
    const auto y = random_values(batch * cfg.output_dim(), 900 + trial);
    const auto grads = backward(p, forward(p, std::span<const double>(x), batch), std::span<const double>(y));
    const auto fd = finite_differences(p, x, y, batch, 1e-5);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double tol = std::max(1e-7, 1e-4 * std::max(std::abs(fd[i]), std::abs(grads.values[i])));
      EXPECT_NEAR(grads.values[i], fd[i], tol) << "trial " << trial << " param " << i;
    }
    ++instances;
  }
  EXPECT_EQ(instances, 8);
}

TEST(Backward, ZeroResidualGivesZeroGradient) {
  const auto cfg = small_config(3, 2, 2, 4, 1, 3, 4, 2);
  const auto p = random_params<double>(cfg, 8);
  const auto x = random_values(3 * cfg.lookback * cfg.input_dim, 81);
  const auto cache = forward(p, std::span<const double>(x), 3);
  std::vector<double> y;
  for (Eigen::Index b = 0; b < 3; ++b)
    for (Eigen::Index i = 0; i < cache.output.rows(); ++i) y.push_back(cache.output(i, b));
  const auto g = backward(p, cache, std::span<const double>(y));
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Backward, ProjectionGradientIsResidualOuterProduct) {
  const auto cfg = small_config(2, 2, 1, 3, 1, 4, 3, 1);
  const auto p = random_params<double>(cfg, 21);
  const auto x = random_values(cfg.lookback * cfg.input_dim, 22);
  const std::vector<double> y = {0.3, -0.7};
  const auto cache = forward(p, std::span<const double>(x), 1);
  const auto g = backward(p, cache, std::span<const double>(y));
  const ParamLayout lay(cfg);
  const auto& v = cache.ffn.back();
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t k = 0; k < 4; ++k) {
      const double residual = cache.output(Eigen::Index(r), 0) - y[r];
      EXPECT_NEAR(g.values[lay.proj_offset + k * 2 + r], 2.0 / 2.0 * residual * v(Eigen::Index(k), 0), 1e-12);
    }
}

TEST(Backward, StaleCacheIsRejected) {
  const auto cfg = small_config(2, 1, 1, 3, 0, 1, 2, 1);
  auto p = random_params<double>(cfg, 4);
  const auto x = random_values(cfg.lookback * cfg.input_dim, 5);
  const auto cache = forward(p, std::span<const double>(x), 1);
  p.weights[0] += 1.0;
  const std::vector<double> y = {0.0};
  try {
    backward(p, cache, std::span<const double>(y));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kStaleCache);
  }
}

TEST(Optimizer, SgdExamples) {
  const auto cfg = small_config(1, 1, 1, 1, 0, 1, 1, 1);
  ModelParams<double> p(cfg);
  Gradients<double> g(cfg);
  std::fill(p.weights.begin(), p.weights.end(), 1.0);
  OptimizerState state = Sgd{0.1};
  optimizer_step(p, g, state);
  for (double v : p.weights) EXPECT_EQ(v, 1.0);
  std::fill(g.values.begin(), g.values.end(), 0.5);
  optimizer_step(p, g, state);
  for (double v : p.weights) EXPECT_NEAR(v, 0.95, 1e-15);
}

TEST(Optimizer, AdamFirstStepHasMagnitudeLr) {
  const auto cfg = small_config(1, 1, 1, 2, 0, 1, 1, 1);
  for (double c : {1e-4, 1.0, 250.0}) {
    ModelParams<double> p(cfg);
    Gradients<double> g(cfg);
    std::fill(g.values.begin(), g.values.end(), c);
    OptimizerState state = Adam{};
    optimizer_step(p, g, state);
    for (double v : p.weights) EXPECT_NEAR(v, -1e-3, 1e-6) << "c=" << c;
    EXPECT_EQ(std::get<Adam>(state).t, 1u);
  }
}

TEST(Optimizer, NonFiniteGradientAborts) {
  const auto cfg = small_config(1, 1, 1, 1, 0, 1, 1, 1);
  ModelParams<float> p(cfg);
  Gradients<float> g(cfg);
  g.values[3] = std::numeric_limits<float>::quiet_NaN();
  OptimizerState state = Adam{};
  try {
    optimizer_step(p, g, state);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonFinite);
  }
  for (float v : p.weights) EXPECT_EQ(v, 0.0f);
}

data::WindowedDataset random_dataset(const LstmConfig& cfg, std::size_t n, std::uint64_t seed,
                                     double target_value = std::nan("")) {
  data::WindowedDataset ds;
  ds.lookback = cfg.lookback;
  ds.input_dim = cfg.input_dim;
  ds.horizon = cfg.horizon;
  ds.target_dim = cfg.target_dim;
  ds.n_windows = n;
  ds.inputs = random_values(n * ds.input_stride(), seed);
  ds.targets = std::isnan(target_value) ? random_values(n * ds.target_stride(), seed + 1)
                                        : std::vector<double>(n * ds.target_stride(), target_value);
  return ds;
}

TEST(TrainEpochs, ZeroEpochsIsNoOp) {
  const auto cfg = small_config(3, 2, 1, 4, 1, 3, 4, 1);
  auto p = init_params(cfg, 1);
  const auto before = p;
  OptimizerState st = Adam{};
  const auto res = train_epochs(p, random_dataset(cfg, 10, 3), 0, st);
  EXPECT_EQ(p, before);
  EXPECT_EQ(res.steps, 0u);
  EXPECT_EQ(res.flops, 0u);
}

TEST(TrainEpochs, StepCountAndVisits) {
  const auto cfg = small_config(3, 2, 1, 4, 1, 3, 4, 1);
  auto p = init_params(cfg, 1);
  OptimizerState st = Adam{};
  std::vector<std::uint32_t> visits(37, 0);
  TrainOptions opt;
  opt.batch_size = 8;
  opt.shuffle = true;
  opt.shuffle_seed = 4;
  opt.visits = visits;
  const auto res = train_epochs(p, random_dataset(cfg, 37, 3), 3, st, opt);
  EXPECT_EQ(res.steps, 3u * 5u);
  EXPECT_EQ(res.windows_seen, 3u * 37u);
  EXPECT_EQ(res.flops, 3u * 37u * train_flops_per_window(cfg));
  for (auto v : visits) EXPECT_EQ(v, 3u);
}

TEST(TrainEpochs, LossDecreasesOnConstantTarget) {
  const auto cfg = small_config(3, 2, 1, 8, 1, 8, 4, 2);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto ds = random_dataset(cfg, 64, 10 + seed, 0.7);
    auto p1 = init_params(cfg, seed);
    auto p50 = p1;
    OptimizerState s1 = Adam{}, s50 = Adam{};
    TrainOptions opt;
    opt.batch_size = 16;
    const double l1 = train_epochs(p1, ds, 1, s1, opt).mean_train_loss;
    const double l50 = train_epochs(p50, ds, 50, s50, opt).mean_train_loss;
    EXPECT_LT(l50, l1) << "seed " << seed;
  }
}

TEST(TrainEpochs, SgdIsFixedAtPerfectFit) {
  const auto cfg = small_config(3, 2, 2, 4, 1, 3, 4, 2);
  auto p = init_params(cfg, 6);
  auto ds = random_dataset(cfg, 20, 7);
  ds.targets = predict(p, ds, 6);
  const auto before = p;
  OptimizerState st = Sgd{0.5};
  TrainOptions opt;
  opt.batch_size = 6;
  train_epochs(p, ds, 4, st, opt);
  EXPECT_EQ(p, before);
}

TEST(TrainEpochs, EmptyDatasetThrows) {
  const auto cfg = small_config(3, 2, 1, 4, 1, 3, 4, 1);
  auto p = init_params(cfg, 1);
  OptimizerState st = Sgd{};
  EXPECT_THROW(train_epochs(p, random_dataset(cfg, 0, 1), 1, st), Error);
}

TEST(Flops, LinearInLookbackAndHandCase) {
  auto cfg = small_config(1, 1, 1, 1, 0, 1, 3, 1);
  // 3 steps x 4 gates x (1 input + 1 recurrent) MACs, plus a 1x1 projection.
  EXPECT_EQ(flops_per_window(cfg), 2u * (3 * 4 * 2 + 1));
  auto big = small_config(11, 5, 2, 16, 2, 8, 10, 3);
  auto twice = big;
  twice.lookback = 20;
  EXPECT_EQ(lstm_flops_per_window(twice), 2 * lstm_flops_per_window(big));
  EXPECT_EQ(flops_per_window(twice) - lstm_flops_per_window(twice),
            flops_per_window(big) - lstm_flops_per_window(big));
  EXPECT_EQ(train_flops_per_window(big), 3 * flops_per_window(big));
}

TEST(Serialize, RoundTripAndSize) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cfg = small_config(1 + rng() % 6, 1, 1 + rng() % 2, 1 + rng() % 9, rng() % 3,
                                  1 + rng() % 7, 1 + rng() % 5, 1 + rng() % 4);
    const auto p = init_params(cfg, rng());
    const auto bytes = serialize_params(p);
    EXPECT_EQ(deserialize_params(bytes, cfg), p);
    const std::size_t n = p.weights.size() + p.h0.size();
    EXPECT_EQ(bytes.size(), kParamHeaderBytes + 4 * n);
    EXPECT_DOUBLE_EQ(param_size_kb(p), double(4 * n + kParamHeaderBytes) / 1000.0);
  }
}

TEST(Serialize, CorruptStreamsAreRejected) {
  const auto cfg = small_config(3, 2, 1, 4, 1, 3, 4, 1);
  auto bytes = serialize_params(init_params(cfg, 1));
  auto truncated = bytes;
  truncated.pop_back();
  try {
    deserialize_params(truncated, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kLengthMismatch);
  }
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_params(bad_magic, cfg), Error);
  auto other = cfg;
  other.hidden_width = 5;
  try {
    deserialize_params(bytes, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kCorruptHeader);
  }
}

}  // namespace
}  // namespace fedcast::nn
