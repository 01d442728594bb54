#include "mepsac/nets.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mepsac {

namespace {

void check_shapes(const MlpParams& params, const MlpGrads& grads,
                  const char* what) {
  if (grads.weights.size() != params.weights.size() ||
      grads.biases.size() != params.biases.size())
    throw std::invalid_argument(std::string(what) + ": layer count mismatch");
  for (size_t l = 0; l < params.weights.size(); ++l) {
    if (grads.weights[l].rows() != params.weights[l].rows() ||
        grads.weights[l].cols() != params.weights[l].cols() ||
        grads.biases[l].size() != params.biases[l].size())
      throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

void require_finite(const Mat& g, const char* tensor, int layer) {
  if (!g.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite gradient in " << tensor << " of layer " << layer;
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

MlpParams make_mlp(const std::vector<int>& layer_dims, std::mt19937_64& rng) {
  if (layer_dims.size() < 2)
    throw std::invalid_argument("make_mlp: need at least input and output dims");
  MlpParams p;
  p.layer_dims = layer_dims;
  for (size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l], fan_out = layer_dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    Mat w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) w(i, j) = uniform(rng);
    Vec b(fan_out);
    for (int i = 0; i < fan_out; ++i) b[i] = uniform(rng);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

MlpParams make_zero_mlp(const std::vector<int>& layer_dims) {
  MlpParams p;
  p.layer_dims = layer_dims;
  for (size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    p.weights.push_back(Mat::Zero(layer_dims[l + 1], layer_dims[l]));
    p.biases.push_back(Vec::Zero(layer_dims[l + 1]));
  }
  return p;
}

Mat mlp_forward(const MlpParams& params, const Mat& input, MlpCache* cache) {
  if (input.rows() != params.in_dim())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  const int L = params.n_layers();
  if (cache) {
    cache->input = input;
    cache->pre.assign(L - 1, Mat());
    cache->post.assign(L - 1, Mat());
  }
  Mat h = input;
  for (int l = 0; l < L; ++l) {
    Mat z = params.weights[l] * h;
    z.colwise() += params.biases[l];
    if (l + 1 < L) {
      if (cache) cache->pre[l] = z;
      h = z.cwiseMax(0.0);
      if (cache) cache->post[l] = h;
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Vec mlp_forward1(const MlpParams& params, const Vec& input) {
  return mlp_forward(params, Mat(input)).col(0);
}

MlpGrads make_zero_grads(const MlpParams& params) {
  MlpGrads g;
  for (size_t l = 0; l < params.weights.size(); ++l) {
    g.weights.push_back(Mat::Zero(params.weights[l].rows(), params.weights[l].cols()));
    g.biases.push_back(Vec::Zero(params.biases[l].size()));
  }
  return g;
}

MlpGrads mlp_gradients(const MlpParams& params, const MlpCache& cache,
                       const Mat& upstream, Mat* input_grad) {
  if (upstream.rows() != params.out_dim())
    throw std::invalid_argument("mlp_gradients: upstream dimension mismatch");
  const int L = params.n_layers();
  MlpGrads grads;
  grads.weights.resize(L);
  grads.biases.resize(L);

  Mat delta = upstream;
  for (int l = L - 1; l >= 0; --l) {
    const Mat& below = (l == 0) ? cache.input : cache.post[l - 1];
    grads.weights[l].noalias() = delta * below.transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Mat next = params.weights[l].transpose() * delta;
      next.array() *= (cache.pre[l - 1].array() > 0.0).cast<double>();
      delta = std::move(next);
    } else if (input_grad) {
      input_grad->noalias() = params.weights[0].transpose() * delta;
    }
  }
  return grads;
}

Mat mlp_input_gradient(const MlpParams& params, const MlpCache& cache,
                       const Mat& upstream) {
  const int L = params.n_layers();
  Mat delta = upstream;
  for (int l = L - 1; l > 0; --l) {
    Mat next = params.weights[l].transpose() * delta;
    next.array() *= (cache.pre[l - 1].array() > 0.0).cast<double>();
    delta = std::move(next);
  }
  return params.weights[0].transpose() * delta;
}

MlpGrads mlp_gradients1(const MlpParams& params, const Vec& input,
                        const Vec& upstream) {
  MlpCache cache;
  mlp_forward(params, Mat(input), &cache);
  return mlp_gradients(params, cache, Mat(upstream));
}

AdamState make_adam_state(const MlpParams& params) {
  AdamState s;
  for (size_t l = 0; l < params.weights.size(); ++l) {
    s.m_weights.push_back(Mat::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.v_weights.push_back(Mat::Zero(params.weights[l].rows(), params.weights[l].cols()));
    s.m_biases.push_back(Vec::Zero(params.biases[l].size()));
    s.v_biases.push_back(Vec::Zero(params.biases[l].size()));
  }
  return s;
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state,
               double lr) {
  check_shapes(params, grads, "adam_step");
  state.timestep += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.timestep);
  const double bc2 = 1.0 - std::pow(state.beta2, state.timestep);
  for (size_t l = 0; l < params.weights.size(); ++l) {
    require_finite(grads.weights[l], "weights", static_cast<int>(l));
    require_finite(grads.biases[l], "biases", static_cast<int>(l));
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v.array() = state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square();
      p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.eps);
    };
    update(params.weights[l], grads.weights[l], state.m_weights[l], state.v_weights[l]);
    update(params.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l]);
  }
}

AdamVecState make_adam_vec_state(Eigen::Index n) {
  AdamVecState s;
  s.m = Vec::Zero(n);
  s.v = Vec::Zero(n);
  return s;
}

void adam_step_vec(Vec& params, const Vec& grads, AdamVecState& state,
                   double lr) {
  if (!grads.allFinite()) throw std::runtime_error("non-finite gradient in vector parameter");
  state.timestep += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.timestep);
  const double bc2 = 1.0 - std::pow(state.beta2, state.timestep);
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v.array() = state.beta2 * state.v.array() + (1.0 - state.beta2) * grads.array().square();
  params.array() -= lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + state.eps);
}

double global_grad_norm(const MlpGrads& grads, const Vec* extra) {
  double sq = 0.0;
  for (const auto& w : grads.weights) sq += w.squaredNorm();
  for (const auto& b : grads.biases) sq += b.squaredNorm();
  if (extra) sq += extra->squaredNorm();
  return std::sqrt(sq);
}

void clip_gradient_norm(MlpGrads& grads, double max_norm, Vec* extra) {
  if (max_norm <= 0.0)
    throw std::invalid_argument("clip_gradient_norm: max_norm must be > 0");
  const double norm = global_grad_norm(grads, extra);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& w : grads.weights) w *= scale;
  for (auto& b : grads.biases) b *= scale;
  if (extra) *extra *= scale;
}

void polyak_update(MlpParams& target, const MlpParams& online, double tau) {
  if (target.layer_dims != online.layer_dims)
    throw std::invalid_argument("polyak_update: shape mismatch");
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("polyak_update: tau must lie in [0, 1]");
  for (size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * online.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * online.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

GaussianActor make_actor(const std::vector<int>& layer_dims,
                         std::mt19937_64& rng) {
  GaussianActor actor;
  actor.mlp = make_mlp(layer_dims, rng);
  actor.log_std = Vec::Constant(layer_dims.back(), std::log(kLogStdInitStd));
  return actor;
}

}  // namespace mepsac
