#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace mepsac {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Dense feed-forward net: rectifier hidden layers, linear output.
// weights[l] has shape (layer_dims[l+1], layer_dims[l]).
struct MlpParams {
  std::vector<int> layer_dims;
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  int n_layers() const { return static_cast<int>(weights.size()); }
  int in_dim() const { return layer_dims.front(); }
  int out_dim() const { return layer_dims.back(); }
};

// Uniform +-1/sqrt(fan_in) init per layer.
MlpParams make_mlp(const std::vector<int>& layer_dims, std::mt19937_64& rng);
MlpParams make_zero_mlp(const std::vector<int>& layer_dims);

// Activations recorded by a forward pass, needed for backprop.
// post[l] is the rectified output of layer l (post.back() is pre-output).
struct MlpCache {
  Mat input;              // (in_dim, batch)
  std::vector<Mat> pre;   // pre-activation per hidden layer
  std::vector<Mat> post;  // post-activation per hidden layer
};

// Batched forward; columns are samples. Cache is optional.
Mat mlp_forward(const MlpParams& params, const Mat& input,
                MlpCache* cache = nullptr);
Vec mlp_forward1(const MlpParams& params, const Vec& input);

struct MlpGrads {
  std::vector<Mat> weights;
  std::vector<Vec> biases;
};
MlpGrads make_zero_grads(const MlpParams& params);

// Reverse-mode gradients of sum_b dot(upstream_col_b, output_col_b) with
// respect to every weight and bias. Optionally also returns the gradient
// with respect to the input matrix.
MlpGrads mlp_gradients(const MlpParams& params, const MlpCache& cache,
                       const Mat& upstream, Mat* input_grad = nullptr);

// Input gradient only; skips the weight-gradient GEMMs.
Mat mlp_input_gradient(const MlpParams& params, const MlpCache& cache,
                       const Mat& upstream);

// Single-input convenience used by the finite-difference tests.
MlpGrads mlp_gradients1(const MlpParams& params, const Vec& input,
                        const Vec& upstream);

struct AdamState {
  std::vector<Mat> m_weights, v_weights;
  std::vector<Vec> m_biases, v_biases;
  long timestep = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};
AdamState make_adam_state(const MlpParams& params);

// Standard bias-corrected Adam; throws on non-finite gradients, naming
// the offending tensor.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state,
               double lr);

// Scalar-track Adam for loose parameters (log_std entries, log_alpha).
struct AdamVecState {
  Vec m, v;
  long timestep = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};
AdamVecState make_adam_vec_state(Eigen::Index n);
void adam_step_vec(Vec& params, const Vec& grads, AdamVecState& state,
                   double lr);

double global_grad_norm(const MlpGrads& grads, const Vec* extra = nullptr);

// Scales all gradients by max_norm/norm when the global L2 norm exceeds
// max_norm. `extra` participates in the same global norm (actor log_std).
void clip_gradient_norm(MlpGrads& grads, double max_norm, Vec* extra = nullptr);

// target <- tau * online + (1 - tau) * target, entrywise.
void polyak_update(MlpParams& target, const MlpParams& online, double tau);

// Squashed-Gaussian policy: mean from the MLP, one learned
// state-independent log-std per action dimension, tanh squashing.
struct GaussianActor {
  MlpParams mlp;
  Vec log_std;  // clamped to [kLogStdMin, kLogStdMax]
};
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kLogStdInitStd = 0.5;  // log_std starts at ln(0.5)

GaussianActor make_actor(const std::vector<int>& layer_dims,
                         std::mt19937_64& rng);

}  // namespace mepsac
