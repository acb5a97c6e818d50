#pragma once
// Minimal differentiable building blocks in float64: dense layers, leaky
// ReLU, a GRU cell, small MLPs, Huber loss, RMSProp, and a central
// finite-difference gradient checker. Everything exposes explicit
// forward/backward pairs; backward accumulates into caller-owned gradient
// structs so multi-step unrolls sum naturally.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "agghrl/rng.hpp"

namespace agghrl {

using Vec = std::vector<double>;

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

// Row-major matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// y = W x + b
struct DenseParams {
  Mat W;
  Vec b;
};

struct GruParams {
  Mat Wz, Uz;
  Vec bz;
  Mat Wr, Ur;
  Vec br;
  Mat Wc, Uc;
  Vec bc;
};

struct MlpParams {
  std::vector<DenseParams> layers;
};

Vec matvec(const Mat& m, const Vec& x);
Vec matvec_t(const Mat& m, const Vec& y);           // transpose product
void outer_acc(Mat& m, const Vec& y, const Vec& x);  // m += y xᵀ
void add_acc(Vec& dst, const Vec& src);

Vec dense_forward(const DenseParams& p, const Vec& x);
// Accumulates into grads, returns grad wrt x.
Vec dense_backward(const DenseParams& p, const Vec& x, const Vec& grad_out, DenseParams& grads);

Vec leaky_relu(const Vec& x, double slope);
Vec leaky_relu_backward(const Vec& x, const Vec& grad_out, double slope);

struct GruCache {
  Vec x, h_prev, z, r, hc, h;
};

// z = sigm(Wz x + Uz h + bz), r = sigm(Wr x + Ur h + br),
// hc = tanh(Wc x + Uc (r*h) + bc), h' = (1-z)*h + z*hc
Vec gru_forward(const GruParams& p, const Vec& x, const Vec& h_prev, GruCache* cache);
void gru_backward(const GruParams& p, const GruCache& c, const Vec& grad_h,
                  GruParams& grads, Vec* grad_x, Vec* grad_h_prev);

struct MlpCache {
  std::vector<Vec> inputs;   // input to each layer
  std::vector<Vec> preacts;  // pre-activation of each hidden layer
};

// Leaky-ReLU between layers, linear output.
MlpParams make_mlp(const std::vector<int>& dims, Rng& rng);
Vec mlp_forward(const MlpParams& p, const Vec& x, double slope, MlpCache* cache);
Vec mlp_backward(const MlpParams& p, const MlpCache& c, double slope, const Vec& grad_out,
                 MlpParams& grads);

// Huber with quadratic zone [-threshold, threshold].
double huber(double residual, double threshold);
double huber_grad(double residual, double threshold);

// Symmetric Glorot-uniform weights, zero biases.
void init_dense(DenseParams& p, int out_dim, int in_dim, Rng& rng);
void init_gru(GruParams& p, int h_dim, int x_dim, Rng& rng);

DenseParams zeros_like(const DenseParams& p);
GruParams zeros_like(const GruParams& p);
MlpParams zeros_like(const MlpParams& p);

// Named view into a parameter (or gradient) tensor; the canonical way to
// enumerate everything an optimizer or serializer needs to touch.
struct TensorRef {
  std::string name;
  std::vector<int> dims;
  double* data = nullptr;
  std::size_t size = 0;
};

void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, DenseParams& p);
void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, GruParams& p);
void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, MlpParams& p);

// RMSProp with per-entry accumulators: v <- decay v + (1-decay) g^2,
// th <- th - lr g / sqrt(v + eps). If any gradient entry is non-finite the
// whole step is skipped and a diagnostic is written to stderr.
struct RmsProp {
  double lr = 1e-3;
  double decay = 0.95;
  double eps = 1e-6;
  std::vector<Vec> v;

  bool apply(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads);
};

struct FiniteDiffReport {
  double max_rel_err = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central differences over every parameter entry: perturbs params in place
// (restoring after), re-evaluates f, and compares (f+ - f-)/(2h) against the
// aligned analytic gradient. Relative error uses max(|a|,|n|,1e-6) as scale.
FiniteDiffReport finite_diff_check(const std::function<double()>& f,
                                   const std::vector<TensorRef>& params,
                                   const std::vector<TensorRef>& grads, double h = 1e-5);

}  // namespace agghrl
