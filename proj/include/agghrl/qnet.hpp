#pragma once
// Recurrent dueling Q-network: dense hidden layer + leaky ReLU, GRU cell,
// then separate value/advantage heads combined with mean-centred advantages.
// A constraint filter masks structurally invalid actions both when acting
// and when evaluating targets.

#include <vector>

#include "agghrl/nn.hpp"

namespace agghrl {

struct QNetConfig {
  int state_dim = 0;
  int hidden_dim = 0;
  int rnn_dim = 0;
  int n_actions = 0;
  bool recurrent = true;    // false bypasses the GRU entirely
  double leaky_slope = 0.01;  // valid in (0,1]; 1.0 gives a linear network

  int feature_dim() const { return recurrent ? rnn_dim : hidden_dim; }
  void validate() const;
};

struct QNetworkParams {
  DenseParams hidden;
  GruParams gru;  // unused (empty) when the config is non-recurrent
  DenseParams value;
  DenseParams advantage;
};

QNetworkParams make_qnet(const QNetConfig& cfg, Rng& rng);
QNetworkParams zeros_like_qnet(const QNetworkParams& p);
void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, QNetworkParams& p);
void copy_params(const QNetworkParams& src, QNetworkParams& dst);

struct QCache {
  Vec state;
  Vec pre;   // hidden-layer preactivation
  Vec w;     // hidden-layer output
  GruCache gru;
  Vec feat;  // input to the dueling heads
  Vec adv;
  double val = 0.0;
};

struct QOut {
  Vec q;
  Vec h;  // next recurrent state (equals h_prev for non-recurrent nets)
};

QOut q_forward(const QNetworkParams& p, const QNetConfig& cfg, const Vec& state,
               const Vec& h_prev, QCache* cache = nullptr);

// Backprop of a per-action q-value gradient. Accumulates into grads; when
// grad_h_prev is non-null also accumulates the gradient wrt the incoming
// recurrent state (zero for non-recurrent nets).
void q_backward(const QNetworkParams& p, const QNetConfig& cfg, const QCache& cache,
                const Vec& grad_q, QNetworkParams& grads, Vec* grad_h_prev = nullptr);

// q_a = v + a_a - mean(a)
Vec dueling_combine(double v, const Vec& a);

struct ActionMask {
  std::vector<char> allow;

  static ActionMask all(int n) { return ActionMask{std::vector<char>(n, 1)}; }
  static ActionMask none(int n) { return ActionMask{std::vector<char>(n, 0)}; }
  int size() const { return static_cast<int>(allow.size()); }
  bool allowed(int i) const { return allow[i] != 0; }
  void set(int i, bool v) { allow[i] = v ? 1 : 0; }
  bool any() const;
  int count() const;
};

// Replaces disallowed entries with the most-negative finite double. Throws
// if the mask allows nothing.
Vec apply_constraint_mask(const Vec& q, const ActionMask& mask);

// Index of the best allowed action; first index wins ties. Throws if the
// mask allows nothing.
int masked_argmax(const Vec& q, const ActionMask& mask);

}  // namespace agghrl
