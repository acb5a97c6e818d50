#include "agghrl/qnet.hpp"

#include <limits>
#include <stdexcept>

namespace agghrl {

void QNetConfig::validate() const {
  if (state_dim <= 0 || hidden_dim <= 0 || n_actions <= 0)
    throw std::invalid_argument("QNetConfig: dims must be positive");
  if (recurrent && rnn_dim <= 0)
    throw std::invalid_argument("QNetConfig: rnn_dim must be positive for recurrent nets");
  if (!(leaky_slope > 0.0 && leaky_slope <= 1.0))
    throw std::invalid_argument("QNetConfig: leaky_slope must be in (0,1]");
}

QNetworkParams make_qnet(const QNetConfig& cfg, Rng& rng) {
  cfg.validate();
  QNetworkParams p;
  init_dense(p.hidden, cfg.hidden_dim, cfg.state_dim, rng);
  if (cfg.recurrent) init_gru(p.gru, cfg.rnn_dim, cfg.hidden_dim, rng);
  init_dense(p.value, 1, cfg.feature_dim(), rng);
  init_dense(p.advantage, cfg.n_actions, cfg.feature_dim(), rng);
  return p;
}

QNetworkParams zeros_like_qnet(const QNetworkParams& p) {
  QNetworkParams z;
  z.hidden = zeros_like(p.hidden);
  if (!p.gru.bz.empty()) z.gru = zeros_like(p.gru);
  z.value = zeros_like(p.value);
  z.advantage = zeros_like(p.advantage);
  return z;
}

void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, QNetworkParams& p) {
  collect_tensors(out, prefix + "/hidden", p.hidden);
  if (!p.gru.bz.empty()) collect_tensors(out, prefix + "/gru", p.gru);
  collect_tensors(out, prefix + "/value", p.value);
  collect_tensors(out, prefix + "/advantage", p.advantage);
}

void copy_params(const QNetworkParams& src, QNetworkParams& dst) { dst = src; }

Vec dueling_combine(double v, const Vec& a) {
  double mean = 0.0;
  for (double x : a) mean += x;
  mean /= static_cast<double>(a.size());
  Vec q(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) q[i] = v + a[i] - mean;
  return q;
}

QOut q_forward(const QNetworkParams& p, const QNetConfig& cfg, const Vec& state,
               const Vec& h_prev, QCache* cache) {
  if (static_cast<int>(state.size()) != cfg.state_dim)
    throw std::invalid_argument("q_forward: state width mismatch");
  Vec pre = dense_forward(p.hidden, state);
  Vec w = leaky_relu(pre, cfg.leaky_slope);
  Vec feat;
  Vec h_next;
  GruCache gcache;
  if (cfg.recurrent) {
    if (static_cast<int>(h_prev.size()) != cfg.rnn_dim)
      throw std::invalid_argument("q_forward: recurrent state width mismatch");
    h_next = gru_forward(p.gru, w, h_prev, cache ? &gcache : nullptr);
    feat = h_next;
  } else {
    h_next = h_prev;
    feat = w;
  }
  Vec vout = dense_forward(p.value, feat);
  Vec adv = dense_forward(p.advantage, feat);
  Vec q = dueling_combine(vout[0], adv);
  if (cache) {
    cache->state = state;
    cache->pre = std::move(pre);
    cache->w = std::move(w);
    cache->gru = std::move(gcache);
    cache->feat = std::move(feat);
    cache->adv = std::move(adv);
    cache->val = vout[0];
  }
  return {std::move(q), std::move(h_next)};
}

void q_backward(const QNetworkParams& p, const QNetConfig& cfg, const QCache& cache,
                const Vec& grad_q, QNetworkParams& grads, Vec* grad_h_prev) {
  const int n = static_cast<int>(grad_q.size());
  if (n != cfg.n_actions) throw std::invalid_argument("q_backward: grad width mismatch");
  double gsum = 0.0;
  for (double g : grad_q) gsum += g;
  // q_a = v + a_a - mean(a): dv = sum(g), da_a = g_a - sum(g)/n
  Vec dadv(n);
  for (int i = 0; i < n; ++i) dadv[i] = grad_q[i] - gsum / n;
  Vec dfeat = dense_backward(p.value, cache.feat, Vec{gsum}, grads.value);
  add_acc(dfeat, dense_backward(p.advantage, cache.feat, dadv, grads.advantage));
  Vec dw;
  if (cfg.recurrent) {
    dw = zeros(cfg.hidden_dim);
    gru_backward(p.gru, cache.gru, dfeat, grads.gru, &dw, grad_h_prev);
  } else {
    dw = std::move(dfeat);
    if (grad_h_prev) { /* no recurrent path */ }
  }
  Vec dpre = leaky_relu_backward(cache.pre, dw, cfg.leaky_slope);
  dense_backward(p.hidden, cache.state, dpre, grads.hidden);
}

bool ActionMask::any() const {
  for (char c : allow)
    if (c) return true;
  return false;
}

int ActionMask::count() const {
  int n = 0;
  for (char c : allow) n += c ? 1 : 0;
  return n;
}

Vec apply_constraint_mask(const Vec& q, const ActionMask& mask) {
  if (static_cast<int>(q.size()) != mask.size())
    throw std::invalid_argument("apply_constraint_mask: width mismatch");
  if (!mask.any()) throw std::invalid_argument("apply_constraint_mask: no action allowed");
  Vec out = q;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.allowed(static_cast<int>(i))) out[i] = std::numeric_limits<double>::lowest();
  }
  return out;
}

int masked_argmax(const Vec& q, const ActionMask& mask) {
  if (static_cast<int>(q.size()) != mask.size())
    throw std::invalid_argument("masked_argmax: width mismatch");
  int best = -1;
  for (int i = 0; i < static_cast<int>(q.size()); ++i) {
    if (!mask.allowed(i)) continue;
    if (best < 0 || q[i] > q[best]) best = i;
  }
  if (best < 0) throw std::invalid_argument("masked_argmax: no action allowed");
  return best;
}

}  // namespace agghrl
