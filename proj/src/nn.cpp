#include "agghrl/nn.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace agghrl {

Vec matvec(const Mat& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.cols) throw std::invalid_argument("matvec: size mismatch");
  Vec y(m.rows, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    const double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    for (int c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

Vec matvec_t(const Mat& m, const Vec& y) {
  if (static_cast<int>(y.size()) != m.rows) throw std::invalid_argument("matvec_t: size mismatch");
  Vec x(m.cols, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    const double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    for (int c = 0; c < m.cols; ++c) x[c] += row[c] * y[r];
  }
  return x;
}

void outer_acc(Mat& m, const Vec& y, const Vec& x) {
  for (int r = 0; r < m.rows; ++r) {
    double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    for (int c = 0; c < m.cols; ++c) row[c] += y[r] * x[c];
  }
}

void add_acc(Vec& dst, const Vec& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Vec dense_forward(const DenseParams& p, const Vec& x) {
  Vec y = matvec(p.W, x);
  for (int i = 0; i < p.W.rows; ++i) y[i] += p.b[i];
  return y;
}

Vec dense_backward(const DenseParams& p, const Vec& x, const Vec& grad_out, DenseParams& grads) {
  outer_acc(grads.W, grad_out, x);
  add_acc(grads.b, grad_out);
  return matvec_t(p.W, grad_out);
}

Vec leaky_relu(const Vec& x, double slope) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] >= 0.0 ? x[i] : slope * x[i];
  return y;
}

Vec leaky_relu_backward(const Vec& x, const Vec& grad_out, double slope) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = grad_out[i] * (x[i] >= 0.0 ? 1.0 : slope);
  return g;
}

static double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec gru_forward(const GruParams& p, const Vec& x, const Vec& h_prev, GruCache* cache) {
  const int n = static_cast<int>(p.bz.size());
  Vec az = matvec(p.Wz, x), ar = matvec(p.Wr, x);
  {
    Vec uz = matvec(p.Uz, h_prev), ur = matvec(p.Ur, h_prev);
    for (int i = 0; i < n; ++i) {
      az[i] = sigm(az[i] + uz[i] + p.bz[i]);
      ar[i] = sigm(ar[i] + ur[i] + p.br[i]);
    }
  }
  Vec rh(n);
  for (int i = 0; i < n; ++i) rh[i] = ar[i] * h_prev[i];
  Vec ac = matvec(p.Wc, x);
  {
    Vec uc = matvec(p.Uc, rh);
    for (int i = 0; i < n; ++i) ac[i] = std::tanh(ac[i] + uc[i] + p.bc[i]);
  }
  Vec h(n);
  for (int i = 0; i < n; ++i) h[i] = (1.0 - az[i]) * h_prev[i] + az[i] * ac[i];
  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z = az;
    cache->r = ar;
    cache->hc = ac;
    cache->h = h;
  }
  return h;
}

void gru_backward(const GruParams& p, const GruCache& c, const Vec& grad_h, GruParams& grads,
                  Vec* grad_x, Vec* grad_h_prev) {
  const int n = static_cast<int>(c.h.size());
  Vec dz(n), dhc(n), dhp(n);
  for (int i = 0; i < n; ++i) {
    dz[i] = grad_h[i] * (c.hc[i] - c.h_prev[i]);
    dhc[i] = grad_h[i] * c.z[i];
    dhp[i] = grad_h[i] * (1.0 - c.z[i]);
  }
  // tanh candidate
  Vec dac(n);
  for (int i = 0; i < n; ++i) dac[i] = dhc[i] * (1.0 - c.hc[i] * c.hc[i]);
  Vec rh(n);
  for (int i = 0; i < n; ++i) rh[i] = c.r[i] * c.h_prev[i];
  outer_acc(grads.Wc, dac, c.x);
  outer_acc(grads.Uc, dac, rh);
  add_acc(grads.bc, dac);
  Vec drh = matvec_t(p.Uc, dac);
  Vec dr(n);
  for (int i = 0; i < n; ++i) {
    dr[i] = drh[i] * c.h_prev[i];
    dhp[i] += drh[i] * c.r[i];
  }
  // gates
  Vec daz(n), dar(n);
  for (int i = 0; i < n; ++i) {
    daz[i] = dz[i] * c.z[i] * (1.0 - c.z[i]);
    dar[i] = dr[i] * c.r[i] * (1.0 - c.r[i]);
  }
  outer_acc(grads.Wz, daz, c.x);
  outer_acc(grads.Uz, daz, c.h_prev);
  add_acc(grads.bz, daz);
  outer_acc(grads.Wr, dar, c.x);
  outer_acc(grads.Ur, dar, c.h_prev);
  add_acc(grads.br, dar);
  if (grad_x) {
    Vec dx = matvec_t(p.Wc, dac);
    add_acc(dx, matvec_t(p.Wz, daz));
    add_acc(dx, matvec_t(p.Wr, dar));
    add_acc(*grad_x, dx);
  }
  if (grad_h_prev) {
    add_acc(dhp, matvec_t(p.Uz, daz));
    add_acc(dhp, matvec_t(p.Ur, dar));
    add_acc(*grad_h_prev, dhp);
  }
}

MlpParams make_mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least in/out dims");
  MlpParams p;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    DenseParams layer;
    init_dense(layer, dims[i + 1], dims[i], rng);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Vec mlp_forward(const MlpParams& p, const Vec& x, double slope, MlpCache* cache) {
  Vec cur = x;
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
  }
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    if (cache) cache->inputs.push_back(cur);
    Vec a = dense_forward(p.layers[i], cur);
    if (i + 1 < p.layers.size()) {
      if (cache) cache->preacts.push_back(a);
      cur = leaky_relu(a, slope);
    } else {
      cur = std::move(a);
    }
  }
  return cur;
}

Vec mlp_backward(const MlpParams& p, const MlpCache& c, double slope, const Vec& grad_out,
                 MlpParams& grads) {
  Vec g = grad_out;
  for (std::size_t i = p.layers.size(); i-- > 0;) {
    if (i + 1 < p.layers.size()) g = leaky_relu_backward(c.preacts[i], g, slope);
    g = dense_backward(p.layers[i], c.inputs[i], g, grads.layers[i]);
  }
  return g;
}

double huber(double residual, double threshold) {
  const double a = std::fabs(residual);
  if (a <= threshold) return 0.5 * residual * residual;
  return threshold * (a - 0.5 * threshold);
}

double huber_grad(double residual, double threshold) {
  if (residual > threshold) return threshold;
  if (residual < -threshold) return -threshold;
  return residual;
}

static void glorot(Mat& m, int fan_out, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& w : m.a) w = rng.uniform(-bound, bound);
}

void init_dense(DenseParams& p, int out_dim, int in_dim, Rng& rng) {
  p.W = Mat(out_dim, in_dim);
  p.b = zeros(out_dim);
  glorot(p.W, out_dim, in_dim, rng);
}

void init_gru(GruParams& p, int h_dim, int x_dim, Rng& rng) {
  auto gate = [&](Mat& w, Mat& u, Vec& b) {
    w = Mat(h_dim, x_dim);
    u = Mat(h_dim, h_dim);
    b = zeros(h_dim);
    glorot(w, h_dim, x_dim, rng);
    glorot(u, h_dim, h_dim, rng);
  };
  gate(p.Wz, p.Uz, p.bz);
  gate(p.Wr, p.Ur, p.br);
  gate(p.Wc, p.Uc, p.bc);
}

DenseParams zeros_like(const DenseParams& p) {
  DenseParams z;
  z.W = Mat(p.W.rows, p.W.cols);
  z.b = zeros(p.b.size());
  return z;
}

GruParams zeros_like(const GruParams& p) {
  GruParams z;
  auto zm = [](const Mat& m) { return Mat(m.rows, m.cols); };
  z.Wz = zm(p.Wz);
  z.Uz = zm(p.Uz);
  z.bz = zeros(p.bz.size());
  z.Wr = zm(p.Wr);
  z.Ur = zm(p.Ur);
  z.br = zeros(p.br.size());
  z.Wc = zm(p.Wc);
  z.Uc = zm(p.Uc);
  z.bc = zeros(p.bc.size());
  return z;
}

MlpParams zeros_like(const MlpParams& p) {
  MlpParams z;
  for (const auto& layer : p.layers) z.layers.push_back(zeros_like(layer));
  return z;
}

static void push_mat(std::vector<TensorRef>& out, const std::string& name, Mat& m) {
  out.push_back({name, {m.rows, m.cols}, m.a.data(), m.a.size()});
}

static void push_vec(std::vector<TensorRef>& out, const std::string& name, Vec& v) {
  out.push_back({name, {static_cast<int>(v.size())}, v.data(), v.size()});
}

void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, DenseParams& p) {
  push_mat(out, prefix + "/W", p.W);
  push_vec(out, prefix + "/b", p.b);
}

void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, GruParams& p) {
  push_mat(out, prefix + "/Wz", p.Wz);
  push_mat(out, prefix + "/Uz", p.Uz);
  push_vec(out, prefix + "/bz", p.bz);
  push_mat(out, prefix + "/Wr", p.Wr);
  push_mat(out, prefix + "/Ur", p.Ur);
  push_vec(out, prefix + "/br", p.br);
  push_mat(out, prefix + "/Wc", p.Wc);
  push_mat(out, prefix + "/Uc", p.Uc);
  push_vec(out, prefix + "/bc", p.bc);
}

void collect_tensors(std::vector<TensorRef>& out, const std::string& prefix, MlpParams& p) {
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    collect_tensors(out, prefix + "/l" + std::to_string(i), p.layers[i]);
  }
}

bool RmsProp::apply(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("RmsProp: ref list mismatch");
  for (std::size_t t = 0; t < grads.size(); ++t) {
    if (params[t].size != grads[t].size) throw std::invalid_argument("RmsProp: tensor size mismatch");
    for (std::size_t i = 0; i < grads[t].size; ++i) {
      if (!std::isfinite(grads[t].data[i])) {
        std::fprintf(stderr, "[agghrl] skipping update: non-finite gradient in %s[%zu]\n",
                     grads[t].name.c_str(), i);
        return false;
      }
    }
  }
  if (v.size() != params.size()) {
    v.clear();
    for (const auto& p : params) v.push_back(zeros(p.size));
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t].size; ++i) {
      const double g = grads[t].data[i];
      v[t][i] = decay * v[t][i] + (1.0 - decay) * g * g;
      params[t].data[i] -= lr * g / std::sqrt(v[t][i] + eps);
    }
  }
  return true;
}

FiniteDiffReport finite_diff_check(const std::function<double()>& f,
                                   const std::vector<TensorRef>& params,
                                   const std::vector<TensorRef>& grads, double h) {
  if (params.size() != grads.size())
    throw std::invalid_argument("finite_diff_check: ref list mismatch");
  FiniteDiffReport rep;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size != grads[t].size)
      throw std::invalid_argument("finite_diff_check: tensor size mismatch");
    for (std::size_t i = 0; i < params[t].size; ++i) {
      double* slot = &params[t].data[i];
      const double saved = *slot;
      *slot = saved + h;
      const double fp = f();
      *slot = saved - h;
      const double fm = f();
      *slot = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double analytic = grads[t].data[i];
      const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
      const double rel = std::fabs(analytic - numeric) / scale;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_tensor = params[t].name;
        rep.worst_index = i;
        rep.analytic = analytic;
        rep.numeric = numeric;
      }
    }
  }
  return rep;
}

}  // namespace agghrl
