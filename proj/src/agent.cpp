#include "agghrl/agent.hpp"

#include <cmath>
#include <stdexcept>

namespace agghrl {

PolicyBundle make_bundle(const QNetConfig& cfg, double lr, double rms_decay, double rms_eps,
                         Rng& rng) {
  PolicyBundle b;
  b.cfg = cfg;
  b.online = make_qnet(cfg, rng);
  b.target = b.online;
  b.opt.lr = lr;
  b.opt.decay = rms_decay;
  b.opt.eps = rms_eps;
  b.reset_hidden();
  return b;
}

QNetConfig selector_net_config(const RunConfig& cfg) {
  QNetConfig q;
  q.state_dim = cfg.features().high_dim();
  q.hidden_dim = cfg.nn.high_hidden;
  q.rnn_dim = cfg.nn.high_rnn;
  q.n_actions = cfg.features().n_options();
  q.recurrent = cfg.nn.recurrent;
  q.leaky_slope = cfg.nn.leaky_slope;
  return q;
}

QNetConfig presenter_net_config(const RunConfig& cfg) {
  QNetConfig q;
  q.state_dim = cfg.features().low_dim();
  q.hidden_dim = cfg.nn.low_hidden;
  q.rnn_dim = cfg.nn.low_rnn;
  q.n_actions = cfg.features().n_actions();
  q.recurrent = cfg.nn.recurrent;
  q.leaky_slope = cfg.nn.leaky_slope;
  return q;
}

ActionMask option_mask(const FeatureConfig& fcfg, const AgentConfig& acfg, int page_number) {
  ActionMask mask = ActionMask::all(fcfg.n_options());
  if (acfg.first_page_core_only && page_number == 1) {
    for (int o = 1; o < fcfg.n_options(); ++o) mask.set(o, false);
  }
  return mask;
}

namespace {

int pick_masked(const Vec& q, const ActionMask& mask, double eps, Rng& rng) {
  if (rng.bernoulli(eps)) {
    const int allowed = mask.count();
    int draw = static_cast<int>(rng.uniform_int(allowed));
    for (int i = 0; i < mask.size(); ++i) {
      if (!mask.allowed(i)) continue;
      if (draw == 0) return i;
      --draw;
    }
    throw std::logic_error("pick_masked: exhausted mask");
  }
  return masked_argmax(q, mask);
}

}  // namespace

SourceSet select_option(PolicyBundle& selector, const FeatureConfig& fcfg, const HighState& s,
                        double eps, const ActionMask& mask, Rng& rng) {
  if (!mask.any()) return SourceSet::from_index(0);  // core-only fallback
  const Vec feat = featurize_high(s, fcfg);
  QOut out = q_forward(selector.online, selector.cfg, feat, selector.hidden);
  selector.hidden = out.h;
  return SourceSet::from_index(static_cast<unsigned>(pick_masked(out.q, mask, eps, rng)));
}

int select_action(PolicyBundle& presenter, const FeatureConfig& fcfg, const LowState& s,
                  double eps, const ActionMask& mask, Rng& rng) {
  const Vec feat = featurize_low(s, fcfg);
  QOut out = q_forward(presenter.online, presenter.cfg, feat, presenter.hidden);
  presenter.hidden = out.h;
  return pick_masked(out.q, mask, eps, rng);
}

double intrinsic_reward(const SlotFeedback& fb, double lambda, double delta) {
  if (fb.pay < 0.0) throw std::invalid_argument("intrinsic_reward: negative pay");
  const double click = fb.clicked ? 1.0 : -1.0;
  return lambda * click + (1.0 - lambda) * std::min(std::log1p(fb.pay), delta);
}

double extrinsic_reward(const std::vector<double>& intrinsics, double gamma) {
  if (intrinsics.empty()) throw std::invalid_argument("extrinsic_reward: empty reward list");
  double acc = 0.0, g = 1.0;
  for (double r : intrinsics) {
    acc += g * r;
    g *= gamma;
  }
  return acc / static_cast<double>(intrinsics.size());
}

SlotFill fill_slots(const SourceSet& o, const SourceResults& results, const SearchRequest& req,
                    PolicyBundle& presenter, const FeatureConfig& fcfg, double eps, Rng& rng,
                    bool collect_feats) {
  SlotFill fill;
  const int l = slot_count(o, results);
  if (l == 0) return fill;
  const int n_sources = fcfg.n_sources();
  std::vector<std::size_t> next_idx(n_sources, 0);  // stack cursors

  auto stack_top = [&](int j) -> const Item* {
    if (!o.contains(j)) return nullptr;
    const auto& stack = results.by_source[j];
    return next_idx[j] < stack.size() ? &stack[next_idx[j]] : nullptr;
  };
  auto build_state = [&](int last_action) {
    LowState s;
    s.request = req;
    s.top_items.resize(n_sources);
    s.available.resize(n_sources);
    s.remaining.resize(n_sources);
    for (int j = 0; j < n_sources; ++j) {
      const Item* top = stack_top(j);
      s.top_items[j] = top ? top->embedding : zeros(fcfg.d_item);
      s.available[j] = top ? 1 : 0;
      s.remaining[j] =
          top ? static_cast<int>(results.by_source[j].size() - next_idx[j]) : 0;
    }
    s.last_action = last_action;
    s.option = o;
    return s;
  };
  auto build_mask = [&]() {
    ActionMask m = ActionMask::none(fcfg.n_actions());
    for (int j = 0; j < n_sources; ++j)
      if (stack_top(j)) m.set(j, true);
    return m;
  };

  presenter.reset_hidden();
  int last_action = -1;
  for (int k = 0; k < l; ++k) {
    const LowState s = build_state(last_action);
    const ActionMask mask = build_mask();
    if (collect_feats) {
      fill.feats.push_back(featurize_low(s, fcfg));
      fill.masks.push_back(mask);
    }
    const int a = select_action(presenter, fcfg, s, eps, mask, rng);
    if (!mask.allowed(a)) throw std::logic_error("fill_slots: masked action selected");
    Item item = results.by_source[a][next_idx[a]];
    next_idx[a] += 1;
    fill.page.slots.push_back({k + 1, std::move(item)});
    fill.actions.push_back(a);
    last_action = a;
  }
  if (collect_feats) fill.end_feat = featurize_low(build_state(last_action), fcfg);
  return fill;
}

ExecutionResult execute_option(const SourceSet& o, const SourceResults& results, const SimEnv& env,
                               SessionContext& ctx, PolicyBundle& presenter,
                               const FeatureConfig& fcfg, const AgentConfig& acfg, double eps,
                               Rng& rng) {
  ExecutionResult ex;
  ex.l = slot_count(o, results);
  if (ex.l == 0) return ex;

  const SearchRequest req = env.make_request(ctx);
  SlotFill fill = fill_slots(o, results, req, presenter, fcfg, eps, rng, /*collect_feats=*/true);
  ex.page = std::move(fill.page);
  const std::vector<Vec>& feats = fill.feats;
  const std::vector<ActionMask>& masks = fill.masks;
  const std::vector<int>& actions = fill.actions;
  const Vec& end_feat = fill.end_feat;

  ex.feedback = env.respond(ex.page, ctx);
  bool any_click = false;
  double total_pay = 0.0;
  ex.intrinsics.resize(ex.l);
  for (int k = 0; k < ex.l; ++k) {
    ex.intrinsics[k] = intrinsic_reward(ex.feedback.slots[k], acfg.lambda, acfg.pay_clip);
    any_click = any_click || ex.feedback.slots[k].clicked;
    total_pay += ex.feedback.slots[k].pay;
  }
  if (!any_click && total_pay == 0.0) ex.intrinsics[ex.l - 1] += acfg.noclick_penalty;

  ex.r_e = acfg.strategy == "ii"
               ? [&] {
                   double m = 0.0;
                   for (double r : ex.intrinsics) m += r;
                   return m / static_cast<double>(ex.l);
                 }()
               : extrinsic_reward(ex.intrinsics, acfg.gamma);

  ex.low_transitions.resize(ex.l);
  for (int k = 0; k < ex.l; ++k) {
    auto& t = ex.low_transitions[k];
    t.state = to_f32(feats[k]);
    t.action = actions[k];
    t.reward = ex.intrinsics[k];
    t.terminal = k + 1 == ex.l;
    if (t.terminal) {
      t.next_state = to_f32(end_feat);
      t.next_action_mask.assign(fcfg.n_actions(), 0);
    } else {
      t.next_state = to_f32(feats[k + 1]);
      t.next_action_mask = masks[k + 1].allow;
    }
  }
  return ex;
}

std::vector<double> high_td_target(const std::vector<const HighTransition*>& batch,
                                   const PolicyBundle& selector, double gamma,
                                   bool smdp_discount) {
  std::vector<double> y;
  y.reserve(batch.size());
  const Vec h0 = Vec(selector.cfg.recurrent ? selector.cfg.rnn_dim : 0, 0.0);
  for (const HighTransition* t : batch) {
    if (t->terminal) {
      y.push_back(t->reward);
      continue;
    }
    const Vec s_next = to_f64(t->next_state);
    const ActionMask mask{t->next_option_mask};
    QOut online = q_forward(selector.online, selector.cfg, s_next, h0);
    const int best = masked_argmax(online.q, mask);
    QOut target = q_forward(selector.target, selector.cfg, s_next, h0);
    const double discount = smdp_discount ? std::pow(gamma, t->duration) : gamma;
    y.push_back(t->reward + discount * target.q[best]);
  }
  return y;
}

std::vector<double> low_td_target(const std::vector<const LowTransition*>& batch,
                                  const PolicyBundle& presenter, double gamma) {
  std::vector<double> y;
  y.reserve(batch.size());
  const Vec h0 = Vec(presenter.cfg.recurrent ? presenter.cfg.rnn_dim : 0, 0.0);
  for (const LowTransition* t : batch) {
    if (t->terminal) {
      y.push_back(t->reward);
      continue;
    }
    const Vec s_next = to_f64(t->next_state);
    const ActionMask mask{t->next_action_mask};
    QOut online = q_forward(presenter.online, presenter.cfg, s_next, h0);
    const int best = masked_argmax(online.q, mask);
    QOut target = q_forward(presenter.target, presenter.cfg, s_next, h0);
    y.push_back(t->reward + gamma * target.q[best]);
  }
  return y;
}

double train_step(PolicyBundle& bundle, const std::vector<Vec>& states,
                  const std::vector<int>& taken, const std::vector<double>& targets,
                  double huber_threshold) {
  const std::size_t n = states.size();
  if (n == 0 || taken.size() != n || targets.size() != n)
    throw std::invalid_argument("train_step: batch size mismatch");
  QNetworkParams grads = zeros_like_qnet(bundle.online);
  const Vec h0 = Vec(bundle.cfg.recurrent ? bundle.cfg.rnn_dim : 0, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    QCache cache;
    QOut out = q_forward(bundle.online, bundle.cfg, states[i], h0, &cache);
    const double residual = targets[i] - out.q[taken[i]];
    loss += huber(residual, huber_threshold);
    Vec grad_q = zeros(bundle.cfg.n_actions);
    grad_q[taken[i]] = -huber_grad(residual, huber_threshold) / static_cast<double>(n);
    q_backward(bundle.online, bundle.cfg, cache, grad_q, grads);
  }
  loss /= static_cast<double>(n);
  std::vector<TensorRef> pr, gr;
  collect_tensors(pr, "q", bundle.online);
  collect_tensors(gr, "q", grads);
  if (bundle.opt.apply(pr, gr)) bundle.step += 1;
  return loss;
}

void sync_targets(PolicyBundle& bundle, long long step, long long C) {
  if (C < 1) throw std::invalid_argument("sync_targets: period must be >= 1");
  if (step % C == 0) bundle.target = bundle.online;
}

double epsilon_at(const AgentConfig& acfg, long long session, long long budget,
                  double eps_final) {
  const double anneal = std::max(1.0, acfg.eps_frac * static_cast<double>(budget));
  if (static_cast<double>(session) >= anneal) return eps_final;
  const double t = static_cast<double>(session) / anneal;
  return acfg.eps_start + t * (eps_final - acfg.eps_start);
}

}  // namespace agghrl
