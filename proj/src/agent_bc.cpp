#include <algorithm>
#include <stdexcept>

#include "agghrl/agent.hpp"

namespace agghrl {

namespace {

std::vector<Vec> source_means(const SourceResults& res, const FeatureConfig& fcfg) {
  std::vector<Vec> m(fcfg.n_sources());
  for (int j = 0; j < fcfg.n_sources(); ++j) m[j] = source_mean_embedding(res, j, fcfg.d_item);
  return m;
}

}  // namespace

std::vector<ReplayedPage> replay_session(const SessionLog& log, const SimEnv& env,
                                         const RunConfig& cfg, bool need_decisions) {
  const FeatureConfig fcfg = cfg.features();
  const AgentConfig& a = cfg.agent;
  const UserProfile profile = env.user_profile(log.user_id);
  Vec click_sum = zeros(fcfg.d_item);
  int click_count = 0;
  unsigned latest_bits = 0;
  std::vector<ReplayedPage> out;
  out.reserve(log.pages.size());

  for (const PageLog& p : log.pages) {
    if (need_decisions && !p.has_decisions)
      throw std::runtime_error("replay_session: logged page lacks option/action decisions");
    ReplayedPage rp;
    rp.option_bits = p.option_bits;

    SearchRequest req;
    req.request_id = log.session_id * 100 + p.page_number;
    req.user_id = log.user_id;
    req.query_id = p.query_id;
    req.page_number = p.page_number;
    req.query_embedding = env.catalog().queries.at(static_cast<std::size_t>(p.query_id));
    req.demographics = profile.demographics;
    req.recent_click_mean = SimEnv::click_mean(click_sum, click_count, fcfg.d_item);

    if (static_cast<int>(p.retrieved_counts.size()) != fcfg.n_sources())
      throw std::runtime_error("replay_session: retrieved_counts width mismatch");
    rp.results.by_source.resize(fcfg.n_sources());
    std::size_t cursor = 0;
    for (int j = 0; j < fcfg.n_sources(); ++j) {
      for (int k = 0; k < p.retrieved_counts[j]; ++k) {
        if (cursor >= p.retrieved_items.size())
          throw std::runtime_error("replay_session: retrieved_items shorter than counts");
        Item it = env.catalog().item_by_id(p.retrieved_items[cursor++]);
        it.within_source_rank = k;
        rp.results.by_source[j].push_back(std::move(it));
      }
    }
    if (cursor != p.retrieved_items.size())
      throw std::runtime_error("replay_session: retrieved_items longer than counts");

    rp.high_state = HighState{req, source_means(rp.results, fcfg),
                              SourceSet::from_index(latest_bits)};

    if (p.has_decisions) {
      const SourceSet o = SourceSet::from_index(p.option_bits);
      rp.l = static_cast<int>(p.actions.size());
      std::vector<std::size_t> next_idx(fcfg.n_sources(), 0);
      auto stack_top = [&](int j) -> const Item* {
        if (!o.contains(j)) return nullptr;
        const auto& stack = rp.results.by_source[j];
        return next_idx[j] < stack.size() ? &stack[next_idx[j]] : nullptr;
      };
      int last_action = -1;
      for (int k = 0; k < rp.l; ++k) {
        LowState s;
        s.request = req;
        s.top_items.resize(fcfg.n_sources());
        s.available.resize(fcfg.n_sources());
        s.remaining.resize(fcfg.n_sources());
        ActionMask mask = ActionMask::none(fcfg.n_actions());
        for (int j = 0; j < fcfg.n_sources(); ++j) {
          const Item* top = stack_top(j);
          s.top_items[j] = top ? top->embedding : zeros(fcfg.d_item);
          s.available[j] = top ? 1 : 0;
          s.remaining[j] =
              top ? static_cast<int>(rp.results.by_source[j].size() - next_idx[j]) : 0;
          if (top) mask.set(j, true);
        }
        s.last_action = last_action;
        s.option = o;
        const int action = p.actions[k];
        if (action < 0 || action >= fcfg.n_actions() || !mask.allowed(action))
          throw std::runtime_error("replay_session: logged action violates stack state");
        rp.low_feats.push_back(featurize_low(s, fcfg));
        rp.action_masks.push_back(mask);
        rp.actions.push_back(action);
        next_idx[action] += 1;
        last_action = action;
      }
      latest_bits = p.option_bits;
    }

    const std::size_t slots = p.shown_items.size();
    if (p.clicked.size() != slots || p.pay.size() != slots)
      throw std::runtime_error("replay_session: feedback arrays width mismatch");
    bool any_click = false;
    double total_pay = 0.0;
    rp.intrinsics.resize(slots);
    for (std::size_t k = 0; k < slots; ++k) {
      SlotFeedback fb;
      fb.clicked = p.clicked[k] != 0;
      fb.pay = p.pay[k];
      rp.intrinsics[k] = intrinsic_reward(fb, a.lambda, a.pay_clip);
      any_click = any_click || fb.clicked;
      total_pay += fb.pay;
    }
    if (slots > 0 && !any_click && total_pay == 0.0)
      rp.intrinsics[slots - 1] += a.noclick_penalty;
    if (slots > 0) {
      if (a.strategy == "ii") {
        double m = 0.0;
        for (double r : rp.intrinsics) m += r;
        rp.r_e = m / static_cast<double>(slots);
      } else {
        rp.r_e = extrinsic_reward(rp.intrinsics, a.gamma);
      }
    }

    for (std::size_t k = 0; k < slots; ++k) {
      if (p.clicked[k] == 0) continue;
      const Item& it = env.catalog().item_by_id(p.shown_items[k]);
      SimEnv::update_click_stats(click_sum, click_count, it.embedding);
    }
    out.push_back(std::move(rp));
  }
  return out;
}

namespace {

struct SeqStep {
  Vec state;
  int taken = 0;
  double ret = 0.0;  // Monte-Carlo discounted return observed in the log
};
using Sequence = std::vector<SeqStep>;

// Regresses Q(s, a_logged) toward the logged return, walking each sequence
// with the recurrent state carried forward exactly as greedy replay does
// (gradients do not flow through time; each step backprops through its own
// cell only). One optimizer step per minibatch of sequences, averaged over
// the steps it contains.
void fit_sequences(PolicyBundle& bundle, const std::vector<Sequence>& seqs, int epochs,
                   std::size_t batch, double huber_threshold, Rng& rng) {
  if (seqs.empty()) return;
  std::vector<std::size_t> order(seqs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t B = std::min(batch, seqs.size());
  for (int e = 0; e < epochs; ++e) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);
    for (std::size_t start = 0; start + B <= order.size(); start += B) {
      std::size_t n_steps = 0;
      for (std::size_t i = start; i < start + B; ++i) n_steps += seqs[order[i]].size();
      if (n_steps == 0) continue;
      QNetworkParams grads = zeros_like_qnet(bundle.online);
      for (std::size_t i = start; i < start + B; ++i) {
        const Sequence& seq = seqs[order[i]];
        Vec h = zeros(bundle.cfg.recurrent ? bundle.cfg.rnn_dim : 0);
        for (const SeqStep& step : seq) {
          QCache cache;
          QOut out = q_forward(bundle.online, bundle.cfg, step.state, h, &cache);
          const double residual = step.ret - out.q[static_cast<std::size_t>(step.taken)];
          Vec gq = zeros(bundle.cfg.n_actions);
          gq[static_cast<std::size_t>(step.taken)] =
              -huber_grad(residual, huber_threshold) / static_cast<double>(n_steps);
          q_backward(bundle.online, bundle.cfg, cache, gq, grads);
          h = out.h;
        }
      }
      std::vector<TensorRef> p_refs, g_refs;
      collect_tensors(p_refs, "p", bundle.online);
      collect_tensors(g_refs, "p", grads);
      if (bundle.opt.apply(p_refs, g_refs)) bundle.step += 1;
    }
  }
  copy_params(bundle.online, bundle.target);
  bundle.reset_hidden();
}

}  // namespace

void bc_pretrain(const std::vector<SessionLog>& logs, const SimEnv& env, const RunConfig& cfg,
                 PolicyBundle& selector, PolicyBundle& presenter, int epochs, Rng& rng) {
  if (logs.empty()) return;
  const AgentConfig& a = cfg.agent;

  std::vector<Sequence> high_seqs, low_seqs;
  const FeatureConfig fcfg = cfg.features();
  for (const SessionLog& log : logs) {
    const auto pages = replay_session(log, env, cfg, /*need_decisions=*/true);
    // Page-level discounted returns across the session: G_p = r_e + γ^l G_{p+1}.
    std::vector<double> G(pages.size(), 0.0);
    for (std::size_t p = pages.size(); p-- > 0;) {
      const double cont = p + 1 < pages.size()
                              ? std::pow(a.gamma, std::max(1, pages[p].l)) * G[p + 1]
                              : 0.0;
      G[p] = pages[p].r_e + cont;
    }
    Sequence high_seq;
    for (std::size_t p = 0; p < pages.size(); ++p) {
      const ReplayedPage& rp = pages[p];
      high_seq.push_back(
          {featurize_high(rp.high_state, fcfg), static_cast<int>(rp.option_bits), G[p]});
      // Slot-level returns within the page: g_k = r_k + γ g_{k+1}.
      double g = 0.0;
      std::vector<double> slot_ret(rp.low_feats.size(), 0.0);
      for (std::size_t k = rp.low_feats.size(); k-- > 0;) {
        g = rp.intrinsics[k] + a.gamma * g;
        slot_ret[k] = g;
      }
      Sequence low_seq;
      for (std::size_t k = 0; k < rp.low_feats.size(); ++k)
        low_seq.push_back({rp.low_feats[k], rp.actions[k], slot_ret[k]});
      if (!low_seq.empty()) low_seqs.push_back(std::move(low_seq));
    }
    if (!high_seq.empty()) high_seqs.push_back(std::move(high_seq));
  }

  // A selector sequence is a whole session (many pages), a presenter
  // sequence a single page; shrink the selector's batch so both levels see
  // comparable optimizer-step counts per epoch.
  const std::size_t high_batch =
      std::max<std::size_t>(1, static_cast<std::size_t>(a.batch) / 8);
  fit_sequences(selector, high_seqs, epochs, high_batch, a.huber_threshold, rng);
  fit_sequences(presenter, low_seqs, epochs, static_cast<std::size_t>(a.batch),
                a.huber_threshold, rng);
}

AgreementStats bc_agreement(const std::vector<SessionLog>& logs, const SimEnv& env,
                            const RunConfig& cfg, PolicyBundle& selector,
                            PolicyBundle& presenter) {
  AgreementStats stats;
  const FeatureConfig fcfg = cfg.features();
  long long high_hits = 0, low_hits = 0;
  for (const SessionLog& log : logs) {
    const auto pages = replay_session(log, env, cfg, /*need_decisions=*/true);
    selector.reset_hidden();
    for (const ReplayedPage& rp : pages) {
      const Vec feat = featurize_high(rp.high_state, fcfg);
      QOut out = q_forward(selector.online, selector.cfg, feat, selector.hidden);
      selector.hidden = out.h;
      const ActionMask omask = option_mask(fcfg, cfg.agent, rp.high_state.request.page_number);
      if (omask.any() &&
          masked_argmax(out.q, omask) == static_cast<int>(rp.option_bits))
        ++high_hits;
      ++stats.n_high;
      presenter.reset_hidden();
      for (std::size_t k = 0; k < rp.low_feats.size(); ++k) {
        QOut lo = q_forward(presenter.online, presenter.cfg, rp.low_feats[k], presenter.hidden);
        presenter.hidden = lo.h;
        if (masked_argmax(lo.q, rp.action_masks[k]) == rp.actions[k]) ++low_hits;
        ++stats.n_low;
      }
    }
  }
  stats.high = stats.n_high ? static_cast<double>(high_hits) / stats.n_high : 0.0;
  stats.low = stats.n_low ? static_cast<double>(low_hits) / stats.n_low : 0.0;
  return stats;
}

}  // namespace agghrl
