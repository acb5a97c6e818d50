#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "agghrl/agent.hpp"

namespace agghrl {

namespace {

struct PagePack {
  bool has_high = false;
  HighTransition high;
  std::vector<LowTransition> lows;
};

struct SessionPack {
  long long session = 0;
  std::vector<PagePack> pages;
  EpisodeRecord episode;
};

std::vector<Vec> source_means(const SourceResults& res, const FeatureConfig& fcfg) {
  std::vector<Vec> m(fcfg.n_sources());
  for (int j = 0; j < fcfg.n_sources(); ++j) m[j] = source_mean_embedding(res, j, fcfg.d_item);
  return m;
}

// Rollout + update state shared by the sequential path and the parallel
// trainer thread.
struct Trainer {
  const SimEnv& env;
  const RunConfig& cfg;
  FeatureConfig fcfg;
  PolicyBundle& selector;
  PolicyBundle& presenter;
  ReplayBuffer<HighTransition> high_replay;
  ReplayBuffer<LowTransition> low_replay;
  Rng sample_rng;
  std::vector<CurveRecord>* curves;

  Trainer(const SimEnv& e, const RunConfig& c, PolicyBundle& sel, PolicyBundle& pres,
          std::uint64_t seed, std::vector<CurveRecord>* out)
      : env(e),
        cfg(c),
        fcfg(c.features()),
        selector(sel),
        presenter(pres),
        high_replay(static_cast<std::size_t>(c.agent.memory_high)),
        low_replay(static_cast<std::size_t>(c.agent.memory_low)),
        sample_rng(mix64(seed, 0x7261696EULL)),
        curves(out) {}

  void apply_updates(PagePack& pp) {
    const AgentConfig& a = cfg.agent;
    const std::size_t B = static_cast<std::size_t>(a.batch);
    const int l = pp.has_high ? pp.high.duration : 0;
    for (int k = 0; k < l; ++k) {
      if (!low_replay.ready(B)) continue;
      const auto batch = low_replay.sample(B, sample_rng);
      const auto targets = low_td_target(batch, presenter, a.gamma);
      std::vector<Vec> states;
      std::vector<int> taken;
      states.reserve(B);
      for (const LowTransition* t : batch) {
        states.push_back(to_f64(t->state));
        taken.push_back(t->action);
      }
      const double loss = train_step(presenter, states, taken, targets, a.huber_threshold);
      sync_targets(presenter, presenter.step, a.sync_low);
      if (curves) curves->push_back({presenter.step, "low", loss});
    }
    for (auto& t : pp.lows) low_replay.push(std::move(t));
    if (!pp.has_high) return;
    high_replay.push(std::move(pp.high));
    if (!high_replay.ready(B)) return;
    const auto batch = high_replay.sample(B, sample_rng);
    const bool smdp = a.strategy != "ii";
    const auto targets = high_td_target(batch, selector, a.gamma, smdp);
    std::vector<Vec> states;
    std::vector<int> taken;
    states.reserve(B);
    for (const HighTransition* t : batch) {
      states.push_back(to_f64(t->state));
      taken.push_back(t->option);
    }
    const double loss = train_step(selector, states, taken, targets, a.huber_threshold);
    sync_targets(selector, selector.step, a.sync_high);
    if (curves) curves->push_back({selector.step, "high", loss});
  }
};

// One page: decide, execute, package transitions, advance to the next page
// when the session continues. Uses whatever bundles the caller hands in
// (live ones sequentially; snapshots in parallel rollouts).
PagePack step_page(const SimEnv& env, const RunConfig& cfg, const FeatureConfig& fcfg,
                   PolicyBundle& selector, PolicyBundle& presenter, SessionContext& ctx,
                   SearchRequest& req, SourceResults& res, SourceSet& latest, double eps_e,
                   double eps_i, Rng& rng, bool& alive, EpisodeRecord& ep) {
  const AgentConfig& a = cfg.agent;
  HighState hs{req, source_means(res, fcfg), latest};
  const Vec hs_feat = featurize_high(hs, fcfg);
  const ActionMask omask = option_mask(fcfg, a, req.page_number);
  const SourceSet o = select_option(selector, fcfg, hs, eps_e, omask, rng);
  ExecutionResult ex = execute_option(o, res, env, ctx, presenter, fcfg, a, eps_i, rng);

  PagePack pp;
  pp.lows = std::move(ex.low_transitions);
  if (ex.l > 0) {
    latest = o;
    ep.ret += ex.r_e;
    ep.pages += 1;
    ep.slots += ex.l;
    for (const SlotFeedback& sf : ex.feedback.slots)
      if (sf.clicked) ep.clicks += 1;
  }
  alive = env.continue_session(ctx);
  if (alive) {
    req = env.make_request(ctx);
    res = env.retrieve(ctx);
  }
  if (ex.l > 0) {
    pp.has_high = true;
    HighTransition& ht = pp.high;
    ht.state = to_f32(hs_feat);
    ht.option = static_cast<int>(o.index());
    ht.reward = ex.r_e;
    ht.duration = ex.l;
    ht.terminal = !alive;
    if (alive) {
      HighState hs2{req, source_means(res, fcfg), latest};
      ht.next_state = to_f32(featurize_high(hs2, fcfg));
      ht.next_option_mask = option_mask(fcfg, a, req.page_number).allow;
    } else {
      ht.next_state.assign(static_cast<std::size_t>(fcfg.high_dim()), 0.0f);
      ht.next_option_mask.assign(static_cast<std::size_t>(fcfg.n_options()), 0);
    }
  }
  return pp;
}

SessionPack rollout_session(const SimEnv& env, const RunConfig& cfg, const FeatureConfig& fcfg,
                            PolicyBundle& selector, PolicyBundle& presenter, long long session_idx,
                            double eps_e, double eps_i, std::int64_t uid, std::uint64_t sseed,
                            Rng& rng) {
  SessionPack pack;
  pack.session = session_idx;
  pack.episode.session = session_idx;
  SessionContext ctx = env.begin_session(uid, sseed);
  selector.reset_hidden();
  SearchRequest req = env.make_request(ctx);
  SourceResults res = env.retrieve(ctx);
  SourceSet latest;
  bool alive = true;
  while (alive) {
    pack.pages.push_back(step_page(env, cfg, fcfg, selector, presenter, ctx, req, res, latest,
                                   eps_e, eps_i, rng, alive, pack.episode));
  }
  return pack;
}

void apply_init(TrainResult& result, const TrainInit* init) {
  if (!init) return;
  if (init->selector) {
    copy_params(*init->selector, result.selector.online);
    copy_params(*init->selector, result.selector.target);
  }
  if (init->presenter) {
    copy_params(*init->presenter, result.presenter.online);
    copy_params(*init->presenter, result.presenter.target);
  }
}

TrainResult run_sequential(const SimEnv& env, const RunConfig& cfg, long long budget,
                           std::uint64_t seed, const TrainInit* init) {
  TrainResult result;
  const FeatureConfig fcfg = cfg.features();
  Rng init_rng(mix64(seed, 0x696E6974ULL));
  result.selector = make_bundle(selector_net_config(cfg), cfg.agent.lr_high, cfg.agent.rms_decay,
                                cfg.agent.rms_eps, init_rng);
  result.presenter = make_bundle(presenter_net_config(cfg), cfg.agent.lr_low, cfg.agent.rms_decay,
                                 cfg.agent.rms_eps, init_rng);
  apply_init(result, init);
  Trainer trainer(env, cfg, result.selector, result.presenter, seed, &result.curves);
  Rng env_rng(mix64(seed, 0x656E7673ULL));
  Rng agent_rng(mix64(seed, 0x6167656EULL));
  for (long long session = 0; session < budget; ++session) {
    const double eps_e = epsilon_at(cfg.agent, session, budget, cfg.agent.eps_high);
    const double eps_i = epsilon_at(cfg.agent, session, budget, cfg.agent.eps_low);
    const std::int64_t uid = static_cast<std::int64_t>(env_rng.uniform_int(1u << 31));
    SessionContext ctx = env.begin_session(uid, SimEnv::session_seed(seed, uid, session));
    result.selector.reset_hidden();
    SearchRequest req = env.make_request(ctx);
    SourceResults res = env.retrieve(ctx);
    SourceSet latest;
    bool alive = true;
    EpisodeRecord ep;
    ep.session = session;
    while (alive) {
      PagePack pp = step_page(env, cfg, fcfg, result.selector, result.presenter, ctx, req, res,
                              latest, eps_e, eps_i, agent_rng, alive, ep);
      trainer.apply_updates(pp);
    }
    result.episodes.push_back(ep);
  }
  return result;
}

TrainResult run_parallel(const SimEnv& env, const RunConfig& cfg, long long budget,
                         std::uint64_t seed, int workers, const TrainInit* init) {
  TrainResult result;
  const FeatureConfig fcfg = cfg.features();
  Rng init_rng(mix64(seed, 0x696E6974ULL));
  result.selector = make_bundle(selector_net_config(cfg), cfg.agent.lr_high, cfg.agent.rms_decay,
                                cfg.agent.rms_eps, init_rng);
  result.presenter = make_bundle(presenter_net_config(cfg), cfg.agent.lr_low, cfg.agent.rms_decay,
                                 cfg.agent.rms_eps, init_rng);
  apply_init(result, init);
  Trainer trainer(env, cfg, result.selector, result.presenter, seed, &result.curves);

  std::mutex params_mu;  // guards both bundles' parameters
  std::mutex queue_mu;
  std::condition_variable queue_cv;
  std::deque<SessionPack> queue;
  const std::size_t queue_cap = 16;
  std::atomic<long long> next_session{0};
  std::atomic<int> live_workers{workers};

  auto worker_fn = [&](int w) {
    Rng wrng(mix64(mix64(seed, 0x776F726BULL), static_cast<std::uint64_t>(w)));
    PolicyBundle sel, pres;
    for (;;) {
      const long long session = next_session.fetch_add(1);
      if (session >= budget) break;
      {
        std::lock_guard<std::mutex> lock(params_mu);
        sel = result.selector;
        pres = result.presenter;
      }
      const double eps_e = epsilon_at(cfg.agent, session, budget, cfg.agent.eps_high);
      const double eps_i = epsilon_at(cfg.agent, session, budget, cfg.agent.eps_low);
      const std::int64_t uid = static_cast<std::int64_t>(wrng.uniform_int(1u << 31));
      SessionPack pack = rollout_session(env, cfg, fcfg, sel, pres, session, eps_e, eps_i, uid,
                                         SimEnv::session_seed(seed, uid, session), wrng);
      std::unique_lock<std::mutex> lock(queue_mu);
      queue_cv.wait(lock, [&] { return queue.size() < queue_cap; });
      queue.push_back(std::move(pack));
      queue_cv.notify_all();
    }
    live_workers.fetch_sub(1);
    std::lock_guard<std::mutex> lock(queue_mu);
    queue_cv.notify_all();
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker_fn, w);

  long long consumed = 0;
  while (consumed < budget) {
    SessionPack pack;
    {
      std::unique_lock<std::mutex> lock(queue_mu);
      queue_cv.wait(lock, [&] { return !queue.empty() || live_workers.load() == 0; });
      if (queue.empty()) break;  // workers exhausted the budget early
      pack = std::move(queue.front());
      queue.pop_front();
      queue_cv.notify_all();
    }
    {
      std::lock_guard<std::mutex> lock(params_mu);
      for (auto& pp : pack.pages) trainer.apply_updates(pp);
    }
    result.episodes.push_back(pack.episode);
    consumed += 1;
  }
  for (auto& t : threads) t.join();
  return result;
}

}  // namespace

TrainResult run_training(const SimEnv& env, const RunConfig& cfg, long long budget_sessions,
                         std::uint64_t seed, int workers, const TrainInit* init) {
  if (budget_sessions < 0) throw std::invalid_argument("run_training: negative budget");
  if (workers < 1) throw std::invalid_argument("run_training: workers must be >= 1");
  if (workers == 1) return run_sequential(env, cfg, budget_sessions, seed, init);
  return run_parallel(env, cfg, budget_sessions, seed, workers, init);
}

}  // namespace agghrl
