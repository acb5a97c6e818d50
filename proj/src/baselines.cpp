#include "agghrl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace agghrl {

namespace {

std::vector<Vec> source_means(const SourceResults& res, const FeatureConfig& fcfg) {
  std::vector<Vec> m(fcfg.n_sources());
  for (int j = 0; j < fcfg.n_sources(); ++j) m[j] = source_mean_embedding(res, j, fcfg.d_item);
  return m;
}

int source_id_by_name(const std::string& name, const EnvConfig& env) {
  for (int v = 0; v < env.n_verticals; ++v)
    if (env.vertical_names[v] == name) return 1 + v;
  throw std::runtime_error("templates: unknown vertical name '" + name + "'");
}

}  // namespace

std::vector<TemplateSpec> parse_templates(const std::string& text, const EnvConfig& env) {
  std::vector<TemplateSpec> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    TemplateSpec t;
    t.name = cur;
    if (cur != "core") {
      std::string part;
      auto take = [&](const std::string& p) {
        const auto at = p.find('@');
        if (at == std::string::npos)
          throw std::runtime_error("templates: expected name@slot in '" + p + "'");
        const int source = source_id_by_name(p.substr(0, at), env);
        const int slot = std::stoi(p.substr(at + 1));
        if (slot < 1) throw std::runtime_error("templates: slots are 1-based");
        t.vertical_slots.emplace_back(source, slot);
      };
      for (char c : cur) {
        if (c == '+') {
          take(part);
          part.clear();
        } else {
          part.push_back(c);
        }
      }
      take(part);
    }
    out.push_back(std::move(t));
    cur.clear();
  };
  for (char c : text) {
    if (c == '|') flush();
    else if (!std::isspace(static_cast<unsigned char>(c))) cur.push_back(c);
  }
  flush();
  if (out.empty()) throw std::runtime_error("templates: empty template list");
  return out;
}

std::vector<std::pair<int, int>> rule_vertical_slots(const RunConfig& cfg) {
  const auto slots = parse_int_list(cfg.baselines.rule_slots);
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < cfg.env.n_verticals; ++v) out.emplace_back(1 + v, slots.at(v));
  return out;
}

Page compose_slotted_page(const SourceResults& results,
                          const std::vector<std::pair<int, int>>& vertical_slots) {
  std::map<int, int> pending;  // slot -> source, only nonempty sources
  for (const auto& [source, slot] : vertical_slots) {
    if (results.count(source) > 0) {
      if (!pending.emplace(slot, source).second)
        throw std::runtime_error("compose_slotted_page: duplicate slot assignment");
    }
  }
  Page page;
  const auto& core = results.by_source[0];
  std::size_t core_i = 0;
  int pos = 1;
  while (core_i < core.size() || (!pending.empty() && pending.begin()->first == pos)) {
    const auto it = pending.find(pos);
    if (it != pending.end()) {
      page.slots.push_back({pos, results.by_source[it->second][0]});
      pending.erase(it);
    } else if (core_i < core.size()) {
      page.slots.push_back({pos, core[core_i++]});
    } else {
      break;  // unreachable vertical slot beyond the assembled page
    }
    ++pos;
  }
  return page;
}

Page rule_policy(const SearchRequest& x, const SourceResults& results,
                 const std::vector<std::pair<int, int>>& vertical_slots) {
  if (x.page_number <= 1) return compose_slotted_page(results, {});
  return compose_slotted_page(results, vertical_slots);
}

namespace {

PageDecision decisions_of(const Page& page) {
  PageDecision d;
  d.has = true;
  for (const auto& slot : page.slots) {
    d.actions.push_back(slot.item.source);
    if (slot.item.source > 0) d.option_bits |= 1u << (slot.item.source - 1);
  }
  return d;
}

class RulePolicyImpl : public PagePolicy {
 public:
  explicit RulePolicyImpl(const RunConfig& cfg) : slots_(rule_vertical_slots(cfg)) {}
  std::string name() const override { return "rule"; }
  Page present(const SearchRequest& req, const SourceResults& res, PageDecision* dec) override {
    Page page = rule_policy(req, res, slots_);
    if (dec) *dec = decisions_of(page);
    return page;
  }

 private:
  std::vector<std::pair<int, int>> slots_;
};

class HrlPolicyImpl : public PagePolicy {
 public:
  HrlPolicyImpl(std::shared_ptr<PolicyBundle> sel, std::shared_ptr<PolicyBundle> pres,
                const RunConfig& cfg, double eps, std::uint64_t seed)
      : selector_(std::move(sel)),
        presenter_(std::move(pres)),
        fcfg_(cfg.features()),
        acfg_(cfg.agent),
        eps_(eps),
        rng_(seed) {}
  std::string name() const override { return "hrl"; }
  void begin_session() override {
    selector_->reset_hidden();
    latest_ = SourceSet{};
  }
  Page present(const SearchRequest& req, const SourceResults& res, PageDecision* dec) override {
    HighState hs{req, source_means(res, fcfg_), latest_};
    const ActionMask omask = option_mask(fcfg_, acfg_, req.page_number);
    const SourceSet o = select_option(*selector_, fcfg_, hs, eps_, omask, rng_);
    SlotFill fill = fill_slots(o, res, req, *presenter_, fcfg_, eps_, rng_, false);
    if (!fill.page.slots.empty()) latest_ = o;
    if (dec) {
      dec->has = true;
      dec->option_bits = o.index();
      dec->actions = fill.actions;
    }
    return fill.page;
  }

 private:
  std::shared_ptr<PolicyBundle> selector_;
  std::shared_ptr<PolicyBundle> presenter_;
  FeatureConfig fcfg_;
  AgentConfig acfg_;
  double eps_;
  Rng rng_;
  SourceSet latest_;
};

class FlatPolicyImpl : public PagePolicy {
 public:
  FlatPolicyImpl(std::shared_ptr<FlatAgent> agent, const RunConfig& cfg, double eps,
                 std::uint64_t seed)
      : agent_(std::move(agent)), fcfg_(cfg.features()), eps_(eps), rng_(seed) {}
  std::string name() const override { return "flat"; }
  void begin_session() override { latest_ = SourceSet{}; }
  Page present(const SearchRequest& req, const SourceResults& res, PageDecision* dec) override {
    HighState hs{req, source_means(res, fcfg_), latest_};
    const Vec feat = featurize_high(hs, fcfg_);
    PolicyBundle& b = agent_->bundle;
    QOut out = q_forward(b.online, b.cfg, feat, b.hidden);
    int choice;
    if (rng_.bernoulli(eps_)) {
      choice = static_cast<int>(rng_.uniform_int(agent_->templates.size()));
    } else {
      choice = masked_argmax(out.q, ActionMask::all(static_cast<int>(agent_->templates.size())));
    }
    Page page = compose_slotted_page(res, agent_->templates[choice].vertical_slots);
    PageDecision d = decisions_of(page);
    latest_ = SourceSet::from_index(d.option_bits);
    if (dec) *dec = d;
    return page;
  }

 private:
  std::shared_ptr<FlatAgent> agent_;
  FeatureConfig fcfg_;
  double eps_;
  Rng rng_;
  SourceSet latest_;
};

// BC selector with either the RM ranker or the HRL presenter downstream;
// and the HRL selector with the RM ranker downstream.
class CompositePolicyImpl : public PagePolicy {
 public:
  enum class Select { kBc, kRlSelector };
  enum class Present { kRm, kRlPresenter };

  CompositePolicyImpl(std::string name, Select sel_kind, Present pres_kind,
                      const PolicyArtifacts& art, const RunConfig& cfg, double eps,
                      std::uint64_t seed)
      : name_(std::move(name)),
        sel_kind_(sel_kind),
        pres_kind_(pres_kind),
        art_(art),
        cfg_(cfg),
        fcfg_(cfg.features()),
        eps_(eps),
        rng_(seed) {
    if (sel_kind_ == Select::kBc && (!art_.classifiers || !art_.classifiers->trained))
      throw std::runtime_error(name_ + ": vertical classifiers missing or untrained");
    if (sel_kind_ == Select::kRlSelector && !art_.selector)
      throw std::runtime_error(name_ + ": selector weights missing");
    if (pres_kind_ == Present::kRm && (!art_.reward_model || !art_.reward_model->trained))
      throw std::runtime_error(name_ + ": reward model missing or untrained");
    if (pres_kind_ == Present::kRlPresenter && !art_.presenter)
      throw std::runtime_error(name_ + ": presenter weights missing");
  }
  std::string name() const override { return name_; }
  void begin_session() override {
    latest_ = SourceSet{};
    if (art_.selector) art_.selector->reset_hidden();
  }
  Page present(const SearchRequest& req, const SourceResults& res, PageDecision* dec) override {
    HighState hs{req, source_means(res, fcfg_), latest_};
    SourceSet o;
    if (sel_kind_ == Select::kBc) {
      o = bc_vertical_select(hs, fcfg_, *art_.classifiers);
      const ActionMask omask = option_mask(fcfg_, cfg_.agent, req.page_number);
      if (!omask.allowed(static_cast<int>(o.index()))) o = SourceSet::from_index(0);
    } else {
      const ActionMask omask = option_mask(fcfg_, cfg_.agent, req.page_number);
      o = select_option(*art_.selector, fcfg_, hs, eps_, omask, rng_);
    }
    Page page;
    std::vector<int> actions;
    if (pres_kind_ == Present::kRm) {
      const RewardModel& rm = *art_.reward_model;
      page = rm_present(o, res, [&](const Item& it) { return rm_score(rm, req, it, fcfg_); });
      for (const auto& slot : page.slots) actions.push_back(slot.item.source);
    } else {
      SlotFill fill = fill_slots(o, res, req, *art_.presenter, fcfg_, eps_, rng_, false);
      page = std::move(fill.page);
      actions = std::move(fill.actions);
    }
    if (!page.slots.empty()) latest_ = o;
    if (dec) {
      dec->has = true;
      dec->option_bits = o.index();
      dec->actions = std::move(actions);
    }
    return page;
  }

 private:
  std::string name_;
  Select sel_kind_;
  Present pres_kind_;
  PolicyArtifacts art_;
  RunConfig cfg_;
  FeatureConfig fcfg_;
  double eps_;
  Rng rng_;
  SourceSet latest_;
};

}  // namespace

FlatAgent make_flat_agent(const RunConfig& cfg, Rng& rng) {
  FlatAgent agent;
  agent.templates = parse_templates(cfg.baselines.templates, cfg.env);
  QNetConfig q;
  q.state_dim = cfg.features().high_dim();
  q.hidden_dim = cfg.nn.high_hidden;
  q.rnn_dim = 0;
  q.n_actions = static_cast<int>(agent.templates.size());
  q.recurrent = false;
  q.leaky_slope = cfg.nn.leaky_slope;
  agent.bundle = make_bundle(q, cfg.baselines.flat_lr, cfg.agent.rms_decay, cfg.agent.rms_eps, rng);
  return agent;
}

FlatTrainResult train_flat(const SimEnv& env, const RunConfig& cfg, long long budget_sessions,
                           std::uint64_t seed) {
  FlatTrainResult result;
  const FeatureConfig fcfg = cfg.features();
  const AgentConfig& a = cfg.agent;
  Rng init_rng(mix64(seed, 0x666C6174ULL));
  result.agent = make_flat_agent(cfg, init_rng);
  PolicyBundle& bundle = result.agent.bundle;
  const auto& templates = result.agent.templates;
  const int n_templates = static_cast<int>(templates.size());
  ReplayBuffer<HighTransition> replay(static_cast<std::size_t>(cfg.baselines.flat_memory));
  Rng env_rng(mix64(seed, 0x65667276ULL));
  Rng agent_rng(mix64(seed, 0x61677276ULL));
  const std::size_t B = static_cast<std::size_t>(a.batch);

  for (long long session = 0; session < budget_sessions; ++session) {
    const double eps = epsilon_at(a, session, budget_sessions, a.eps_high);
    const std::int64_t uid = static_cast<std::int64_t>(env_rng.uniform_int(1u << 31));
    SessionContext ctx = env.begin_session(uid, SimEnv::session_seed(seed, uid, session));
    SearchRequest req = env.make_request(ctx);
    SourceResults res = env.retrieve(ctx);
    SourceSet latest;
    bool alive = true;
    double ret = 0.0;
    int pages = 0;
    while (alive) {
      HighState hs{req, source_means(res, fcfg), latest};
      const Vec feat = featurize_high(hs, fcfg);
      QOut out = q_forward(bundle.online, bundle.cfg, feat, bundle.hidden);
      int choice;
      if (agent_rng.bernoulli(eps)) {
        choice = static_cast<int>(agent_rng.uniform_int(n_templates));
      } else {
        choice = masked_argmax(out.q, ActionMask::all(n_templates));
      }
      Page page = compose_slotted_page(res, templates[choice].vertical_slots);
      const int l = static_cast<int>(page.slots.size());
      double r_e = 0.0;
      if (l > 0) {
        PageFeedback fb = env.respond(page, ctx);
        bool any_click = false;
        double total_pay = 0.0;
        std::vector<double> intr(l);
        for (int k = 0; k < l; ++k) {
          intr[k] = intrinsic_reward(fb.slots[k], a.lambda, a.pay_clip);
          any_click = any_click || fb.slots[k].clicked;
          total_pay += fb.slots[k].pay;
        }
        if (!any_click && total_pay == 0.0) intr[l - 1] += a.noclick_penalty;
        r_e = extrinsic_reward(intr, a.gamma);
        unsigned bits = 0;
        for (const auto& slot : page.slots)
          if (slot.item.source > 0) bits |= 1u << (slot.item.source - 1);
        latest = SourceSet::from_index(bits);
        ret += r_e;
        pages += 1;
      }
      alive = env.continue_session(ctx);
      if (alive) {
        req = env.make_request(ctx);
        res = env.retrieve(ctx);
      }
      if (l > 0) {
        HighTransition t;
        t.state = to_f32(feat);
        t.option = choice;
        t.reward = r_e;
        t.duration = 1;
        t.terminal = !alive;
        if (alive) {
          HighState hs2{req, source_means(res, fcfg), latest};
          t.next_state = to_f32(featurize_high(hs2, fcfg));
          t.next_option_mask.assign(static_cast<std::size_t>(n_templates), 1);
        } else {
          t.next_state.assign(static_cast<std::size_t>(fcfg.high_dim()), 0.0f);
          t.next_option_mask.assign(static_cast<std::size_t>(n_templates), 0);
        }
        replay.push(std::move(t));
        if (replay.ready(B)) {
          const auto batch = replay.sample(B, agent_rng);
          // γ^1 targets: flat transitions carry duration 1.
          const auto targets = high_td_target(batch, bundle, a.gamma, /*smdp_discount=*/true);
          std::vector<Vec> states;
          std::vector<int> taken;
          states.reserve(B);
          for (const HighTransition* tr : batch) {
            states.push_back(to_f64(tr->state));
            taken.push_back(tr->option);
          }
          const double loss = train_step(bundle, states, taken, targets, a.huber_threshold);
          sync_targets(bundle, bundle.step, cfg.baselines.flat_sync);
          result.curves.push_back({bundle.step, "flat", loss});
        }
      }
    }
    result.episodes.push_back({session, ret, pages});
  }
  return result;
}

VerticalClassifiers make_classifiers(const RunConfig& cfg, Rng& rng) {
  const FeatureConfig fcfg = cfg.features();
  VerticalClassifiers cls;
  cls.slope = cfg.nn.leaky_slope;
  const int in_dim = fcfg.high_dim();
  const int h = cfg.baselines.bc_hidden;
  for (int v = 0; v < fcfg.n_verticals; ++v)
    cls.nets.push_back(make_mlp({in_dim, h, h, h, 1}, rng));
  return cls;
}

RewardModel make_reward_model(const RunConfig& cfg, Rng& rng) {
  const FeatureConfig fcfg = cfg.features();
  RewardModel rm;
  rm.slope = cfg.nn.leaky_slope;
  const int in_dim = fcfg.request_dim() + fcfg.d_item + fcfg.n_sources() + 1;
  const int h = cfg.baselines.rm_hidden;
  rm.net = make_mlp({in_dim, h, h, h, 1}, rng);
  return rm;
}

VerticalClassifiers train_bc_classifiers(const std::vector<SessionLog>& logs, const SimEnv& env,
                                         const RunConfig& cfg, Rng& rng) {
  const FeatureConfig fcfg = cfg.features();
  VerticalClassifiers cls = make_classifiers(cfg, rng);

  struct Sample {
    Vec x;
    double y;
  };
  std::vector<std::vector<Sample>> data(fcfg.n_verticals);
  for (const SessionLog& log : logs) {
    const auto pages = replay_session(log, env, cfg, /*need_decisions=*/false);
    for (std::size_t p = 0; p < pages.size(); ++p) {
      const PageLog& pl = log.pages[p];
      const Vec feat = featurize_high(pages[p].high_state, fcfg);
      for (int v = 0; v < fcfg.n_verticals; ++v) {
        const int source = 1 + v;
        bool shown = false, clicked = false;
        for (std::size_t k = 0; k < pl.shown_sources.size(); ++k) {
          if (pl.shown_sources[k] != source) continue;
          shown = true;
          clicked = clicked || pl.clicked[k] != 0;
        }
        if (shown) data[v].push_back({feat, clicked ? 1.0 : 0.0});
      }
    }
  }

  for (int v = 0; v < fcfg.n_verticals; ++v) {
    auto& samples = data[v];
    if (samples.empty())
      throw std::runtime_error("train_bc_classifiers: no logged impressions for vertical " +
                               cfg.env.vertical_names[v]);
    RmsProp opt;
    opt.lr = cfg.baselines.bc_lr;
    opt.decay = cfg.agent.rms_decay;
    opt.eps = cfg.agent.rms_eps;
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t B = static_cast<std::size_t>(cfg.agent.batch);
    for (int e = 0; e < cfg.baselines.bc_epochs; ++e) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(i)]);
      for (std::size_t start = 0; start + B <= order.size(); start += B) {
        MlpParams grads = zeros_like(cls.nets[v]);
        for (std::size_t i = start; i < start + B; ++i) {
          const Sample& s = samples[order[i]];
          MlpCache cache;
          const Vec z = mlp_forward(cls.nets[v], s.x, cls.slope, &cache);
          const double p = 1.0 / (1.0 + std::exp(-z[0]));
          // d(BCE)/dz = p - y, averaged over the batch
          mlp_backward(cls.nets[v], cache, cls.slope,
                       Vec{(p - s.y) / static_cast<double>(B)}, grads);
        }
        std::vector<TensorRef> pr, gr;
        collect_tensors(pr, "bc", cls.nets[v]);
        collect_tensors(gr, "bc", grads);
        opt.apply(pr, gr);
      }
    }
  }
  cls.trained = true;
  return cls;
}

SourceSet bc_vertical_select(const HighState& s, const FeatureConfig& fcfg,
                             const VerticalClassifiers& cls) {
  if (!cls.trained) throw std::runtime_error("bc_vertical_select: classifiers untrained");
  if (static_cast<int>(cls.nets.size()) != fcfg.n_verticals)
    throw std::runtime_error("bc_vertical_select: classifier count mismatch");
  const Vec feat = featurize_high(s, fcfg);
  unsigned bits = 0;
  for (int v = 0; v < fcfg.n_verticals; ++v) {
    const Vec z = mlp_forward(cls.nets[v], feat, cls.slope, nullptr);
    const double p = 1.0 / (1.0 + std::exp(-z[0]));
    if (p >= 0.5) bits |= 1u << v;
  }
  return SourceSet::from_index(bits);
}

namespace {

Vec rm_features(const SearchRequest& req, const Item& item, const FeatureConfig& fcfg) {
  Vec x;
  x.reserve(fcfg.request_dim() + fcfg.d_item + fcfg.n_sources() + 1);
  x.insert(x.end(), req.query_embedding.begin(), req.query_embedding.end());
  x.insert(x.end(), req.demographics.begin(), req.demographics.end());
  x.insert(x.end(), req.recent_click_mean.begin(), req.recent_click_mean.end());
  x.push_back(1.0 / static_cast<double>(req.page_number));
  x.push_back(std::min(req.page_number, 10) / 10.0);
  x.insert(x.end(), item.embedding.begin(), item.embedding.end());
  for (int j = 0; j < fcfg.n_sources(); ++j) x.push_back(j == item.source ? 1.0 : 0.0);
  x.push_back(std::log1p(item.price));
  return x;
}

}  // namespace

RewardModel train_reward_model(const std::vector<SessionLog>& logs, const SimEnv& env,
                               const RunConfig& cfg, Rng& rng) {
  const FeatureConfig fcfg = cfg.features();
  RewardModel rm = make_reward_model(cfg, rng);

  struct Sample {
    Vec x;
    double y;
  };
  std::vector<Sample> samples;
  for (const SessionLog& log : logs) {
    const auto pages = replay_session(log, env, cfg, /*need_decisions=*/false);
    for (std::size_t p = 0; p < pages.size(); ++p) {
      const PageLog& pl = log.pages[p];
      const SearchRequest& req = pages[p].high_state.request;
      for (std::size_t k = 0; k < pl.shown_items.size(); ++k) {
        const Item& item = env.catalog().item_by_id(pl.shown_items[k]);
        samples.push_back({rm_features(req, item, fcfg), pages[p].intrinsics[k]});
      }
    }
  }
  if (samples.empty()) throw std::runtime_error("train_reward_model: no logged slots");

  RmsProp opt;
  opt.lr = cfg.baselines.rm_lr;
  opt.decay = cfg.agent.rms_decay;
  opt.eps = cfg.agent.rms_eps;
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t B = static_cast<std::size_t>(cfg.agent.batch);
  for (int e = 0; e < cfg.baselines.rm_epochs; ++e) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);
    for (std::size_t start = 0; start + B <= order.size(); start += B) {
      MlpParams grads = zeros_like(rm.net);
      for (std::size_t i = start; i < start + B; ++i) {
        const Sample& s = samples[order[i]];
        MlpCache cache;
        const Vec z = mlp_forward(rm.net, s.x, rm.slope, &cache);
        // d(0.5(z-y)^2)/dz = z - y, averaged over the batch
        mlp_backward(rm.net, cache, rm.slope, Vec{(z[0] - s.y) / static_cast<double>(B)}, grads);
      }
      std::vector<TensorRef> pr, gr;
      collect_tensors(pr, "rm", rm.net);
      collect_tensors(gr, "rm", grads);
      opt.apply(pr, gr);
    }
  }
  rm.trained = true;
  return rm;
}

double rm_score(const RewardModel& rm, const SearchRequest& req, const Item& item,
                const FeatureConfig& fcfg) {
  if (!rm.trained) throw std::runtime_error("rm_score: reward model untrained");
  return mlp_forward(rm.net, rm_features(req, item, fcfg), rm.slope, nullptr)[0];
}

Page rm_present(const SourceSet& o, const SourceResults& results,
                const std::function<double(const Item&)>& scorer) {
  struct Scored {
    double score;
    const Item* item;
  };
  std::vector<Scored> scored;
  for (int j = 0; j < static_cast<int>(results.by_source.size()); ++j) {
    if (!o.contains(j)) continue;
    for (const Item& it : results.by_source[j]) scored.push_back({scorer(it), &it});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.item->source != b.item->source) return a.item->source < b.item->source;
    return a.item->within_source_rank < b.item->within_source_rank;
  });
  Page page;
  for (std::size_t k = 0; k < scored.size(); ++k) page.slots.push_back({static_cast<int>(k) + 1, *scored[k].item});
  return page;
}

std::unique_ptr<PagePolicy> make_policy(const std::string& policy_name,
                                        const PolicyArtifacts& artifacts, const RunConfig& cfg,
                                        double eps, std::uint64_t rng_seed) {
  if (policy_name == "rule") return std::make_unique<RulePolicyImpl>(cfg);
  if (policy_name == "hrl") {
    if (!artifacts.selector || !artifacts.presenter)
      throw std::runtime_error("hrl policy: selector/presenter weights missing");
    return std::make_unique<HrlPolicyImpl>(artifacts.selector, artifacts.presenter, cfg, eps,
                                           rng_seed);
  }
  if (policy_name == "flat") {
    if (!artifacts.flat) throw std::runtime_error("flat policy: template DQN missing");
    return std::make_unique<FlatPolicyImpl>(artifacts.flat, cfg, eps, rng_seed);
  }
  if (policy_name == "bc_rm")
    return std::make_unique<CompositePolicyImpl>("bc_rm", CompositePolicyImpl::Select::kBc,
                                                 CompositePolicyImpl::Present::kRm, artifacts, cfg,
                                                 eps, rng_seed);
  if (policy_name == "bc_rl")
    return std::make_unique<CompositePolicyImpl>("bc_rl", CompositePolicyImpl::Select::kBc,
                                                 CompositePolicyImpl::Present::kRlPresenter,
                                                 artifacts, cfg, eps, rng_seed);
  if (policy_name == "rl_rm")
    return std::make_unique<CompositePolicyImpl>("rl_rm", CompositePolicyImpl::Select::kRlSelector,
                                                 CompositePolicyImpl::Present::kRm, artifacts, cfg,
                                                 eps, rng_seed);
  throw std::runtime_error("unknown policy '" + policy_name + "'");
}

}  // namespace agghrl
