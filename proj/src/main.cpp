// Command-line front end: train / abtest / genlogs / pretrain / plot.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agghrl/agent.hpp"
#include "agghrl/baselines.hpp"
#include "agghrl/config.hpp"
#include "agghrl/metrics.hpp"
#include "agghrl/plot.hpp"
#include "agghrl/serialize.hpp"
#include "agghrl/simenv.hpp"

namespace fs = std::filesystem;

namespace {

using namespace agghrl;
using nlohmann::json;

int log_level() {
  static const int lvl = [] {
    const char* s = std::getenv("AGGHRL_LOG_LEVEL");
    if (!s || !*s) return 1;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s) return 1;
    return static_cast<int>(v);
  }();
  return lvl;
}

template <typename... Args>
void log_info(const char* fmt, Args... args) {
  if (log_level() >= 1) {
    std::fprintf(stderr, "[agghrl] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- --policy argument: name[:weights1[,weights2...]] ----

struct PolicyArg {
  std::string name;
  std::vector<std::string> files;
};

PolicyArg parse_policy_arg(const std::string& text) {
  PolicyArg arg;
  auto colon = text.find(':');
  arg.name = text.substr(0, colon);
  if (arg.name.empty()) throw std::runtime_error("empty policy name in: " + text);
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) arg.files.push_back(part);
    }
  }
  return arg;
}

// Loads every named weight file (later files override earlier tensors) and
// reconstitutes whichever artifacts the tensor prefixes announce.
PolicyArtifacts load_artifacts(const std::vector<std::string>& files, const RunConfig& cfg) {
  PolicyArtifacts arts;
  if (files.empty()) return arts;
  std::map<std::string, StoredTensor> merged;
  for (const std::string& f : files) {
    auto m = load_tensors(f);
    for (auto& [name, t] : m) merged[name] = std::move(t);
  }
  auto has_prefix = [&](const std::string& p) {
    auto it = merged.lower_bound(p);
    return it != merged.end() && it->first.compare(0, p.size(), p) == 0;
  };

  Rng shape_rng(1);  // shapes only; every loaded tensor is overwritten
  if (has_prefix("selector/")) {
    arts.selector = std::make_shared<PolicyBundle>(
        make_bundle(selector_net_config(cfg), cfg.agent.lr_high, cfg.agent.rms_decay,
                    cfg.agent.rms_eps, shape_rng));
    std::vector<TensorRef> refs;
    collect_tensors(refs, "selector", arts.selector->online);
    load_into(merged, refs);
    copy_params(arts.selector->online, arts.selector->target);
    arts.selector->reset_hidden();
  }
  if (has_prefix("presenter/")) {
    arts.presenter = std::make_shared<PolicyBundle>(
        make_bundle(presenter_net_config(cfg), cfg.agent.lr_low, cfg.agent.rms_decay,
                    cfg.agent.rms_eps, shape_rng));
    std::vector<TensorRef> refs;
    collect_tensors(refs, "presenter", arts.presenter->online);
    load_into(merged, refs);
    copy_params(arts.presenter->online, arts.presenter->target);
    arts.presenter->reset_hidden();
  }
  if (has_prefix("flat/")) {
    arts.flat = std::make_shared<FlatAgent>(make_flat_agent(cfg, shape_rng));
    std::vector<TensorRef> refs;
    collect_tensors(refs, "flat", arts.flat->bundle.online);
    load_into(merged, refs);
    copy_params(arts.flat->bundle.online, arts.flat->bundle.target);
    arts.flat->bundle.reset_hidden();
  }
  if (has_prefix("bc/")) {
    arts.classifiers = std::make_shared<VerticalClassifiers>(make_classifiers(cfg, shape_rng));
    std::vector<TensorRef> refs;
    for (int v = 0; v < cfg.env.n_verticals; ++v)
      collect_tensors(refs, "bc/" + cfg.env.vertical_names[static_cast<std::size_t>(v)],
                      arts.classifiers->nets[static_cast<std::size_t>(v)]);
    load_into(merged, refs);
    arts.classifiers->trained = true;
  }
  if (has_prefix("rm/")) {
    arts.reward_model = std::make_shared<RewardModel>(make_reward_model(cfg, shape_rng));
    std::vector<TensorRef> refs;
    collect_tensors(refs, "rm", arts.reward_model->net);
    load_into(merged, refs);
    arts.reward_model->trained = true;
  }
  return arts;
}

std::vector<std::string> source_names(const EnvConfig& env) {
  std::vector<std::string> names{"core"};
  names.insert(names.end(), env.vertical_names.begin(), env.vertical_names.end());
  return names;
}

RunConfig load_effective_config(const std::string& path, const std::string& strategy,
                                long long sessions) {
  RunConfig cfg = load_config(path);
  if (!strategy.empty()) cfg.agent.strategy = strategy;
  if (sessions >= 0) cfg.agent.sessions = sessions;
  cfg.validate();
  return cfg;
}

void write_run_files(const std::string& out_dir, const RunConfig& cfg, const std::string& command,
                     std::uint64_t seed,
                     const std::vector<std::pair<std::string, std::string>>& extra) {
  fs::create_directories(out_dir);
  write_text_file(out_dir + "/config.ini", dump_config(cfg));
  write_manifest(out_dir + "/manifest.json", command, config_fingerprint(cfg), seed, extra);
}

// ---- train ----

struct TrainArgs {
  std::string config_path;
  std::string out_dir;
  std::string algo = "hrl";
  std::string strategy;
  std::string init_weights;
  std::uint64_t seed = 1;
  long long sessions = -1;
  int workers = 1;
};

int cmd_train(const TrainArgs& a) {
  RunConfig cfg = load_effective_config(a.config_path, a.strategy, a.sessions);
  SimEnv env(cfg.env);
  const long long budget = cfg.agent.sessions;
  std::vector<std::pair<std::string, std::string>> extra{
      {"algo", a.algo},
      {"strategy", cfg.agent.strategy},
      {"sessions", std::to_string(budget)},
      {"workers", std::to_string(a.workers)}};
  fs::create_directories(a.out_dir);

  if (a.algo == "hrl") {
    QNetworkParams init_sel, init_pres;
    TrainInit init;
    const TrainInit* init_ptr = nullptr;
    if (!a.init_weights.empty()) {
      Rng shape_rng(1);
      init_sel = make_qnet(selector_net_config(cfg), shape_rng);
      init_pres = make_qnet(presenter_net_config(cfg), shape_rng);
      auto stored = load_tensors(a.init_weights);
      std::vector<TensorRef> refs;
      collect_tensors(refs, "selector", init_sel);
      collect_tensors(refs, "presenter", init_pres);
      load_into(stored, refs);
      init.selector = &init_sel;
      init.presenter = &init_pres;
      init_ptr = &init;
      extra.emplace_back("init_weights", a.init_weights);
      log_info("warm start from %s", a.init_weights.c_str());
    }
    log_info("training hrl: %lld sessions, strategy %s, workers %d",
             budget, cfg.agent.strategy.c_str(), a.workers);
    TrainResult tr = run_training(env, cfg, budget, a.seed, a.workers, init_ptr);
    std::vector<TensorRef> refs;
    append_bundle_tensors(refs, tr.selector, "selector");
    append_bundle_tensors(refs, tr.presenter, "presenter");
    save_tensors(a.out_dir + "/weights.agh", refs);
    write_curves(a.out_dir + "/curves.jsonl", tr.curves);
    write_episodes(a.out_dir + "/episodes.jsonl", tr.episodes);
    double mean_pages = 0, mean_ret = 0;
    for (const EpisodeRecord& e : tr.episodes) {
      mean_pages += e.pages;
      mean_ret += e.ret;
    }
    if (!tr.episodes.empty()) {
      mean_pages /= static_cast<double>(tr.episodes.size());
      mean_ret /= static_cast<double>(tr.episodes.size());
    }
    extra.emplace_back("mean_pages_per_session", num(mean_pages));
    extra.emplace_back("mean_session_return", num(mean_ret));
    log_info("done: mean pages/session %s, mean return %s", num(mean_pages).c_str(),
             num(mean_ret).c_str());
  } else if (a.algo == "flat") {
    log_info("training flat baseline: %lld sessions", budget);
    FlatTrainResult tr = train_flat(env, cfg, budget, a.seed);
    std::vector<TensorRef> refs;
    append_bundle_tensors(refs, tr.agent.bundle, "flat");
    save_tensors(a.out_dir + "/weights.agh", refs);
    write_curves(a.out_dir + "/curves.jsonl", tr.curves);
    write_episodes(a.out_dir + "/episodes.jsonl", tr.episodes);
  } else {
    throw std::runtime_error("unknown --algo: " + a.algo + " (expected hrl or flat)");
  }
  write_run_files(a.out_dir, cfg, "train", a.seed, extra);
  std::printf("wrote %s/weights.agh\n", a.out_dir.c_str());
  return 0;
}

// ---- abtest ----

struct AbArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> policies;
  std::string baseline;
  std::uint64_t seed = 1;
  long long sessions = 2000;
};

json metrics_json(const AbResult& res, const RunConfig& cfg, const std::string& baseline) {
  json j;
  j["baseline"] = baseline;
  j["source_names"] = source_names(cfg.env);
  json rows = json::array();
  for (const PolicyMetrics& m : res.rows) {
    json r;
    r["policy"] = m.policy;
    r["overall_ctr"] = m.overall_ctr ? json(*m.overall_ctr) : json(nullptr);
    r["sessions"] = m.sessions;
    r["pages"] = m.pages;
    r["slots"] = m.slots;
    json per = json::array();
    for (const SourceMetrics& s : m.per_source) {
      json e;
      e["ctr"] = s.ctr ? json(*s.ctr) : json(nullptr);
      e["adt"] = s.adt ? json(*s.adt) : json(nullptr);
      e["cov"] = s.cov;
      e["gmv"] = s.gmv;
      per.push_back(std::move(e));
    }
    r["per_source"] = std::move(per);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

int cmd_abtest(const AbArgs& a) {
  RunConfig cfg = load_effective_config(a.config_path, "", -1);
  if (a.policies.size() < 2) throw std::runtime_error("abtest needs at least two --policy");
  SimEnv env(cfg.env);

  std::vector<AbPolicySpec> specs;
  for (const std::string& text : a.policies) {
    PolicyArg arg = parse_policy_arg(text);
    auto arts = std::make_shared<PolicyArtifacts>(load_artifacts(arg.files, cfg));
    // Validate construction now so missing weights fail before the run.
    make_policy(arg.name, *arts, cfg, 0.0, 0);
    AbPolicySpec spec;
    spec.name = arg.name;
    spec.make = [arg, arts, &cfg](std::uint64_t s) {
      return make_policy(arg.name, *arts, cfg, 0.0, s);
    };
    specs.push_back(std::move(spec));
  }
  const std::string baseline = a.baseline.empty() ? specs.front().name : a.baseline;

  log_info("abtest: %zu buckets, %lld sessions each", specs.size(), a.sessions);
  AbResult res = ab_test(env, specs, a.sessions, a.seed, baseline, cfg.metrics);
  std::string table = format_ab_table(res, cfg.env);
  std::fputs(table.c_str(), stdout);

  fs::create_directories(a.out_dir);
  write_text_file(a.out_dir + "/ab_table.txt", table);
  write_text_file(a.out_dir + "/metrics.json", metrics_json(res, cfg, baseline).dump(2) + "\n");
  std::vector<std::pair<std::string, std::string>> extra{
      {"baseline", baseline}, {"sessions_per_bucket", std::to_string(a.sessions)}};
  for (std::size_t i = 0; i < a.policies.size(); ++i)
    extra.emplace_back("policy." + std::to_string(i), a.policies[i]);
  write_run_files(a.out_dir, cfg, "abtest", a.seed, extra);
  std::printf("wrote %s/ab_table.txt and %s/metrics.json\n", a.out_dir.c_str(),
              a.out_dir.c_str());
  return 0;
}

// ---- genlogs ----

struct GenArgs {
  std::string config_path;
  std::string out_path;
  std::string policy = "rule";
  std::uint64_t seed = 1;
  long long sessions = 1000;
};

int cmd_genlogs(const GenArgs& a) {
  RunConfig cfg = load_effective_config(a.config_path, "", -1);
  SimEnv env(cfg.env);
  PolicyArg arg = parse_policy_arg(a.policy);
  PolicyArtifacts arts = load_artifacts(arg.files, cfg);
  auto policy = make_policy(arg.name, arts, cfg, 0.0, mix64(a.seed, 0x706F6C31ULL));

  std::vector<SessionLog> logs;
  Rng user_rng(mix64(a.seed, 0x67656E6CULL));
  std::map<std::int64_t, long long> visits;
  long long total_pages = 0, total_slots = 0;
  for (long long s = 0; s < a.sessions; ++s) {
    const std::int64_t uid = static_cast<std::int64_t>(user_rng.uniform_int(1u << 31));
    const long long visit = visits[uid]++;
    SessionContext ctx =
        env.begin_session(uid, SimEnv::session_seed(a.seed, static_cast<std::uint64_t>(uid),
                                                    static_cast<std::uint64_t>(visit)));
    SessionLog log = run_session(env, ctx, *policy, /*log_decisions=*/true);
    total_pages += static_cast<long long>(log.pages.size());
    for (const PageLog& p : log.pages) total_slots += static_cast<long long>(p.shown_items.size());
    logs.push_back(std::move(log));
  }
  if (const fs::path parent = fs::path(a.out_path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  write_session_logs(a.out_path, logs);
  if (a.sessions > 0) {
    log_info("genlogs: %lld sessions, %.2f pages/session, %.2f items/page", a.sessions,
             static_cast<double>(total_pages) / static_cast<double>(a.sessions),
             total_pages ? static_cast<double>(total_slots) / static_cast<double>(total_pages)
                         : 0.0);
  }
  std::printf("wrote %s (%lld sessions)\n", a.out_path.c_str(), a.sessions);
  return 0;
}

// ---- pretrain ----

struct PretrainArgs {
  std::string config_path;
  std::string logs_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  double holdout = 0.1;
};

int cmd_pretrain(const PretrainArgs& a) {
  RunConfig cfg = load_effective_config(a.config_path, "", -1);
  if (a.holdout < 0.0 || a.holdout >= 1.0)
    throw std::runtime_error("--holdout must be in [0, 1)");
  SimEnv env(cfg.env);
  std::vector<SessionLog> logs = read_session_logs(a.logs_path);
  if (logs.empty()) throw std::runtime_error("no sessions in " + a.logs_path);

  const std::size_t n_hold = static_cast<std::size_t>(a.holdout * static_cast<double>(logs.size()));
  std::vector<SessionLog> train_logs(logs.begin(), logs.end() - static_cast<long>(n_hold));
  std::vector<SessionLog> hold_logs(logs.end() - static_cast<long>(n_hold), logs.end());

  Rng rng(mix64(a.seed, 0x70726574ULL));
  PolicyBundle selector = make_bundle(selector_net_config(cfg), cfg.baselines.pretrain_lr_high,
                                      cfg.agent.rms_decay, cfg.agent.rms_eps, rng);
  PolicyBundle presenter = make_bundle(presenter_net_config(cfg), cfg.baselines.pretrain_lr_low,
                                       cfg.agent.rms_decay, cfg.agent.rms_eps, rng);
  log_info("pretrain: %zu train sessions, %zu held out, %d epochs", train_logs.size(),
           hold_logs.size(), cfg.baselines.bc_epochs);
  bc_pretrain(train_logs, env, cfg, selector, presenter, cfg.baselines.bc_epochs, rng);
  AgreementStats agree =
      bc_agreement(hold_logs.empty() ? train_logs : hold_logs, env, cfg, selector, presenter);
  log_info("agreement: high %.4f (n=%lld), low %.4f (n=%lld)", agree.high, agree.n_high,
           agree.low, agree.n_low);

  VerticalClassifiers cls = train_bc_classifiers(train_logs, env, cfg, rng);
  RewardModel rm = train_reward_model(train_logs, env, cfg, rng);

  fs::create_directories(a.out_dir);
  std::vector<TensorRef> refs;
  append_bundle_tensors(refs, selector, "selector");
  append_bundle_tensors(refs, presenter, "presenter");
  for (int v = 0; v < cfg.env.n_verticals; ++v)
    collect_tensors(refs, "bc/" + cfg.env.vertical_names[static_cast<std::size_t>(v)],
                    cls.nets[static_cast<std::size_t>(v)]);
  collect_tensors(refs, "rm", rm.net);
  save_tensors(a.out_dir + "/weights.agh", refs);

  std::vector<std::pair<std::string, std::string>> extra{
      {"logs", a.logs_path},
      {"train_sessions", std::to_string(train_logs.size())},
      {"holdout_sessions", std::to_string(hold_logs.size())},
      {"agreement_high", num(agree.high)},
      {"agreement_low", num(agree.low)}};
  write_run_files(a.out_dir, cfg, "pretrain", a.seed, extra);
  std::printf("wrote %s/weights.agh (agreement high %.4f low %.4f)\n", a.out_dir.c_str(),
              agree.high, agree.low);
  return 0;
}

// ---- plot ----

struct PlotArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
};

std::string file_stem(const std::string& path) { return fs::path(path).stem().string(); }

void plot_metrics_file(const json& j, const std::string& out_dir) {
  std::vector<std::string> sources = j.at("source_names").get<std::vector<std::string>>();
  std::vector<std::string> policies;
  for (const json& r : j.at("rows")) policies.push_back(r.at("policy").get<std::string>());

  auto value_of = [&](const json& row, std::size_t src, const char* key) {
    const json& cell = row.at("per_source").at(src).at(key);
    return cell.is_null() ? 0.0 : cell.get<double>();
  };

  const char* metric_keys[] = {"ctr", "adt", "cov", "gmv"};
  for (const char* key : metric_keys) {
    BarChartSpec spec;
    spec.title = std::string(key) + " by source";
    spec.y_label = key;
    spec.series_labels = policies;
    for (std::size_t s = 0; s < sources.size(); ++s) {
      BarGroup g;
      g.label = sources[s];
      for (const json& r : j.at("rows")) g.values.push_back(value_of(r, s, key));
      spec.groups.push_back(std::move(g));
    }
    write_text_file(out_dir + "/metrics_" + key + ".svg", render_bar_chart(spec));
  }

  std::ostringstream dat;
  dat << "# policy_index source_index ctr adt cov gmv  (policies:";
  for (std::size_t p = 0; p < policies.size(); ++p) dat << " " << p << "=" << policies[p];
  dat << "; sources:";
  for (std::size_t s = 0; s < sources.size(); ++s) dat << " " << s << "=" << sources[s];
  dat << ")\n";
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const json& row = j.at("rows").at(p);
    for (std::size_t s = 0; s < sources.size(); ++s) {
      dat << p << " " << s << " " << value_of(row, s, "ctr") << " " << value_of(row, s, "adt")
          << " " << value_of(row, s, "cov") << " " << value_of(row, s, "gmv") << "\n";
    }
  }
  write_text_file(out_dir + "/metrics.dat", dat.str());
}

int cmd_plot(const PlotArgs& a) {
  if (a.inputs.empty()) throw std::runtime_error("plot needs at least one input file");
  fs::create_directories(a.out_dir);

  LinePlotSpec loss_spec;
  loss_spec.title = "training loss";
  loss_spec.x_label = "gradient step";
  loss_spec.y_label = "loss";
  loss_spec.log_y = true;
  bool any_metrics = false;

  for (const std::string& path : a.inputs) {
    std::ifstream probe(path);
    if (!probe) throw std::runtime_error("cannot open file: " + path);
    std::stringstream whole;
    whole << probe.rdbuf();
    std::string content = whole.str();
    bool blank = content.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) throw std::runtime_error("empty input file: " + path);

    json as_object;
    bool whole_parse = false;
    try {
      as_object = json::parse(content);
      whole_parse = true;
    } catch (const json::exception&) {
    }
    if (whole_parse && as_object.is_object() && as_object.contains("rows")) {
      plot_metrics_file(as_object, a.out_dir);
      any_metrics = true;
      continue;
    }
    if (whole_parse && as_object.is_object() && as_object.contains("format"))
      throw std::runtime_error("session logs are not plottable: " + path);

    std::vector<CurveRecord> curves = read_curves(path);
    if (curves.empty()) throw std::runtime_error("empty input file: " + path);
    std::map<std::string, PlotSeries> by_level;
    for (const CurveRecord& c : curves) {
      PlotSeries& s = by_level[c.level];
      s.x.push_back(static_cast<double>(c.step));
      s.y.push_back(c.loss);
    }
    for (auto& [level, series] : by_level) {
      series.label = file_stem(path) + ":" + level;
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < series.x.size(); ++i)
        rows.push_back({series.x[i], series.y[i]});
      write_text_file(a.out_dir + "/" + file_stem(path) + "_" + level + ".dat",
                      render_dat({"step", "loss"}, rows));
      loss_spec.series.push_back(downsample_mean(series, 400));
    }
  }

  if (!loss_spec.series.empty()) {
    write_text_file(a.out_dir + "/loss_curves.svg", render_line_plot(loss_spec));
    std::printf("wrote %s/loss_curves.svg\n", a.out_dir.c_str());
  }
  if (any_metrics) std::printf("wrote %s/metrics_*.svg\n", a.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical aggregation agent: training, evaluation, and plotting"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train the hierarchical agent or a baseline");
  train->add_option("--config", train_args.config_path, "config file")->required();
  train->add_option("--seed", train_args.seed, "run seed");
  train->add_option("--out", train_args.out_dir, "output directory")->required();
  train->add_option("--sessions", train_args.sessions, "session budget (overrides config)");
  train->add_option("--strategy", train_args.strategy, "extrinsic reward strategy")
      ->check(CLI::IsMember({"i", "ii"}));
  train->add_option("--workers", train_args.workers, "rollout threads (1 = deterministic)");
  train->add_option("--algo", train_args.algo, "hrl or flat")
      ->check(CLI::IsMember({"hrl", "flat"}));
  train->add_option("--init", train_args.init_weights, "warm-start weight file");

  AbArgs ab_args;
  CLI::App* ab = app.add_subcommand("abtest", "bucketed A/B comparison of policies");
  ab->add_option("--config", ab_args.config_path, "config file")->required();
  ab->add_option("--seed", ab_args.seed, "run seed");
  ab->add_option("--out", ab_args.out_dir, "output directory")->required();
  ab->add_option("--policy", ab_args.policies, "policy spec name[:weights,...] (repeatable)")
      ->required()
      ->expected(-1);
  ab->add_option("--sessions", ab_args.sessions, "sessions per bucket");
  ab->add_option("--baseline", ab_args.baseline, "baseline policy name (default: first)");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("genlogs", "roll out a policy and write session logs");
  gen->add_option("--config", gen_args.config_path, "config file")->required();
  gen->add_option("--seed", gen_args.seed, "run seed");
  gen->add_option("--out", gen_args.out_path, "output log file")->required();
  gen->add_option("--sessions", gen_args.sessions, "number of sessions");
  gen->add_option("--policy", gen_args.policy, "policy spec name[:weights,...]");

  PretrainArgs pre_args;
  CLI::App* pre = app.add_subcommand("pretrain", "behavioral-cloning warm start from logs");
  pre->add_option("--config", pre_args.config_path, "config file")->required();
  pre->add_option("--seed", pre_args.seed, "run seed");
  pre->add_option("--logs", pre_args.logs_path, "session log file")->required();
  pre->add_option("--out", pre_args.out_dir, "output directory")->required();
  pre->add_option("--holdout", pre_args.holdout, "held-out fraction for agreement");

  PlotArgs plot_args;
  CLI::App* plot = app.add_subcommand("plot", "render loss curves and metric tables");
  plot->add_option("inputs", plot_args.inputs, "curve .jsonl or metrics .json files")
      ->required()
      ->expected(-1);
  plot->add_option("--out", plot_args.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (ab->parsed()) return cmd_abtest(ab_args);
    if (gen->parsed()) return cmd_genlogs(gen_args);
    if (pre->parsed()) return cmd_pretrain(pre_args);
    if (plot->parsed()) return cmd_plot(plot_args);
  } catch (const ConfigFileMissing& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
