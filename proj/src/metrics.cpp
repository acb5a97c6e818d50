#include "agghrl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace agghrl {

namespace {

struct Counts {
  long long impressions = 0;
  long long clicked = 0;
  double dwell_ms_sum = 0.0;
  long long dwell_n = 0;
  long long slots = 0;
  double pay_sum = 0.0;
};

Counts tally(const std::vector<SessionLog>& logs, int source, bool examination_based) {
  Counts c;
  for (const auto& log : logs) {
    for (const auto& page : log.pages) {
      for (std::size_t k = 0; k < page.shown_sources.size(); ++k) {
        if (page.shown_sources[k] != source) continue;
        c.slots += 1;
        const bool viewed = examination_based ? page.examined[k] != 0 : true;
        if (viewed) c.impressions += 1;
        if (page.clicked[k] != 0) {
          if (viewed) c.clicked += 1;
          c.dwell_ms_sum += page.dwell_ms[k];
          c.dwell_n += 1;
        }
        c.pay_sum += page.pay[k];
      }
    }
  }
  return c;
}

long long total_slots(const std::vector<SessionLog>& logs) {
  long long n = 0;
  for (const auto& log : logs)
    for (const auto& page : log.pages) n += static_cast<long long>(page.shown_sources.size());
  return n;
}

}  // namespace

std::optional<double> ctr(const std::vector<SessionLog>& logs, int source,
                          bool examination_based) {
  const Counts c = tally(logs, source, examination_based);
  if (c.impressions == 0) return std::nullopt;
  return static_cast<double>(c.clicked) / static_cast<double>(c.impressions);
}

std::optional<double> adt_seconds(const std::vector<SessionLog>& logs, int source) {
  const Counts c = tally(logs, source, false);
  if (c.dwell_n == 0) return std::nullopt;
  return c.dwell_ms_sum / static_cast<double>(c.dwell_n) / 1000.0;
}

double cov(const std::vector<SessionLog>& logs, int source) {
  const long long total = total_slots(logs);
  if (total == 0) return 0.0;
  const Counts c = tally(logs, source, false);
  return static_cast<double>(c.slots) / static_cast<double>(total);
}

double gmv(const std::vector<SessionLog>& logs, int source) {
  return tally(logs, source, false).pay_sum;
}

std::optional<double> overall_ctr(const std::vector<SessionLog>& logs, bool examination_based) {
  long long impressions = 0, clicked = 0;
  for (const auto& log : logs) {
    for (const auto& page : log.pages) {
      for (std::size_t k = 0; k < page.shown_sources.size(); ++k) {
        const bool viewed = examination_based ? page.examined[k] != 0 : true;
        if (viewed) {
          impressions += 1;
          if (page.clicked[k] != 0) clicked += 1;
        }
      }
    }
  }
  if (impressions == 0) return std::nullopt;
  return static_cast<double>(clicked) / static_cast<double>(impressions);
}

int bucket_assign(std::int64_t user_id, int n_buckets) {
  if (n_buckets < 2) throw std::invalid_argument("bucket_assign: need at least 2 buckets");
  std::uint64_t x = static_cast<std::uint64_t>(user_id);
  return static_cast<int>(splitmix64_next(x) % static_cast<std::uint64_t>(n_buckets));
}

SessionLog run_session(const SimEnv& env, SessionContext& ctx, PagePolicy& policy,
                       bool log_decisions) {
  SessionLog log;
  log.user_id = ctx.user.user_id;
  log.session_id = ctx.session_id;
  log.policy = policy.name();
  policy.begin_session();
  bool alive = true;
  while (alive) {
    SearchRequest req = env.make_request(ctx);
    SourceResults res = env.retrieve(ctx);
    PageDecision dec;
    Page page = policy.present(req, res, log_decisions ? &dec : nullptr);
    PageLog pl;
    pl.query_id = req.query_id;
    pl.page_number = req.page_number;
    for (const auto& stack : res.by_source) {
      pl.retrieved_counts.push_back(static_cast<int>(stack.size()));
      for (const auto& it : stack) pl.retrieved_items.push_back(it.item_id);
    }
    if (log_decisions && dec.has) {
      pl.has_decisions = true;
      pl.option_bits = dec.option_bits;
      pl.actions = dec.actions;
    }
    if (!page.slots.empty()) {
      const PageFeedback fb = env.respond(page, ctx);
      for (std::size_t k = 0; k < page.slots.size(); ++k) {
        pl.shown_items.push_back(page.slots[k].item.item_id);
        pl.shown_sources.push_back(page.slots[k].item.source);
        pl.shown_prices.push_back(page.slots[k].item.price);
        pl.examined.push_back(fb.slots[k].examined ? 1 : 0);
        pl.clicked.push_back(fb.slots[k].clicked ? 1 : 0);
        pl.pay.push_back(fb.slots[k].pay);
        pl.dwell_ms.push_back(fb.slots[k].dwell_ms);
      }
      log.pages.push_back(std::move(pl));
    }
    alive = env.continue_session(ctx);
  }
  return log;
}

PolicyMetrics compute_metrics(const std::string& policy_name, const std::vector<SessionLog>& logs,
                              int n_sources, bool examination_ctr) {
  PolicyMetrics pm;
  pm.policy = policy_name;
  pm.sessions = static_cast<long long>(logs.size());
  pm.per_source.resize(n_sources);
  for (int j = 0; j < n_sources; ++j) {
    pm.per_source[j].ctr = ctr(logs, j, examination_ctr);
    pm.per_source[j].adt = adt_seconds(logs, j);
    pm.per_source[j].cov = cov(logs, j);
    pm.per_source[j].gmv = gmv(logs, j);
  }
  pm.overall_ctr = overall_ctr(logs, examination_ctr);
  for (const auto& log : logs) {
    pm.pages += static_cast<long long>(log.pages.size());
    for (const auto& page : log.pages)
      pm.slots += static_cast<long long>(page.shown_sources.size());
  }
  return pm;
}

namespace {

std::optional<double> relative_gain(std::optional<double> v, std::optional<double> base) {
  if (!v || !base || *base == 0.0) return std::nullopt;
  return (*v - *base) / *base;
}

}  // namespace

std::optional<double> AbResult::gain_ctr(int row, int source) const {
  return relative_gain(rows[row].per_source[source].ctr,
                       rows[baseline_row].per_source[source].ctr);
}
std::optional<double> AbResult::gain_adt(int row, int source) const {
  return relative_gain(rows[row].per_source[source].adt,
                       rows[baseline_row].per_source[source].adt);
}
std::optional<double> AbResult::gain_cov(int row, int source) const {
  return relative_gain(rows[row].per_source[source].cov,
                       rows[baseline_row].per_source[source].cov);
}
std::optional<double> AbResult::gain_gmv(int row, int source) const {
  return relative_gain(rows[row].per_source[source].gmv,
                       rows[baseline_row].per_source[source].gmv);
}
std::optional<double> AbResult::gain_overall_ctr(int row) const {
  return relative_gain(rows[row].overall_ctr, rows[baseline_row].overall_ctr);
}

AbResult ab_test(const SimEnv& env, const std::vector<AbPolicySpec>& policies,
                 long long sessions_per_bucket, std::uint64_t seed,
                 const std::string& baseline_name, const MetricsConfig& mcfg,
                 std::vector<std::vector<SessionLog>>* bucket_logs) {
  const int n = static_cast<int>(policies.size());
  if (n < 2) throw std::invalid_argument("ab_test: need at least 2 policies");
  std::vector<std::unique_ptr<PagePolicy>> built;
  for (int b = 0; b < n; ++b)
    built.push_back(policies[b].make(mix64(seed, 0xB0C0 + static_cast<std::uint64_t>(b))));

  std::vector<std::vector<SessionLog>> logs(n);
  std::map<std::int64_t, std::int64_t> visit_count;
  Rng user_rng(mix64(seed, 0xAB7E57ULL));
  int full = 0;
  while (full < n) {
    const std::int64_t uid = static_cast<std::int64_t>(user_rng.uniform_int(1u << 31));
    const int b = bucket_assign(uid, n);
    if (static_cast<long long>(logs[b].size()) >= sessions_per_bucket) continue;
    const std::int64_t visit = visit_count[uid]++;
    SessionContext ctx = env.begin_session(uid, SimEnv::session_seed(seed, uid, visit));
    logs[b].push_back(run_session(env, ctx, *built[b], /*log_decisions=*/false));
    if (static_cast<long long>(logs[b].size()) == sessions_per_bucket) full += 1;
  }

  AbResult result;
  for (int b = 0; b < n; ++b) {
    result.rows.push_back(compute_metrics(policies[b].name, logs[b], env.n_sources(),
                                          mcfg.examination_ctr));
    if (policies[b].name == baseline_name) result.baseline_row = b;
  }
  if (result.baseline_row < 0)
    throw std::invalid_argument("ab_test: baseline policy '" + baseline_name + "' not in run");
  if (bucket_logs) *bucket_logs = std::move(logs);
  return result;
}

std::string format_ab_table(const AbResult& result, const EnvConfig& env) {
  std::string out;
  char buf[256];
  auto cell = [&](std::optional<double> v, double scale) {
    if (!v) return std::string("      --");
    std::snprintf(buf, sizeof buf, "%8.4f", *v * scale);
    return std::string(buf);
  };
  auto gain_cell = [&](std::optional<double> g) {
    if (!g) return std::string("       --");
    std::snprintf(buf, sizeof buf, "%+8.2f%%", *g * 100.0);
    return std::string(buf);
  };
  out += "== per-vertical metrics (value, gain vs " +
         result.rows[result.baseline_row].policy + ") ==\n";
  for (int v = 0; v < env.n_verticals; ++v) {
    const int source = 1 + v;
    out += "[" + env.vertical_names[v] + "]\n";
    std::snprintf(buf, sizeof buf, "  %-8s %10s %10s %10s %10s %10s %10s\n", "policy", "ctr%",
                  "gain", "adt_s", "gain", "cov%", "gain");
    out += buf;
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
      const auto& m = result.rows[r].per_source[source];
      std::snprintf(buf, sizeof buf, "  %-8s %s %s %s %s %s %s\n",
                    result.rows[r].policy.c_str(), cell(m.ctr, 100.0).c_str(),
                    gain_cell(result.gain_ctr(static_cast<int>(r), source)).c_str(),
                    cell(m.adt, 1.0).c_str(),
                    gain_cell(result.gain_adt(static_cast<int>(r), source)).c_str(),
                    cell(m.cov, 100.0).c_str(),
                    gain_cell(result.gain_cov(static_cast<int>(r), source)).c_str());
      out += buf;
    }
  }
  out += "== per-source GMV (value, gain vs " + result.rows[result.baseline_row].policy +
         ") ==\n";
  std::vector<std::string> source_names = {"core"};
  for (const auto& name : env.vertical_names) source_names.push_back(name);
  for (std::size_t j = 0; j < source_names.size(); ++j) {
    out += "[" + source_names[j] + "]\n";
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
      const auto& m = result.rows[r].per_source[j];
      std::snprintf(buf, sizeof buf, "  %-8s %12.2f %s\n", result.rows[r].policy.c_str(), m.gmv,
                    gain_cell(result.gain_gmv(static_cast<int>(r), static_cast<int>(j))).c_str());
      out += buf;
    }
  }
  return out;
}

}  // namespace agghrl
