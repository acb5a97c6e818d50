#include "agghrl/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace agghrl {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Binds every config field to a "section.key" name for strict parsing and
// canonical dumping.
class Binder {
 public:
  void bind(const std::string& name, double* p) {
    add(name, [p](const std::string& v) { *p = parse_double(v); },
        [p] { return fmt_double(*p); });
  }
  void bind(const std::string& name, int* p) {
    add(name, [p](const std::string& v) { *p = static_cast<int>(parse_int(v)); },
        [p] { return std::to_string(*p); });
  }
  void bind(const std::string& name, std::uint64_t* p) {
    add(name, [p](const std::string& v) { *p = static_cast<std::uint64_t>(parse_int(v)); },
        [p] { return std::to_string(*p); });
  }
  void bind(const std::string& name, bool* p) {
    add(name,
        [p](const std::string& v) {
          if (v == "true" || v == "1") *p = true;
          else if (v == "false" || v == "0") *p = false;
          else throw std::runtime_error("expected true/false, got '" + v + "'");
        },
        [p] { return *p ? "true" : "false"; });
  }
  void bind(const std::string& name, std::string* p) {
    add(name, [p](const std::string& v) { *p = v; }, [p] { return *p; });
  }
  void bind(const std::string& name, std::vector<double>* p) {
    add(name,
        [p](const std::string& v) {
          p->clear();
          for (const auto& tok : split(v, ',')) p->push_back(parse_double(tok));
        },
        [p] {
          std::string out;
          for (std::size_t i = 0; i < p->size(); ++i)
            out += (i ? "," : "") + fmt_double((*p)[i]);
          return out;
        });
  }
  void bind(const std::string& name, std::vector<std::string>* p) {
    add(name,
        [p](const std::string& v) {
          p->clear();
          for (const auto& tok : split(v, ',')) p->push_back(tok);
        },
        [p] {
          std::string out;
          for (std::size_t i = 0; i < p->size(); ++i) out += (i ? "," : "") + (*p)[i];
          return out;
        });
  }

  bool set(const std::string& name, const std::string& value) {
    auto it = setters_.find(name);
    if (it == setters_.end()) return false;
    it->second(value);
    return true;
  }

  std::string dump() const {
    std::string out;
    std::string section;
    for (const auto& [name, get] : order_) {
      const auto dot = name.find('.');
      const std::string sec = name.substr(0, dot);
      if (sec != section) {
        if (!out.empty()) out += "\n";
        out += "[" + sec + "]\n";
        section = sec;
      }
      out += name.substr(dot + 1) + " = " + get() + "\n";
    }
    return out;
  }

 private:
  static long long parse_int(const std::string& v) {
    std::size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::runtime_error("expected integer, got '" + v + "'");
    return r;
  }
  static double parse_double(const std::string& v) {
    std::size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::runtime_error("expected number, got '" + v + "'");
    return r;
  }
  void add(const std::string& name, std::function<void(const std::string&)> set,
           std::function<std::string()> get) {
    setters_[name] = std::move(set);
    order_.emplace_back(name, std::move(get));
  }
  std::map<std::string, std::function<void(const std::string&)>> setters_;
  std::vector<std::pair<std::string, std::function<std::string()>>> order_;
};

Binder make_binder(RunConfig& c) {
  Binder b;
  b.bind("env.catalog_seed", &c.env.catalog_seed);
  b.bind("env.n_verticals", &c.env.n_verticals);
  b.bind("env.d_item", &c.env.d_item);
  b.bind("env.demo_dim", &c.env.demo_dim);
  b.bind("env.vertical_names", &c.env.vertical_names);
  b.bind("env.core_catalog", &c.env.core_catalog);
  b.bind("env.vertical_catalog", &c.env.vertical_catalog);
  b.bind("env.query_pool", &c.env.query_pool);
  b.bind("env.n_core", &c.env.n_core);
  b.bind("env.vertical_empty_prob", &c.env.vertical_empty_prob);
  b.bind("env.vertical_second_prob", &c.env.vertical_second_prob);
  b.bind("env.position_bias", &c.env.position_bias);
  b.bind("env.click_base", &c.env.click_base);
  b.bind("env.click_affinity", &c.env.click_affinity);
  b.bind("env.click_query_weight", &c.env.click_query_weight);
  b.bind("env.behavior_gain", &c.env.behavior_gain);
  b.bind("env.vertical_click_bonus", &c.env.vertical_click_bonus);
  b.bind("env.price_mu", &c.env.price_mu);
  b.bind("env.price_sigma", &c.env.price_sigma);
  b.bind("env.vertical_price_mu", &c.env.vertical_price_mu);
  b.bind("env.vertical_price_sigma", &c.env.vertical_price_sigma);
  b.bind("env.buy_base", &c.env.buy_base);
  b.bind("env.buy_affinity", &c.env.buy_affinity);
  b.bind("env.buy_price_weight", &c.env.buy_price_weight);
  b.bind("env.buy_price_ref", &c.env.buy_price_ref);
  b.bind("env.dwell_mu", &c.env.dwell_mu);
  b.bind("env.dwell_sigma", &c.env.dwell_sigma);
  b.bind("env.vertical_dwell_bonus", &c.env.vertical_dwell_bonus);
  b.bind("env.continuation", &c.env.continuation);
  b.bind("env.continuation_decay", &c.env.continuation_decay);
  b.bind("env.max_pages", &c.env.max_pages);

  b.bind("agent.gamma", &c.agent.gamma);
  b.bind("agent.lambda", &c.agent.lambda);
  b.bind("agent.pay_clip", &c.agent.pay_clip);
  b.bind("agent.noclick_penalty", &c.agent.noclick_penalty);
  b.bind("agent.lr_high", &c.agent.lr_high);
  b.bind("agent.lr_low", &c.agent.lr_low);
  b.bind("agent.rms_decay", &c.agent.rms_decay);
  b.bind("agent.rms_eps", &c.agent.rms_eps);
  b.bind("agent.memory_high", &c.agent.memory_high);
  b.bind("agent.memory_low", &c.agent.memory_low);
  b.bind("agent.batch", &c.agent.batch);
  b.bind("agent.sync_high", &c.agent.sync_high);
  b.bind("agent.sync_low", &c.agent.sync_low);
  b.bind("agent.huber_threshold", &c.agent.huber_threshold);
  b.bind("agent.eps_start", &c.agent.eps_start);
  b.bind("agent.eps_high", &c.agent.eps_high);
  b.bind("agent.eps_low", &c.agent.eps_low);
  b.bind("agent.eps_frac", &c.agent.eps_frac);
  b.bind("agent.strategy", &c.agent.strategy);
  b.bind("agent.first_page_core_only", &c.agent.first_page_core_only);
  b.bind("agent.sessions", &c.agent.sessions);

  b.bind("nn.high_hidden", &c.nn.high_hidden);
  b.bind("nn.low_hidden", &c.nn.low_hidden);
  b.bind("nn.high_rnn", &c.nn.high_rnn);
  b.bind("nn.low_rnn", &c.nn.low_rnn);
  b.bind("nn.leaky_slope", &c.nn.leaky_slope);
  b.bind("nn.recurrent", &c.nn.recurrent);

  b.bind("baselines.templates", &c.baselines.templates);
  b.bind("baselines.rule_slots", &c.baselines.rule_slots);
  b.bind("baselines.flat_lr", &c.baselines.flat_lr);
  b.bind("baselines.flat_memory", &c.baselines.flat_memory);
  b.bind("baselines.flat_sync", &c.baselines.flat_sync);
  b.bind("baselines.bc_hidden", &c.baselines.bc_hidden);
  b.bind("baselines.bc_lr", &c.baselines.bc_lr);
  b.bind("baselines.bc_epochs", &c.baselines.bc_epochs);
  b.bind("baselines.pretrain_lr_high", &c.baselines.pretrain_lr_high);
  b.bind("baselines.pretrain_lr_low", &c.baselines.pretrain_lr_low);
  b.bind("baselines.rm_hidden", &c.baselines.rm_hidden);
  b.bind("baselines.rm_lr", &c.baselines.rm_lr);
  b.bind("baselines.rm_epochs", &c.baselines.rm_epochs);

  b.bind("metrics.examination_ctr", &c.metrics.examination_ctr);
  return b;
}

}  // namespace

FeatureConfig RunConfig::features() const {
  FeatureConfig f;
  f.d_item = env.d_item;
  f.n_verticals = env.n_verticals;
  f.demo_dim = env.demo_dim;
  f.page_enc_dim = 2;
  return f;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::runtime_error("config: " + m); };
  if (env.n_verticals < 1 || env.n_verticals > 8) fail("env.n_verticals must be in [1,8]");
  if (static_cast<int>(env.vertical_names.size()) != env.n_verticals)
    fail("env.vertical_names must list exactly n_verticals names");
  auto want_n = [&](const std::vector<double>& v, const char* key) {
    if (static_cast<int>(v.size()) != env.n_verticals)
      fail(std::string(key) + " must list exactly n_verticals values");
  };
  want_n(env.vertical_click_bonus, "env.vertical_click_bonus");
  want_n(env.vertical_price_mu, "env.vertical_price_mu");
  want_n(env.vertical_price_sigma, "env.vertical_price_sigma");
  want_n(env.vertical_dwell_bonus, "env.vertical_dwell_bonus");
  if (env.d_item < 1) fail("env.d_item must be positive");
  if (env.n_core < 1) fail("env.n_core must be positive");
  if (env.core_catalog < env.n_core) fail("env.core_catalog smaller than env.n_core");
  if (env.vertical_catalog < 2) fail("env.vertical_catalog must be >= 2");
  if (env.query_pool < 1) fail("env.query_pool must be positive");
  if (env.max_pages < 1) fail("env.max_pages must be positive");
  if (!(env.vertical_empty_prob >= 0 && env.vertical_empty_prob <= 1))
    fail("env.vertical_empty_prob must be a probability");
  if (!(env.click_query_weight >= 0 && env.click_query_weight <= 1))
    fail("env.click_query_weight must be in [0,1]");
  if (!(agent.gamma > 0 && agent.gamma <= 1)) fail("agent.gamma must be in (0,1]");
  if (!(agent.lambda >= 0 && agent.lambda <= 1)) fail("agent.lambda must be in [0,1]");
  if (agent.pay_clip <= 0) fail("agent.pay_clip must be positive");
  if (agent.noclick_penalty > 0) fail("agent.noclick_penalty must be <= 0");
  if (agent.batch < 1) fail("agent.batch must be positive");
  if (agent.memory_high < agent.batch || agent.memory_low < agent.batch)
    fail("replay capacities must be at least the batch size");
  if (agent.sync_high < 1 || agent.sync_low < 1) fail("target sync periods must be positive");
  if (agent.strategy != "i" && agent.strategy != "ii") fail("agent.strategy must be i or ii");
  if (!(agent.eps_start >= 0 && agent.eps_start <= 1 && agent.eps_high >= 0 &&
        agent.eps_high <= 1 && agent.eps_low >= 0 && agent.eps_low <= 1))
    fail("exploration rates must be probabilities");
  if (!(agent.eps_frac > 0 && agent.eps_frac <= 1)) fail("agent.eps_frac must be in (0,1]");
  if (agent.sessions < 1) fail("agent.sessions must be positive");
  if (!(nn.leaky_slope > 0 && nn.leaky_slope <= 1)) fail("nn.leaky_slope must be in (0,1]");
  if (nn.high_hidden < 1 || nn.low_hidden < 1) fail("nn hidden widths must be positive");
  if (nn.recurrent && (nn.high_rnn < 1 || nn.low_rnn < 1))
    fail("nn rnn widths must be positive when recurrent");
  const auto slots = parse_int_list(baselines.rule_slots);
  if (static_cast<int>(slots.size()) != env.n_verticals)
    fail("baselines.rule_slots must list exactly n_verticals slots");
  for (int s : slots)
    if (s < 1) fail("baselines.rule_slots entries must be >= 1");
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  Binder binder = make_binder(cfg);
  static const std::vector<std::string> kSections = {"env", "agent", "nn", "baselines", "metrics"};
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  auto fail = [&](const std::string& m) {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail("malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      bool known = false;
      for (const auto& s : kSections) known = known || s == section;
      if (!known) fail("unknown section '" + section + "'");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside any section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail("empty key");
    try {
      if (!binder.set(section + "." + key, value))
        fail("unknown key '" + key + "' in section [" + section + "]");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      if (msg.rfind(origin, 0) == 0) throw;
      fail("key '" + key + "': " + msg);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigFileMissing("config file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string dump_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  return make_binder(copy).dump();
}

std::string config_fingerprint(const RunConfig& cfg) {
  const std::string dump = dump_config(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split(s, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stoi(tok, &pos));
    if (pos != tok.size()) throw std::runtime_error("bad integer list entry '" + tok + "'");
  }
  return out;
}

}  // namespace agghrl
