#include "agghrl/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace agghrl {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'G', 'H'};
constexpr std::uint32_t kWeightVersion = 1;
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<std::uint64_t>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

// Append helpers keep the byte stream explicitly little-endian so files are
// portable across hosts.
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw std::runtime_error("weight file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v = 0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

using nlohmann::json;

json slot_feedback_json(const PageLog& p) {
  auto as_ints = [](const std::vector<char>& v) {
    return std::vector<int>(v.begin(), v.end());
  };
  json j;
  j["examined"] = as_ints(p.examined);
  j["clicked"] = as_ints(p.clicked);
  j["pay"] = p.pay;
  j["dwell_ms"] = p.dwell_ms;
  return j;
}

}  // namespace

void save_tensors(const std::string& path, const std::vector<TensorRef>& tensors) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kWeightVersion);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const TensorRef& t : tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.append(t.name);
    put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    std::size_t n = 1;
    for (int d : t.dims) {
      put_u32(out, static_cast<std::uint32_t>(d));
      n *= static_cast<std::size_t>(d);
    }
    if (n != t.size) throw std::logic_error("tensor dims do not match size: " + t.name);
    for (std::size_t i = 0; i < n; ++i) put_f64(out, t.data[i]);
  }
  std::uint64_t sum =
      fnv1a(reinterpret_cast<const unsigned char*>(out.data()), out.size(), kFnvOffset);
  put_u64(out, sum);
  write_file(path, out);
}

std::map<std::string, StoredTensor> load_tensors(const std::string& path) {
  std::string buf = read_file(path);
  if (buf.size() < 4 + 4 + 4 + 8) throw std::runtime_error("weight file truncated");
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw std::runtime_error("bad magic in weight file: " + path);
  std::uint64_t stored_sum = 0;
  {
    ByteReader tail{buf, buf.size() - 8};
    stored_sum = tail.u64();
  }
  std::uint64_t actual = fnv1a(reinterpret_cast<const unsigned char*>(buf.data()),
                               buf.size() - 8, kFnvOffset);
  if (stored_sum != actual) throw std::runtime_error("checksum mismatch in weight file: " + path);

  ByteReader r{buf, 4};
  std::uint32_t version = r.u32();
  if (version != kWeightVersion)
    throw std::runtime_error("unsupported weight file version " + std::to_string(version));
  std::uint32_t count = r.u32();
  std::map<std::string, StoredTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = r.u32();
    std::string name = r.bytes(name_len);
    std::uint32_t rank = r.u32();
    StoredTensor t;
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      std::uint32_t dim = r.u32();
      t.dims.push_back(static_cast<int>(dim));
      n *= dim;
    }
    t.data.resize(n);
    for (std::size_t k = 0; k < n; ++k) t.data[k] = r.f64();
    if (out.count(name)) throw std::runtime_error("duplicate tensor name: " + name);
    out.emplace(std::move(name), std::move(t));
  }
  if (r.pos != buf.size() - 8) throw std::runtime_error("trailing bytes in weight file: " + path);
  return out;
}

void load_into(const std::map<std::string, StoredTensor>& stored,
               const std::vector<TensorRef>& refs) {
  for (const TensorRef& ref : refs) {
    auto it = stored.find(ref.name);
    if (it == stored.end()) throw std::runtime_error("missing tensor: " + ref.name);
    const StoredTensor& t = it->second;
    if (t.dims != ref.dims || t.data.size() != ref.size) {
      std::ostringstream msg;
      msg << "shape mismatch for tensor " << ref.name << ": stored [";
      for (std::size_t i = 0; i < t.dims.size(); ++i)
        msg << (i ? "," : "") << t.dims[i];
      msg << "] expected [";
      for (std::size_t i = 0; i < ref.dims.size(); ++i)
        msg << (i ? "," : "") << ref.dims[i];
      msg << "]";
      throw std::runtime_error(msg.str());
    }
    std::memcpy(ref.data, t.data.data(), t.data.size() * sizeof(double));
  }
}

void append_bundle_tensors(std::vector<TensorRef>& out, PolicyBundle& bundle,
                           const std::string& prefix) {
  collect_tensors(out, prefix, bundle.online);
}

void save_bundle(const std::string& path, PolicyBundle& bundle, const std::string& prefix) {
  std::vector<TensorRef> refs;
  append_bundle_tensors(refs, bundle, prefix);
  save_tensors(path, refs);
}

void load_bundle(const std::string& path, PolicyBundle& bundle, const std::string& prefix) {
  auto stored = load_tensors(path);
  std::vector<TensorRef> refs;
  append_bundle_tensors(refs, bundle, prefix);
  load_into(stored, refs);
  copy_params(bundle.online, bundle.target);
  bundle.reset_hidden();
}

std::string session_to_json(const SessionLog& log) {
  json j;
  j["user_id"] = log.user_id;
  j["session_id"] = log.session_id;
  j["policy"] = log.policy;
  json pages = json::array();
  for (const PageLog& p : log.pages) {
    json jp;
    jp["query_id"] = p.query_id;
    jp["page_number"] = p.page_number;
    jp["has_decisions"] = p.has_decisions;
    jp["option_bits"] = p.option_bits;
    jp["actions"] = p.actions;
    jp["retrieved_items"] = p.retrieved_items;
    jp["retrieved_counts"] = p.retrieved_counts;
    jp["shown_items"] = p.shown_items;
    jp["shown_sources"] = p.shown_sources;
    jp["shown_prices"] = p.shown_prices;
    jp["feedback"] = slot_feedback_json(p);
    pages.push_back(std::move(jp));
  }
  j["pages"] = std::move(pages);
  return j.dump();
}

SessionLog session_from_json(const std::string& line) {
  json j = json::parse(line);
  SessionLog log;
  log.user_id = j.at("user_id").get<std::int64_t>();
  log.session_id = j.at("session_id").get<std::int64_t>();
  log.policy = j.at("policy").get<std::string>();
  for (const json& jp : j.at("pages")) {
    PageLog p;
    p.query_id = jp.at("query_id").get<std::int64_t>();
    p.page_number = jp.at("page_number").get<int>();
    p.has_decisions = jp.at("has_decisions").get<bool>();
    p.option_bits = jp.at("option_bits").get<unsigned>();
    p.actions = jp.at("actions").get<std::vector<int>>();
    p.retrieved_items = jp.at("retrieved_items").get<std::vector<std::int64_t>>();
    p.retrieved_counts = jp.at("retrieved_counts").get<std::vector<int>>();
    p.shown_items = jp.at("shown_items").get<std::vector<std::int64_t>>();
    p.shown_sources = jp.at("shown_sources").get<std::vector<int>>();
    p.shown_prices = jp.at("shown_prices").get<std::vector<double>>();
    const json& fb = jp.at("feedback");
    auto flags = [&](const char* key) {
      std::vector<char> out;
      for (const json& e : fb.at(key)) out.push_back(e.get<int>() ? 1 : 0);
      return out;
    };
    p.examined = flags("examined");
    p.clicked = flags("clicked");
    p.pay = fb.at("pay").get<std::vector<double>>();
    p.dwell_ms = fb.at("dwell_ms").get<std::vector<double>>();
    log.pages.push_back(std::move(p));
  }
  return log;
}

void write_session_logs(const std::string& path, const std::vector<SessionLog>& logs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << R"({"format":"agghrl-sessionlog","version":1})" << "\n";
  for (const SessionLog& log : logs) out << session_to_json(log) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<SessionLog> read_session_logs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<SessionLog> logs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      json j = json::parse(line);
      if (!j.contains("format") || j.at("format").get<std::string>() != "agghrl-sessionlog")
        throw std::runtime_error("not a session log file: " + path);
      continue;
    }
    logs.push_back(session_from_json(line));
  }
  if (first) throw std::runtime_error("not a session log file: " + path);
  return logs;
}

void write_curves(const std::string& path, const std::vector<CurveRecord>& curves) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const CurveRecord& c : curves) {
    json j;
    j["step"] = c.step;
    j["level"] = c.level;
    j["loss"] = c.loss;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<CurveRecord> read_curves(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<CurveRecord> curves;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    CurveRecord c;
    c.step = j.at("step").get<long long>();
    c.level = j.at("level").get<std::string>();
    c.loss = j.at("loss").get<double>();
    curves.push_back(std::move(c));
  }
  return curves;
}

void write_episodes(const std::string& path, const std::vector<EpisodeRecord>& episodes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const EpisodeRecord& e : episodes) {
    json j;
    j["session"] = e.session;
    j["return"] = e.ret;
    j["pages"] = e.pages;
    j["clicks"] = e.clicks;
    j["slots"] = e.slots;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_fingerprint, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  json j;
  j["command"] = command;
  j["config_fingerprint"] = config_fingerprint;
  j["seed"] = seed;
  j["format_version"] = 1;
  for (const auto& [k, v] : extra) j[k] = v;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace agghrl
