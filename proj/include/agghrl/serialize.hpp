#pragma once
// Persistence: the versioned binary weight container (magic "AGGH", named
// float64 tensors, FNV-1a-64 trailing checksum, little-endian), JSONL
// session logs and training curves, and the per-run manifest.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "agghrl/agent.hpp"
#include "agghrl/core.hpp"
#include "agghrl/nn.hpp"

namespace agghrl {

struct StoredTensor {
  std::vector<int> dims;
  Vec data;
};

// File layout, all integers little-endian: "AGGH" magic, u32 version,
// u32 tensor count, then per tensor u32 name length, name bytes, u32 rank,
// u32 dims[rank], float64 payload in row-major order; finally a u64
// FNV-1a-64 checksum of every preceding byte.
void save_tensors(const std::string& path, const std::vector<TensorRef>& tensors);
std::map<std::string, StoredTensor> load_tensors(const std::string& path);

// Copies stored tensors into refs; missing names or shape mismatches are
// hard errors naming the tensor.
void load_into(const std::map<std::string, StoredTensor>& stored,
               const std::vector<TensorRef>& refs);

// Bundle persistence: online parameters under `prefix`; targets are synced
// to the loaded parameters.
void save_bundle(const std::string& path, PolicyBundle& bundle, const std::string& prefix);
void load_bundle(const std::string& path, PolicyBundle& bundle, const std::string& prefix);
void append_bundle_tensors(std::vector<TensorRef>& out, PolicyBundle& bundle,
                           const std::string& prefix);

// JSONL session logs: a header line, then one session object per line.
void write_session_logs(const std::string& path, const std::vector<SessionLog>& logs);
std::vector<SessionLog> read_session_logs(const std::string& path);
std::string session_to_json(const SessionLog& log);
SessionLog session_from_json(const std::string& line);

// JSONL training curves and episode records.
void write_curves(const std::string& path, const std::vector<CurveRecord>& curves);
std::vector<CurveRecord> read_curves(const std::string& path);
void write_episodes(const std::string& path, const std::vector<EpisodeRecord>& episodes);

// Run manifest: command, config fingerprint, seed, format versions.
void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_fingerprint, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace agghrl
