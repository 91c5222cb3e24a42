#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "portlab/ad/graph.hpp"
#include "portlab/errors.hpp"
#include "portlab/util.hpp"

namespace portlab::ad {

// single-file checkpoint: 8-byte magic, u32 version, u64 manifest length,
// manifest JSON, then the tensors as little-endian float64 in manifest order.
inline constexpr char kCkptMagic[8] = {'P', 'L', 'C', 'K', 'P', 'T', '1', '\n'};

inline void save_checkpoint(const std::string& path, const nlohmann::json& meta, const Graph& g) {
  nlohmann::json manifest;
  manifest["meta"] = meta;
  auto& tensors = manifest["tensors"];
  tensors = nlohmann::json::array();
  for (int p = 0; p < g.param_count(); ++p) {
    nlohmann::json t;
    t["name"] = g.param_name(p);
    t["shape"] = g.param_value(p).shape();
    tensors.push_back(std::move(t));
  }
  std::string mtext = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write checkpoint " + path);
  out.write(kCkptMagic, 8);
  write_u32_le(out, 1);
  write_u64_le(out, mtext.size());
  out.write(mtext.data(), std::streamsize(mtext.size()));
  for (int p = 0; p < g.param_count(); ++p) {
    const Tensor& t = g.param_value(p);
    for (int i = 0; i < t.size(); ++i) write_f64_le(out, t[i]);
  }
  if (!out) throw io_error("short write to checkpoint " + path);
}

struct Checkpoint {
  nlohmann::json meta;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kCkptMagic))
    throw parse_error("not a checkpoint file: " + path);
  uint32_t version = read_u32_le(in);
  if (version != 1) throw parse_error("unsupported checkpoint version " + std::to_string(version));
  uint64_t mlen = read_u64_le(in);
  std::string mtext(mlen, '\0');
  in.read(mtext.data(), std::streamsize(mlen));
  if (!in) throw parse_error("truncated checkpoint manifest in " + path);

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mtext);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("bad checkpoint manifest in " + path + ": " + e.what());
  }

  Checkpoint ck;
  ck.meta = manifest.value("meta", nlohmann::json::object());
  for (const auto& entry : manifest.at("tensors")) {
    std::string name = entry.at("name").get<std::string>();
    std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
    Tensor t(shape);
    for (int i = 0; i < t.size(); ++i) t[i] = read_f64_le(in);
    ck.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ck;
}

// copy stored tensors into the graph parameters, matched by name
inline void restore_params(Graph& g, const Checkpoint& ck) {
  for (const auto& [name, tensor] : ck.tensors) {
    int pid = g.find_param(name);
    if (pid < 0) throw structural_error("checkpoint tensor '" + name + "' has no matching parameter");
    if (g.param_value(pid).shape() != tensor.shape())
      throw structural_error("checkpoint tensor '" + name + "' shape mismatch");
    g.param_value(pid).values() = tensor.values();
  }
  if (int(ck.tensors.size()) != g.param_count())
    throw structural_error("checkpoint parameter count does not match the graph");
}

}  // namespace portlab::ad
