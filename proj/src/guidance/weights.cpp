#include "unics/guidance/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

namespace unics {

namespace {

constexpr char kMagic[4] = {'U', 'N', 'G', 'W'};
constexpr std::size_t kHeaderBytes = 20;

/// Calls fn(name, data, rows, cols) for every tensor in file order.
template <class Weights, class Fn>
void for_each_tensor(Weights& w, Fn&& fn) {
  const long d = w.dim;
  auto mat = [&](const char* name, auto& m, long rows, long cols) { fn(name, m, rows, cols); };
  mat("node_in", w.node_in, d, 2);
  mat("node_in_bias", w.node_in_bias, d, 1);
  mat("edge_in", w.edge_in, d, 1);
  mat("edge_in_bias", w.edge_in_bias, d, 1);
  for (auto& layer : w.layers) {
    mat("w_attn", layer.w_attn, d, d);
    mat("w_neigh", layer.w_neigh, d, d);
    mat("w_self", layer.w_self, d, d);
    mat("w_rev", layer.w_rev, d, d);
    mat("w_from", layer.w_from, d, d);
    mat("w_to", layer.w_to, d, d);
    mat("w_edge", layer.w_edge, d, d);
    mat("pad", layer.pad, d, 1);
    mat("node_bn.mean", layer.node_bn.mean, d, 1);
    mat("node_bn.var", layer.node_bn.var, d, 1);
    mat("node_bn.scale", layer.node_bn.scale, d, 1);
    mat("node_bn.shift", layer.node_bn.shift, d, 1);
    mat("edge_bn.mean", layer.edge_bn.mean, d, 1);
    mat("edge_bn.var", layer.edge_bn.var, d, 1);
    mat("edge_bn.scale", layer.edge_bn.scale, d, 1);
    mat("edge_bn.shift", layer.edge_bn.shift, d, 1);
  }
  mat("dec1", w.dec1, d, d);
  mat("dec1_bias", w.dec1_bias, d, 1);
  mat("dec2", w.dec2, d, d);
  mat("dec2_bias", w.dec2_bias, d, 1);
  mat("w_beta", w.w_beta, d, 1);
  mat("w_pi", w.w_pi, d, 1);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, data, static_cast<uInt>(len));
  return static_cast<std::uint32_t>(crc);
}

void require_shape(const char* name, long rows, long cols, long want_rows, long want_cols) {
  if (rows != want_rows || cols != want_cols) {
    throw DimensionMismatch(std::string(name) + ": expected " + std::to_string(want_rows) + "x" +
                            std::to_string(want_cols) + ", got " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
}

}  // namespace

void SgnWeights::validate() const {
  if (dim == 0) throw DimensionMismatch("hidden dimension must be positive");
  if (gamma == 0) throw DimensionMismatch("gamma must be positive");
  for_each_tensor(*this, [](const char* name, const auto& m, long rows, long cols) {
    require_shape(name, m.rows(), m.cols(), rows, cols);
    if (!m.allFinite()) throw DimensionMismatch(std::string(name) + " has non-finite entries");
  });
  if (!std::isfinite(penalty_bound) || penalty_bound < 0) throw DimensionMismatch("bad penalty bound");
  for (const auto& layer : layers) {
    if ((layer.node_bn.var.array() < 0).any() || (layer.edge_bn.var.array() < 0).any()) {
      throw DimensionMismatch("negative batch-norm variance");
    }
  }
}

SgnWeights SgnWeights::zeros(std::uint32_t layer_count, std::uint32_t dim, std::uint32_t gamma) {
  SgnWeights w;
  w.dim = dim;
  w.gamma = gamma;
  w.layers.resize(layer_count);
  for_each_tensor(w, [](const char*, auto& m, long rows, long cols) { m.setZero(rows, cols); });
  for (auto& layer : w.layers) {
    layer.node_bn.var.setOnes();
    layer.node_bn.scale.setOnes();
    layer.edge_bn.var.setOnes();
    layer.edge_bn.scale.setOnes();
  }
  return w;
}

SgnWeights SgnWeights::random(std::uint32_t layer_count, std::uint32_t dim, std::uint32_t gamma,
                              std::mt19937_64& rng) {
  SgnWeights w = zeros(layer_count, dim, gamma);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::uniform_real_distribution<float> unit(0.5f, 1.5f);
  for_each_tensor(w, [&](const char* name, auto& m, long, long cols) {
    const std::string_view n(name);
    if (n.ends_with(".var") || n.ends_with(".scale")) {
      for (long i = 0; i < m.size(); ++i) m.data()[i] = unit(rng);
      return;
    }
    const long fan_in = n == "edge_in" ? 1 : (cols > 1 ? cols : static_cast<long>(dim));
    const float s = 1.0f / std::sqrt(static_cast<float>(fan_in));
    for (long i = 0; i < m.size(); ++i) m.data()[i] = normal(rng) * s;
  });
  return w;
}

std::vector<std::uint8_t> save_weights(const SgnWeights& w) {
  w.validate();
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kWeightFormatVersion);
  put_u32(out, w.layer_count());
  put_u32(out, w.dim);
  put_u32(out, w.gamma);
  for_each_tensor(w, [&](const char*, const auto& m, long, long) {
    for (long i = 0; i < m.size(); ++i) put_f32(out, m.data()[i]);
  });
  put_f32(out, w.penalty_bound);
  put_u32(out, crc32_of(out.data(), out.size()));
  return out;
}

SgnWeights load_weights(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw BadMagic("not a UNGW weight file");
  }
  if (bytes.size() < kHeaderBytes) throw TruncatedFile("weight file header truncated");
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kWeightFormatVersion) {
    throw VersionMismatch("weight file version " + std::to_string(version) + ", expected " +
                          std::to_string(kWeightFormatVersion));
  }
  SgnWeights w;
  const std::uint32_t layer_count = get_u32(bytes.data() + 8);
  w.dim = get_u32(bytes.data() + 12);
  w.gamma = get_u32(bytes.data() + 16);
  if (w.dim == 0 || w.dim > (1u << 14) || layer_count > (1u << 12)) {
    throw DimensionMismatch("implausible weight file dimensions");
  }
  w.layers.resize(layer_count);

  std::size_t at = kHeaderBytes;
  auto take = [&](std::size_t count) {
    if (bytes.size() < at + 4 * count) throw TruncatedFile("weight file truncated mid-tensor");
    const std::uint8_t* p = bytes.data() + at;
    at += 4 * count;
    return p;
  };
  for_each_tensor(w, [&](const char*, auto& m, long rows, long cols) {
    m.resize(rows, cols);
    const std::uint8_t* p = take(static_cast<std::size_t>(rows * cols));
    for (long i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  });
  w.penalty_bound = std::bit_cast<float>(get_u32(take(1)));
  const std::uint8_t* crc_at = take(1);
  if (get_u32(crc_at) != crc32_of(bytes.data(), at - 4)) throw ChecksumMismatch("weight file CRC mismatch");
  if (at != bytes.size()) throw WeightFormatError("trailing bytes after weight file checksum");
  w.validate();
  return w;
}

SgnWeights load_weights_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightFormatError("cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_weights(bytes);
}

void save_weights_file(const SgnWeights& w, const std::filesystem::path& path) {
  const auto bytes = save_weights(w);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WeightFormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace unics
