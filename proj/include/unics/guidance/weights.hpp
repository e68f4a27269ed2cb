#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace unics {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXf;

class WeightFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BadMagic : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};
class VersionMismatch : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};
class TruncatedFile : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};
class ChecksumMismatch : public WeightFormatError {
 public:
  using WeightFormatError::WeightFormatError;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inference-mode batch normalisation: (x - mean) / sqrt(var + eps) * scale + shift.
struct BatchNorm {
  Vector mean, var, scale, shift;

  static constexpr float kEpsilon = 1e-5f;
};

struct SgnLayer {
  Matrix w_attn, w_neigh, w_self, w_rev, w_from, w_to, w_edge;  // W_a W_n W_s W_r W_f W_t W_o
  Vector pad;                                                    // stands in for a missing reverse edge
  BatchNorm node_bn, edge_bn;
};

/// Parameters of the sparse graph network. Shapes (D = dim):
///   node_in D x 2, edge_in D x 1, every layer matrix D x D,
///   decoder D x D (two layers with biases), w_beta and w_pi of length D.
struct SgnWeights {
  std::uint32_t gamma = 20;
  std::uint32_t dim = 128;

  Matrix node_in;
  Vector node_in_bias;
  Matrix edge_in;
  Vector edge_in_bias;
  std::vector<SgnLayer> layers;
  Matrix dec1;
  Vector dec1_bias;
  Matrix dec2;
  Vector dec2_bias;
  Vector w_beta;
  Vector w_pi;
  float penalty_bound = 10.0f;  // C

  std::uint32_t layer_count() const { return static_cast<std::uint32_t>(layers.size()); }

  /// Throws DimensionMismatch on any inconsistent shape or non-finite value.
  void validate() const;

  /// All-zero tensors (unit BN variance and scale) of the given shape.
  static SgnWeights zeros(std::uint32_t layers, std::uint32_t dim, std::uint32_t gamma);
  /// Gaussian weights scaled by 1/sqrt(fan_in); random BN statistics.
  static SgnWeights random(std::uint32_t layers, std::uint32_t dim, std::uint32_t gamma, std::mt19937_64& rng);
};

/// UNGW v1, little-endian: "UNGW", u32 version, u32 L, u32 D, u32 gamma,
/// the tensors as row-major f32 in the order listed in README, then CRC32
/// of everything before it.
std::vector<std::uint8_t> save_weights(const SgnWeights& w);
SgnWeights load_weights(const std::vector<std::uint8_t>& bytes);

SgnWeights load_weights_file(const std::filesystem::path& path);
void save_weights_file(const SgnWeights& w, const std::filesystem::path& path);

inline constexpr std::uint32_t kWeightFormatVersion = 1;

}  // namespace unics
