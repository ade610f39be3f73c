#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "renyi/density.hpp"
#include "renyi/maximizer.hpp"
#include "renyi/random.hpp"

namespace renyi {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N draws of an n-vector, one per row, with provenance.
struct SampleBatch {
  RowMat data;
  std::uint64_t seed = 0;
  std::string description;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();

  Eigen::Index count() const noexcept { return data.rows(); }
  int dim() const noexcept { return static_cast<int>(data.cols()); }
};

nlohmann::ordered_json params_json(const MaximizerParams& p);

/// One draw of g_{q,C}:
///   q < 1: √(m-2) L z / U,         U ~ χ_m
///   q > 1: √m L z / √(zᵀz + V²),   V ~ χ_{2q/(q-1)}
///   q = 1: L z
/// with z standard normal and L the Cholesky factor of C.
void draw_maximizer(const MaximizerParams& p, RandomStream& rng, Eigen::Ref<Vec> out);

/// `count` i.i.d. draws; chunk k uses rng.substream(k), so the batch does
/// not depend on the number of worker threads.
SampleBatch sample_maximizer(const MaximizerParams& p, Eigen::Index count, const RandomStream& rng);
SampleBatch sample_density(const Density& d, Eigen::Index count, const RandomStream& rng);

/// Θ_D(x) = x / √(xᵀD⁻¹x + 1).
Vec theta_map(const Covariance& d, const VecRef& x);
/// Θ_D⁻¹(y) = y / √(1 - yᵀD⁻¹y); DomainError unless yᵀD⁻¹y < 1.
Vec theta_inverse(const Covariance& d, const VecRef& y);
SampleBatch theta_map(const Covariance& d, const SampleBatch& batch);

struct DualParams {
  MaximizerParams dual;  // index p > 1, covariance C(m-2)/(m+n)
  Covariance map_matrix; // D = (m-2)C for Θ_D
};

/// The q > 1 maximizer that Θ_{(m-2)C} carries g_{q,C} onto (q < 1 only).
DualParams dualize(const MaximizerParams& p);

/// CSV without header (one row per sample, %.17g) plus a JSON sidecar at
/// `<path>.json` holding {seed, params, description, count, dim}.
void write_batch(const SampleBatch& batch, const std::filesystem::path& path);
/// Reads a CSV batch; the sidecar is used when present.
SampleBatch read_batch(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace renyi
