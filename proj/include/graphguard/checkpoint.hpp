#pragma once

#include <filesystem>
#include <optional>

#include "graphguard/nn.hpp"

namespace graphguard {

// Binary layout, little-endian:
//   magic "GGCKPT\0\0" | u32 version | u32 kind (0 GCN, 1 R-GCN) | u32 tensor count
//   | per tensor: u64 rows, u64 cols | all entries as IEEE-754 f64.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);

struct CheckpointShape {
  GnnKind kind;
  std::size_t n_features;
  std::size_t n_relations;  // ignored for GCN
  std::size_t embedding_dim;
};

// Throws on bad magic, unknown version, truncated data, or (when `expected`
// is given) a shape that does not match.
ModelParams load_checkpoint(const std::filesystem::path& path,
                            const std::optional<CheckpointShape>& expected = std::nullopt);

}  // namespace graphguard
