#include "graphguard/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "graphguard/error.hpp"

namespace graphguard {

namespace {

constexpr std::array<char, 8> kMagic{'G', 'G', 'C', 'K', 'P', 'T', '\0', '\0'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  auto u = static_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("checkpoint: truncated file");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  return static_cast<T>(u);
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, params.kind == GnnKind::kGcn ? 0 : 1);
  const auto tensors = params.tensors();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const DenseMatrix* m : tensors) {
    put_le<std::uint64_t>(out, m->rows());
    put_le<std::uint64_t>(out, m->cols());
  }
  for (const DenseMatrix* m : tensors)
    for (double v : m->data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw Error("write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path, const std::optional<CheckpointShape>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("checkpoint: bad magic in " + path.string());
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw Error("checkpoint: unsupported version " + std::to_string(version));
  const auto kind_code = get_le<std::uint32_t>(in);
  if (kind_code > 1) throw Error("checkpoint: unknown model kind");
  const auto count = get_le<std::uint32_t>(in);
  const GnnKind kind = kind_code == 0 ? GnnKind::kGcn : GnnKind::kRgcn;
  if ((kind == GnnKind::kGcn && count != 2) || (kind == GnnKind::kRgcn && count < 3))
    throw Error("checkpoint: tensor count inconsistent with model kind");

  std::vector<std::pair<std::uint64_t, std::uint64_t>> shapes(count);
  for (auto& [r, c] : shapes) {
    r = get_le<std::uint64_t>(in);
    c = get_le<std::uint64_t>(in);
    if (r == 0 || c == 0 || r > (1u << 20) || c > (1u << 20)) throw Error("checkpoint: implausible tensor shape");
  }
  const std::size_t features = shapes[0].first;
  const std::size_t dim = shapes.back().first;
  for (std::size_t k = 0; k + 1 < count; ++k)
    if (shapes[k].first != features || shapes[k].second != dim) throw Error("checkpoint: inconsistent GNN shapes");
  if (shapes.back().second != dim) throw Error("checkpoint: bilinear matrix is not d x d");

  ModelParams p;
  p.kind = kind;
  if (kind == GnnKind::kGcn) {
    p.gcn_weight = DenseMatrix(features, dim);
  } else {
    p.relation_weights.assign(count - 2, DenseMatrix(features, dim));
    p.self_weight = DenseMatrix(features, dim);
  }
  p.bilinear = DenseMatrix(dim, dim);

  if (expected) {
    if (expected->kind != kind) throw Error("checkpoint: model kind mismatch");
    if (expected->n_features != features || expected->embedding_dim != dim ||
        (kind == GnnKind::kRgcn && expected->n_relations != p.relation_weights.size()))
      throw Error("checkpoint: shape mismatch with the configured model");
  }

  for (DenseMatrix* m : p.tensors())
    for (double& v : m->data()) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  if (in.peek() != std::char_traits<char>::eof()) throw Error("checkpoint: trailing bytes");
  return p;
}

}  // namespace graphguard
