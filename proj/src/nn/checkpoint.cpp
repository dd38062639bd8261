#include "ppocr/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace ppocr {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const std::string& what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw CheckpointError(CheckpointErrorKind::truncated, "truncated checkpoint while reading " + what);
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<U>(v);
}

}  // namespace

std::string_view checkpoint_error_name(CheckpointErrorKind kind) {
  switch (kind) {
    case CheckpointErrorKind::io: return "io error";
    case CheckpointErrorKind::bad_magic: return "bad magic";
    case CheckpointErrorKind::bad_version: return "bad version";
    case CheckpointErrorKind::truncated: return "truncated";
    case CheckpointErrorKind::shape_mismatch: return "shape mismatch";
    case CheckpointErrorKind::missing_entry: return "missing entry";
  }
  return "unknown";
}

CheckpointError::CheckpointError(CheckpointErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(checkpoint_error_name(kind)) + ": " + message), kind_(kind) {}

void write_checkpoint(std::ostream& out, const ParamStore<float>& params) {
  out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, tensor] : params) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max() || tensor.ndim() > 255) {
      throw std::invalid_argument("checkpoint: parameter '" + name + "' cannot be encoded");
    }
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.ndim()));
    for (auto d : tensor.shape()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (float v : tensor.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw CheckpointError(CheckpointErrorKind::io, "write failed");
}

ParamStore<float> read_checkpoint(std::istream& in) {
  std::string magic(kCheckpointMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kCheckpointMagic) {
    throw CheckpointError(CheckpointErrorKind::bad_magic, "not a PPV2CKPT container");
  }
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointErrorKind::bad_version,
                          "unsupported version " + std::to_string(version));
  }
  const auto count = get_le<std::uint32_t>(in, "entry count");
  ParamStore<float> params;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::string where = "entry " + std::to_string(e);
    const auto len = get_le<std::uint16_t>(in, where + " name length");
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (in.gcount() != len) {
      throw CheckpointError(CheckpointErrorKind::truncated, "truncated checkpoint in " + where + " name");
    }
    const auto ndim = get_le<std::uint8_t>(in, "'" + name + "' rank");
    Shape shape(ndim);
    for (auto& d : shape) d = get_le<std::uint32_t>(in, "'" + name + "' dims");
    std::vector<float> values(numel(shape));
    for (auto& v : values) {
      v = std::bit_cast<float>(get_le<std::uint32_t>(in, "'" + name + "' values"));
    }
    if (params.contains(name)) {
      throw CheckpointError(CheckpointErrorKind::shape_mismatch, "duplicate parameter '" + name + "'");
    }
    params.add(name, Tensor<float>(std::move(shape), std::move(values)));
  }
  return params;
}

void save_checkpoint(const ParamStore<float>& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointErrorKind::io, "cannot open " + path.string());
  write_checkpoint(out, params);
}

ParamStore<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointErrorKind::io, "cannot open " + path.string());
  return read_checkpoint(in);
}

template <typename T>
void assign_checkpoint(ParamStore<T>& target, const ParamStore<float>& loaded) {
  for (auto& [name, tensor] : target) {
    if (!loaded.contains(name)) {
      throw CheckpointError(CheckpointErrorKind::missing_entry,
                            "checkpoint has no parameter '" + name + "'");
    }
    const auto& src = loaded.at(name);
    if (src.shape() != tensor.shape()) {
      throw CheckpointError(CheckpointErrorKind::shape_mismatch,
                            "parameter '" + name + "' expects " + to_string(tensor.shape()) +
                                ", checkpoint has " + to_string(src.shape()));
    }
  }
  for (const auto& [name, src] : loaded) {
    if (!target.contains(name)) {
      throw CheckpointError(CheckpointErrorKind::shape_mismatch,
                            "checkpoint parameter '" + name + "' does not exist in the network");
    }
  }
  target.copy_values_from(loaded);
}

template <typename T>
void load_checkpoint_into(ParamStore<T>& target, const std::filesystem::path& path) {
  assign_checkpoint(target, load_checkpoint(path));
}

template void assign_checkpoint(ParamStore<float>&, const ParamStore<float>&);
template void assign_checkpoint(ParamStore<double>&, const ParamStore<float>&);
template void load_checkpoint_into(ParamStore<float>&, const std::filesystem::path&);
template void load_checkpoint_into(ParamStore<double>&, const std::filesystem::path&);

}  // namespace ppocr
