#ifndef PPOCR_NN_CHECKPOINT_HPP_
#define PPOCR_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ppocr/nn/param_store.hpp"

namespace ppocr {

// Container layout: "PPV2CKPT", u32 version, u32 entry count, then per entry
// u16 name length, name bytes, u8 ndim, u32 dims, f32 values. All integers
// and floats little-endian.
inline constexpr std::string_view kCheckpointMagic = "PPV2CKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class CheckpointErrorKind { io, bad_magic, bad_version, truncated, shape_mismatch, missing_entry };

std::string_view checkpoint_error_name(CheckpointErrorKind kind);

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(CheckpointErrorKind kind, const std::string& message);
  CheckpointErrorKind kind() const { return kind_; }

 private:
  CheckpointErrorKind kind_;
};

void write_checkpoint(std::ostream& out, const ParamStore<float>& params);
ParamStore<float> read_checkpoint(std::istream& in);

void save_checkpoint(const ParamStore<float>& params, const std::filesystem::path& path);
ParamStore<float> load_checkpoint(const std::filesystem::path& path);

// Copies every parameter of `target` from `loaded`. A missing name or a
// differing shape raises CheckpointError naming the parameter; entries the
// target does not have are also rejected as a shape mismatch of the network.
template <typename T>
void assign_checkpoint(ParamStore<T>& target, const ParamStore<float>& loaded);

// load_checkpoint followed by assign_checkpoint.
template <typename T>
void load_checkpoint_into(ParamStore<T>& target, const std::filesystem::path& path);

}  // namespace ppocr

#endif  // PPOCR_NN_CHECKPOINT_HPP_
