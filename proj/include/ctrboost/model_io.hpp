#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ctrboost/gbdt.hpp"

namespace ctrboost {

inline constexpr char kModelMagic[8] = {'C', 'T', 'R', 'B', 'M', 'D', 'L', '\0'};
inline constexpr uint32_t kModelFormatVersion = 1;

enum class ModelSection : uint32_t {
    config = 1,
    features = 2,
    encoder = 3,
    trees = 4,
    metadata = 5,
};

/// 64-bit FNV-1a.
uint64_t fnv1a64(std::string_view bytes);

/// Little-endian model file image; layout in docs/model_format.md.
std::string serialize_model(const Model& model);

/// Throws Error(truncated | checksum | version | parse).
Model deserialize_model(std::string_view bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

} // namespace ctrboost
