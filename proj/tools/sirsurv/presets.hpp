#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sirsurv::cli {

struct PresetInfo {
  std::string_view name;
  std::string_view description;
};

/// Figure reproductions, in the order `repro all` runs them.
std::span<const PresetInfo> presets();

struct PresetOptions {
  std::uint64_t seed = 1;
};

struct PresetResult {
  std::vector<std::filesystem::path> files;
  std::string summary;  // one human-readable line
};

/// Runs a preset into `out_dir`. Throws ValidationError for unknown names.
PresetResult run_preset(std::string_view name, const std::filesystem::path& out_dir, const PresetOptions& options);

}  // namespace sirsurv::cli
