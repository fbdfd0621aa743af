#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hlwc/corpus.hpp"
#include "hlwc/sampler.hpp"

namespace hlwc {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelState state;
  Vocabulary vocab;
  nlohmann::json config;
};

// Canonical serialization: a versioned envelope around the payload plus an
// FNV-1a checksum of the payload's compact dump. Saving, loading and saving
// again produces identical bytes.
std::string checkpoint_dump(const ModelState& state, const Vocabulary& vocab = {},
                            const nlohmann::json& config = nullptr);

// Throws VersionError for an unknown format version, ChecksumError when the
// payload was altered or is unreadable, ValueError/ConsistencyError when the
// decoded state is invalid.
Checkpoint checkpoint_parse(const std::string& text);

void checkpoint_save(const ModelState& state, const std::filesystem::path& path,
                     const Vocabulary& vocab = {}, const nlohmann::json& config = nullptr);
Checkpoint checkpoint_load(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace hlwc
