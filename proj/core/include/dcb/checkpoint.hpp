#pragma once

#include <string>

#include "dcb/params.hpp"

namespace dcb {

/// Single-file checkpoint: "DCKP" magic, u32 manifest length, manifest JSON
/// (version, config echo, lambda_drift, parameter names/shapes in order),
/// then one raw little-endian float64 blob per parameter in manifest order.
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const std::string& config_echo);

struct LoadedCheckpoint {
    ModelParams params;
    std::string config_echo;
    std::string version;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace dcb
