#pragma once

#include <string>
#include <vector>

#include "dcb/frames.hpp"
#include "dcb/synth.hpp"

namespace dcb {

/// On-disk dataset description (dataset.json next to the .mcfr files).
struct DatasetManifest {
    std::string version;  // tool version string
    uint64_t seed = 0;
    std::vector<std::string> train_files, val_files, test_files;
    /// CSI thresholds: 0.25 / 0.50 / 0.75 quantiles of the nonzero
    /// intensities of the training split, frozen at generation time.
    std::vector<double> thresholds;
    std::string config_echo;  // canonical JSON of the generating config
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<FrameSequence> train, val, test;
};

/// Quantile by the sorted-index rule v[floor(q * (n-1))]; exact and
/// deterministic, no interpolation.
double quantile(std::vector<double> values, double q);

/// Thresholds derived from a training split: quantiles {0.25, 0.5, 0.75} of
/// all strictly positive pixel values. Throws ConfigError if the split has
/// no positive intensity anywhere.
std::vector<double> derive_thresholds(const std::vector<FrameSequence>& train);

/// Generate the three splits from cfg (sequence seeds are consumed in
/// train, val, test order), write one .mcfr per sequence plus
/// dataset.json, and return the manifest.
DatasetManifest save_dataset(const std::string& dir, const AdvectionConfig& cfg, int n_train,
                             int n_val, int n_test, const std::string& config_echo);

/// Read dataset.json and every referenced sequence.
Dataset load_dataset(const std::string& dir);

}  // namespace dcb
