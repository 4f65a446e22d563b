#include "dcb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dcb/errors.hpp"
#include "dcb/frame_io.hpp"
#include "dcb/version.hpp"

namespace dcb {

using nlohmann::json;

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractError("quantile of an empty sample");
    if (q < 0.0 || q > 1.0) throw ContractError("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    return values[idx];
}

std::vector<double> derive_thresholds(const std::vector<FrameSequence>& train) {
    std::vector<double> positive;
    for (const FrameSequence& seq : train) {
        for (const Tensor& f : seq.frames) {
            for (long long i = 0; i < f.numel(); ++i) {
                const double v = f.at_flat(i);
                if (v > 0.0) positive.push_back(v);
            }
        }
    }
    if (positive.empty()) {
        throw ConfigError("training split has no positive intensities; cannot derive thresholds");
    }
    return {quantile(positive, 0.25), quantile(positive, 0.5), quantile(positive, 0.75)};
}

namespace {

std::vector<std::string> write_split(const std::string& dir, const char* prefix,
                                     const std::vector<FrameSequence>& split) {
    std::vector<std::string> names;
    names.reserve(split.size());
    for (size_t i = 0; i < split.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%04zu.mcfr", prefix, i);
        write_frames(dir + "/" + name, split[i]);
        names.emplace_back(name);
    }
    return names;
}

std::vector<FrameSequence> read_split(const std::string& dir,
                                      const std::vector<std::string>& names) {
    std::vector<FrameSequence> out;
    out.reserve(names.size());
    for (const std::string& name : names) out.push_back(read_frames(dir + "/" + name));
    return out;
}

}  // namespace

DatasetManifest save_dataset(const std::string& dir, const AdvectionConfig& cfg, int n_train,
                             int n_val, int n_test, const std::string& config_echo) {
    if (n_train <= 0 || n_val < 0 || n_test < 0) {
        throw ConfigError("dataset: need at least one training sequence");
    }
    std::filesystem::create_directories(dir);

    // One seed stream across the splits so split sizes don't reshuffle data.
    std::vector<FrameSequence> all = generate(cfg, n_train + n_val + n_test);
    std::vector<FrameSequence> train(all.begin(), all.begin() + n_train);
    std::vector<FrameSequence> val(all.begin() + n_train, all.begin() + n_train + n_val);
    std::vector<FrameSequence> test(all.begin() + n_train + n_val, all.end());

    DatasetManifest m;
    m.version = kVersion;
    m.seed = cfg.seed;
    m.config_echo = config_echo;
    m.thresholds = derive_thresholds(train);
    m.train_files = write_split(dir, "train", train);
    m.val_files = write_split(dir, "val", val);
    m.test_files = write_split(dir, "test", test);

    json j;
    j["format"] = "dcbank-dataset";
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["config"] = json::parse(m.config_echo.empty() ? "{}" : m.config_echo);
    j["thresholds"] = m.thresholds;
    j["splits"]["train"] = m.train_files;
    j["splits"]["val"] = m.val_files;
    j["splits"]["test"] = m.test_files;

    std::ofstream out(dir + "/dataset.json", std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + dir + "/dataset.json'", 0);
    out << j.dump(2) << "\n";
    return m;
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream in(dir + "/dataset.json");
    if (!in) throw FormatError("cannot open '" + dir + "/dataset.json'", 0);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("dataset.json: " + std::string(e.what()), static_cast<long long>(e.byte));
    }
    if (j.value("format", "") != "dcbank-dataset") {
        throw FormatError("dataset.json: not a dcbank dataset manifest", 0);
    }

    Dataset d;
    d.manifest.version = j.value("version", "");
    d.manifest.seed = j.value("seed", static_cast<uint64_t>(0));
    d.manifest.config_echo = j.contains("config") ? j["config"].dump() : "{}";
    d.manifest.thresholds = j.value("thresholds", std::vector<double>{});
    d.manifest.train_files = j["splits"].value("train", std::vector<std::string>{});
    d.manifest.val_files = j["splits"].value("val", std::vector<std::string>{});
    d.manifest.test_files = j["splits"].value("test", std::vector<std::string>{});

    d.train = read_split(dir, d.manifest.train_files);
    d.val = read_split(dir, d.manifest.val_files);
    d.test = read_split(dir, d.manifest.test_files);
    return d;
}

}  // namespace dcb
