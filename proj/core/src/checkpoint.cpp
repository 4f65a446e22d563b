#include "dcb/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "dcb/errors.hpp"
#include "dcb/version.hpp"

namespace dcb {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'D', 'C', 'K', 'P'};

void put_f64(std::string& out, double d) {
    const uint64_t v = std::bit_cast<uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

double get_f64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const std::string& config_echo) {
    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = json::parse(config_echo.empty() ? "{}" : config_echo);
    manifest["lambda_drift"] = params.dcbank.camr.lambda_drift;
    manifest["params"] = json::array();
    for_each_param(params, [&](const std::string& name, const Tensor& t) {
        json entry;
        entry["name"] = name;
        entry["shape"] = t.shape();
        manifest["params"].push_back(entry);
    });
    const std::string mtext = manifest.dump();

    std::string buf;
    buf.append(kMagic, 4);
    const auto mlen = static_cast<uint32_t>(mtext.size());
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((mlen >> (8 * i)) & 0xff));
    buf += mtext;
    for_each_param(params, [&](const std::string&, const Tensor& t) {
        for (long long i = 0; i < t.numel(); ++i) put_f64(buf, t.at_flat(i));
    });

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("short write to '" + path + "'", 0);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'", 0);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    const long long size = static_cast<long long>(bytes.size());
    if (size < 8) throw FormatError("truncated checkpoint header", size);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic, expected \"DCKP\"", 0);
    }
    uint32_t mlen = 0;
    for (int i = 0; i < 4; ++i) mlen |= static_cast<uint32_t>(bytes[4 + i]) << (8 * i);
    if (size < 8 + static_cast<long long>(mlen)) {
        throw FormatError("truncated checkpoint manifest", size);
    }

    json manifest;
    try {
        manifest = json::parse(bytes.begin() + 8, bytes.begin() + 8 + mlen);
    } catch (const json::parse_error& e) {
        throw FormatError("checkpoint manifest: " + std::string(e.what()), 8);
    }

    LoadedCheckpoint loaded;
    loaded.version = manifest.value("version", "");
    loaded.config_echo = manifest.contains("config") ? manifest["config"].dump() : "{}";

    long long offset = 8 + mlen;
    for (const json& entry : manifest.at("params")) {
        const std::string name = entry.at("name").get<std::string>();
        const Shape shape = entry.at("shape").get<Shape>();
        const long long n = numel_of(shape);
        if (size < offset + n * 8) {
            throw FormatError("truncated blob for '" + name + "': " +
                                  std::to_string(offset + n * 8 - size) + " byte(s) missing",
                              size);
        }
        std::vector<double> data(static_cast<size_t>(n));
        for (long long i = 0; i < n; ++i) {
            const double v = get_f64(bytes.data() + offset + i * 8);
            if (!std::isfinite(v)) throw FormatError("non-finite value in '" + name + "'", offset + i * 8);
            data[static_cast<size_t>(i)] = v;
        }
        offset += n * 8;
        bool assigned = false;
        for_each_param(loaded.params, [&](const std::string& pname, Tensor& t) {
            if (pname == name) {
                t = Tensor(shape, std::move(data));
                assigned = true;
            }
        });
        if (!assigned) throw FormatError("unknown parameter '" + name + "' in checkpoint", 8);
    }
    if (offset != size) {
        throw FormatError(std::to_string(size - offset) + " trailing byte(s) after blobs", offset);
    }
    for_each_param(loaded.params, [&](const std::string& pname, Tensor& t) {
        if (t.empty()) throw FormatError("checkpoint is missing parameter '" + pname + "'", 8);
    });
    loaded.params.dcbank.camr.lambda_drift = manifest.value("lambda_drift", 0.3);
    return loaded;
}

}  // namespace dcb
