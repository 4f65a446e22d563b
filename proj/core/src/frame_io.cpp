#include "dcb/frame_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "dcb/errors.hpp"

namespace dcb {
namespace {

constexpr char kMagic[4] = {'M', 'C', 'F', 'R'};
constexpr uint16_t kVersion = 1;
constexpr long long kHeaderBytes = 4 + 2 + 2 + 4 + 4 + 4;

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    const uint64_t v = std::bit_cast<uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint16_t get_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (static_cast<uint16_t>(p[1]) << 8));
}

uint32_t get_u32(const unsigned char* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void write_frames(const std::string& path, const FrameSequence& seq) {
    seq.validate();
    std::string buf;
    buf.reserve(static_cast<size_t>(kHeaderBytes) +
                static_cast<size_t>(seq.length()) * seq.height * seq.width * 8);
    buf.append(kMagic, 4);
    put_u16(buf, kVersion);
    put_u16(buf, 0);
    put_u32(buf, static_cast<uint32_t>(seq.length()));
    put_u32(buf, static_cast<uint32_t>(seq.height));
    put_u32(buf, static_cast<uint32_t>(seq.width));
    for (const Tensor& f : seq.frames) {
        for (long long i = 0; i < f.numel(); ++i) put_f64(buf, f.at_flat(i));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("short write to '" + path + "'", 0);
}

FrameSequence read_frames(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'", 0);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    const long long size = static_cast<long long>(bytes.size());

    if (size < kHeaderBytes) {
        throw FormatError("truncated header: " + std::to_string(kHeaderBytes - size) +
                              " byte(s) missing",
                          size);
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic, expected \"MCFR\"", 0);
    }
    const uint16_t version = get_u16(bytes.data() + 4);
    if (version == 256) {
        // 1 stored big-endian reads back as 256: reject foreign endianness
        // explicitly rather than as a generic unknown version.
        throw FormatError("big-endian file rejected: this format is little-endian only", 4);
    }
    if (version != kVersion) {
        throw FormatError("unsupported version " + std::to_string(version), 4);
    }
    const uint16_t reserved = get_u16(bytes.data() + 6);
    if (reserved != 0) throw FormatError("reserved field must be zero", 6);

    const uint32_t t = get_u32(bytes.data() + 8);
    const uint32_t h = get_u32(bytes.data() + 12);
    const uint32_t w = get_u32(bytes.data() + 16);
    if (t == 0 || h == 0 || w == 0) throw FormatError("zero extent in header", 8);

    const long long values = static_cast<long long>(t) * h * w;
    const long long expected = kHeaderBytes + values * 8;
    if (size < expected) {
        throw FormatError("truncated payload: " + std::to_string(expected - size) +
                              " byte(s) missing of " + std::to_string(expected),
                          size);
    }
    if (size > expected) {
        throw FormatError(std::to_string(size - expected) + " trailing byte(s) after payload",
                          expected);
    }

    FrameSequence seq;
    seq.height = static_cast<int>(h);
    seq.width = static_cast<int>(w);
    seq.frames.reserve(t);
    const long long per_frame = static_cast<long long>(h) * w;
    for (uint32_t fi = 0; fi < t; ++fi) {
        std::vector<double> data(static_cast<size_t>(per_frame));
        for (long long i = 0; i < per_frame; ++i) {
            const long long off = kHeaderBytes + (fi * per_frame + i) * 8;
            const double v = get_f64(bytes.data() + off);
            if (!std::isfinite(v)) throw FormatError("non-finite value in payload", off);
            data[static_cast<size_t>(i)] = v;
        }
        seq.frames.emplace_back(Shape{static_cast<int>(h), static_cast<int>(w)},
                                std::move(data));
    }
    return seq;
}

}  // namespace dcb
