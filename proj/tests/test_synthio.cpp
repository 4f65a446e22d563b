// Synthetic generator and container-format tests: motion oracles, mass
// conservation, determinism, bit-exact round-trips, and precise failure
// offsets for malformed files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dcb/dataset.hpp"
#include "dcb/errors.hpp"
#include "dcb/frame_io.hpp"
#include "dcb/synth.hpp"

using namespace dcb;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

AdvectionConfig still_config() {
    AdvectionConfig cfg;
    cfg.height = 16;
    cfg.width = 16;
    cfg.length = 6;
    cfg.n_blobs = 2;
    cfg.velocity_mode = VelocityMode::kConstant;
    cfg.velocity_x = 0.0;
    cfg.velocity_y = 0.0;
    cfg.growth_min = 0.0;
    cfg.growth_max = 0.0;
    cfg.amplitude_min = 0.3;
    cfg.amplitude_max = 0.3;
    cfg.noise_std = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("zero velocity, zero growth, zero noise: frames are bit identical") {
    FrameSequence seq = generate_sequence(still_config(), 42);
    REQUIRE(seq.length() == 6);
    for (int t = 1; t < seq.length(); ++t) {
        CHECK(max_abs_diff(seq.frames[static_cast<size_t>(t)], seq.frames[0]) == 0.0);
    }
}

TEST_CASE("constant integer velocity is a bitwise circular shift") {
    AdvectionConfig cfg = still_config();
    cfg.grid_aligned_centers = true;
    cfg.amplitude_min = 0.4;
    cfg.amplitude_max = 0.8;  // overlaps may clamp; clamping commutes with the shift
    cfg.n_blobs = 3;

    for (auto [vx, vy] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{2, 3}, std::pair{-1, 2}}) {
        cfg.velocity_x = vx;
        cfg.velocity_y = vy;
        FrameSequence seq = generate_sequence(cfg, 7);
        const int h = cfg.height, w = cfg.width;
        for (int t = 0; t + 1 < seq.length(); ++t) {
            const Tensor& a = seq.frames[static_cast<size_t>(t)];
            const Tensor& b = seq.frames[static_cast<size_t>(t) + 1];
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const int sy = ((y + vy) % h + h) % h;
                    const int sx = ((x + vx) % w + w) % w;
                    CHECK(b(sy, sx) == a(y, x));  // exact, not approximate
                }
            }
        }
    }
}

TEST_CASE("constant non-integer velocity still moves the field") {
    AdvectionConfig cfg = still_config();
    cfg.velocity_x = 0.5;
    cfg.velocity_y = 0.0;
    cfg.grid_aligned_centers = true;
    FrameSequence seq = generate_sequence(cfg, 3);
    // sanity: motion actually happened
    CHECK(max_abs_diff(seq.frames[0], seq.frames[1]) > 1e-6);
}

TEST_CASE("intensity growth scales the peak exponentially until the clamp") {
    AdvectionConfig cfg = still_config();
    cfg.n_blobs = 1;
    cfg.grid_aligned_centers = true;
    cfg.amplitude_min = 0.5;
    cfg.amplitude_max = 0.5;
    cfg.growth_min = 0.05;
    cfg.growth_max = 0.05;
    FrameSequence seq = generate_sequence(cfg, 11);
    auto peak = [](const Tensor& f) {
        double m = 0.0;
        for (long long i = 0; i < f.numel(); ++i) m = std::max(m, f.at_flat(i));
        return m;
    };
    CHECK(peak(seq.frames[0]) == doctest::Approx(0.5).epsilon(1e-12));
    for (int t = 0; t < 5; ++t) {
        CHECK(peak(seq.frames[static_cast<size_t>(t)]) ==
              doctest::Approx(0.5 * std::exp(0.05 * t)).epsilon(1e-12));
    }
}

TEST_CASE("mass is conserved under motion within 1e-6") {
    AdvectionConfig cfg;
    cfg.height = 32;
    cfg.width = 32;
    cfg.length = 25;
    cfg.n_blobs = 2;
    cfg.amplitude_min = 0.3;
    cfg.amplitude_max = 0.3;  // no clamping at 1.0 even on overlap
    cfg.growth_min = 0.0;
    cfg.growth_max = 0.0;
    cfg.noise_std = 0.0;
    cfg.sigma_min = 1.0;
    cfg.sigma_max = 2.5;
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        FrameSequence seq = generate_sequence(cfg, seed);
        const double m0 = frame_mass(seq.frames[0]);
        REQUIRE(m0 > 0.0);
        for (const Tensor& f : seq.frames) {
            CHECK(std::fabs(frame_mass(f) - m0) / m0 < 1e-6);
        }
    }
}

TEST_CASE("same seed gives bit-identical sequences, different seeds differ") {
    AdvectionConfig cfg;
    cfg.height = 16;
    cfg.width = 16;
    cfg.length = 5;
    FrameSequence a = generate_sequence(cfg, 1234);
    FrameSequence b = generate_sequence(cfg, 1234);
    FrameSequence c = generate_sequence(cfg, 1235);
    for (int t = 0; t < 5; ++t) {
        CHECK(max_abs_diff(a.frames[static_cast<size_t>(t)], b.frames[static_cast<size_t>(t)]) ==
              0.0);
    }
    CHECK(max_abs_diff(a.frames[0], c.frames[0]) > 0.0);
}

TEST_CASE("values stay inside the unit interval, with and without noise") {
    AdvectionConfig cfg;
    cfg.height = 16;
    cfg.width = 16;
    cfg.length = 8;
    cfg.n_blobs = 4;
    cfg.amplitude_min = 0.8;
    cfg.amplitude_max = 0.8;
    cfg.growth_min = 0.2;
    cfg.growth_max = 0.2;  // forces clamping at 1.0
    SUBCASE("noiseless") { cfg.noise_std = 0.0; }
    SUBCASE("noisy") { cfg.noise_std = 0.5; }
    FrameSequence seq = generate_sequence(cfg, 77);
    bool highs = false;
    for (const Tensor& f : seq.frames) {
        for (long long i = 0; i < f.numel(); ++i) {
            CHECK(f.at_flat(i) >= 0.0);
            CHECK(f.at_flat(i) <= 1.0);
            if (f.at_flat(i) == 1.0) highs = true;
        }
    }
    CHECK(highs);  // the clamp actually engaged
}

TEST_CASE("rotating tracks curve instead of running straight") {
    AdvectionConfig cfg;
    cfg.height = 32;
    cfg.width = 32;
    cfg.length = 12;
    cfg.n_blobs = 1;
    cfg.sigma_min = cfg.sigma_max = 1.5;
    cfg.speed_min = cfg.speed_max = 1.0;
    cfg.rotation_min = cfg.rotation_max = 0.4;
    FrameSequence seq = generate_sequence(cfg, 5);

    auto argmax = [](const Tensor& f) {
        long long best = 0;
        for (long long i = 0; i < f.numel(); ++i) {
            if (f.at_flat(i) > f.at_flat(best)) best = i;
        }
        return std::pair<int, int>{static_cast<int>(best / f.extent(1)),
                                   static_cast<int>(best % f.extent(1))};
    };
    // displacement direction rotates: positions are not collinear mod wrap
    auto [y0, x0] = argmax(seq.frames[0]);
    auto [y1, x1] = argmax(seq.frames[4]);
    auto [y2, x2] = argmax(seq.frames[8]);
    const int cross = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
    CHECK(cross != 0);
}

TEST_CASE("validate rejects bad generator configs") {
    AdvectionConfig cfg;
    cfg.sigma_min = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AdvectionConfig{};
    cfg.length = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AdvectionConfig{};
    cfg.amplitude_max = cfg.amplitude_min - 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = AdvectionConfig{};
    cfg.noise_std = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("frame container round-trips bit exactly") {
    AdvectionConfig cfg;
    cfg.height = 9;
    cfg.width = 13;
    cfg.length = 4;
    FrameSequence seq = generate_sequence(cfg, 2718);
    const std::string path = temp_path("mcfr_roundtrip.mcfr");
    write_frames(path, seq);
    FrameSequence back = read_frames(path);
    CHECK(back.height == 9);
    CHECK(back.width == 13);
    REQUIRE(back.length() == 4);
    for (int t = 0; t < 4; ++t) {
        CHECK(max_abs_diff(back.frames[static_cast<size_t>(t)],
                           seq.frames[static_cast<size_t>(t)]) == 0.0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("container header layout is exactly as documented") {
    FrameSequence seq;
    seq.height = 2;
    seq.width = 3;
    seq.frames = {Tensor({2, 3}, {0, 1, 2, 3, 4, 5})};
    const std::string path = temp_path("mcfr_layout.mcfr");
    write_frames(path, seq);
    const std::string bytes = read_file(path);
    REQUIRE(bytes.size() == 20 + 6 * 8);
    CHECK(bytes.substr(0, 4) == "MCFR");
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version 1, little-endian
    CHECK(static_cast<unsigned char>(bytes[5]) == 0);
    CHECK(static_cast<unsigned char>(bytes[6]) == 0);  // reserved
    CHECK(static_cast<unsigned char>(bytes[7]) == 0);
    CHECK(static_cast<unsigned char>(bytes[8]) == 1);   // T = 1
    CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // H = 2
    CHECK(static_cast<unsigned char>(bytes[16]) == 3);  // W = 3
    std::filesystem::remove(path);
}

TEST_CASE("malformed containers fail with precise byte offsets") {
    FrameSequence seq;
    seq.height = 2;
    seq.width = 2;
    seq.frames = {Tensor({2, 2}, {0.5, 0.25, 0.125, 1.0})};
    const std::string path = temp_path("mcfr_bad.mcfr");
    write_frames(path, seq);
    const std::string good = read_file(path);

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_frames(temp_path("does_not_exist.mcfr")), FormatError);
    }
    SUBCASE("truncated header") {
        write_file(path, good.substr(0, 10));
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 10);
            CHECK(std::string(e.what()).find("10 byte(s) missing") != std::string::npos);
        }
    }
    SUBCASE("bad magic") {
        std::string bad = good;
        bad[0] = 'X';
        write_file(path, bad);
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 0);
            CHECK(std::string(e.what()).find("magic") != std::string::npos);
        }
    }
    SUBCASE("big-endian version field is called out explicitly") {
        std::string bad = good;
        bad[4] = 0;
        bad[5] = 1;  // big-endian 1 reads as 256
        write_file(path, bad);
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 4);
            CHECK(std::string(e.what()).find("big-endian") != std::string::npos);
            CHECK(std::string(e.what()).find("little-endian") != std::string::npos);
        }
    }
    SUBCASE("unknown version") {
        std::string bad = good;
        bad[4] = 9;
        write_file(path, bad);
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 4);
            CHECK(std::string(e.what()).find("version 9") != std::string::npos);
        }
    }
    SUBCASE("reserved field must be zero") {
        std::string bad = good;
        bad[6] = 1;
        write_file(path, bad);
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 6);
        }
    }
    SUBCASE("zero extents") {
        std::string bad = good;
        bad[8] = 0;  // T = 0
        write_file(path, bad);
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 8);
        }
    }
    SUBCASE("truncated payload names the missing byte count") {
        write_file(path, good.substr(0, good.size() - 5));
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == static_cast<long long>(good.size() - 5));
            CHECK(std::string(e.what()).find("5 byte(s) missing") != std::string::npos);
        }
    }
    SUBCASE("trailing bytes are rejected") {
        write_file(path, good + "xy");
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == static_cast<long long>(good.size()));
            CHECK(std::string(e.what()).find("2 trailing byte(s)") != std::string::npos);
        }
    }
    SUBCASE("non-finite payload values are rejected at their offset") {
        std::string bad = good;
        // second value (offset 20 + 8) = +inf, little-endian
        const unsigned char inf[8] = {0, 0, 0, 0, 0, 0, 0xf0, 0x7f};
        for (int i = 0; i < 8; ++i) bad[28 + i] = static_cast<char>(inf[i]);
        write_file(path, bad);
        try {
            read_frames(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 28);
            CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("quantile uses the sorted-index rule") {
    std::vector<double> v = {5, 1, 3, 2, 4};  // sorted: 1 2 3 4 5
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 0.25) == 2.0);  // floor(0.25 * 4) = 1
    CHECK(quantile(v, 0.5) == 3.0);
    CHECK(quantile(v, 0.75) == 4.0);
    CHECK(quantile(v, 1.0) == 5.0);
    CHECK(quantile({7.0}, 0.5) == 7.0);
    CHECK_THROWS_AS(quantile({}, 0.5), ContractError);
    CHECK_THROWS_AS(quantile({1.0}, 1.5), ContractError);
}

TEST_CASE("thresholds come from strictly positive training pixels") {
    FrameSequence seq;
    seq.height = 1;
    seq.width = 8;
    seq.frames = {Tensor({1, 8}, {0.0, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6})};
    std::vector<double> t = derive_thresholds({seq});
    REQUIRE(t.size() == 3);
    // positives sorted: .1 .2 .3 .4 .5 .6 -> quantile idx 1, 2, 3
    CHECK(t[0] == 0.2);
    CHECK(t[1] == 0.3);
    CHECK(t[2] == 0.4);

    FrameSequence zeros;
    zeros.height = 2;
    zeros.width = 2;
    zeros.frames = {Tensor::zeros({2, 2})};
    CHECK_THROWS_AS(derive_thresholds({zeros}), ConfigError);
}

TEST_CASE("dataset save/load round-trip preserves frames and manifest") {
    AdvectionConfig cfg;
    cfg.height = 12;
    cfg.width = 12;
    cfg.length = 6;
    cfg.n_blobs = 2;
    cfg.seed = 31;
    const std::string dir = temp_path("dcbank_ds_test");
    std::filesystem::remove_all(dir);

    DatasetManifest m = save_dataset(dir, cfg, 3, 2, 2, "{\"height\":12}");
    CHECK(m.train_files.size() == 3);
    CHECK(m.val_files.size() == 2);
    CHECK(m.test_files.size() == 2);
    CHECK(m.thresholds.size() == 3);
    CHECK(m.thresholds[0] <= m.thresholds[1]);
    CHECK(m.thresholds[1] <= m.thresholds[2]);

    Dataset d = load_dataset(dir);
    CHECK(d.manifest.seed == 31);
    CHECK(d.manifest.thresholds == m.thresholds);
    REQUIRE(d.train.size() == 3);
    REQUIRE(d.val.size() == 2);
    REQUIRE(d.test.size() == 2);

    // the splits are one seed stream: regenerating reproduces them
    std::vector<FrameSequence> all = generate(cfg, 7);
    CHECK(max_abs_diff(d.train[0].frames[0], all[0].frames[0]) == 0.0);
    CHECK(max_abs_diff(d.val[0].frames[0], all[3].frames[0]) == 0.0);
    CHECK(max_abs_diff(d.test[1].frames[5], all[6].frames[5]) == 0.0);

    std::filesystem::remove_all(dir);
}

TEST_CASE("dataset loading rejects foreign manifests") {
    const std::string dir = temp_path("dcbank_ds_bad");
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_file(dir + "/dataset.json", "{\"format\": \"something-else\"}");
    CHECK_THROWS_AS(load_dataset(dir), FormatError);
    write_file(dir + "/dataset.json", "{not json");
    CHECK_THROWS_AS(load_dataset(dir), FormatError);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_dataset(dir), FormatError);  // missing directory
}

TEST_CASE("per-sequence seeds decorrelate the stream") {
    AdvectionConfig cfg;
    cfg.height = 8;
    cfg.width = 8;
    cfg.length = 2;
    cfg.seed = 5;
    std::vector<FrameSequence> seqs = generate(cfg, 3);
    CHECK(max_abs_diff(seqs[0].frames[0], seqs[1].frames[0]) > 0.0);
    CHECK(max_abs_diff(seqs[1].frames[0], seqs[2].frames[0]) > 0.0);
    // and the derivation is the documented splitmix64 of seed + i * golden
    FrameSequence direct =
        generate_sequence(cfg, splitmix64(cfg.seed + 0x9e3779b97f4a7c15ULL * 2));
    CHECK(max_abs_diff(seqs[1].frames[1], direct.frames[1]) == 0.0);
}
