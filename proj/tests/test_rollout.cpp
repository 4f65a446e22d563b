// Rollout protocol tests: windowing, write-back discipline, causality,
// determinism, teacher forcing, and the error-bookkeeping audit.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "dcb/backbone.hpp"
#include "dcb/errors.hpp"
#include "dcb/ops.hpp"
#include "dcb/params.hpp"
#include "dcb/rollout.hpp"
#include "dcb/synth.hpp"

using namespace dcb;

namespace {

BackboneConfig small_config() {
    BackboneConfig bc;
    bc.height = 8;
    bc.width = 8;
    bc.patch = 4;
    bc.window = 2;
    bc.step = 1;
    bc.feature_dim = 8;
    return bc;
}

ModelDims dims_for(const ToyBackbone& backbone, int capacity) {
    ModelDims d;
    d.feature_dim = backbone.config().feature_dim;
    d.encode_cols = backbone.encode_cols();
    d.decode_cols = backbone.decode_cols();
    d.capacity = capacity;
    return d;
}

// Fully random parameters: every tensor live (no zero or identity inits), so
// every computation path carries signal.
ModelParams random_model(const ModelDims& dims, uint64_t seed) {
    ModelParams p = init_params(dims, seed);
    std::mt19937_64 rng(seed ^ 0xabcdef);
    for_each_param(p, [&](const std::string&, Tensor& t) {
        const double bound = std::sqrt(1.0 / t.extent(0));
        t = Tensor::uniform(t.shape(), -bound, bound, rng);
    });
    return p;
}

std::vector<Tensor> random_frames(int n, int h, int w, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Tensor> out;
    for (int i = 0; i < n; ++i) out.push_back(Tensor::uniform({h, w}, 0.0, 1.0, rng));
    return out;
}

}  // namespace

TEST_CASE("first step is a bitwise bypass regardless of mode") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 4), 1);
    std::vector<Tensor> context = random_frames(3, 8, 8, 2);

    RolloutOptions corrected;
    corrected.n_steps = 1;
    RolloutOptions bypass;
    bypass.n_steps = 1;
    bypass.correction.mode = CorrectionMode::kBypass;

    MemoryBank bank_a(4, 8), bank_b(4, 8);
    RolloutResult a = run(backbone, params, bank_a, context, corrected);
    RolloutResult b = run(backbone, params, bank_b, context, bypass);

    REQUIRE(a.frames.size() == 1);
    CHECK(max_abs_diff(a.frames[0], b.frames[0]) == 0.0);
    CHECK(a.trace.steps[0].diag.bypassed);
    CHECK(max_abs_diff(a.trace.steps[0].posterior, a.trace.steps[0].prior) == 0.0);
}

TEST_CASE("worked example: 5 context frames, 20 steps, window 2, step 1") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 20), 3);
    std::vector<Tensor> context = random_frames(5, 8, 8, 4);

    RolloutOptions opt;
    opt.n_steps = 20;
    MemoryBank bank(20, 8);
    RolloutResult result = run(backbone, params, bank, context, opt);

    CHECK(result.frames.size() == 20);
    CHECK(result.trace.steps.size() == 20);
    CHECK(bank.size() == 20);
    for (int r = 0; r < 20; ++r) {
        CHECK(bank.entry(r).rollout_index == r);
        CHECK(result.trace.steps[static_cast<size_t>(r)].index == r);
    }

    // Step 0 bypasses (no reads); steps 1..19 read reference + view + drift.
    const auto& log = bank.access_log();
    CHECK(log.size() == 3 * 19);
    int reads_per_step[20] = {0};
    for (const MemoryAccess& a : log) {
        REQUIRE(a.step_tag >= 0);
        REQUIRE(a.step_tag < 20);
        ++reads_per_step[a.step_tag];
    }
    CHECK(reads_per_step[0] == 0);
    for (int r = 1; r < 20; ++r) CHECK(reads_per_step[r] == 3);
}

TEST_CASE("causality: no read ever touches the current or a future step") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 20), 5);
    std::vector<Tensor> context = random_frames(5, 8, 8, 6);

    for (CorrectionMode mode :
         {CorrectionMode::kCorrected, CorrectionMode::kNoCle, CorrectionMode::kNoCamr,
          CorrectionMode::kNoContent, CorrectionMode::kPassive}) {
        RolloutOptions opt;
        opt.n_steps = 20;
        opt.correction.mode = mode;
        MemoryBank bank(20, 8);
        (void)run(backbone, params, bank, context, opt);
        for (const MemoryAccess& a : bank.access_log()) {
            for (int idx : a.rollout_indices) {
                CHECK(idx < a.step_tag);
            }
        }
    }
}

TEST_CASE("repeated runs are bit identical") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 8), 7);
    std::vector<Tensor> context = random_frames(4, 8, 8, 8);

    RolloutOptions opt;
    opt.n_steps = 8;
    MemoryBank bank_a(8, 8), bank_b(8, 8);
    RolloutResult a = run(backbone, params, bank_a, context, opt);
    RolloutResult b = run(backbone, params, bank_b, context, opt);
    for (size_t i = 0; i < a.frames.size(); ++i) {
        CHECK(max_abs_diff(a.frames[i], b.frames[i]) == 0.0);
    }
    for (size_t r = 0; r < a.trace.steps.size(); ++r) {
        CHECK(max_abs_diff(a.trace.steps[r].posterior, b.trace.steps[r].posterior) == 0.0);
    }
}

TEST_CASE("an identity decoder of the last frame is a fixed point under bypass") {
    // e_proj = [0; I] picks the most recent frame's patch pixels; d_proj = I
    // writes them back. Every prediction then equals the last context frame.
    BackboneConfig bc = small_config();
    bc.feature_dim = 16;  // P^2 * step
    ToyBackbone backbone(bc);
    ModelParams params = random_model(dims_for(backbone, 6), 9);

    std::vector<double> e(static_cast<size_t>(32) * 16, 0.0);
    for (int j = 0; j < 16; ++j) e[static_cast<size_t>(16 + j) * 16 + j] = 1.0;
    params.backbone.e_proj = Tensor({32, 16}, std::move(e));
    std::vector<double> dmat(static_cast<size_t>(16) * 16, 0.0);
    for (int j = 0; j < 16; ++j) dmat[static_cast<size_t>(j) * 16 + j] = 1.0;
    params.backbone.d_proj = Tensor({16, 16}, std::move(dmat));

    std::vector<Tensor> context = random_frames(3, 8, 8, 10);
    RolloutOptions opt;
    opt.n_steps = 6;
    opt.correction.mode = CorrectionMode::kBypass;
    MemoryBank bank(6, 16);
    RolloutResult result = run(backbone, params, bank, context, opt);
    for (const Tensor& f : result.frames) {
        CHECK(max_abs_diff(f, context.back()) == 0.0);
    }
}

TEST_CASE("teacher forcing reproduces a manual replay over ground truth") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 6), 11);
    std::vector<Tensor> context = random_frames(4, 8, 8, 12);
    std::vector<Tensor> targets = random_frames(6, 8, 8, 13);

    RolloutOptions opt;
    opt.n_steps = 6;
    opt.teacher_forcing = true;
    MemoryBank bank(6, 8);
    RolloutResult result = run_with_targets(backbone, params, bank, context, targets, opt);

    std::vector<Tensor> truth = context;
    truth.insert(truth.end(), targets.begin(), targets.end());
    MemoryBank replay(6, 8);
    replay.set_pos_table(params.pos_table);
    for (int r = 0; r < 6; ++r) {
        std::vector<Tensor> window(truth.begin() + 2 + r, truth.begin() + 4 + r);
        Tensor prior = backbone.encode(window, params.backbone);
        CHECK(max_abs_diff(prior, result.trace.steps[static_cast<size_t>(r)].prior) == 0.0);
        auto [post, diag] = dcbank_apply(prior, replay, params.dcbank, opt.correction);
        CHECK(max_abs_diff(post, result.trace.steps[static_cast<size_t>(r)].posterior) == 0.0);
        std::vector<Tensor> frames = backbone.decode(post, params.backbone);
        CHECK(max_abs_diff(frames[0], result.frames[static_cast<size_t>(r)]) == 0.0);
        replay.write(post, r);
    }
}

TEST_CASE("teacher forcing and free running agree on the first step only") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 4), 15);
    std::vector<Tensor> context = random_frames(4, 8, 8, 16);
    std::vector<Tensor> targets = random_frames(4, 8, 8, 17);

    RolloutOptions free_run;
    free_run.n_steps = 4;
    RolloutOptions forced = free_run;
    forced.teacher_forcing = true;

    MemoryBank bank_a(4, 8), bank_b(4, 8);
    RolloutResult a = run_with_targets(backbone, params, bank_a, context, targets, free_run);
    RolloutResult b = run_with_targets(backbone, params, bank_b, context, targets, forced);
    CHECK(max_abs_diff(a.frames[0], b.frames[0]) == 0.0);  // same pure-context window
    // afterwards the windows diverge (free running consumes its own output)
    CHECK(max_abs_diff(a.frames[2], b.frames[2]) > 0.0);
}

TEST_CASE("prop1 audit under bypass never changes the error") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 8), 19);
    std::vector<Tensor> context = random_frames(4, 8, 8, 20);
    std::vector<Tensor> targets = random_frames(8, 8, 8, 21);

    RolloutOptions opt;
    opt.n_steps = 8;
    opt.correction.mode = CorrectionMode::kBypass;
    opt.audit_prop1 = true;
    MemoryBank bank(8, 8);
    RolloutResult result = run_with_targets(backbone, params, bank, context, targets, opt);
    for (const RolloutStep& s : result.trace.steps) {
        REQUIRE(s.diag.prop1.has_value());
        CHECK(s.diag.prop1->err_after == s.diag.prop1->err_before);
        CHECK_FALSE(s.diag.prop1->condition_holds);
    }
}

TEST_CASE("prop1 audit bookkeeping is exact on the corrected path") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 8), 23);
    std::vector<Tensor> context = random_frames(4, 8, 8, 24);
    std::vector<Tensor> targets = random_frames(8, 8, 8, 25);

    RolloutOptions opt;
    opt.n_steps = 8;
    opt.audit_prop1 = true;
    MemoryBank bank(8, 8);
    RolloutResult result = run_with_targets(backbone, params, bank, context, targets, opt);
    for (const RolloutStep& s : result.trace.steps) {
        REQUIRE(s.diag.prop1.has_value());
        const Prop1Report& p = *s.diag.prop1;
        const double expanded = p.err_before + 2.0 * p.inner + 2.0 * p.half_norm_sq;
        CHECK(expanded == doctest::Approx(p.err_after).epsilon(1e-10));
        if (p.condition_holds) CHECK(p.err_after < p.err_before);
    }
}

TEST_CASE("rollout preconditions") {
    ToyBackbone backbone(small_config());
    ModelParams params = random_model(dims_for(backbone, 4), 27);
    std::vector<Tensor> context = random_frames(3, 8, 8, 28);
    RolloutOptions opt;
    opt.n_steps = 4;

    SUBCASE("bank must be empty") {
        MemoryBank bank(4, 8);
        bank.write(Tensor::full({4, 8}, 0.5), 0);
        CHECK_THROWS_AS(run(backbone, params, bank, context, opt), ContractError);
    }
    SUBCASE("capacity must cover the horizon") {
        MemoryBank bank(3, 8);
        CHECK_THROWS_AS(run(backbone, params, bank, context, opt), CapacityError);
    }
    SUBCASE("n_steps must be positive") {
        MemoryBank bank(4, 8);
        RolloutOptions bad = opt;
        bad.n_steps = 0;
        CHECK_THROWS_AS(run(backbone, params, bank, context, bad), ConfigError);
    }
    SUBCASE("context must cover the window") {
        MemoryBank bank(4, 8);
        std::vector<Tensor> short_ctx = random_frames(1, 8, 8, 29);
        CHECK_THROWS_AS(run(backbone, params, bank, short_ctx, opt), ConfigError);
    }
    SUBCASE("teacher forcing requires targets") {
        MemoryBank bank(4, 8);
        RolloutOptions forced = opt;
        forced.teacher_forcing = true;
        CHECK_THROWS_AS(run(backbone, params, bank, context, forced), ContractError);
    }
    SUBCASE("prop1 audit requires targets") {
        MemoryBank bank(4, 8);
        RolloutOptions audit = opt;
        audit.audit_prop1 = true;
        CHECK_THROWS_AS(run(backbone, params, bank, context, audit), ContractError);
    }
    SUBCASE("targets must cover the horizon") {
        MemoryBank bank(4, 8);
        std::vector<Tensor> targets = random_frames(3, 8, 8, 30);
        RolloutOptions audit = opt;
        audit.audit_prop1 = true;
        CHECK_THROWS_AS(run_with_targets(backbone, params, bank, context, targets, audit),
                        DimensionError);
    }
}

TEST_CASE("multi-frame decode steps fill the horizon in order") {
    BackboneConfig bc = small_config();
    bc.step = 2;  // decode two frames per latent
    bc.feature_dim = 8;
    ToyBackbone backbone(bc);
    ModelParams params = random_model(dims_for(backbone, 3), 31);
    std::vector<Tensor> context = random_frames(4, 8, 8, 32);

    RolloutOptions opt;
    opt.n_steps = 3;
    MemoryBank bank(3, 8);
    RolloutResult result = run(backbone, params, bank, context, opt);
    CHECK(result.frames.size() == 6);
    for (const RolloutStep& s : result.trace.steps) CHECK(s.frames.size() == 2);
    // decoded frames land in result.frames in step order
    CHECK(max_abs_diff(result.frames[4], result.trace.steps[2].frames[0]) == 0.0);
    CHECK(max_abs_diff(result.frames[5], result.trace.steps[2].frames[1]) == 0.0);
}

TEST_CASE("rollout over synthetic data reduces to finite frames") {
    AdvectionConfig cfg;
    cfg.height = 8;
    cfg.width = 8;
    cfg.length = 10;
    cfg.n_blobs = 1;
    FrameSequence seq = generate_sequence(cfg, 99);

    BackboneConfig bc = small_config();
    ToyBackbone backbone(bc);
    ModelParams params = random_model(dims_for(backbone, 5), 33);
    std::vector<Tensor> context(seq.frames.begin(), seq.frames.begin() + 5);

    RolloutOptions opt;
    opt.n_steps = 5;
    MemoryBank bank(5, 8);
    RolloutResult result = run(backbone, params, bank, context, opt);
    CHECK(result.frames.size() == 5);
    for (const Tensor& f : result.frames) {
        CHECK(f.shape() == Shape{8, 8});
    }
}
