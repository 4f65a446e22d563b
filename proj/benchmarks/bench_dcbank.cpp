// Microbenchmarks for the hot paths: one correction step at varying memory
// depth, a full rollout, synthetic-frame generation, the gradient pass of
// one training sequence, and the SSIM metric.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dcb/backbone.hpp"
#include "dcb/dcbank.hpp"
#include "dcb/memory_bank.hpp"
#include "dcb/metrics.hpp"
#include "dcb/params.hpp"
#include "dcb/rollout.hpp"
#include "dcb/synth.hpp"
#include "dcb/trainer.hpp"

namespace {

dcb::BackboneConfig bench_backbone() {
    dcb::BackboneConfig bc;
    bc.height = 32;
    bc.width = 32;
    bc.patch = 4;
    bc.window = 2;
    bc.step = 1;
    bc.feature_dim = 16;
    return bc;
}

dcb::ModelParams bench_params(const dcb::ToyBackbone& backbone, int capacity) {
    dcb::ModelDims dims;
    dims.feature_dim = backbone.config().feature_dim;
    dims.encode_cols = backbone.encode_cols();
    dims.decode_cols = backbone.decode_cols();
    dims.capacity = capacity;
    dcb::ModelParams p = dcb::init_params(dims, 1);
    std::mt19937_64 rng(99);
    dcb::for_each_param(p, [&](const std::string&, dcb::Tensor& t) {
        t = dcb::Tensor::uniform(t.shape(), -0.1, 0.1, rng);
    });
    return p;
}

std::vector<dcb::Tensor> bench_frames(int n) {
    dcb::AdvectionConfig cfg;
    cfg.height = 32;
    cfg.width = 32;
    cfg.length = n;
    return dcb::generate_sequence(cfg, 7).frames;
}

void BM_DcbankApply(benchmark::State& state) {
    const int entries = static_cast<int>(state.range(0));
    dcb::ToyBackbone backbone(bench_backbone());
    dcb::ModelParams params = bench_params(backbone, entries);
    std::mt19937_64 rng(3);
    dcb::MemoryBank bank(params.pos_table);
    const int l = backbone.tokens(), d = backbone.config().feature_dim;
    for (int i = 0; i < entries; ++i) {
        bank.write(dcb::Tensor::uniform({l, d}, -1.0, 1.0, rng), i);
    }
    dcb::Tensor z_prior = dcb::Tensor::uniform({l, d}, -1.0, 1.0, rng);
    for (auto _ : state) {
        auto [posterior, diag] = dcb::dcbank_apply(z_prior, bank, params.dcbank);
        benchmark::DoNotOptimize(posterior);
    }
}
BENCHMARK(BM_DcbankApply)->Arg(1)->Arg(5)->Arg(10)->Arg(20);

void BM_Rollout20(benchmark::State& state) {
    dcb::ToyBackbone backbone(bench_backbone());
    dcb::ModelParams params = bench_params(backbone, 20);
    std::vector<dcb::Tensor> context = bench_frames(5);
    dcb::RolloutOptions opt;
    opt.n_steps = 20;
    for (auto _ : state) {
        dcb::MemoryBank bank(params.pos_table);
        dcb::RolloutResult r = dcb::run(backbone, params, bank, context, opt);
        benchmark::DoNotOptimize(r.frames);
    }
}
BENCHMARK(BM_Rollout20);

void BM_GenerateSequence(benchmark::State& state) {
    dcb::AdvectionConfig cfg;
    cfg.height = 32;
    cfg.width = 32;
    cfg.length = 25;
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dcb::generate_sequence(cfg, seed++));
    }
}
BENCHMARK(BM_GenerateSequence);

void BM_SequenceGradients(benchmark::State& state) {
    dcb::ToyBackbone backbone(bench_backbone());
    dcb::ModelParams params = bench_params(backbone, 20);
    dcb::FrameSequence seq;
    seq.height = 32;
    seq.width = 32;
    seq.frames = bench_frames(25);
    dcb::TrainConfig cfg;
    cfg.context_frames = 5;
    cfg.n_steps = 20;
    for (auto _ : state) {
        auto [loss, grads] = dcb::sequence_gradients(backbone, params, seq, cfg);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_SequenceGradients);

void BM_SsimFrame(benchmark::State& state) {
    std::mt19937_64 rng(11);
    dcb::Tensor a = dcb::Tensor::uniform({32, 32}, 0.0, 1.0, rng);
    dcb::Tensor b = dcb::Tensor::uniform({32, 32}, 0.0, 1.0, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dcb::ssim_frame(a, b));
    }
}
BENCHMARK(BM_SsimFrame);

}  // namespace

BENCHMARK_MAIN();
