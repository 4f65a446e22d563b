#include "dcb/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include "dcb/errors.hpp"
#include "dcb/loss.hpp"
#include "dcb/synth.hpp"
#include "dcb/tape.hpp"

namespace dcb {

namespace {

struct SplitSequence {
    std::vector<Tensor> context;
    std::vector<Tensor> targets;
};

SplitSequence split_sequence(const FrameSequence& seq, const ToyBackbone& backbone,
                             const TrainConfig& cfg) {
    const int horizon = cfg.n_steps * backbone.config().step;
    if (seq.length() < cfg.context_frames + horizon) {
        throw DimensionError("sequence has " + std::to_string(seq.length()) + " frames, need " +
                             std::to_string(cfg.context_frames + horizon));
    }
    SplitSequence s;
    s.context.assign(seq.frames.begin(), seq.frames.begin() + cfg.context_frames);
    s.targets.assign(seq.frames.begin() + cfg.context_frames,
                     seq.frames.begin() + cfg.context_frames + horizon);
    return s;
}

}  // namespace

std::pair<double, GradMap> sequence_gradients(const ToyBackbone& backbone,
                                              const ModelParams& params,
                                              const FrameSequence& seq, const TrainConfig& cfg) {
    SplitSequence s = split_sequence(seq, backbone, cfg);
    Tape tape;
    TapeScope scope(tape);
    ModelParams tp = tracked(params, tape);
    MemoryBank bank(tp.pos_table);
    RolloutOptions opt;
    opt.n_steps = cfg.n_steps;
    opt.correction = cfg.correction;
    RolloutResult result = run(backbone, tp, bank, s.context, opt);
    Tensor loss = sequence_mse(result.frames, s.targets);
    Gradients grads = tape.backward(loss);
    GradMap map;
    for_each_param(tp, [&](const std::string& name, const Tensor& t) {
        map.emplace(name, grads.of(t));
    });
    return {loss.value(), std::move(map)};
}

double sequence_loss(const ToyBackbone& backbone, const ModelParams& params,
                     const FrameSequence& seq, const TrainConfig& cfg) {
    SplitSequence s = split_sequence(seq, backbone, cfg);
    MemoryBank bank(params.pos_table);
    RolloutOptions opt;
    opt.n_steps = cfg.n_steps;
    opt.correction = cfg.correction;
    RolloutResult result = run(backbone, params, bank, s.context, opt);
    return mse_value(result.frames, s.targets);
}

namespace {

/// Loss + gradients for batch members [those i with i % workers == worker],
/// written into per-index slots so the merge order is independent of the
/// thread schedule.
void batch_worker(const ToyBackbone& backbone, const ModelParams& params,
                  const std::vector<FrameSequence>& train, const std::vector<size_t>& batch,
                  const TrainConfig& cfg, size_t worker, size_t workers,
                  std::vector<std::pair<double, GradMap>>& slots, std::exception_ptr& error) {
    try {
        for (size_t i = worker; i < batch.size(); i += workers) {
            slots[i] = sequence_gradients(backbone, params, train[batch[i]], cfg);
        }
    } catch (...) {
        error = std::current_exception();
    }
}

}  // namespace

FitResult fit(ModelParams& params, const ToyBackbone& backbone,
              const std::vector<FrameSequence>& train, const std::vector<FrameSequence>& val,
              const TrainConfig& cfg) {
    if (train.empty()) throw ConfigError("fit: empty training set");
    if (cfg.epochs < 0 || cfg.batch_size <= 0 || cfg.threads <= 0) {
        throw ConfigError("fit: bad epochs/batch_size/threads");
    }

    AdamW optimizer(cfg.optim);
    FitResult result;
    result.log.reserve(static_cast<size_t>(cfg.epochs));

    std::vector<size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 shuffle_rng(splitmix64(cfg.seed + static_cast<uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        size_t seen = 0;
        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
            const std::vector<size_t> batch(order.begin() + start, order.begin() + end);

            std::vector<std::pair<double, GradMap>> slots(batch.size());
            const size_t workers =
                std::min(static_cast<size_t>(cfg.threads), batch.size());
            try {
                if (workers <= 1) {
                    std::exception_ptr err;
                    batch_worker(backbone, params, train, batch, cfg, 0, 1, slots, err);
                    if (err) std::rethrow_exception(err);
                } else {
                    std::vector<std::exception_ptr> errors(workers);
                    std::vector<std::thread> pool;
                    pool.reserve(workers);
                    for (size_t w = 0; w < workers; ++w) {
                        pool.emplace_back(batch_worker, std::cref(backbone), std::cref(params),
                                          std::cref(train), std::cref(batch), std::cref(cfg), w,
                                          workers, std::ref(slots), std::ref(errors[w]));
                    }
                    for (auto& t : pool) t.join();
                    for (const auto& err : errors) {
                        if (err) std::rethrow_exception(err);
                    }
                }
            } catch (const ContractError& e) {
                // Checked tensors turn NaN/Inf into ContractError mid-forward;
                // surface it as divergence at this optimizer step.
                throw TrainingError(std::string("training diverged: ") + e.what(),
                                    optimizer.step_count() + 1);
            }

            // Merge in batch-index order so results never depend on the
            // thread count or schedule.
            double batch_loss = 0.0;
            GradMap merged;
            for (size_t i = 0; i < slots.size(); ++i) {
                batch_loss += slots[i].first;
                for (auto& [name, g] : slots[i].second) {
                    auto it = merged.find(name);
                    if (it == merged.end()) {
                        merged.emplace(name, g);
                    } else {
                        std::vector<double> sum(it->second.vec());
                        for (long long k = 0; k < g.numel(); ++k) sum[static_cast<size_t>(k)] += g.at_flat(k);
                        it->second = Tensor(g.shape(), std::move(sum));
                    }
                }
            }
            const double inv = 1.0 / static_cast<double>(slots.size());
            batch_loss *= inv;
            for (auto& [name, g] : merged) {
                std::vector<double> scaled(g.vec());
                for (double& v : scaled) v *= inv;
                g = Tensor(g.shape(), std::move(scaled));
            }

            if (!std::isfinite(batch_loss) || batch_loss > cfg.divergence_limit) {
                throw TrainingError("training diverged: batch loss " + std::to_string(batch_loss),
                                    optimizer.step_count() + 1);
            }

            clip_global_norm(merged, cfg.clip_norm);
            optimizer.step(params, merged);
            ++result.optimizer_steps;
            epoch_loss += batch_loss * static_cast<double>(slots.size());
            seen += slots.size();
        }

        EpochLog log;
        log.epoch = epoch;
        log.train_mse = epoch_loss / static_cast<double>(seen);
        double val_loss = 0.0;
        for (const FrameSequence& seq : val) {
            val_loss += sequence_loss(backbone, params, seq, cfg);
        }
        log.val_mse = val.empty() ? 0.0 : val_loss / static_cast<double>(val.size());
        log.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.push_back(log);
    }
    return result;
}

}  // namespace dcb
