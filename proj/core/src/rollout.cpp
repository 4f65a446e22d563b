#include "dcb/rollout.hpp"

#include <string>

#include "dcb/errors.hpp"

namespace dcb {

namespace {

RolloutResult run_impl(const ToyBackbone& backbone, const ModelParams& params, MemoryBank& bank,
                       const std::vector<Tensor>& context, const std::vector<Tensor>* targets,
                       const RolloutOptions& opt) {
    const BackboneConfig& bc = backbone.config();
    if (opt.n_steps <= 0) throw ConfigError("rollout: n_steps must be positive");
    if (static_cast<int>(context.size()) < bc.window) {
        throw ConfigError("rollout: need at least " + std::to_string(bc.window) +
                          " context frames, got " + std::to_string(context.size()));
    }
    if (!bank.empty()) throw ContractError("rollout: bank must be empty at entry");
    if (bank.capacity() < opt.n_steps) {
        throw CapacityError("rollout: bank capacity " + std::to_string(bank.capacity()) +
                            " < n_steps " + std::to_string(opt.n_steps));
    }
    if ((opt.teacher_forcing || opt.audit_prop1) && targets == nullptr) {
        throw ContractError("rollout: teacher forcing / prop1 audit require targets");
    }
    const int horizon = opt.n_steps * bc.step;
    if (targets != nullptr && static_cast<int>(targets->size()) < horizon) {
        throw DimensionError("rollout: " + std::to_string(horizon) + " target frames needed, got " +
                             std::to_string(targets->size()));
    }

    bank.set_pos_table(params.pos_table);

    // Free-running timeline: context then own predictions. The ground-truth
    // timeline (context then targets) drives teacher forcing and the audit.
    std::vector<Tensor> timeline = context;
    std::vector<Tensor> truth;
    if (targets != nullptr) {
        truth = context;
        truth.insert(truth.end(), targets->begin(), targets->end());
    }

    RolloutResult result;
    result.frames.reserve(static_cast<size_t>(horizon));
    result.trace.steps.reserve(static_cast<size_t>(opt.n_steps));

    for (int r = 0; r < opt.n_steps; ++r) {
        bank.set_access_tag(r);
        const size_t window_end = context.size() + static_cast<size_t>(r) * bc.step;
        const std::vector<Tensor>& source = opt.teacher_forcing ? truth : timeline;
        std::vector<Tensor> window(source.begin() + (window_end - bc.window),
                                   source.begin() + window_end);

        RolloutStep step;
        step.index = r;
        step.prior = backbone.encode(window, params.backbone);
        auto [posterior, diag] = dcbank_apply(step.prior, bank, params.dcbank, opt.correction);
        step.posterior = posterior;
        step.diag = std::move(diag);
        step.frames = backbone.decode(step.posterior, params.backbone);

        if (opt.audit_prop1) {
            std::vector<Tensor> true_window(truth.begin() + (window_end - bc.window),
                                            truth.begin() + window_end);
            Tensor z_target = backbone.encode(true_window, params.backbone);
            step.diag.prop1 = prop1_check(step.posterior, step.prior, z_target);
        }

        bank.write(step.posterior, r);
        for (const Tensor& f : step.frames) {
            timeline.push_back(f);
            result.frames.push_back(f);
        }
        result.trace.steps.push_back(std::move(step));
    }
    return result;
}

}  // namespace

RolloutResult run(const ToyBackbone& backbone, const ModelParams& params, MemoryBank& bank,
                  const std::vector<Tensor>& context, const RolloutOptions& opt) {
    return run_impl(backbone, params, bank, context, nullptr, opt);
}

RolloutResult run_with_targets(const ToyBackbone& backbone, const ModelParams& params,
                               MemoryBank& bank, const std::vector<Tensor>& context,
                               const std::vector<Tensor>& targets, const RolloutOptions& opt) {
    return run_impl(backbone, params, bank, context, &targets, opt);
}

}  // namespace dcb
