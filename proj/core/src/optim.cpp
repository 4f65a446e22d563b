#include "dcb/optim.hpp"

#include <cmath>

#include "dcb/errors.hpp"

namespace dcb {

double global_norm(const GradMap& grads) {
    double sq = 0.0;
    for (const auto& [name, g] : grads) {
        for (long long i = 0; i < g.numel(); ++i) {
            const double v = g.at_flat(i);
            sq += v * v;
        }
    }
    return std::sqrt(sq);
}

double clip_global_norm(GradMap& grads, double max_norm) {
    const double norm = global_norm(grads);
    if (max_norm <= 0.0 || norm <= max_norm) return norm;
    const double scale = max_norm / norm;
    for (auto& [name, g] : grads) {
        std::vector<double> data(g.vec());
        for (double& v : data) v *= scale;
        g = Tensor(g.shape(), std::move(data));
    }
    return norm;
}

void AdamW::step(ModelParams& params, const GradMap& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

    for_each_param(params, [&](const std::string& name, Tensor& p) {
        const auto it = grads.find(name);
        const Tensor* g = it == grads.end() ? nullptr : &it->second;
        if (g != nullptr && !g->same_shape(p)) {
            throw DimensionError("AdamW: gradient for '" + name + "' has a different shape");
        }
        auto& m = m_[name];
        auto& v = v_[name];
        const auto n = static_cast<size_t>(p.numel());
        if (m.empty()) {
            m.assign(n, 0.0);
            v.assign(n, 0.0);
        }
        std::vector<double> out(p.vec());
        for (size_t i = 0; i < n; ++i) {
            const double gi = g != nullptr ? g->at_flat(static_cast<long long>(i)) : 0.0;
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            out[i] -= cfg_.lr * (m_hat / (std::sqrt(v_hat) + cfg_.eps) +
                                 cfg_.weight_decay * out[i]);
        }
        p = Tensor(p.shape(), std::move(out));
    });
}

}  // namespace dcb
