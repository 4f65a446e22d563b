#include "dcb/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "dcb/errors.hpp"
#include "dcb/tape.hpp"

namespace dcb {

namespace {

Tensor poke(const Tensor& t, long long idx, double delta) {
    std::vector<double> data(t.vec());
    data[static_cast<size_t>(idx)] += delta;
    return Tensor(t.shape(), std::move(data));
}

/// params with the named tensor replaced.
ModelParams with_param(const ModelParams& params, const std::string& target, const Tensor& value) {
    ModelParams out = params;
    for_each_param(out, [&](const std::string& name, Tensor& t) {
        if (name == target) t = value;
    });
    return out;
}

}  // namespace

GradCheckReport fd_gradcheck(const LossFn& loss_fn, const ModelParams& params, double eps,
                             double tolerance, int coords_per_tensor, uint64_t seed) {
    if (eps <= 0.0 || tolerance <= 0.0 || coords_per_tensor <= 0) {
        throw ContractError("fd_gradcheck: eps, tolerance, coords_per_tensor must be positive");
    }

    // Analytic pass: one taped forward + backward on tracked copies.
    Tape tape;
    std::vector<std::pair<std::string, Tensor>> analytic;
    {
        TapeScope scope(tape);
        ModelParams tp = tracked(params, tape);
        Tensor loss = loss_fn(tp);
        Gradients grads = tape.backward(loss);
        for_each_param(tp, [&](const std::string& name, const Tensor& t) {
            analytic.emplace_back(name, grads.of(t));
        });
    }

    std::mt19937_64 rng(seed);
    GradCheckReport report;
    report.tolerance = tolerance;

    for (const auto& [name, grad] : analytic) {
        GradCheckParam row;
        row.name = name;

        const Tensor* current = nullptr;
        for_each_param(params, [&](const std::string& n, const Tensor& t) {
            if (n == name) current = &t;
        });
        const long long n = current->numel();

        std::vector<long long> coords(static_cast<size_t>(n));
        std::iota(coords.begin(), coords.end(), 0);
        if (n > coords_per_tensor) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(static_cast<size_t>(coords_per_tensor));
            std::sort(coords.begin(), coords.end());
        }

        for (long long idx : coords) {
            const double plus = loss_fn(with_param(params, name, poke(*current, idx, eps))).value();
            const double minus =
                loss_fn(with_param(params, name, poke(*current, idx, -eps))).value();
            const double numeric = (plus - minus) / (2.0 * eps);
            const double a = grad.at_flat(idx);
            const double rel =
                std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            ++row.coords_checked;
            if (rel > row.max_rel_err) {
                row.max_rel_err = rel;
                row.worst_index = idx;
                row.analytic = a;
                row.numeric = numeric;
            }
        }
        report.max_rel_err = std::max(report.max_rel_err, row.max_rel_err);
        report.params.push_back(std::move(row));
    }
    report.passed = report.max_rel_err < tolerance;
    return report;
}

}  // namespace dcb
