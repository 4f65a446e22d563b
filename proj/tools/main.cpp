// dcbank: dataset generation, training, evaluation, ablations, and audits
// for the drift-corrective memory bank, from flat-JSON run configs.
//
// Exit codes: 0 success, 1 internal error, 2 config error, 3 data/format
// error, 4 check failure (gradcheck / theorem audit), 5 training divergence.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcb/checkpoint.hpp"
#include "dcb/config.hpp"
#include "dcb/dataset.hpp"
#include "dcb/errors.hpp"
#include "dcb/gradcheck.hpp"
#include "dcb/loss.hpp"
#include "dcb/metrics.hpp"
#include "dcb/report.hpp"
#include "dcb/rollout.hpp"
#include "dcb/tape.hpp"
#include "dcb/trainer.hpp"
#include "dcb/version.hpp"

namespace {

using dcb::RunConfig;
using nlohmann::json;

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCheckFailed = 4;
constexpr int kExitDiverged = 5;

struct ModeOverride {
    std::string name;  // empty = keep config value
    void apply(RunConfig& cfg) const {
        if (name.empty()) return;
        const auto mode = dcb::parse_mode(name);
        if (!mode) throw dcb::ConfigError("unknown mode '" + name + "'");
        cfg.mode = *mode;
    }
};

dcb::TrainConfig train_config(const RunConfig& cfg) {
    dcb::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.threads = cfg.threads;
    tc.context_frames = cfg.context_frames;
    tc.n_steps = cfg.rollout_steps();
    tc.optim.lr = cfg.lr;
    tc.optim.beta1 = cfg.beta1;
    tc.optim.beta2 = cfg.beta2;
    tc.optim.eps = cfg.eps;
    tc.optim.weight_decay = cfg.weight_decay;
    tc.clip_norm = cfg.clip_norm;
    tc.seed = cfg.seed;
    tc.correction = dcb::dcbank_options(cfg);
    return tc;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
    RunConfig cfg = RunConfig::load(config_path);
    const dcb::DatasetManifest m =
        dcb::save_dataset(out_dir, dcb::advection_config(cfg), cfg.sequences_train,
                          cfg.sequences_val, cfg.sequences_test, cfg.to_json_string());
    std::cout << "wrote " << m.train_files.size() << " train / " << m.val_files.size()
              << " val / " << m.test_files.size() << " test sequences to " << out_dir << "\n";
    std::cout << "thresholds:";
    for (double t : m.thresholds) std::cout << " " << dcb::format_double(t);
    std::cout << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, const ModeOverride& mode, int threads,
              const std::string& run_id, uint64_t seed, bool seed_set) {
    RunConfig cfg = RunConfig::load(config_path);
    mode.apply(cfg);
    if (threads > 0) cfg.threads = threads;
    if (!run_id.empty()) cfg.run_id = run_id;
    if (seed_set) cfg.seed = seed;
    cfg.validate();
    const std::string echo = cfg.to_json_string();

    dcb::Dataset data = dcb::load_dataset(data_dir);
    dcb::ToyBackbone backbone(dcb::backbone_config(cfg));
    dcb::ModelParams params = dcb::init_model(cfg);
    dcb::FitResult fit_result =
        dcb::fit(params, backbone, data.train, data.val, train_config(cfg));

    std::filesystem::create_directories(out_dir);
    dcb::save_checkpoint(out_dir + "/checkpoint.dckp", params, echo);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(fit_result.log.size());
    for (const dcb::EpochLog& e : fit_result.log) {
        rows.push_back({std::to_string(e.epoch), dcb::format_double(e.train_mse),
                        dcb::format_double(e.val_mse), dcb::format_double(e.wall_seconds)});
    }
    dcb::write_csv(out_dir + "/train_log.csv", echo,
                   {"epoch", "train_mse", "val_mse", "wall_seconds"}, rows);

    std::cout << "trained " << dcb::to_string(cfg.mode) << " for " << cfg.epochs << " epochs ("
              << fit_result.optimizer_steps << " steps)";
    if (!fit_result.log.empty()) {
        std::cout << ", train mse " << dcb::format_double(fit_result.log.back().train_mse)
                  << ", val mse " << dcb::format_double(fit_result.log.back().val_mse);
    }
    std::cout << "\n";
    std::cout << "checkpoint: " << out_dir << "/checkpoint.dckp\n";
    return 0;
}

/// Per-lead and aggregate evaluation of a checkpoint on the test split.
int cmd_evaluate(const std::string& checkpoint_path, const std::string& data_dir,
                 const std::string& out_dir, const ModeOverride& mode, double lambda_override,
                 bool lambda_set, const std::string& run_id) {
    dcb::LoadedCheckpoint ckpt = dcb::load_checkpoint(checkpoint_path);
    RunConfig cfg = RunConfig::from_json_string(ckpt.config_echo);
    mode.apply(cfg);
    if (lambda_set) {
        if (lambda_override < 0.0) throw dcb::ConfigError("lambda_drift must be nonnegative");
        cfg.lambda_drift = lambda_override;
        ckpt.params.dcbank.camr.lambda_drift = lambda_override;
    }
    if (!run_id.empty()) cfg.run_id = run_id;
    const std::string echo = cfg.to_json_string();
    const std::string mode_name = dcb::to_string(cfg.mode);

    dcb::Dataset data = dcb::load_dataset(data_dir);
    if (data.test.empty()) throw dcb::ConfigError("dataset has no test split");
    const std::vector<double>& thresholds = data.manifest.thresholds;
    if (thresholds.empty()) throw dcb::ConfigError("dataset manifest has no thresholds");

    dcb::ToyBackbone backbone(dcb::backbone_config(cfg));
    const int n_steps = cfg.rollout_steps();
    const int horizon = n_steps * cfg.step;

    // preds[k] / truth[k]: all test-set frames at lead k (0-based).
    std::vector<std::vector<dcb::Tensor>> preds(static_cast<size_t>(horizon));
    std::vector<std::vector<dcb::Tensor>> truth(static_cast<size_t>(horizon));
    json retrieval = json::array();
    long long prop1_steps = 0, prop1_holds = 0, prop1_reduced = 0, prop1_violations = 0;

    dcb::RolloutOptions opt;
    opt.n_steps = n_steps;
    opt.correction = dcb::dcbank_options(cfg);
    opt.audit_prop1 = true;

    for (size_t si = 0; si < data.test.size(); ++si) {
        const dcb::FrameSequence& seq = data.test[si];
        if (seq.length() < cfg.context_frames + horizon) {
            throw dcb::DimensionError("test sequence " + std::to_string(si) + " too short");
        }
        std::vector<dcb::Tensor> context(seq.frames.begin(),
                                         seq.frames.begin() + cfg.context_frames);
        std::vector<dcb::Tensor> targets(seq.frames.begin() + cfg.context_frames,
                                         seq.frames.begin() + cfg.context_frames + horizon);
        dcb::MemoryBank bank(ckpt.params.pos_table);
        dcb::RolloutResult result =
            dcb::run_with_targets(backbone, ckpt.params, bank, context, targets, opt);

        for (int k = 0; k < horizon; ++k) {
            preds[static_cast<size_t>(k)].push_back(result.frames[static_cast<size_t>(k)]);
            truth[static_cast<size_t>(k)].push_back(targets[static_cast<size_t>(k)]);
        }

        json seq_dump;
        seq_dump["sequence"] = si;
        seq_dump["steps"] = json::array();
        for (const dcb::RolloutStep& step : result.trace.steps) {
            json s;
            s["step"] = step.index;
            s["bypassed"] = step.diag.bypassed;
            if (step.diag.retrieval) {
                const auto& r = *step.diag.retrieval;
                s["weights"] = r.weights.vec();
                s["s_cont"] = r.s_cont.vec();
                s["s_drift"] = r.s_drift.vec();
            }
            if (step.diag.prop1) {
                const auto& p = *step.diag.prop1;
                ++prop1_steps;
                if (p.condition_holds) {
                    ++prop1_holds;
                    if (!(p.err_after < p.err_before)) ++prop1_violations;
                }
                if (p.err_after < p.err_before) ++prop1_reduced;
                s["prop1_condition"] = p.condition_holds;
                s["prop1_err_before"] = p.err_before;
                s["prop1_err_after"] = p.err_after;
            }
            seq_dump["steps"].push_back(std::move(s));
        }
        retrieval.push_back(std::move(seq_dump));
    }

    // Assemble rows: per lead then aggregate, per threshold then averaged.
    std::vector<dcb::MetricRow> rows;
    auto add_row = [&](const std::string& metric, double tau, int lead, double value) {
        rows.push_back({cfg.run_id, mode_name, metric, tau, lead, value});
    };

    std::vector<double> mse_lead(static_cast<size_t>(horizon));
    std::vector<double> csi_m_lead(static_cast<size_t>(horizon));
    std::vector<double> hss_m_lead(static_cast<size_t>(horizon));
    std::vector<double> ssim_lead(static_cast<size_t>(horizon));
    std::vector<double> mae_lead(static_cast<size_t>(horizon));

    for (int k = 0; k < horizon; ++k) {
        const auto& p = preds[static_cast<size_t>(k)];
        const auto& t = truth[static_cast<size_t>(k)];
        double mse_k = 0.0;
        for (size_t i = 0; i < p.size(); ++i) mse_k += dcb::frame_mse(p[i], t[i]);
        mse_k /= static_cast<double>(p.size());
        mse_lead[static_cast<size_t>(k)] = mse_k;
        csi_m_lead[static_cast<size_t>(k)] = dcb::csi_mean(p, t, thresholds);
        hss_m_lead[static_cast<size_t>(k)] = dcb::hss_mean(p, t, thresholds);
        ssim_lead[static_cast<size_t>(k)] = dcb::ssim(p, t);
        mae_lead[static_cast<size_t>(k)] = dcb::mae(p, t);

        for (double tau : thresholds) {
            add_row("csi", tau, k + 1, dcb::csi(dcb::contingency(p, t, tau)));
            add_row("hss", tau, k + 1, dcb::hss(dcb::contingency(p, t, tau)));
        }
        add_row("csi_m", -1.0, k + 1, csi_m_lead[static_cast<size_t>(k)]);
        add_row("hss_m", -1.0, k + 1, hss_m_lead[static_cast<size_t>(k)]);
        add_row("ssim", -1.0, k + 1, ssim_lead[static_cast<size_t>(k)]);
        add_row("mae", -1.0, k + 1, mae_lead[static_cast<size_t>(k)]);
        add_row("mse", -1.0, k + 1, mse_lead[static_cast<size_t>(k)]);
    }

    std::vector<dcb::Tensor> all_preds, all_truth;
    for (int k = 0; k < horizon; ++k) {
        all_preds.insert(all_preds.end(), preds[static_cast<size_t>(k)].begin(),
                         preds[static_cast<size_t>(k)].end());
        all_truth.insert(all_truth.end(), truth[static_cast<size_t>(k)].begin(),
                         truth[static_cast<size_t>(k)].end());
    }
    for (double tau : thresholds) {
        add_row("csi", tau, -1, dcb::csi(dcb::contingency(all_preds, all_truth, tau)));
        add_row("hss", tau, -1, dcb::hss(dcb::contingency(all_preds, all_truth, tau)));
    }
    auto mean_of = [](const std::vector<double>& v, size_t from = 0) {
        double s = 0.0;
        for (size_t i = from; i < v.size(); ++i) s += v[i];
        return s / static_cast<double>(v.size() - from);
    };
    // Late window: the final quarter of the horizon (leads 16..20 at T_o=20).
    const size_t late_from = static_cast<size_t>(horizon - horizon / 4);
    const double mse_mean = mean_of(mse_lead);
    const double mse_late = mean_of(mse_lead, late_from);
    add_row("csi_m", -1.0, -1, dcb::csi_mean(all_preds, all_truth, thresholds));
    add_row("hss_m", -1.0, -1, dcb::hss_mean(all_preds, all_truth, thresholds));
    add_row("ssim", -1.0, -1, mean_of(ssim_lead));
    add_row("mae", -1.0, -1, mean_of(mae_lead));
    add_row("mse", -1.0, -1, mse_mean);
    add_row("mse_late", -1.0, -1, mse_late);

    std::filesystem::create_directories(out_dir);
    dcb::write_metrics_csv(out_dir + "/metrics.csv", echo, rows);
    dcb::write_json_report(out_dir + "/retrieval_weights.json", echo, "sequences",
                           retrieval.dump());

    json summary;
    summary["run_id"] = cfg.run_id;
    summary["mode"] = mode_name;
    summary["lambda_drift"] = cfg.lambda_drift;
    summary["horizon"] = horizon;
    summary["thresholds"] = thresholds;
    summary["aggregate"] = {{"mse", mse_mean},         {"mse_late", mse_late},
                            {"csi_m", dcb::csi_mean(all_preds, all_truth, thresholds)},
                            {"hss_m", dcb::hss_mean(all_preds, all_truth, thresholds)},
                            {"ssim", mean_of(ssim_lead)},
                            {"mae", mean_of(mae_lead)}};
    summary["per_lead"] = {{"mse", mse_lead},   {"csi_m", csi_m_lead}, {"hss_m", hss_m_lead},
                           {"ssim", ssim_lead}, {"mae", mae_lead}};
    summary["prop1"] = {{"steps", prop1_steps},
                        {"condition_rate", prop1_steps ? static_cast<double>(prop1_holds) /
                                                             static_cast<double>(prop1_steps)
                                                       : 0.0},
                        {"reduction_rate", prop1_steps ? static_cast<double>(prop1_reduced) /
                                                             static_cast<double>(prop1_steps)
                                                       : 0.0},
                        {"violations", prop1_violations}};
    dcb::write_json_report(out_dir + "/summary.json", echo, "summary", summary.dump());

    std::cout << "evaluated " << data.test.size() << " sequences (" << mode_name
              << "): mse " << dcb::format_double(mse_mean) << ", mse_late "
              << dcb::format_double(mse_late) << ", csi_m "
              << dcb::format_double(dcb::csi_mean(all_preds, all_truth, thresholds)) << "\n";
    return 0;
}

int cmd_gradcheck(const std::string& config_path, double eps, double tol, int coords,
                  uint64_t seed) {
    RunConfig cfg = RunConfig::load(config_path);
    dcb::ToyBackbone backbone(dcb::backbone_config(cfg));
    dcb::ModelParams params = dcb::init_model(cfg);

    dcb::AdvectionConfig acfg = dcb::advection_config(cfg);
    const dcb::FrameSequence seq = dcb::generate_sequence(acfg, dcb::splitmix64(cfg.seed));
    const int n_steps = cfg.rollout_steps();
    const int horizon = n_steps * cfg.step;
    std::vector<dcb::Tensor> context(seq.frames.begin(), seq.frames.begin() + cfg.context_frames);
    std::vector<dcb::Tensor> targets(seq.frames.begin() + cfg.context_frames,
                                     seq.frames.begin() + cfg.context_frames + horizon);

    dcb::RolloutOptions opt;
    opt.n_steps = n_steps;
    opt.correction = dcb::dcbank_options(cfg);

    const dcb::LossFn loss_fn = [&](const dcb::ModelParams& p) {
        dcb::MemoryBank bank(p.pos_table);
        dcb::RolloutResult r = dcb::run(backbone, p, bank, context, opt);
        return dcb::sequence_mse(r.frames, targets);
    };

    const dcb::GradCheckReport report = dcb::fd_gradcheck(loss_fn, params, eps, tol, coords, seed);
    std::cout << "parameter                max_rel_err   coords  worst (analytic vs numeric)\n";
    for (const dcb::GradCheckParam& p : report.params) {
        std::printf("%-24s %.3e   %6lld  [%lld] %.9e vs %.9e\n", p.name.c_str(), p.max_rel_err,
                    p.coords_checked, p.worst_index, p.analytic, p.numeric);
    }
    std::cout << (report.passed ? "PASS" : "FAIL") << ": max relative error "
              << dcb::format_double(report.max_rel_err) << " (tolerance "
              << dcb::format_double(report.tolerance) << ")\n";
    return report.passed ? 0 : kExitCheckFailed;
}

int cmd_prop1_audit(long long trials, int dim, uint64_t seed, const std::string& checkpoint_path,
                    const std::string& data_dir, const std::string& out_path) {
    if (!checkpoint_path.empty()) {
        // Empirical path: condition rates over real rollouts on the test split.
        dcb::LoadedCheckpoint ckpt = dcb::load_checkpoint(checkpoint_path);
        RunConfig cfg = RunConfig::from_json_string(ckpt.config_echo);
        const std::string echo = cfg.to_json_string();
        dcb::Dataset data = dcb::load_dataset(data_dir);
        dcb::ToyBackbone backbone(dcb::backbone_config(cfg));
        const int n_steps = cfg.rollout_steps();
        const int horizon = n_steps * cfg.step;

        dcb::RolloutOptions opt;
        opt.n_steps = n_steps;
        opt.correction = dcb::dcbank_options(cfg);
        opt.audit_prop1 = true;

        std::vector<std::vector<std::string>> rows;
        long long holds = 0, reduced = 0, violations = 0, steps = 0;
        for (size_t si = 0; si < data.test.size(); ++si) {
            const dcb::FrameSequence& seq = data.test[si];
            std::vector<dcb::Tensor> context(seq.frames.begin(),
                                             seq.frames.begin() + cfg.context_frames);
            std::vector<dcb::Tensor> targets(seq.frames.begin() + cfg.context_frames,
                                             seq.frames.begin() + cfg.context_frames + horizon);
            dcb::MemoryBank bank(ckpt.params.pos_table);
            dcb::RolloutResult result =
                dcb::run_with_targets(backbone, ckpt.params, bank, context, targets, opt);
            for (const dcb::RolloutStep& step : result.trace.steps) {
                const dcb::Prop1Report& p = *step.diag.prop1;
                ++steps;
                if (p.condition_holds) ++holds;
                if (p.err_after < p.err_before) ++reduced;
                if (p.condition_holds && !(p.err_after < p.err_before)) ++violations;
                rows.push_back({std::to_string(si), std::to_string(step.index),
                                dcb::format_double(p.inner), dcb::format_double(p.half_norm_sq),
                                p.condition_holds ? "1" : "0", dcb::format_double(p.err_before),
                                dcb::format_double(p.err_after),
                                p.err_after < p.err_before ? "1" : "0"});
            }
        }
        if (!out_path.empty()) {
            dcb::write_csv(out_path, echo,
                           {"sequence", "step", "inner", "half_norm_sq", "condition_holds",
                            "err_before", "err_after", "error_reduced"},
                           rows);
        }
        std::cout << "rollout audit: " << steps << " steps, condition held " << holds
                  << ", error reduced " << reduced << ", violations " << violations << "\n";
        return violations == 0 ? 0 : kExitCheckFailed;
    }

    // Random-pair theorem audit.
    if (trials <= 0 || dim <= 0) throw dcb::ConfigError("trials and dim must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> log_scale(-2.0, 1.0);
    long long holds = 0, violations = 0, identity_breaks = 0;
    for (long long i = 0; i < trials; ++i) {
        const double scale = std::pow(10.0, log_scale(rng));
        std::vector<double> target(static_cast<size_t>(dim));
        std::vector<double> prior(static_cast<size_t>(dim));
        std::vector<double> post(static_cast<size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            target[static_cast<size_t>(k)] = normal(rng);
            prior[static_cast<size_t>(k)] = target[static_cast<size_t>(k)] + normal(rng);
            post[static_cast<size_t>(k)] = prior[static_cast<size_t>(k)] + scale * normal(rng);
        }
        const dcb::Prop1Report r =
            dcb::prop1_check(dcb::Tensor({dim}, post), dcb::Tensor({dim}, prior),
                             dcb::Tensor({dim}, target));
        if (r.condition_holds) {
            ++holds;
            if (!(r.err_after < r.err_before)) ++violations;
        }
        // Norm expansion |e + d|^2 = |e|^2 + 2<e,d> + |d|^2 must hold too.
        const double expanded = r.err_before + 2.0 * r.inner + 2.0 * r.half_norm_sq;
        const double tol = 1e-10 * std::max(1.0, std::fabs(r.err_after));
        if (std::fabs(expanded - r.err_after) > tol) ++identity_breaks;
    }
    std::cout << "theorem audit: " << trials << " random pairs at dim " << dim << ", condition held "
              << holds << ", violations " << violations << ", identity breaks " << identity_breaks
              << "\n";
    return (violations == 0 && identity_breaks == 0) ? 0 : kExitCheckFailed;
}

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_path) {
    if (run_dirs.empty()) throw dcb::ConfigError("compare: need at least one run directory");

    struct Run {
        std::string run_id, mode;
        double lambda_drift = 0.0;
        json aggregate, per_lead;
        int horizon = 0;
    };
    std::vector<Run> runs;
    for (const std::string& dir : run_dirs) {
        std::ifstream in(dir + "/summary.json");
        if (!in) throw dcb::FormatError("cannot open '" + dir + "/summary.json'", 0);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw dcb::FormatError("summary.json: " + std::string(e.what()),
                                   static_cast<long long>(e.byte));
        }
        const json& s = j.at("summary");
        Run r;
        r.run_id = s.value("run_id", dir);
        r.mode = s.value("mode", "");
        r.lambda_drift = s.value("lambda_drift", 0.0);
        r.aggregate = s.at("aggregate");
        r.per_lead = s.at("per_lead");
        r.horizon = s.value("horizon", 0);
        runs.push_back(std::move(r));
    }
    const int horizon = runs.front().horizon;
    for (const Run& r : runs) {
        if (r.horizon != horizon) {
            throw dcb::FormatError("compare: runs have different horizons", 0);
        }
    }

    std::vector<std::string> columns = {"run_id", "mode",  "lambda_drift", "mse",
                                        "mse_late", "csi_m", "hss_m",        "ssim",
                                        "mae"};
    for (const char* metric : {"csi_m", "mae"}) {
        for (int k = 1; k <= horizon; ++k) {
            columns.push_back(std::string("delta_") + metric + "_lead" + std::to_string(k));
        }
    }

    std::vector<std::vector<std::string>> rows;
    const Run& base = runs.front();
    for (const Run& r : runs) {
        std::vector<std::string> row = {
            r.run_id,
            r.mode,
            dcb::format_double(r.lambda_drift),
            dcb::format_double(r.aggregate.value("mse", 0.0)),
            dcb::format_double(r.aggregate.value("mse_late", 0.0)),
            dcb::format_double(r.aggregate.value("csi_m", 0.0)),
            dcb::format_double(r.aggregate.value("hss_m", 0.0)),
            dcb::format_double(r.aggregate.value("ssim", 0.0)),
            dcb::format_double(r.aggregate.value("mae", 0.0)),
        };
        for (const char* metric : {"csi_m", "mae"}) {
            const auto& mine = r.per_lead.at(metric);
            const auto& theirs = base.per_lead.at(metric);
            for (int k = 0; k < horizon; ++k) {
                row.push_back(dcb::format_double(mine.at(k).get<double>() -
                                                 theirs.at(k).get<double>()));
            }
        }
        rows.push_back(std::move(row));
    }

    json echo;
    echo["runs"] = run_dirs;
    dcb::write_csv(out_path, echo.dump(), columns, rows);
    std::cout << "compared " << runs.size() << " runs -> " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drift-corrective memory bank for autoregressive latent forecasting"};
    app.set_version_flag("--version", dcb::kVersion);
    app.require_subcommand(1);

    std::string config_path, data_dir, out_dir, out_path, checkpoint_path, run_id;
    ModeOverride mode;
    int threads = 0;
    uint64_t seed = 0;
    bool seed_set = false;

    auto* generate = app.add_subcommand("generate", "generate a synthetic dataset");
    generate->add_option("--config", config_path, "run config (JSON)")->required();
    generate->add_option("--out", out_dir, "output dataset directory")->required();

    auto* train = app.add_subcommand("train", "train a model on a dataset");
    train->add_option("--config", config_path, "run config (JSON)")->required();
    train->add_option("--data", data_dir, "dataset directory")->required();
    train->add_option("--out", out_dir, "output run directory")->required();
    train->add_option("--mode", mode.name,
                      "correction mode override: corrected|bypass|passive|no-cle|no-camr|no-content");
    train->add_option("--threads", threads, "worker thread cap");
    train->add_option("--run-id", run_id, "run id override");
    train->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on the test split");
    evaluate->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    evaluate->add_option("--data", data_dir, "dataset directory")->required();
    evaluate->add_option("--out", out_dir, "output run directory")->required();
    evaluate->add_option("--mode", mode.name, "correction mode override");
    double lambda_override = 0.0;
    bool lambda_set = false;
    evaluate->add_option("--lambda-drift", lambda_override, "retrieval lambda override")
        ->each([&](const std::string&) { lambda_set = true; });
    evaluate->add_option("--run-id", run_id, "run id override");

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    gradcheck->add_option("--config", config_path, "run config (JSON)")->required();
    double eps = 1e-4, tol = 1e-4;
    int coords = 32;
    gradcheck->add_option("--eps", eps, "finite-difference step");
    gradcheck->add_option("--tol", tol, "relative-error tolerance");
    gradcheck->add_option("--coords", coords, "coordinates checked per tensor");
    gradcheck->add_option("--seed", seed, "coordinate-sampling seed");

    auto* prop1 = app.add_subcommand("prop1-audit", "error-reduction proposition audit");
    long long trials = 10000;
    int dim = 64;
    prop1->add_option("--trials", trials, "random pairs to draw");
    prop1->add_option("--dim", dim, "latent dimension for random pairs");
    prop1->add_option("--seed", seed, "rng seed");
    prop1->add_option("--checkpoint", checkpoint_path, "checkpoint for the empirical audit");
    prop1->add_option("--data", data_dir, "dataset directory for the empirical audit");
    prop1->add_option("--out", out_path, "per-step CSV (empirical audit)");

    auto* compare = app.add_subcommand("compare", "side-by-side CSV across evaluated runs");
    std::vector<std::string> run_dirs;
    compare->add_option("--runs", run_dirs, "evaluated run directories")->required()
        ->expected(-1);
    compare->add_option("--out", out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, out_dir);
        if (train->parsed()) {
            return cmd_train(config_path, data_dir, out_dir, mode, threads, run_id, seed,
                             seed_set);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(checkpoint_path, data_dir, out_dir, mode, lambda_override,
                                lambda_set, run_id);
        }
        if (gradcheck->parsed()) return cmd_gradcheck(config_path, eps, tol, coords, seed);
        if (prop1->parsed()) {
            return cmd_prop1_audit(trials, dim, seed, checkpoint_path, data_dir, out_path);
        }
        if (compare->parsed()) return cmd_compare(run_dirs, out_path);
    } catch (const dcb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dcb::FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const dcb::TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const dcb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
