#include "dcb/dcbank.hpp"

#include <cmath>

#include "dcb/ops.hpp"

namespace dcb {

const char* to_string(CorrectionMode mode) {
    switch (mode) {
        case CorrectionMode::kCorrected: return "corrected";
        case CorrectionMode::kBypass: return "bypass";
        case CorrectionMode::kNoCle: return "no-cle";
        case CorrectionMode::kNoCamr: return "no-camr";
        case CorrectionMode::kNoContent: return "no-content";
        case CorrectionMode::kPassive: return "passive";
    }
    return "?";
}

std::optional<CorrectionMode> parse_mode(const std::string& name) {
    if (name == "corrected") return CorrectionMode::kCorrected;
    if (name == "bypass") return CorrectionMode::kBypass;
    if (name == "no-cle") return CorrectionMode::kNoCle;
    if (name == "no-camr") return CorrectionMode::kNoCamr;
    if (name == "no-content") return CorrectionMode::kNoContent;
    if (name == "passive") return CorrectionMode::kPassive;
    return std::nullopt;
}

Tensor self_attention(const Tensor& z, const SelfAttnParams& p) {
    const int tokens = z.extent(0);
    const int d = z.extent(1);
    Tensor q = matmul(z, p.w_q);
    Tensor k = matmul(z, p.w_k);
    Tensor v = matmul(z, p.w_v);
    Tensor scores = affine(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d)), 0.0);
    std::vector<Tensor> attn_rows;
    attn_rows.reserve(static_cast<size_t>(tokens));
    for (int i = 0; i < tokens; ++i) attn_rows.push_back(softmax(row(scores, i)));
    return matmul(stack_rows(attn_rows), v);
}

namespace {

double tensor_mean(const Tensor& t) {
    double s = 0.0;
    for (long long i = 0; i < t.numel(); ++i) s += t.at_flat(i);
    return s / static_cast<double>(t.numel());
}

}  // namespace

std::pair<Tensor, StepDiagnostics> dcbank_apply(const Tensor& z_prior, const MemoryBank& bank,
                                                const DcbankParams& p, const DcbankOptions& opt) {
    StepDiagnostics diag;
    if (opt.mode == CorrectionMode::kBypass || (bank.empty() && !opt.fallback_on_empty)) {
        diag.bypassed = true;
        return {z_prior, std::move(diag)};
    }

    Tensor z_ref = bank.reference(z_prior);
    Tensor d_init = (opt.mode == CorrectionMode::kNoCle) ? self_attention(z_prior, p.attn)
                                                         : initial_correction(z_prior, z_ref, p.cle);
    diag.d_init = d_init;

    Tensor d_final = d_init;
    if (!bank.empty() && opt.mode != CorrectionMode::kNoCamr) {
        LatentStack view = bank.view_with_pos();
        LatentStack drifts = bank.drift_sequence();
        const int r = static_cast<int>(view.size());

        Tensor s_cont = (opt.mode == CorrectionMode::kNoContent)
                            ? Tensor::zeros({r})
                            : content_scores(add(z_prior, d_init), view, p.camr);
        Tensor s_drift = drift_scores(raw_residual(z_prior, z_ref), drifts, p.camr);
        Tensor weights = retrieval_weights(s_cont, s_drift, p.camr.lambda_drift);
        d_final = refine_correction(weights, view, d_init, p.camr);

        RetrievalDiagnostics rd;
        rd.s_cont = s_cont;
        rd.s_drift = s_drift;
        rd.weights = weights;
        diag.retrieval = std::move(rd);
    }
    diag.d_final = d_final;

    if (opt.mode == CorrectionMode::kPassive) {
        Tensor fused = matmul(concat_features(z_prior, d_final), p.w_fuse);
        return {fused, std::move(diag)};
    }

    Tensor gate = sigmoid(matmul(concat_features(z_prior, d_final), p.w_corr));
    diag.gate_mean = tensor_mean(gate);
    Tensor posterior = add(z_prior, mul(gate, d_final));
    return {posterior, std::move(diag)};
}

Prop1Report prop1_check(const Tensor& z_posterior, const Tensor& z_prior,
                        const Tensor& z_target) {
    if (!z_posterior.same_shape(z_prior) || !z_prior.same_shape(z_target)) {
        throw DimensionError("prop1_check: latent shapes differ");
    }
    Prop1Report r;
    for (long long i = 0; i < z_prior.numel(); ++i) {
        const double e = z_prior.at_flat(i) - z_target.at_flat(i);
        const double d = z_posterior.at_flat(i) - z_prior.at_flat(i);
        const double after = z_posterior.at_flat(i) - z_target.at_flat(i);
        r.inner += e * d;
        r.half_norm_sq += 0.5 * d * d;
        r.err_before += e * e;
        r.err_after += after * after;
    }
    r.condition_holds = r.inner < -r.half_norm_sq;
    return r;
}

}  // namespace dcb
