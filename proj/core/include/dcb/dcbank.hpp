#pragma once

#include <optional>
#include <string>
#include <utility>

#include "dcb/camr.hpp"
#include "dcb/cle.hpp"
#include "dcb/memory_bank.hpp"

namespace dcb {

/// How the correction stage behaves. The ablation variants mirror the usual
/// study rows: drop the whole bank, swap the extractor for vanilla
/// self-attention, skip retrieval, feed the correction passively to the
/// decoder, or zero the content half of the retrieval score.
enum class CorrectionMode {
    kCorrected,
    kBypass,     // no memory mechanism at all
    kNoCle,      // initial correction from single-head self-attention
    kNoCamr,     // apply the initial correction directly
    kNoContent,  // retrieval scores from drift consistency only
    kPassive,    // correction concatenated and fused instead of added
};

const char* to_string(CorrectionMode mode);
std::optional<CorrectionMode> parse_mode(const std::string& name);

/// Single-head self-attention projections, used only by kNoCle.
struct SelfAttnParams {
    Tensor w_q;  // D x D
    Tensor w_k;  // D x D
    Tensor w_v;  // D x D
};

struct DcbankParams {
    CleParams cle;
    CamrParams camr;
    SelfAttnParams attn;
    Tensor w_corr;  // 2D x D correction-gate projection
    Tensor w_fuse;  // 2D x D passive-conditioning fusion, identity-on-prior at init
};

struct DcbankOptions {
    CorrectionMode mode = CorrectionMode::kCorrected;
    /// With an empty bank the default is to bypass correction entirely. The
    /// alternative runs the extractor against the prior itself (the
    /// main-text fallback), which with distinct projections manufactures a
    /// correction out of no history; kept selectable for comparison.
    bool fallback_on_empty = false;
};

/// Squared-error bookkeeping for one corrected step against a target latent.
struct Prop1Report {
    double inner = 0.0;         // <e, delta>
    double half_norm_sq = 0.0;  // 0.5 * |delta|^2
    bool condition_holds = false;
    double err_before = 0.0;  // |z_prior - z_target|^2
    double err_after = 0.0;   // |z_posterior - z_target|^2
};

struct StepDiagnostics {
    bool bypassed = false;
    Tensor d_init;
    Tensor d_final;
    std::optional<double> gate_mean;  // mean of the correction gate
    std::optional<RetrievalDiagnostics> retrieval;
    std::optional<Prop1Report> prop1;
};

/// One full correction step: extract the initial correction, refine it with
/// memory, and fold it into the prior through the correction gate (or the
/// mode's variant of that pipeline). An empty bank is a defined bypass, not
/// an error. Differentiable end to end when run under a tape.
std::pair<Tensor, StepDiagnostics> dcbank_apply(const Tensor& z_prior, const MemoryBank& bank,
                                                const DcbankParams& p,
                                                const DcbankOptions& opt = {});

/// Evaluate the error-reduction condition <e, delta> < -1/2 |delta|^2 for a
/// corrected latent against a known target. Plain arithmetic, never taped.
Prop1Report prop1_check(const Tensor& z_posterior, const Tensor& z_prior,
                        const Tensor& z_target);

/// Single-head scaled dot-product self-attention over tokens.
Tensor self_attention(const Tensor& z, const SelfAttnParams& p);

}  // namespace dcb
