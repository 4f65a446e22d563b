#include "dcb/params.hpp"

#include <cmath>
#include <random>

#include "dcb/errors.hpp"

namespace dcb {

ModelDims ModelParams::dims() const {
    ModelDims d;
    d.feature_dim = backbone.e_proj.rank() == 2 ? backbone.e_proj.extent(1) : 0;
    d.encode_cols = backbone.e_proj.rank() == 2 ? backbone.e_proj.extent(0) : 0;
    d.decode_cols = backbone.d_proj.rank() == 2 ? backbone.d_proj.extent(1) : 0;
    d.capacity = pos_table.rank() == 2 ? pos_table.extent(0) : 0;
    return d;
}

namespace {

Tensor fan_in_uniform(int rows, int cols, std::mt19937_64& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(rows));
    return Tensor::uniform({rows, cols}, -bound, bound, rng);
}

Tensor fuse_init(int d) {
    // [I; 0]: with the correction concatenated after the prior's features,
    // passive fusion starts as the identity on the prior.
    std::vector<double> data(static_cast<size_t>(2 * d) * d, 0.0);
    for (int i = 0; i < d; ++i) data[static_cast<size_t>(i) * d + i] = 1.0;
    return Tensor({2 * d, d}, std::move(data));
}

}  // namespace

ModelParams init_params(const ModelDims& dims, uint64_t seed) {
    if (dims.feature_dim <= 0 || dims.encode_cols <= 0 || dims.decode_cols <= 0 ||
        dims.capacity <= 0) {
        throw ConfigError("init_params: all dimensions must be positive");
    }
    const int d = dims.feature_dim;
    std::mt19937_64 rng(seed);

    ModelParams p;
    p.backbone.e_proj = fan_in_uniform(dims.encode_cols, d, rng);
    p.backbone.d_proj = fan_in_uniform(d, dims.decode_cols, rng);

    p.dcbank.cle.w_pre = fan_in_uniform(d, d, rng);
    p.dcbank.cle.w_ref = fan_in_uniform(d, d, rng);
    p.dcbank.cle.w_delta = fan_in_uniform(d, d, rng);
    p.dcbank.cle.w_init = fan_in_uniform(2 * d, d, rng);
    p.dcbank.cle.w_out = Tensor::zeros({d, d});

    p.dcbank.camr.w_q = fan_in_uniform(d, d, rng);
    p.dcbank.camr.w_k = fan_in_uniform(d, d, rng);
    p.dcbank.camr.w_c = fan_in_uniform(d, d, rng);
    p.dcbank.camr.w_h = fan_in_uniform(d, d, rng);
    p.dcbank.camr.w_agg = fan_in_uniform(d, d, rng);

    p.dcbank.attn.w_q = fan_in_uniform(d, d, rng);
    p.dcbank.attn.w_k = fan_in_uniform(d, d, rng);
    p.dcbank.attn.w_v = fan_in_uniform(d, d, rng);

    p.dcbank.w_corr = fan_in_uniform(2 * d, d, rng);
    p.dcbank.w_fuse = fuse_init(d);

    p.pos_table = Tensor::zeros({dims.capacity, d});
    return p;
}

namespace {

template <typename Params, typename Fn>
void visit(Params& p, const Fn& fn) {
    fn("backbone.e_proj", p.backbone.e_proj);
    fn("backbone.d_proj", p.backbone.d_proj);
    fn("cle.w_pre", p.dcbank.cle.w_pre);
    fn("cle.w_ref", p.dcbank.cle.w_ref);
    fn("cle.w_delta", p.dcbank.cle.w_delta);
    fn("cle.w_init", p.dcbank.cle.w_init);
    fn("cle.w_out", p.dcbank.cle.w_out);
    fn("camr.w_q", p.dcbank.camr.w_q);
    fn("camr.w_k", p.dcbank.camr.w_k);
    fn("camr.w_c", p.dcbank.camr.w_c);
    fn("camr.w_h", p.dcbank.camr.w_h);
    fn("camr.w_agg", p.dcbank.camr.w_agg);
    fn("attn.w_q", p.dcbank.attn.w_q);
    fn("attn.w_k", p.dcbank.attn.w_k);
    fn("attn.w_v", p.dcbank.attn.w_v);
    fn("dcbank.w_corr", p.dcbank.w_corr);
    fn("dcbank.w_fuse", p.dcbank.w_fuse);
    fn("pos_table", p.pos_table);
}

}  // namespace

void for_each_param(ModelParams& p,
                    const std::function<void(const std::string&, Tensor&)>& fn) {
    visit(p, fn);
}

void for_each_param(const ModelParams& p,
                    const std::function<void(const std::string&, const Tensor&)>& fn) {
    visit(p, fn);
}

ModelParams tracked(const ModelParams& p, Tape& tape) {
    ModelParams out = p;
    for_each_param(out, [&](const std::string&, Tensor& t) { t = tape.watch(t); });
    return out;
}

long long param_count(const ModelParams& p) {
    long long n = 0;
    for_each_param(p, [&](const std::string&, const Tensor& t) { n += t.numel(); });
    return n;
}

}  // namespace dcb
