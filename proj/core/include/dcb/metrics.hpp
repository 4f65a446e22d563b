#pragma once

#include <vector>

#include "dcb/tensor.hpp"

namespace dcb {

/// Binary-event counts at one threshold. Binarization is inclusive: a pixel
/// is an event when value >= tau.
struct Contingency {
    long long tp = 0, fn = 0, fp = 0, tn = 0;
    long long total() const { return tp + fn + fp + tn; }
    Contingency& operator+=(const Contingency& o);
};

/// Counts over one pair of equal-shape fields.
Contingency contingency(const Tensor& pred, const Tensor& target, double tau);
/// Pooled counts over matching frame lists.
Contingency contingency(const std::vector<Tensor>& pred, const std::vector<Tensor>& target,
                        double tau);

/// Critical Success Index TP / (TP + FN + FP); 0 when the denominator is 0.
double csi(const Contingency& c);
/// Heidke Skill Score 2(TP*TN - FN*FP) / [(TP+FN)(FN+TN) + (TP+FP)(FP+TN)];
/// 0 when the denominator is 0.
double hss(const Contingency& c);

/// Mean CSI over a threshold set (CSI_M), counts pooled over all frames.
double csi_mean(const std::vector<Tensor>& pred, const std::vector<Tensor>& target,
                const std::vector<double>& thresholds);
/// HSS per threshold, then averaged (the reporting convention).
double hss_mean(const std::vector<Tensor>& pred, const std::vector<Tensor>& target,
                const std::vector<double>& thresholds);

/// Structural similarity of one frame pair: 11x11 Gaussian window
/// (sigma = 1.5), c1 = (0.01)^2, c2 = (0.03)^2 for unit data range, local
/// statistics over fully interior windows, mean over the map. Frames must be
/// at least 11x11.
double ssim_frame(const Tensor& pred, const Tensor& target);
/// Frame-wise SSIM averaged over the horizon.
double ssim(const std::vector<Tensor>& pred, const std::vector<Tensor>& target);

double mae_frame(const Tensor& pred, const Tensor& target);
/// Mean absolute error over all frames.
double mae(const std::vector<Tensor>& pred, const std::vector<Tensor>& target);

/// Paper threshold presets, usable when externally converted radar data is
/// fed through the frame format.
const std::vector<double>& sevir_thresholds();     // [16, 74, 133, 160, 181, 219]
const std::vector<double>& meteonet_thresholds();  // [12, 18, 24, 32]

}  // namespace dcb
