#include "dcb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcb/errors.hpp"

namespace dcb {

Contingency& Contingency::operator+=(const Contingency& o) {
    tp += o.tp;
    fn += o.fn;
    fp += o.fp;
    tn += o.tn;
    return *this;
}

Contingency contingency(const Tensor& pred, const Tensor& target, double tau) {
    if (!pred.same_shape(target)) throw DimensionError("contingency: shapes differ");
    Contingency c;
    for (long long i = 0; i < pred.numel(); ++i) {
        const bool p = pred.at_flat(i) >= tau;
        const bool t = target.at_flat(i) >= tau;
        if (p && t) ++c.tp;
        else if (!p && t) ++c.fn;
        else if (p && !t) ++c.fp;
        else ++c.tn;
    }
    return c;
}

Contingency contingency(const std::vector<Tensor>& pred, const std::vector<Tensor>& target,
                        double tau) {
    if (pred.size() != target.size()) throw DimensionError("contingency: frame counts differ");
    Contingency c;
    for (size_t i = 0; i < pred.size(); ++i) c += contingency(pred[i], target[i], tau);
    return c;
}

double csi(const Contingency& c) {
    const long long denom = c.tp + c.fn + c.fp;
    if (denom == 0) return 0.0;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double hss(const Contingency& c) {
    const double tp = static_cast<double>(c.tp), fn = static_cast<double>(c.fn);
    const double fp = static_cast<double>(c.fp), tn = static_cast<double>(c.tn);
    const double denom = (tp + fn) * (fn + tn) + (tp + fp) * (fp + tn);
    if (denom == 0.0) return 0.0;
    return 2.0 * (tp * tn - fn * fp) / denom;
}

double csi_mean(const std::vector<Tensor>& pred, const std::vector<Tensor>& target,
                const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw ContractError("csi_mean: empty threshold set");
    double s = 0.0;
    for (double tau : thresholds) s += csi(contingency(pred, target, tau));
    return s / static_cast<double>(thresholds.size());
}

double hss_mean(const std::vector<Tensor>& pred, const std::vector<Tensor>& target,
                const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw ContractError("hss_mean: empty threshold set");
    double s = 0.0;
    for (double tau : thresholds) s += hss(contingency(pred, target, tau));
    return s / static_cast<double>(thresholds.size());
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (0.01 * range)^2, range = 1
constexpr double kC2 = 0.03 * 0.03;

const std::vector<double>& gaussian_window() {
    static const std::vector<double> w = [] {
        std::vector<double> k(kWin * kWin);
        double sum = 0.0;
        for (int y = 0; y < kWin; ++y) {
            for (int x = 0; x < kWin; ++x) {
                const double dy = y - (kWin - 1) / 2.0;
                const double dx = x - (kWin - 1) / 2.0;
                const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
                k[static_cast<size_t>(y) * kWin + x] = v;
                sum += v;
            }
        }
        for (double& v : k) v /= sum;
        return k;
    }();
    return w;
}

}  // namespace

double ssim_frame(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw DimensionError("ssim: shapes differ");
    if (pred.rank() != 2) throw DimensionError("ssim: frames must be 2-D");
    const int h = pred.extent(0), w = pred.extent(1);
    if (h < kWin || w < kWin) {
        throw DimensionError("ssim: frame smaller than the " + std::to_string(kWin) + "x" +
                             std::to_string(kWin) + " window");
    }

    const std::vector<double>& win = gaussian_window();
    double sum = 0.0;
    long long count = 0;
    for (int cy = 0; cy <= h - kWin; ++cy) {
        for (int cx = 0; cx <= w - kWin; ++cx) {
            double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int y = 0; y < kWin; ++y) {
                for (int x = 0; x < kWin; ++x) {
                    const double wgt = win[static_cast<size_t>(y) * kWin + x];
                    const double a = pred(cy + y, cx + x);
                    const double b = target(cy + y, cx + x);
                    mx += wgt * a;
                    my += wgt * b;
                    sxx += wgt * a * a;
                    syy += wgt * b * b;
                    sxy += wgt * a * b;
                }
            }
            const double vx = std::max(0.0, sxx - mx * mx);
            const double vy = std::max(0.0, syy - my * my);
            const double cxy = sxy - mx * my;
            sum += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) /
                   ((mx * mx + my * my + kC1) * (vx + vy + kC2));
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

double ssim(const std::vector<Tensor>& pred, const std::vector<Tensor>& target) {
    if (pred.size() != target.size() || pred.empty()) {
        throw DimensionError("ssim: frame counts differ or empty");
    }
    double s = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) s += ssim_frame(pred[i], target[i]);
    return s / static_cast<double>(pred.size());
}

double mae_frame(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw DimensionError("mae: shapes differ");
    double s = 0.0;
    for (long long i = 0; i < pred.numel(); ++i) {
        s += std::fabs(pred.at_flat(i) - target.at_flat(i));
    }
    return s / static_cast<double>(pred.numel());
}

double mae(const std::vector<Tensor>& pred, const std::vector<Tensor>& target) {
    if (pred.size() != target.size() || pred.empty()) {
        throw DimensionError("mae: frame counts differ or empty");
    }
    double s = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) s += mae_frame(pred[i], target[i]);
    return s / static_cast<double>(pred.size());
}

const std::vector<double>& sevir_thresholds() {
    static const std::vector<double> t{16, 74, 133, 160, 181, 219};
    return t;
}

const std::vector<double>& meteonet_thresholds() {
    static const std::vector<double> t{12, 18, 24, 32};
    return t;
}

}  // namespace dcb
