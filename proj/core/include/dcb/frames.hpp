#pragma once

#include <vector>

#include "dcb/tensor.hpp"

namespace dcb {

/// A T x H x W stack of intensity fields, one H x W tensor per frame.
/// Generated data lives in [0, 1]; predictions reuse the type unclamped.
struct FrameSequence {
    int height = 0;
    int width = 0;
    std::vector<Tensor> frames;

    int length() const { return static_cast<int>(frames.size()); }

    /// Every frame is H x W. Throws DimensionError otherwise.
    void validate() const;
};

/// Frames [begin, begin + count) as a new sequence (shared buffers).
FrameSequence slice(const FrameSequence& seq, int begin, int count);

/// Sum of all intensities in one frame (mass-conservation checks).
double frame_mass(const Tensor& frame);

}  // namespace dcb
