#include "dcb/frames.hpp"

#include <string>

#include "dcb/errors.hpp"

namespace dcb {

void FrameSequence::validate() const {
    for (size_t i = 0; i < frames.size(); ++i) {
        const Tensor& f = frames[i];
        if (f.rank() != 2 || f.extent(0) != height || f.extent(1) != width) {
            throw DimensionError("frame " + std::to_string(i) + " is not " +
                                 std::to_string(height) + "x" + std::to_string(width));
        }
    }
}

FrameSequence slice(const FrameSequence& seq, int begin, int count) {
    if (begin < 0 || count < 0 || begin + count > seq.length()) {
        throw DimensionError("slice: range [" + std::to_string(begin) + ", " +
                             std::to_string(begin + count) + ") exceeds sequence length " +
                             std::to_string(seq.length()));
    }
    FrameSequence out;
    out.height = seq.height;
    out.width = seq.width;
    out.frames.assign(seq.frames.begin() + begin, seq.frames.begin() + begin + count);
    return out;
}

double frame_mass(const Tensor& frame) {
    double s = 0.0;
    for (long long i = 0; i < frame.numel(); ++i) s += frame.at_flat(i);
    return s;
}

}  // namespace dcb
