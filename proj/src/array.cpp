#include "rscs/array.hpp"

#include <cmath>
#include <stdexcept>

namespace rscs {

Volume::Volume(int rows, int cols, int frames)
    : rows_(rows), cols_(cols), frames_(frames) {
    if (rows < 1 || cols < 1 || frames < 1) {
        throw std::invalid_argument("Volume: all dimensions must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(rows) * cols * frames, 0.0);
}

FrameMap Volume::frame(int t) {
    return FrameMap(data_.data() + index(0, 0, t), rows_, cols_);
}

ConstFrameMap Volume::frame(int t) const {
    return ConstFrameMap(data_.data() + index(0, 0, t), rows_, cols_);
}

Eigen::Map<Eigen::ArrayXd> Volume::flat() {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
}

Eigen::Map<const Eigen::ArrayXd> Volume::flat() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
}

bool Volume::same_shape(const Volume& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && frames_ == o.frames_;
}

bool Volume::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Volume::set_zero() {
    std::fill(data_.begin(), data_.end(), 0.0);
}

Volume Volume::slice_frames(int first, int count) const {
    if (first < 0 || count < 1 || first + count > frames_) {
        throw std::out_of_range("Volume::slice_frames: range out of bounds");
    }
    Volume out(rows_, cols_, count);
    std::copy(data_.begin() + index(0, 0, first),
              data_.begin() + index(0, 0, first + count), out.data_.begin());
    return out;
}

} // namespace rscs
