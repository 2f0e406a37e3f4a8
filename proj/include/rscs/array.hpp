#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace rscs {

/// 2-D real frame, row-major so the storage matches the on-disk layout.
using Frame = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FrameMap = Eigen::Map<Frame>;
using ConstFrameMap = Eigen::Map<const Frame>;

/// Contiguous stack of equally sized frames: frame-major, row-major within
/// each frame. The same layout as the RSM1 payload.
class Volume {
public:
    Volume() = default;
    Volume(int rows, int cols, int frames);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int frames() const { return frames_; }
    std::size_t size() const { return data_.size(); }

    FrameMap frame(int t);
    ConstFrameMap frame(int t) const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Eigen::Map<Eigen::ArrayXd> flat();
    Eigen::Map<const Eigen::ArrayXd> flat() const;

    double& at(int r, int c, int t) { return data_[index(r, c, t)]; }
    double at(int r, int c, int t) const { return data_[index(r, c, t)]; }

    bool same_shape(const Volume& o) const;
    bool all_finite() const;
    void set_zero();

    /// Copy of frames [first, first + count).
    Volume slice_frames(int first, int count) const;

private:
    std::size_t index(int r, int c, int t) const {
        return (static_cast<std::size_t>(t) * rows_ + r) * cols_ + c;
    }

    int rows_ = 0, cols_ = 0, frames_ = 0;
    std::vector<double> data_;
};

} // namespace rscs
