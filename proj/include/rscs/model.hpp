#pragma once

#include "rscs/array.hpp"
#include "rscs/fft.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace rscs {

enum class ConvMode { circular, physical };

/// Diffuser point spread function with its cached spectra. The circular
/// convolution operator H is diagonal in the Fourier basis, so the kernel's
/// transform is computed once at construction; a second spectrum on the
/// (2N-1)^2 padded grid backs the physical (pad/crop) mode.
class Psf {
public:
    explicit Psf(Frame kernel);

    const Frame& kernel() const { return kernel_; }
    const fft::Spectrum& freq() const { return freq_; }
    /// Spectrum of the kernel rolled so its center pixel sits at the origin:
    /// the circular operator aligns the kernel center like the physical one.
    const fft::Spectrum& freq_centered() const { return freq_centered_; }
    const fft::Spectrum& freq_padded() const { return freq_padded_; }
    double norm_inf_freq() const { return norm_inf_freq_; }

    int n() const { return static_cast<int>(kernel_.rows()); }
    /// Kernel pixel treated as the optical center: (n/2, n/2).
    int center() const { return n() / 2; }

private:
    Frame kernel_;
    fft::Spectrum freq_;
    fft::Spectrum freq_centered_;
    fft::Spectrum freq_padded_;
    double norm_inf_freq_ = 0.0;
};

/// Movie of T square frames sampled at a fixed period.
struct Movie {
    Volume data;
    double dt = 1e-3; // frame period in seconds

    Movie() = default;
    Movie(int n, int t_len, double dt_ = 1e-3) : data(n, n, t_len), dt(dt_) {}

    int n() const { return data.rows(); }
    int t_len() const { return data.frames(); }
    void validate() const;
};

/// Frame-by-frame differences of a movie: d(t) = x(t) - x(t-1), x(-1) = 0.
struct DiffMovie {
    Volume data;
    double dt = 1e-3;

    DiffMovie() = default;
    DiffMovie(int n, int t_len, double dt_ = 1e-3) : data(n, n, t_len), dt(dt_) {}

    int n() const { return data.rows(); }
    int t_len() const { return data.frames(); }
};

/// Rolling shutter schedule: one or two blocks of `lines_per_sample`
/// contiguous rows that advance by `lines_per_sample` rows per sample and
/// wrap at the bottom of the FPA. For a double shutter the two blocks move
/// in lockstep, `shutter_gap` rows apart.
struct ShutterSchedule {
    int n = 0;
    int lines_per_sample = 1;
    int num_shutters = 1;
    int shutter_gap = 0;
    int phase_offset = 0;
    double rate_hz = 1000.0;

    int lines_total() const { return lines_per_sample * num_shutters; }
    /// Sweep period in samples.
    int period() const { return (n + lines_total() - 1) / lines_total(); }

    /// Sampled row indices at sample t, ascending, deduplicated.
    std::vector<int> rows_at(int t) const;

    /// Schedule whose local time 0 coincides with this schedule's time
    /// `samples` (used by the blocked solver).
    ShutterSchedule advanced_by(int samples) const;

    void validate() const;
};

struct NoiseSpec {
    double snr_db = 30.0;
};

/// Rolling shutter readout: at each t the sampled rows stacked ascending.
struct MeasurementSeq {
    Volume data; // (lines_total) x N x T
    ShutterSchedule schedule;

    int t_len() const { return data.frames(); }
};

/// Cyclic (circular mode) or pad-and-crop (physical mode) convolution of an
/// N x N frame with the PSF.
Frame convolve(const Frame& frame, const Psf& psf, ConvMode mode);

/// Exact adjoint of `convolve` under the standard inner product.
Frame convolve_adjoint(const Frame& frame, const Psf& psf, ConvMode mode);

/// Extract the rows sampled at time t, ascending: P_r(t) applied to a frame.
Frame apply_shutter(const Frame& frame, const ShutterSchedule& schedule, int t);

/// Embed sampled rows back into an otherwise zero N x N frame: P_r(t)^T.
Frame shutter_adjoint(const Frame& sample, const ShutterSchedule& schedule, int t);

/// Forward model: y(t) = P_r(t) H x(t) + z(t). When `noise` is set, the
/// Gaussian noise variance is calibrated so the sequence-level SNR of the
/// realized noiseless measurements equals NoiseSpec::snr_db.
MeasurementSeq measure(const Movie& movie, const Psf& psf,
                       const ShutterSchedule& schedule, ConvMode mode,
                       const std::optional<NoiseSpec>& noise = std::nullopt,
                       std::uint64_t rng_seed = 0);

/// Dense (lines_total * N) x N^2 sensing matrix A(t) acting on row-major
/// vectorized frames. Test oracle; guarded to N <= 32.
Eigen::MatrixXd materialize_sensing_matrix(const Psf& psf,
                                           const ShutterSchedule& schedule,
                                           int t, ConvMode mode);

} // namespace rscs
