#include "rscs/model.hpp"

#include "rscs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rscs {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Kernel zero-padded onto the (2N-1)^2 grid used by the physical mode.
Frame pad_to(const Frame& f, int rows, int cols) {
    Frame out = Frame::Zero(rows, cols);
    out.topLeftCorner(f.rows(), f.cols()) = f;
    return out;
}

Frame spectral_convolve(const Frame& frame, const fft::Spectrum& kernel_spec,
                        bool conjugate_kernel) {
    const int rows = static_cast<int>(frame.rows());
    const int cols = static_cast<int>(frame.cols());
    fft::Spectrum spec = fft::forward(frame.data(), rows, cols);
    if (conjugate_kernel) {
        for (std::size_t i = 0; i < spec.size(); ++i) {
            spec.bins[i] *= std::conj(kernel_spec.bins[i]);
        }
    } else {
        for (std::size_t i = 0; i < spec.size(); ++i) {
            spec.bins[i] *= kernel_spec.bins[i];
        }
    }
    Frame out(rows, cols);
    fft::backward(spec, out.data());
    return out;
}

} // namespace

Psf::Psf(Frame kernel) : kernel_(std::move(kernel)) {
    require(kernel_.rows() >= 1 && kernel_.rows() == kernel_.cols(),
            "Psf: kernel must be square and non-empty");
    require(kernel_.isFinite().all(), "Psf: kernel must be finite");
    const int n = static_cast<int>(kernel_.rows());
    freq_ = fft::forward(kernel_.data(), n, n);
    norm_inf_freq_ = fft::max_modulus(freq_);
    const int c = n / 2;
    Frame rolled(n, n);
    for (int r = 0; r < n; ++r) {
        for (int col = 0; col < n; ++col) {
            rolled(r, col) = kernel_((r + c) % n, (col + c) % n);
        }
    }
    freq_centered_ = fft::forward(rolled.data(), n, n);
    // 2N >= 2N-1 rules out wraparound in the linear convolution and keeps
    // the transform size even (2N-1 is often prime, which FFTW hates).
    const int p = 2 * n;
    const Frame padded = pad_to(kernel_, p, p);
    freq_padded_ = fft::forward(padded.data(), p, p);
}

void Movie::validate() const {
    require(data.rows() == data.cols(), "Movie: frames must be square");
    require(data.rows() >= 1 && data.frames() >= 1, "Movie: empty");
    require(dt > 0.0, "Movie: dt must be positive");
    require(data.all_finite(), "Movie: non-finite entries");
}

std::vector<int> ShutterSchedule::rows_at(int t) const {
    require(t >= 0, "rows_at: t must be >= 0");
    std::vector<int> rows;
    rows.reserve(static_cast<std::size_t>(lines_total()));
    for (int s = 0; s < num_shutters; ++s) {
        const long long start = phase_offset + static_cast<long long>(s) * shutter_gap +
                                static_cast<long long>(t) * lines_per_sample;
        for (int l = 0; l < lines_per_sample; ++l) {
            rows.push_back(static_cast<int>((start + l) % n));
        }
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

ShutterSchedule ShutterSchedule::advanced_by(int samples) const {
    ShutterSchedule out = *this;
    const long long shift = static_cast<long long>(samples) * lines_per_sample;
    out.phase_offset = static_cast<int>(((phase_offset + shift) % n + n) % n);
    return out;
}

void ShutterSchedule::validate() const {
    require(n >= 1, "ShutterSchedule: n must be >= 1");
    require(lines_per_sample >= 1, "ShutterSchedule: lines_per_sample must be >= 1");
    require(num_shutters == 1 || num_shutters == 2,
            "ShutterSchedule: num_shutters must be 1 or 2");
    require(lines_total() <= n, "ShutterSchedule: more lines than FPA rows");
    require(phase_offset >= 0 && phase_offset < n,
            "ShutterSchedule: phase_offset out of range");
    require(rate_hz > 0.0, "ShutterSchedule: rate must be positive");
    if (num_shutters == 2) {
        const int gap = ((shutter_gap % n) + n) % n;
        require(gap >= lines_per_sample && n - gap >= lines_per_sample,
                "ShutterSchedule: double-shutter blocks overlap");
    }
}

Frame convolve(const Frame& frame, const Psf& psf, ConvMode mode) {
    require(frame.rows() == psf.n() && frame.cols() == psf.n(),
            "convolve: frame and psf shapes differ");
    if (mode == ConvMode::circular) {
        return spectral_convolve(frame, psf.freq_centered(), false);
    }
    // Physical mode: linear convolution on the padded grid, then crop the
    // window aligned with the kernel's center pixel. Energy pushed past the
    // FPA edge is lost instead of wrapping around.
    const int n = psf.n();
    const int p = 2 * n;
    const int c = psf.center();
    const Frame padded = pad_to(frame, p, p);
    const Frame full = spectral_convolve(padded, psf.freq_padded(), false);
    return full.block(c, c, n, n);
}

Frame convolve_adjoint(const Frame& frame, const Psf& psf, ConvMode mode) {
    require(frame.rows() == psf.n() && frame.cols() == psf.n(),
            "convolve_adjoint: frame and psf shapes differ");
    if (mode == ConvMode::circular) {
        return spectral_convolve(frame, psf.freq_centered(), true);
    }
    // Adjoint of crop(center) o linear-convolve o pad(top-left): embed at the
    // center offset, correlate, crop at the origin.
    const int n = psf.n();
    const int p = 2 * n;
    const int c = psf.center();
    Frame embedded = Frame::Zero(p, p);
    embedded.block(c, c, n, n) = frame;
    const Frame full = spectral_convolve(embedded, psf.freq_padded(), true);
    return full.topLeftCorner(n, n);
}

Frame apply_shutter(const Frame& frame, const ShutterSchedule& schedule, int t) {
    require(frame.rows() == schedule.n && frame.cols() == schedule.n,
            "apply_shutter: frame does not match schedule FPA size");
    const std::vector<int> rows = schedule.rows_at(t);
    Frame out(static_cast<int>(rows.size()), schedule.n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<int>(i)) = frame.row(rows[i]);
    }
    return out;
}

Frame shutter_adjoint(const Frame& sample, const ShutterSchedule& schedule, int t) {
    const std::vector<int> rows = schedule.rows_at(t);
    require(sample.rows() == static_cast<Eigen::Index>(rows.size()) &&
                sample.cols() == schedule.n,
            "shutter_adjoint: sample shape does not match schedule");
    Frame out = Frame::Zero(schedule.n, schedule.n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(rows[i]) = sample.row(static_cast<int>(i));
    }
    return out;
}

MeasurementSeq measure(const Movie& movie, const Psf& psf,
                       const ShutterSchedule& schedule, ConvMode mode,
                       const std::optional<NoiseSpec>& noise,
                       std::uint64_t rng_seed) {
    require(movie.n() == psf.n(), "measure: movie and psf sizes differ");
    require(movie.n() == schedule.n, "measure: movie and schedule sizes differ");
    schedule.validate();

    MeasurementSeq seq;
    seq.schedule = schedule;
    seq.data = Volume(schedule.lines_total(), schedule.n, movie.t_len());
    for (int t = 0; t < movie.t_len(); ++t) {
        seq.data.frame(t) = apply_shutter(convolve(movie.data.frame(t), psf, mode),
                                          schedule, t);
    }

    if (noise) {
        const double signal_power = seq.data.flat().square().mean();
        if (signal_power <= 0.0) {
            throw std::invalid_argument(
                "measure: SNR requested but the noiseless measurements are all zero");
        }
        const double sigma =
            std::sqrt(signal_power / std::pow(10.0, noise->snr_db / 10.0));
        Rng rng(rng_seed);
        auto flat = seq.data.flat();
        for (Eigen::Index i = 0; i < flat.size(); ++i) {
            flat[i] += sigma * rng.normal();
        }
    }
    return seq;
}

Eigen::MatrixXd materialize_sensing_matrix(const Psf& psf,
                                           const ShutterSchedule& schedule,
                                           int t, ConvMode mode) {
    const int n = psf.n();
    require(n <= 32, "materialize_sensing_matrix: N > 32");
    require(n == schedule.n, "materialize_sensing_matrix: psf and schedule sizes differ");
    const int m = schedule.lines_total() * n;
    Eigen::MatrixXd a(m, n * n);
    Frame delta = Frame::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            delta(r, c) = 1.0;
            const Frame sampled = apply_shutter(convolve(delta, psf, mode), schedule, t);
            delta(r, c) = 0.0;
            // Row-major vectorization on both sides.
            a.col(r * n + c) =
                Eigen::Map<const Eigen::VectorXd>(sampled.data(), sampled.size());
        }
    }
    return a;
}

} // namespace rscs
