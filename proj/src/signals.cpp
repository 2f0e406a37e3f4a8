#include "rscs/signals.hpp"

#include "rscs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rscs {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

constexpr double kPi = std::numbers::pi;

} // namespace

void PulseSpec::validate() const {
    require(freq_hz > 0.0, "PulseSpec: freq_hz must be > 0");
    require(amplitude >= 0.0, "PulseSpec: amplitude must be >= 0");
    require(cycles >= 1, "PulseSpec: cycles must be >= 1");
    require(start_s >= 0.0, "PulseSpec: start_s must be >= 0");
}

void PsteSpec::validate() const {
    require(n >= 1, "PsteSpec: n must be >= 1");
    require(sigma_px > 0.0, "PsteSpec: sigma_px must be > 0");
    require(duration_s * rate_hz >= 1.0, "PsteSpec: fewer than one frame");
    for (const auto& p : pulses) p.validate();

    // Pulses must not overlap in time.
    std::vector<std::pair<double, double>> spans;
    spans.reserve(pulses.size());
    for (const auto& p : pulses) spans.emplace_back(p.start_s, p.start_s + p.duration_s());
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
        require(spans[i].first >= spans[i - 1].second, "PsteSpec: overlapping pulses");
    }
}

std::vector<double> pulse_waveform(const std::vector<PulseSpec>& pulses,
                                   double rate_hz, int t_len) {
    std::vector<double> w(static_cast<std::size_t>(t_len), 0.0);
    for (const auto& p : pulses) {
        const double dur = p.duration_s();
        for (int i = 0; i < t_len; ++i) {
            const double t = i / rate_hz - p.start_s;
            if (t < 0.0 || t >= dur) continue;
            // Hann window times (1 + sin)/2: oscillates at freq_hz between 0
            // and the window envelope, never negative.
            const double window = 0.5 * (1.0 - std::cos(2.0 * kPi * t / dur));
            const double carrier = 0.5 * (1.0 + std::sin(2.0 * kPi * p.freq_hz * t));
            w[static_cast<std::size_t>(i)] += p.amplitude * window * carrier;
        }
    }
    for (double& v : w) v = std::max(0.0, v);
    return w;
}

Movie gen_pste(const PsteSpec& spec) {
    spec.validate();
    const int t_len = spec.t_len();
    const std::vector<double> w = pulse_waveform(spec.pulses, spec.rate_hz, t_len);

    Frame gauss(spec.n, spec.n);
    const double inv_two_sigma_sq = 1.0 / (2.0 * spec.sigma_px * spec.sigma_px);
    for (int r = 0; r < spec.n; ++r) {
        for (int c = 0; c < spec.n; ++c) {
            const double dr = r - spec.center.first;
            const double dc = c - spec.center.second;
            gauss(r, c) = std::exp(-(dr * dr + dc * dc) * inv_two_sigma_sq);
        }
    }

    Movie movie(spec.n, t_len, 1.0 / spec.rate_hz);
    for (int t = 0; t < t_len; ++t) {
        movie.data.frame(t) = (w[static_cast<std::size_t>(t)] * gauss).max(0.0);
    }
    return movie;
}

std::vector<PulseSupport> pulse_supports(const PsteSpec& spec) {
    const int t_len = spec.t_len();
    std::vector<PulseSupport> out;
    out.reserve(spec.pulses.size());
    for (const auto& p : spec.pulses) {
        PulseSupport s;
        s.freq_hz = p.freq_hz;
        s.first_frame = std::max(0, static_cast<int>(std::ceil(p.start_s * spec.rate_hz)));
        const double end_s = p.start_s + p.duration_s();
        s.last_frame = std::min(t_len - 1,
                                static_cast<int>(std::ceil(end_s * spec.rate_hz)) - 1);
        if (s.first_frame <= s.last_frame) out.push_back(s);
    }
    return out;
}

std::pair<Movie, std::vector<PulseSupport>> gen_pulse_sweep(
    double f_start_hz, double f_end_hz, int n_pulses, double spacing_s,
    const PsteSpec& spatial) {
    require(n_pulses >= 1, "gen_pulse_sweep: need at least one pulse");
    require(f_start_hz > 0.0 && f_start_hz <= f_end_hz,
            "gen_pulse_sweep: need 0 < f_start <= f_end");
    require(f_end_hz <= spatial.rate_hz / 2.0,
            "gen_pulse_sweep: f_end exceeds the Nyquist limit");
    require(spacing_s > 0.0, "gen_pulse_sweep: spacing must be > 0");

    PsteSpec spec = spatial;
    spec.pulses.clear();
    for (int i = 0; i < n_pulses; ++i) {
        PulseSpec p;
        p.freq_hz = n_pulses == 1
                        ? f_start_hz
                        : f_start_hz + (f_end_hz - f_start_hz) * i / (n_pulses - 1);
        p.start_s = i * spacing_s;
        p.cycles = 2;
        p.amplitude = 1.0;
        spec.pulses.push_back(p);
    }
    Movie movie = gen_pste(spec);
    return {std::move(movie), pulse_supports(spec)};
}

double fwhm_to_sigma(double fwhm_px) {
    return fwhm_px / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

Psf gen_psf(PsfKind kind, int n, std::uint64_t rng_seed, const PsfParams& params) {
    require(n >= 1, "gen_psf: n must be >= 1");
    switch (kind) {
        case PsfKind::delta: {
            Frame k = Frame::Zero(n, n);
            k(n / 2, n / 2) = 1.0;
            return Psf(k);
        }
        case PsfKind::subgaussian: {
            Rng rng(rng_seed);
            Frame k(n, n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) k(r, c) = rng.normal();
            }
            return Psf(k);
        }
        case PsfKind::speckle: {
            Rng rng(rng_seed);
            Frame noise(n, n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) noise(r, c) = rng.normal();
            }
            // Low-pass with a circularly wrapped Gaussian to get speckle
            // grains wider than one pixel.
            Frame blur(n, n);
            const double s2 = 2.0 * params.lowpass_sigma_px * params.lowpass_sigma_px;
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    const double dr = std::min(r, n - r);
                    const double dc = std::min(c, n - c);
                    blur(r, c) = std::exp(-(dr * dr + dc * dc) / s2);
                }
            }
            Psf blur_psf(blur);
            Frame smooth = convolve(noise, blur_psf, ConvMode::circular);
            // Restrict to a centered disk, square for nonnegativity.
            const double radius = params.disk_radius_frac * n;
            const int c0 = n / 2;
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    const double dr = r - c0, dc = c - c0;
                    if (dr * dr + dc * dc > radius * radius) {
                        smooth(r, c) = 0.0;
                    } else {
                        smooth(r, c) = smooth(r, c) * smooth(r, c);
                    }
                }
            }
            const double energy = std::sqrt(smooth.square().sum());
            require(energy > 0.0, "gen_psf: degenerate speckle kernel");
            smooth *= static_cast<double>(n) / energy; // |zeta|_2 = N
            return Psf(smooth);
        }
    }
    throw std::invalid_argument("gen_psf: unknown kind");
}

PsteSpec default_pste_spec() {
    PsteSpec spec;
    spec.n = 128;
    spec.sigma_px = fwhm_to_sigma(3.0);
    spec.center = {64, 64};
    spec.rate_hz = 1000.0;
    spec.duration_s = 0.3;
    const double freqs[4] = {15.0, 50.0, 100.0, 400.0};
    const double starts[4] = {0.02, 0.17, 0.22, 0.26};
    for (int i = 0; i < 4; ++i) {
        PulseSpec p;
        p.freq_hz = freqs[i];
        p.start_s = starts[i];
        p.cycles = 2;
        p.amplitude = 1.0;
        spec.pulses.push_back(p);
    }
    return spec;
}

} // namespace rscs
