#pragma once

#include "rscs/model.hpp"

#include <cstdint>
#include <vector>

namespace rscs {

/// One oscillatory burst: a raised-cosine-windowed sinusoid lasting
/// `cycles` full periods, riding on the window's DC pedestal so intensity
/// stays nonnegative.
struct PulseSpec {
    double freq_hz = 100.0;
    double start_s = 0.0;
    int cycles = 2;
    double amplitude = 1.0;

    double duration_s() const { return cycles / freq_hz; }
    void validate() const;
};

/// Point-source transient event: a 1-D pulse train multiplied by a unit-peak
/// spatial Gaussian.
struct PsteSpec {
    std::vector<PulseSpec> pulses;
    int n = 128;
    double sigma_px = 1.274; // FWHM ~ 3 px
    std::pair<int, int> center{64, 64};
    double rate_hz = 1000.0;
    double duration_s = 0.3;

    int t_len() const { return static_cast<int>(duration_s * rate_hz + 0.5); }
    void validate() const;
};

/// Temporal support of one pulse in frame indices [first, last].
struct PulseSupport {
    double freq_hz = 0.0;
    int first_frame = 0;
    int last_frame = 0;
};

/// The 1-D waveform of a pulse train sampled at rate_hz.
std::vector<double> pulse_waveform(const std::vector<PulseSpec>& pulses,
                                   double rate_hz, int t_len);

Movie gen_pste(const PsteSpec& spec);

/// Temporal supports of the spec's pulses at its sampling rate.
std::vector<PulseSupport> pulse_supports(const PsteSpec& spec);

/// Pulses at regular intervals with frequencies swept linearly from f_start
/// to f_end; f_end must not exceed the Nyquist limit rate_hz / 2.
std::pair<Movie, std::vector<PulseSupport>> gen_pulse_sweep(
    double f_start_hz, double f_end_hz, int n_pulses, double spacing_s,
    const PsteSpec& spatial);

enum class PsfKind { subgaussian, speckle, delta };

struct PsfParams {
    double disk_radius_frac = 0.35; // speckle support radius, fraction of N
    double lowpass_sigma_px = 1.5;  // speckle smoothing width
};

/// Synthetic PSF generator. subgaussian: i.i.d. standard normal entries.
/// speckle: nonnegative, disk-limited pseudo-diffuser (low-passed white
/// noise, squared, energy-normalized to |zeta|_2 = N). delta: unit impulse
/// at the center pixel.
Psf gen_psf(PsfKind kind, int n, std::uint64_t rng_seed, const PsfParams& params = {});

/// FWHM (pixels) to Gaussian sigma.
double fwhm_to_sigma(double fwhm_px);

/// The paper-scale four-pulse PSTE (15/50/100/400 Hz over 300 ms at 1 kHz,
/// 128 x 128, ~3 px FWHM).
PsteSpec default_pste_spec();

} // namespace rscs
