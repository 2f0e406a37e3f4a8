#pragma once

#include "rscs/model.hpp"
#include "rscs/signals.hpp"

#include <cstdint>
#include <vector>

namespace rscs {

struct ErrorReport {
    double avg_framewise_l2 = 0.0;
    std::vector<double> per_frame_l2;
    /// (freq_hz, normalized error) per pulse when pulse metadata was given.
    std::vector<std::pair<double, double>> per_pulse_normalized;
};

struct RipEstimate {
    int k = 0;
    int trials = 0;
    /// Max observed |ratio - 1| after normalization: a Monte-Carlo lower
    /// bound on delta_k, not an exact constant.
    double delta_lower = 0.0;
    /// Empirical scaling that maps the raw operator to mean ratio 1.
    double normalization = 0.0;
    /// Raw |Ax|^2/|x|^2 extremes over the trials. Under prefix seeds these
    /// are growing extrema, unlike delta_lower whose normalization moves
    /// with the trial count.
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    /// Set when every trial lands entirely on dead lines.
    bool degenerate = false;
};

/// Average frame-wise l2 reconstruction error: (1/T) sum_t |x*(t) - x_hat(t)|_2.
ErrorReport avg_framewise_error(const Movie& x_star, const Movie& x_hat);

/// Per-pulse score: mean per-frame l2 error over the pulse's temporal
/// support divided by the pulse's mean per-frame signal power there.
std::vector<std::pair<double, double>> pulse_normalized_errors(
    const Movie& x_star, const Movie& x_hat, const std::vector<PulseSupport>& pulses);

/// 10 log10(mean signal power / mean noise power).
double snr_db(const Eigen::ArrayXd& signal, const Eigen::ArrayXd& noise);

/// Monte-Carlo RIP probe of the (self-normalized) operator A(t) on random
/// k-sparse frames.
RipEstimate estimate_rip(const Psf& psf, const ShutterSchedule& schedule, int t,
                         int k, int trials, std::uint64_t rng_seed, ConvMode mode);

/// Exact restricted isometry constant of the normalized A(t) for tiny k,
/// by exhaustive support enumeration (column normalization chosen so the
/// mean squared column norm is 1).
double exact_rip_delta(const Psf& psf, const ShutterSchedule& schedule, int t,
                       int k, ConvMode mode);

struct Lemma1Result {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// |x|_1 <= n (|x(0)| + |grad x|_1) for the forward-difference gradient.
Lemma1Result lemma1_check(const Eigen::ArrayXd& x);

struct Theorem2Bound {
    double value = 0.0;         // sparsity_term + noise_term
    double sparsity_term = 0.0; // C * (|x*(0)_Ic|_1 + |grad_t x*_Ic|_1) / sqrt(k)
    double noise_term = 0.0;    // C' * T * eps
    double c_sparsity = 0.0;    // C
    double c_noise = 0.0;       // C'
    double c_inner = 0.0;       // C'' = (1 - 4 T delta_2k)^-1
};

/// Executable right-hand side of the average frame-wise error bound, with
/// the constants composed from the proof chain. `support` holds the pixel
/// indices of I (row-major), |I| <= k; requires delta_2k < (4T)^-1.
Theorem2Bound theorem2_bound(const Movie& x_star, int k, double delta_2k, double eps,
                             const std::vector<int>& support);

} // namespace rscs
