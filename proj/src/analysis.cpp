#include "rscs/analysis.hpp"

#include "rscs/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rscs {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

ErrorReport avg_framewise_error(const Movie& x_star, const Movie& x_hat) {
    require(x_star.data.same_shape(x_hat.data),
            "avg_framewise_error: shape mismatch");
    ErrorReport report;
    report.per_frame_l2.reserve(static_cast<std::size_t>(x_star.t_len()));
    double sum = 0.0;
    for (int t = 0; t < x_star.t_len(); ++t) {
        const double err =
            std::sqrt((x_star.data.frame(t) - x_hat.data.frame(t)).square().sum());
        report.per_frame_l2.push_back(err);
        sum += err;
    }
    report.avg_framewise_l2 = sum / x_star.t_len();
    return report;
}

std::vector<std::pair<double, double>> pulse_normalized_errors(
    const Movie& x_star, const Movie& x_hat, const std::vector<PulseSupport>& pulses) {
    require(x_star.data.same_shape(x_hat.data),
            "pulse_normalized_errors: shape mismatch");
    std::vector<std::pair<double, double>> out;
    out.reserve(pulses.size());
    for (const auto& p : pulses) {
        require(p.first_frame >= 0 && p.last_frame < x_star.t_len() &&
                    p.first_frame <= p.last_frame,
                "pulse_normalized_errors: support out of range");
        double err = 0.0;
        double power = 0.0;
        const int len = p.last_frame - p.first_frame + 1;
        for (int t = p.first_frame; t <= p.last_frame; ++t) {
            err += std::sqrt((x_star.data.frame(t) - x_hat.data.frame(t)).square().sum());
            power += x_star.data.frame(t).square().sum();
        }
        err /= len;
        power /= len;
        double score;
        if (power > 0.0) {
            score = err / power;
        } else {
            score = err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        out.emplace_back(p.freq_hz, score);
    }
    return out;
}

double snr_db(const Eigen::ArrayXd& signal, const Eigen::ArrayXd& noise) {
    require(signal.size() > 0 && noise.size() > 0, "snr_db: empty input");
    const double ps = signal.square().mean();
    const double pn = noise.square().mean();
    return 10.0 * std::log10(ps / pn);
}

RipEstimate estimate_rip(const Psf& psf, const ShutterSchedule& schedule, int t,
                         int k, int trials, std::uint64_t rng_seed, ConvMode mode) {
    const int n = psf.n();
    const long long p = static_cast<long long>(n) * n;
    require(k >= 1 && k <= p, "estimate_rip: k out of range");
    require(trials >= 1, "estimate_rip: trials must be >= 1");

    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(trials));
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(Rng::derive(rng_seed, static_cast<std::uint64_t>(trial)));
        Frame x = Frame::Zero(n, n);
        // k distinct uniform pixels with standard normal values.
        std::vector<std::uint64_t> chosen;
        while (static_cast<int>(chosen.size()) < k) {
            const std::uint64_t idx = rng.below(static_cast<std::uint64_t>(p));
            if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) {
                chosen.push_back(idx);
            }
        }
        for (const auto idx : chosen) {
            x(static_cast<int>(idx / n), static_cast<int>(idx % n)) = rng.normal();
        }
        const double xx = x.square().sum();
        const Frame ax = apply_shutter(convolve(x, psf, mode), schedule, t);
        ratios.push_back(ax.square().sum() / xx);
    }

    RipEstimate est;
    est.k = k;
    est.trials = trials;
    double mean = 0.0;
    est.ratio_min = ratios.front();
    est.ratio_max = ratios.front();
    for (double r : ratios) {
        mean += r;
        est.ratio_min = std::min(est.ratio_min, r);
        est.ratio_max = std::max(est.ratio_max, r);
    }
    mean /= trials;
    est.normalization = mean;
    if (mean <= 0.0) {
        est.degenerate = true;
        est.delta_lower = 1.0;
        return est;
    }
    double worst = 0.0;
    for (double r : ratios) worst = std::max(worst, std::abs(r / mean - 1.0));
    est.delta_lower = worst;
    return est;
}

namespace {

void enumerate_supports(int p, int k, int first, std::vector<int>& cur,
                        const std::function<void(const std::vector<int>&)>& visit) {
    if (static_cast<int>(cur.size()) == k) {
        visit(cur);
        return;
    }
    for (int i = first; i <= p - (k - static_cast<int>(cur.size())); ++i) {
        cur.push_back(i);
        enumerate_supports(p, k, i + 1, cur, visit);
        cur.pop_back();
    }
}

double binomial_guard(long long p, int k) {
    double count = 1.0;
    for (int i = 0; i < k; ++i) count *= static_cast<double>(p - i) / (i + 1);
    return count;
}

} // namespace

double exact_rip_delta(const Psf& psf, const ShutterSchedule& schedule, int t,
                       int k, ConvMode mode) {
    const int n = psf.n();
    const int p = n * n;
    require(k >= 1 && k <= p, "exact_rip_delta: k out of range");
    require(binomial_guard(p, k) <= 3e6, "exact_rip_delta: support enumeration too large");

    const Eigen::MatrixXd a = materialize_sensing_matrix(psf, schedule, t, mode);
    const double scale = static_cast<double>(p) / a.squaredNorm(); // mean col norm^2 -> 1
    const Eigen::MatrixXd gram = scale * (a.transpose() * a);

    double delta = 0.0;
    std::vector<int> cur;
    enumerate_supports(p, k, 0, cur, [&](const std::vector<int>& support) {
        Eigen::MatrixXd sub(k, k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) sub(i, j) = gram(support[i], support[j]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
        delta = std::max(delta, std::abs(eig.eigenvalues().maxCoeff() - 1.0));
        delta = std::max(delta, std::abs(eig.eigenvalues().minCoeff() - 1.0));
    });
    return delta;
}

Lemma1Result lemma1_check(const Eigen::ArrayXd& x) {
    require(x.size() >= 1, "lemma1_check: empty vector");
    Lemma1Result res;
    res.lhs = x.abs().sum();
    double grad_l1 = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) grad_l1 += std::abs(x[i + 1] - x[i]);
    res.rhs = static_cast<double>(x.size()) * (std::abs(x[0]) + grad_l1);
    res.holds = res.lhs <= res.rhs + 1e-12;
    return res;
}

Theorem2Bound theorem2_bound(const Movie& x_star, int k, double delta_2k, double eps,
                             const std::vector<int>& support) {
    const int t_len = x_star.t_len();
    const int p = x_star.n() * x_star.n();
    require(k >= 1, "theorem2_bound: k must be >= 1");
    require(static_cast<int>(support.size()) <= k, "theorem2_bound: |I| must be <= k");
    require(eps >= 0.0, "theorem2_bound: eps must be >= 0");
    require(delta_2k >= 0.0, "theorem2_bound: delta_2k must be >= 0");
    if (delta_2k >= 1.0 / (4.0 * t_len)) {
        throw std::invalid_argument(
            "theorem2_bound: hypothesis delta_2k < (4T)^-1 violated");
    }

    std::vector<bool> in_support(static_cast<std::size_t>(p), false);
    for (int idx : support) {
        require(idx >= 0 && idx < p, "theorem2_bound: support index out of range");
        in_support[static_cast<std::size_t>(idx)] = true;
    }

    // sigma = |x*(0) restricted off I|_1 + |grad_t x* restricted off I-bar|_1.
    double sigma = 0.0;
    {
        const auto f0 = x_star.data.frame(0);
        const double* d = f0.data();
        for (int i = 0; i < p; ++i) {
            if (!in_support[static_cast<std::size_t>(i)]) sigma += std::abs(d[i]);
        }
    }
    for (int t = 0; t + 1 < t_len; ++t) {
        const Frame g = x_star.data.frame(t + 1) - x_star.data.frame(t);
        const double* d = g.data();
        for (int i = 0; i < p; ++i) {
            if (!in_support[static_cast<std::size_t>(i)]) sigma += std::abs(d[i]);
        }
    }

    // Constant chain from the proof: C'' absorbs the fixed-point step, the
    // final display distributes (2T+1) over the two terms of the S1 bound.
    const double big_t = static_cast<double>(t_len);
    Theorem2Bound b;
    b.c_inner = 1.0 / (1.0 - 4.0 * big_t * delta_2k);
    b.c_sparsity = 2.0 + (2.0 * big_t + 1.0) * b.c_inner / big_t;
    b.c_noise = 2.0 * (2.0 * big_t + 1.0) * b.c_inner / big_t;
    b.sparsity_term = b.c_sparsity * sigma / std::sqrt(static_cast<double>(k));
    b.noise_term = b.c_noise * big_t * eps;
    b.value = b.sparsity_term + b.noise_term;
    return b;
}

} // namespace rscs
