#pragma once

#include "rscs/model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rscs {

enum class StepMode { conservative, empirical };

struct SolverConfig {
    double lambda = 0.1;
    /// Gradient stepsize tau. Unset means calibrate from the PSF spectrum,
    /// the summation-operator norm and the shutter pass count.
    std::optional<double> step;
    int max_iters = 10000;
    double conv_tol = 1e-6;
    std::optional<int> block_len;
    StepMode step_mode = StepMode::conservative;
    /// Multipliers (lambda_t, lambda_xy) applied to lambda by the TV solver.
    std::pair<double, double> lambda_split{2.0, 0.9};
    /// Dual iterations per TV proximal step.
    int tv_inner_iters = 20;

    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    double final_objective = 0.0;
    std::vector<double> objective_trace;
    double wall_time = 0.0; // seconds
    bool converged = false;
};

/// Elementwise sign(v) * max(|v| - lam, 0).
double soft_threshold(double v, double lam);
void soft_threshold_inplace(Volume& v, double lam);

/// Cumulative sum along time: x(t) = sum_{s<=t} d(s).
Movie diffs_to_movie(const DiffMovie& d);

/// Adjacent frame differences: d(t) = x(t) - x(t-1), x(-1) = 0.
DiffMovie movie_to_diffs(const Movie& x);

/// Gradient of the data-fidelity term of the differences objective:
/// g(i) = H^T sum_{t>=i} P(t)^T [A(t) (sum_{s<=t} d(s)) - y(t)].
DiffMovie grad_l2_diffs(const DiffMovie& d, const MeasurementSeq& y,
                        const Psf& psf, const ShutterSchedule& schedule,
                        ConvMode mode);

/// Largest singular value of the T x T lower-triangular all-ones matrix.
double summation_operator_norm(int t_len);

/// Stepsize calibration. Conservative: (|F zeta|_inf * sigma1(S) * r)^-2,
/// which makes the gradient step a contraction. Empirical:
/// |F zeta|_inf^-2 * (sigma1(S) * r)^-1.
double calibrate_stepsize(const Psf& psf, int t_len, int passes, StepMode mode);

/// Data fidelity plus l1 penalty of the differences objective at d.
double objective_diffs(const DiffMovie& d, const MeasurementSeq& y, const Psf& psf,
                       const ShutterSchedule& schedule, ConvMode mode, double lambda);

/// The frames form of the same objective at x (l1 on adjacent differences).
double objective_frames(const Movie& x, const MeasurementSeq& y, const Psf& psf,
                        const ShutterSchedule& schedule, ConvMode mode, double lambda);

/// FISTA on the differences objective, soft-thresholding prox, adaptive
/// momentum restart when the objective increases.
std::pair<DiffMovie, SolveReport> fista_d(const MeasurementSeq& y,
                                          const DiffMovie& init_d,
                                          const SolverConfig& cfg, const Psf& psf,
                                          const ShutterSchedule& schedule,
                                          ConvMode mode);

/// Blocked variant: consecutive time blocks of length cfg.block_len, each
/// warm-started with the previous block's final reconstructed frame.
std::pair<DiffMovie, SolveReport> blocked_fista_d(const MeasurementSeq& y,
                                                  const SolverConfig& cfg,
                                                  const Psf& psf,
                                                  const ShutterSchedule& schedule,
                                                  ConvMode mode);

/// Per-frame lasso benchmark: 1/2 |A x - y|^2 + lambda |x|_1, frame by frame.
std::pair<Movie, SolveReport> l1_solver(const MeasurementSeq& y,
                                        const SolverConfig& cfg, const Psf& psf,
                                        const ShutterSchedule& schedule,
                                        ConvMode mode);

/// Anisotropic weighted 3-D TV benchmark solved by FISTA with an inner
/// dual-projection prox (fixed iteration budget, warm started).
std::pair<Movie, SolveReport> tv_solver(const MeasurementSeq& y,
                                        const SolverConfig& cfg, const Psf& psf,
                                        const ShutterSchedule& schedule,
                                        ConvMode mode);

/// Dual variables of the TV prox, kept across outer iterations.
struct TvDual {
    Volume p_row, p_col, p_t;
    bool initialized = false;
};

/// prox of w_row |grad_row u|_1 + w_col |grad_col u|_1 + w_t |grad_t u|_1
/// at v, via `iters` fast-gradient-projection steps on the dual.
Volume tv_prox(const Volume& v, double w_row, double w_col, double w_t, int iters,
               TvDual* warm = nullptr);

} // namespace rscs
