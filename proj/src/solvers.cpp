#include "rscs/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rscs {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

int passes_for(const ShutterSchedule& schedule, int t_len) {
    const long long swept = static_cast<long long>(t_len) * schedule.lines_total();
    return static_cast<int>(std::max<long long>(1, (swept + schedule.n - 1) / schedule.n));
}

// A(t) applied to the prefix sums of d, stacked per sample time.
Volume forward_measured(const Volume& d, const Psf& psf,
                        const ShutterSchedule& schedule, ConvMode mode) {
    Volume out(schedule.lines_total(), schedule.n, d.frames());
    Frame x = Frame::Zero(d.rows(), d.cols());
    for (int t = 0; t < d.frames(); ++t) {
        x += d.frame(t);
        out.frame(t) = apply_shutter(convolve(x, psf, mode), schedule, t);
    }
    return out;
}

// g(i) = H^T sum_{t>=i} P(t)^T eta(t); the suffix sum is accumulated once.
Volume gradient_from_residuals(const Volume& eta, const Psf& psf,
                               const ShutterSchedule& schedule, ConvMode mode) {
    const int n = schedule.n;
    Volume g(n, n, eta.frames());
    Frame acc = Frame::Zero(n, n);
    for (int t = eta.frames() - 1; t >= 0; --t) {
        acc += shutter_adjoint(eta.frame(t), schedule, t);
        g.frame(t) = convolve_adjoint(acc, psf, mode);
    }
    return g;
}

// Shared FISTA loop: canonical momentum sequence, adaptive restart on
// objective increase, relative-change stopping rule. The forward operator is
// linear, so the extrapolated point's measurements are combined from the two
// stored forward passes instead of recomputed.
template <class Forward, class Gradient, class Prox, class RegValue>
std::pair<Volume, SolveReport> run_fista(const Volume& y, Volume init, double tau,
                                         int max_iters, double conv_tol,
                                         Forward&& forward, Gradient&& gradient,
                                         Prox&& prox, RegValue&& reg_value,
                                         const char* name) {
    const auto t_start = std::chrono::steady_clock::now();

    Volume x_cur = std::move(init);
    Volume x_old = x_cur;
    Volume m_cur = forward(x_cur);
    Volume m_old = m_cur;

    auto data_term = [&](const Volume& m) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < m.flat().size(); ++i) {
            const double r = m.flat()[i] - y.flat()[i];
            s += r * r;
        }
        return 0.5 * s;
    };

    double f_cur = data_term(m_cur) + reg_value(x_cur);
    double t_momentum = 1.0;
    double t_momentum_old = 1.0;

    SolveReport report;
    Volume w, m_w, eta(y.rows(), y.cols(), y.frames());

    for (int iter = 1; iter <= max_iters; ++iter) {
        const double beta = (t_momentum_old - 1.0) / t_momentum;
        w = x_cur;
        m_w = m_cur;
        if (beta != 0.0) {
            w.flat() += beta * (x_cur.flat() - x_old.flat());
            m_w.flat() += beta * (m_cur.flat() - m_old.flat());
        }

        auto step_from = [&](const Volume& point, const Volume& measured) {
            eta.flat() = measured.flat() - y.flat();
            Volume g = gradient(eta);
            Volume cand = point;
            cand.flat() -= tau * g.flat();
            // Check before the prox: soft-thresholding would flatten NaN to 0
            // and mask the divergence.
            if (!cand.all_finite()) {
                throw std::runtime_error(std::string(name) +
                                         ": non-finite iterate at iteration " +
                                         std::to_string(iter) +
                                         " (stepsize too large?)");
            }
            prox(cand, tau);
            return cand;
        };

        Volume cand = step_from(w, m_w);
        Volume m_cand = forward(cand);
        double f_cand = data_term(m_cand) + reg_value(cand);

        if (f_cand > f_cur) {
            // Momentum overshot: restart the sequence and take a plain
            // proximal step from the current iterate.
            t_momentum = 1.0;
            t_momentum_old = 1.0;
            cand = step_from(x_cur, m_cur);
            m_cand = forward(cand);
            f_cand = data_term(m_cand) + reg_value(cand);
        }

        double diff_sq = 0.0;
        double base_sq = 0.0;
        for (Eigen::Index i = 0; i < cand.flat().size(); ++i) {
            const double dd = cand.flat()[i] - x_cur.flat()[i];
            diff_sq += dd * dd;
            base_sq += x_cur.flat()[i] * x_cur.flat()[i];
        }
        const double rel_change =
            std::sqrt(diff_sq) / std::max(std::sqrt(base_sq), 1e-12);

        x_old = std::move(x_cur);
        m_old = std::move(m_cur);
        x_cur = std::move(cand);
        m_cur = std::move(m_cand);
        f_cur = f_cand;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        t_momentum_old = t_momentum;
        t_momentum = t_next;

        report.objective_trace.push_back(f_cur);
        report.iterations = iter;
        if (rel_change <= conv_tol) {
            report.converged = true;
            break;
        }
    }

    report.final_objective = f_cur;
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(x_cur), std::move(report)};
}

void check_problem_shapes(const MeasurementSeq& y, const Psf& psf,
                          const ShutterSchedule& schedule) {
    schedule.validate();
    require(psf.n() == schedule.n, "solver: psf and schedule sizes differ");
    require(y.data.rows() == schedule.lines_total() && y.data.cols() == schedule.n,
            "solver: measurements do not match schedule");
    require(y.data.all_finite(), "solver: non-finite measurements");
}

} // namespace

void SolverConfig::validate() const {
    require(lambda > 0.0, "SolverConfig: lambda must be > 0");
    require(!step || *step > 0.0, "SolverConfig: step must be > 0 when set");
    require(max_iters >= 1, "SolverConfig: max_iters must be >= 1");
    require(conv_tol >= 0.0, "SolverConfig: conv_tol must be >= 0");
    require(!block_len || *block_len >= 1, "SolverConfig: block_len must be >= 1");
    require(tv_inner_iters >= 1, "SolverConfig: tv_inner_iters must be >= 1");
}

double soft_threshold(double v, double lam) {
    if (v > lam) return v - lam;
    if (v < -lam) return v + lam;
    return 0.0;
}

void soft_threshold_inplace(Volume& v, double lam) {
    double* p = v.data();
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = soft_threshold(p[i], lam);
}

Movie diffs_to_movie(const DiffMovie& d) {
    Movie x(d.n(), d.t_len(), d.dt);
    Frame acc = Frame::Zero(d.n(), d.n());
    for (int t = 0; t < d.t_len(); ++t) {
        acc += d.data.frame(t);
        x.data.frame(t) = acc;
    }
    return x;
}

DiffMovie movie_to_diffs(const Movie& x) {
    DiffMovie d(x.n(), x.t_len(), x.dt);
    d.data.frame(0) = x.data.frame(0);
    for (int t = 1; t < x.t_len(); ++t) {
        d.data.frame(t) = x.data.frame(t) - x.data.frame(t - 1);
    }
    return d;
}

DiffMovie grad_l2_diffs(const DiffMovie& d, const MeasurementSeq& y, const Psf& psf,
                        const ShutterSchedule& schedule, ConvMode mode) {
    check_problem_shapes(y, psf, schedule);
    require(d.n() == schedule.n && d.t_len() == y.t_len(),
            "grad_l2_diffs: differences do not match measurements");
    Volume eta = forward_measured(d.data, psf, schedule, mode);
    eta.flat() -= y.data.flat();
    DiffMovie g(d.n(), d.t_len(), d.dt);
    g.data = gradient_from_residuals(eta, psf, schedule, mode);
    return g;
}

double summation_operator_norm(int t_len) {
    require(t_len >= 1, "summation_operator_norm: t_len must be >= 1");
    if (t_len == 1) return 1.0;
    // Power iteration on S^T S; S and S^T apply as prefix and suffix sums.
    std::vector<double> v(t_len, 1.0 / std::sqrt(static_cast<double>(t_len)));
    double value = 0.0;
    for (int it = 0; it < 20000; ++it) {
        // u = S v (prefix), then w = S^T u (suffix).
        double acc = 0.0;
        for (int i = 0; i < t_len; ++i) {
            acc += v[i];
            v[i] = acc;
        }
        acc = 0.0;
        for (int i = t_len - 1; i >= 0; --i) {
            acc += v[i];
            v[i] = acc;
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        if (std::abs(norm - value) <= 1e-14 * std::max(1.0, norm)) {
            value = norm;
            break;
        }
        value = norm;
    }
    return std::sqrt(value);
}

double calibrate_stepsize(const Psf& psf, int t_len, int passes, StepMode mode) {
    require(t_len >= 1 && passes >= 1, "calibrate_stepsize: t_len and passes must be >= 1");
    const double a = psf.norm_inf_freq();
    const double s = summation_operator_norm(t_len);
    const double r = static_cast<double>(passes);
    if (mode == StepMode::conservative) {
        const double denom = a * s * r;
        return 1.0 / (denom * denom);
    }
    return 1.0 / (a * a * s * r);
}

double objective_diffs(const DiffMovie& d, const MeasurementSeq& y, const Psf& psf,
                       const ShutterSchedule& schedule, ConvMode mode, double lambda) {
    Volume m = forward_measured(d.data, psf, schedule, mode);
    m.flat() -= y.data.flat();
    return 0.5 * m.flat().square().sum() + lambda * d.data.flat().abs().sum();
}

double objective_frames(const Movie& x, const MeasurementSeq& y, const Psf& psf,
                        const ShutterSchedule& schedule, ConvMode mode, double lambda) {
    double value = 0.0;
    Frame prev = Frame::Zero(x.n(), x.n());
    for (int t = 0; t < x.t_len(); ++t) {
        const Frame resid =
            apply_shutter(convolve(x.data.frame(t), psf, mode), schedule, t) -
            y.data.frame(t);
        value += 0.5 * resid.square().sum();
        value += lambda * (x.data.frame(t) - prev).abs().sum();
        prev = x.data.frame(t);
    }
    return value;
}

std::pair<DiffMovie, SolveReport> fista_d(const MeasurementSeq& y,
                                          const DiffMovie& init_d,
                                          const SolverConfig& cfg, const Psf& psf,
                                          const ShutterSchedule& schedule,
                                          ConvMode mode) {
    cfg.validate();
    check_problem_shapes(y, psf, schedule);
    require(init_d.n() == schedule.n && init_d.t_len() == y.t_len(),
            "fista_d: init does not match measurements");

    const int t_len = y.t_len();
    const double tau = cfg.step ? *cfg.step
                                : calibrate_stepsize(psf, t_len,
                                                     passes_for(schedule, t_len),
                                                     cfg.step_mode);
    const double lambda = cfg.lambda;

    auto [d, report] = run_fista(
        y.data, init_d.data, tau, cfg.max_iters, cfg.conv_tol,
        [&](const Volume& v) { return forward_measured(v, psf, schedule, mode); },
        [&](const Volume& eta) { return gradient_from_residuals(eta, psf, schedule, mode); },
        [&](Volume& v, double step) { soft_threshold_inplace(v, step * lambda); },
        [&](const Volume& v) { return lambda * v.flat().abs().sum(); }, "fista_d");

    DiffMovie out(init_d.n(), t_len, init_d.dt);
    out.data = std::move(d);
    return {std::move(out), std::move(report)};
}

std::pair<DiffMovie, SolveReport> blocked_fista_d(const MeasurementSeq& y,
                                                  const SolverConfig& cfg,
                                                  const Psf& psf,
                                                  const ShutterSchedule& schedule,
                                                  ConvMode mode) {
    cfg.validate();
    check_problem_shapes(y, psf, schedule);
    const int t_len = y.t_len();
    const int block = cfg.block_len ? std::min(*cfg.block_len, t_len) : t_len;
    const double dt = 1.0 / schedule.rate_hz;

    DiffMovie out(schedule.n, t_len, dt);
    SolveReport total;
    total.converged = true;
    const auto t_start = std::chrono::steady_clock::now();

    Frame carry = Frame::Zero(schedule.n, schedule.n);
    for (int start = 0; start < t_len; start += block) {
        const int len = std::min(block, t_len - start);
        MeasurementSeq yb;
        yb.schedule = schedule.advanced_by(start);
        yb.data = y.data.slice_frames(start, len);

        DiffMovie init(schedule.n, len, dt);
        init.data.frame(0) = carry;

        auto [db, rep] = fista_d(yb, init, cfg, psf, yb.schedule, mode);

        // Inside a block the first "difference" is an absolute frame (it was
        // seeded with the previous block's final frame), so re-express it in
        // global difference coordinates before concatenating.
        out.data.frame(start) = db.data.frame(0) - carry;
        for (int t = 1; t < len; ++t) out.data.frame(start + t) = db.data.frame(t);

        carry.setZero();
        for (int t = 0; t < len; ++t) carry += db.data.frame(t);

        total.iterations += rep.iterations;
        total.final_objective += rep.final_objective;
        total.objective_trace.insert(total.objective_trace.end(),
                                     rep.objective_trace.begin(),
                                     rep.objective_trace.end());
        total.converged = total.converged && rep.converged;
    }
    total.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(out), std::move(total)};
}

std::pair<Movie, SolveReport> l1_solver(const MeasurementSeq& y,
                                        const SolverConfig& cfg, const Psf& psf,
                                        const ShutterSchedule& schedule,
                                        ConvMode mode) {
    cfg.validate();
    check_problem_shapes(y, psf, schedule);
    const int t_len = y.t_len();
    const int n = schedule.n;
    const double a = psf.norm_inf_freq();
    const double tau = cfg.step ? *cfg.step : 1.0 / (a * a);
    const double lambda = cfg.lambda;

    Movie out(n, t_len, 1.0 / schedule.rate_hz);
    SolveReport total;
    total.converged = true;
    const auto t_start = std::chrono::steady_clock::now();

    for (int t = 0; t < t_len; ++t) {
        Volume yt(schedule.lines_total(), n, 1);
        yt.frame(0) = y.data.frame(t);

        auto [xt, rep] = run_fista(
            yt, Volume(n, n, 1), tau, cfg.max_iters, cfg.conv_tol,
            [&](const Volume& v) {
                Volume m(schedule.lines_total(), n, 1);
                m.frame(0) = apply_shutter(convolve(v.frame(0), psf, mode), schedule, t);
                return m;
            },
            [&](const Volume& eta) {
                Volume g(n, n, 1);
                g.frame(0) = convolve_adjoint(shutter_adjoint(eta.frame(0), schedule, t),
                                              psf, mode);
                return g;
            },
            [&](Volume& v, double step) { soft_threshold_inplace(v, step * lambda); },
            [&](const Volume& v) { return lambda * v.flat().abs().sum(); }, "l1_solver");

        out.data.frame(t) = xt.frame(0);
        total.iterations += rep.iterations;
        total.final_objective += rep.final_objective;
        total.objective_trace.insert(total.objective_trace.end(),
                                     rep.objective_trace.begin(),
                                     rep.objective_trace.end());
        total.converged = total.converged && rep.converged;
    }
    total.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(out), std::move(total)};
}

namespace {

// Forward differences along one axis (0 = row, 1 = col, 2 = t).
Volume grad_axis(const Volume& u, int axis) {
    const int r = u.rows(), c = u.cols(), f = u.frames();
    const int shape[3] = {r, c, f};
    int out_shape[3] = {r, c, f};
    out_shape[axis] -= 1;
    Volume out(out_shape[0], out_shape[1], out_shape[2]);
    for (int t = 0; t < out_shape[2]; ++t) {
        for (int i = 0; i < out_shape[0]; ++i) {
            for (int j = 0; j < out_shape[1]; ++j) {
                const int i2 = i + (axis == 0), j2 = j + (axis == 1), t2 = t + (axis == 2);
                out.at(i, j, t) = u.at(i2, j2, t2) - u.at(i, j, t);
            }
        }
    }
    (void)shape;
    return out;
}

// out += sign * grad_axis^T(q): the adjoint maps back to the full shape with
// (grad^T q)(i) = q(i-1) - q(i), q(-1) = q(end) = 0 along the axis.
void add_grad_adjoint(const Volume& q, int axis, double sign, Volume& out) {
    const int qr = q.rows(), qc = q.cols(), qf = q.frames();
    for (int t = 0; t < qf; ++t) {
        for (int i = 0; i < qr; ++i) {
            for (int j = 0; j < qc; ++j) {
                const double v = sign * q.at(i, j, t);
                const int i2 = i + (axis == 0), j2 = j + (axis == 1), t2 = t + (axis == 2);
                out.at(i, j, t) -= v;
                out.at(i2, j2, t2) += v;
            }
        }
    }
}

void clip_inplace(Volume& v, double bound) {
    double* p = v.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        p[i] = std::min(bound, std::max(-bound, p[i]));
    }
}

} // namespace

Volume tv_prox(const Volume& v, double w_row, double w_col, double w_t, int iters,
               TvDual* warm) {
    const double weights[3] = {w_row, w_col, w_t};
    const int sizes[3] = {v.rows(), v.cols(), v.frames()};
    bool active[3];
    int n_active = 0;
    for (int a = 0; a < 3; ++a) {
        active[a] = weights[a] > 0.0 && sizes[a] > 1;
        n_active += active[a];
    }
    if (n_active == 0 || iters < 1) return v;

    auto make_dual = [&](int a) {
        int shape[3] = {sizes[0], sizes[1], sizes[2]};
        shape[a] -= 1;
        return Volume(shape[0], shape[1], shape[2]);
    };

    Volume p[3], q[3];
    for (int a = 0; a < 3; ++a) {
        if (!active[a]) continue;
        p[a] = make_dual(a);
        Volume* prev = nullptr;
        if (warm && warm->initialized) {
            prev = a == 0 ? &warm->p_row : a == 1 ? &warm->p_col : &warm->p_t;
        }
        if (prev && prev->same_shape(p[a])) p[a] = *prev;
        q[a] = p[a];
    }

    const double step = 1.0 / (4.0 * n_active);
    double tk = 1.0;
    Volume u = v;

    for (int it = 0; it < iters; ++it) {
        u = v;
        for (int a = 0; a < 3; ++a) {
            if (active[a]) add_grad_adjoint(q[a], a, -1.0, u);
        }
        const double tk1 = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        const double beta = (tk - 1.0) / tk1;
        for (int a = 0; a < 3; ++a) {
            if (!active[a]) continue;
            Volume g = grad_axis(u, a);
            Volume p_new = q[a];
            p_new.flat() += step * g.flat();
            clip_inplace(p_new, weights[a]);
            q[a] = p_new;
            q[a].flat() += beta * (p_new.flat() - p[a].flat());
            p[a] = std::move(p_new);
        }
        tk = tk1;
    }

    u = v;
    for (int a = 0; a < 3; ++a) {
        if (active[a]) add_grad_adjoint(p[a], a, -1.0, u);
    }
    if (warm) {
        if (active[0]) warm->p_row = std::move(p[0]);
        if (active[1]) warm->p_col = std::move(p[1]);
        if (active[2]) warm->p_t = std::move(p[2]);
        warm->initialized = true;
    }
    return u;
}

std::pair<Movie, SolveReport> tv_solver(const MeasurementSeq& y,
                                        const SolverConfig& cfg, const Psf& psf,
                                        const ShutterSchedule& schedule,
                                        ConvMode mode) {
    cfg.validate();
    check_problem_shapes(y, psf, schedule);
    const int t_len = y.t_len();
    const int n = schedule.n;
    const double a = psf.norm_inf_freq();
    const double tau = cfg.step ? *cfg.step : 1.0 / (a * a);
    const double lambda_t = cfg.lambda_split.first * cfg.lambda;
    const double lambda_xy = cfg.lambda_split.second * cfg.lambda;

    TvDual dual;
    auto [x, report] = run_fista(
        y.data, Volume(n, n, t_len), tau, cfg.max_iters, cfg.conv_tol,
        [&](const Volume& v) {
            Volume m(schedule.lines_total(), n, t_len);
            for (int t = 0; t < t_len; ++t) {
                m.frame(t) = apply_shutter(convolve(v.frame(t), psf, mode), schedule, t);
            }
            return m;
        },
        [&](const Volume& eta) {
            Volume g(n, n, t_len);
            for (int t = 0; t < t_len; ++t) {
                g.frame(t) = convolve_adjoint(shutter_adjoint(eta.frame(t), schedule, t),
                                              psf, mode);
            }
            return g;
        },
        [&](Volume& v, double step) {
            v = tv_prox(v, step * lambda_xy, step * lambda_xy, step * lambda_t,
                        cfg.tv_inner_iters, &dual);
        },
        [&](const Volume& v) {
            double value = 0.0;
            if (n > 1) {
                value += lambda_xy * grad_axis(v, 0).flat().abs().sum();
                value += lambda_xy * grad_axis(v, 1).flat().abs().sum();
            }
            if (t_len > 1) value += lambda_t * grad_axis(v, 2).flat().abs().sum();
            return value;
        },
        "tv_solver");

    Movie out(n, t_len, 1.0 / schedule.rate_hz);
    out.data = std::move(x);
    return {std::move(out), std::move(report)};
}

} // namespace rscs
