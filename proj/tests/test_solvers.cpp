#include "rscs/solvers.hpp"

#include "rscs/rng.hpp"
#include "rscs/signals.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace rscs;

namespace {

Frame random_frame(int n, Rng& rng) {
    Frame f(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) f(r, c) = rng.normal();
    }
    return f;
}

DiffMovie random_diffs(int n, int t_len, Rng& rng) {
    DiffMovie d(n, t_len);
    for (int t = 0; t < t_len; ++t) d.data.frame(t) = random_frame(n, rng);
    return d;
}

ShutterSchedule single_shutter(int n, int lines, int offset = 0) {
    ShutterSchedule s;
    s.n = n;
    s.lines_per_sample = lines;
    s.phase_offset = offset;
    return s;
}

ShutterSchedule double_shutter(int n, int lines_each) {
    ShutterSchedule s;
    s.n = n;
    s.lines_per_sample = lines_each;
    s.num_shutters = 2;
    s.shutter_gap = n / 2;
    return s;
}

Eigen::VectorXd vectorize(const Volume& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

TEST_CASE("soft_threshold examples") {
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(2.0, 1.0) == 1.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.37, 0.0) == 0.37);
    CHECK(soft_threshold(-0.37, 0.0) == -0.37);
}

TEST_CASE("movie/diffs bijection") {
    Rng rng(31);
    const int n = 4, t_len = 5;

    DiffMovie d(n, t_len);
    const Frame a = random_frame(n, rng);
    d.data.frame(0) = a;
    const Movie constant = diffs_to_movie(d);
    for (int t = 0; t < t_len; ++t) {
        CHECK((constant.data.frame(t) - a).abs().maxCoeff() == 0.0);
    }

    const DiffMovie rd = random_diffs(n, t_len, rng);
    const DiffMovie back = movie_to_diffs(diffs_to_movie(rd));
    CHECK((back.data.flat() - rd.data.flat()).abs().maxCoeff() < 1e-13);

    const Movie x = diffs_to_movie(rd);
    Frame expect = Frame::Zero(n, n);
    for (int t = 0; t <= 3; ++t) expect += rd.data.frame(t);
    CHECK((x.data.frame(3) - expect).abs().maxCoeff() < 1e-14);
}

TEST_CASE("grad_l2_diffs: zero at a noiseless solution") {
    Rng rng(32);
    const int n = 8, t_len = 3;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2);
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng);
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);
    const DiffMovie d = movie_to_diffs(truth);
    const DiffMovie g = grad_l2_diffs(d, y, psf, s, ConvMode::circular);
    CHECK(g.data.flat().abs().maxCoeff() < 1e-9);
}

TEST_CASE("grad_l2_diffs matches central finite differences") {
    Rng rng(33);
    const int n = 8, t_len = 4;
    const Psf psf(random_frame(n, rng));
    for (const auto& schedule : {single_shutter(n, 2), double_shutter(n, 1)}) {
        for (auto mode : {ConvMode::circular, ConvMode::physical}) {
            Movie truth(n, t_len);
            for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng);
            const MeasurementSeq y = measure(truth, psf, schedule, mode);
            const DiffMovie d = random_diffs(n, t_len, rng);

            const DiffMovie g = grad_l2_diffs(d, y, psf, schedule, mode);

            auto f = [&](const DiffMovie& point) {
                Volume m(schedule.lines_total(), n, t_len);
                Frame x = Frame::Zero(n, n);
                for (int t = 0; t < t_len; ++t) {
                    x += point.data.frame(t);
                    m.frame(t) = apply_shutter(convolve(x, psf, mode), schedule, t);
                }
                m.flat() -= y.data.flat();
                return 0.5 * m.flat().square().sum();
            };

            const double h = 1e-5;
            double num_sq = 0.0, den_sq = 0.0;
            DiffMovie probe = d;
            for (int t = 0; t < t_len; ++t) {
                for (int r = 0; r < n; ++r) {
                    for (int c = 0; c < n; ++c) {
                        const double saved = probe.data.at(r, c, t);
                        probe.data.at(r, c, t) = saved + h;
                        const double fp = f(probe);
                        probe.data.at(r, c, t) = saved - h;
                        const double fm = f(probe);
                        probe.data.at(r, c, t) = saved;
                        const double fd = (fp - fm) / (2.0 * h);
                        const double an = g.data.at(r, c, t);
                        num_sq += (fd - an) * (fd - an);
                        den_sq += an * an;
                    }
                }
            }
            CHECK(std::sqrt(num_sq / den_sq) <= 1e-5);
        }
    }
}

TEST_CASE("grad_l2_diffs matches the dense prefix-sum operator") {
    Rng rng(34);
    const int n = 8, t_len = 3;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2, 1);
    for (auto mode : {ConvMode::circular, ConvMode::physical}) {
        Movie truth(n, t_len);
        for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng);
        const MeasurementSeq y = measure(truth, psf, s, mode);
        const DiffMovie d = random_diffs(n, t_len, rng);

        const Eigen::MatrixXd big = oracle::dense_diff_operator(psf, s, t_len, mode);
        const Eigen::VectorXd resid = big * vectorize(d.data) - vectorize(y.data);
        const Eigen::VectorXd expect = big.transpose() * resid;

        const DiffMovie g = grad_l2_diffs(d, y, psf, s, mode);
        const Eigen::VectorXd got = vectorize(g.data);
        CHECK((got - expect).norm() <= 1e-9 * expect.norm());
    }
}

TEST_CASE("summation operator norm against dense SVD and the T=2 value") {
    CHECK(summation_operator_norm(1) == 1.0);
    CHECK(summation_operator_norm(2) ==
          doctest::Approx(std::sqrt((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-12));
    for (int t_len : {2, 3, 5, 8, 17, 40}) {
        CHECK(summation_operator_norm(t_len) ==
              doctest::Approx(oracle::summation_norm_dense(t_len)).epsilon(1e-10));
    }
}

TEST_CASE("calibrate_stepsize formulas") {
    const Psf delta = gen_psf(PsfKind::delta, 8, 0);
    CHECK(delta.norm_inf_freq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(calibrate_stepsize(delta, 1, 1, StepMode::conservative) ==
          doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(35);
    const Psf psf(random_frame(8, rng));
    const double a = psf.norm_inf_freq();
    CHECK(calibrate_stepsize(psf, 1, 3, StepMode::conservative) ==
          doctest::Approx(1.0 / (a * a * 9.0)).epsilon(1e-12));
    const double s2 = std::sqrt((3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(calibrate_stepsize(psf, 2, 2, StepMode::conservative) ==
          doctest::Approx(1.0 / (a * s2 * 2.0 * (a * s2 * 2.0))).epsilon(1e-10));
    CHECK(calibrate_stepsize(psf, 2, 2, StepMode::empirical) ==
          doctest::Approx(1.0 / (a * a * s2 * 2.0)).epsilon(1e-10));
}

TEST_CASE("objective equivalence: differences form equals frames form") {
    Rng rng(36);
    const int n = 8, t_len = 5;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2);
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng);
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::physical);
    for (int rep = 0; rep < 10; ++rep) {
        const DiffMovie d = random_diffs(n, t_len, rng);
        const double lambda = 0.3;
        const double via_d = objective_diffs(d, y, psf, s, ConvMode::physical, lambda);
        const double via_x =
            objective_frames(diffs_to_movie(d), y, psf, s, ConvMode::physical, lambda);
        CHECK(std::abs(via_d - via_x) <= 1e-10 * std::max(1.0, std::abs(via_x)));
    }
}

TEST_CASE("gradient step is a contraction at the conservative stepsize") {
    Rng rng(37);
    const int n = 8, t_len = 4;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2);
    const Eigen::MatrixXd big =
        oracle::dense_diff_operator(psf, s, t_len, ConvMode::circular);
    const int passes = (t_len * s.lines_total() + n - 1) / n;
    const double tau = calibrate_stepsize(psf, t_len, passes, StepMode::conservative);

    const Eigen::MatrixXd gram = big.transpose() * big;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.rows()).normalized();
    double norm = 0.0;
    for (int it = 0; it < 500; ++it) {
        v = (v - tau * (gram * v)).eval();
        norm = v.norm();
        v /= norm;
    }
    CHECK(norm <= 1.0 + 1e-8);
}

TEST_CASE("fista_d: zero measurements converge to zero in one iteration") {
    const int n = 8, t_len = 4;
    const Psf psf = gen_psf(PsfKind::delta, n, 0);
    const ShutterSchedule s = single_shutter(n, 2);
    MeasurementSeq y;
    y.schedule = s;
    y.data = Volume(s.lines_total(), n, t_len);
    SolverConfig cfg;
    cfg.lambda = 0.1;
    const auto [d, report] = fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::circular);
    CHECK(d.data.flat().abs().maxCoeff() == 0.0);
    CHECK(report.iterations == 1);
    CHECK(report.converged);
    CHECK(report.objective_trace.size() == 1);
}

TEST_CASE("fista_d: identity sensing with tiny lambda recovers the movie") {
    Rng rng(38);
    const int n = 8, t_len = 4;
    const Psf psf = gen_psf(PsfKind::delta, n, 0);
    const ShutterSchedule s = single_shutter(n, n); // full-frame shutter
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng).abs();
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);

    SolverConfig cfg;
    cfg.lambda = 1e-6;
    cfg.max_iters = 4000;
    cfg.conv_tol = 1e-12;
    cfg.step_mode = StepMode::empirical;
    const auto [d, report] = fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::circular);
    const Movie recon = diffs_to_movie(d);
    for (int t = 0; t < t_len; ++t) {
        const double rel =
            std::sqrt((recon.data.frame(t) - truth.data.frame(t)).square().sum() /
                      truth.data.frame(t).square().sum());
        CHECK(rel <= 1e-3);
    }
}

TEST_CASE("fista_d: monotone objective after restart-guarded iterations") {
    Rng rng(39);
    const int n = 16, t_len = 8;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 4);

    // Static 1-sparse-per-frame signal.
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.at(9, 6, t) = 2.0;
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);

    SolverConfig cfg;
    cfg.lambda = 0.1;
    cfg.max_iters = 3000;
    cfg.conv_tol = 1e-10;
    cfg.step_mode = StepMode::empirical;
    const auto [d, report] = fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::circular);

    for (std::size_t i = 5; i + 1 < report.objective_trace.size(); ++i) {
        CHECK(report.objective_trace[i + 1] <=
              report.objective_trace[i] + 1e-12 * std::max(1.0, report.objective_trace[i]));
    }

    // The minimizer beats the planted truth up to the regularization scale.
    const DiffMovie d_star = movie_to_diffs(truth);
    const double at_truth =
        objective_diffs(d_star, y, psf, s, ConvMode::circular, cfg.lambda);
    const double slack = cfg.lambda * d_star.data.flat().abs().sum();
    CHECK(report.final_objective <= at_truth + slack);
}

TEST_CASE("fista_d: solver purity (identical reruns)") {
    Rng rng(40);
    const int n = 8, t_len = 3;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2);
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng);
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::physical, NoiseSpec{25.0}, 5);

    SolverConfig cfg;
    cfg.lambda = 0.05;
    cfg.max_iters = 50;
    const auto [d1, r1] = fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::physical);
    const auto [d2, r2] = fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::physical);
    CHECK((d1.data.flat() - d2.data.flat()).abs().maxCoeff() == 0.0);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.final_objective == r2.final_objective);
}

TEST_CASE("fista_d: oversized stepsize reports the diverging iteration") {
    Rng rng(41);
    const int n = 8, t_len = 6;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 4);
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = 10.0 * random_frame(n, rng);
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);
    SolverConfig cfg;
    cfg.lambda = 1e-9;
    cfg.step = 1e12; // absurd
    cfg.max_iters = 200;
    CHECK_THROWS_WITH_AS(
        static_cast<void>(fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::circular)),
        doctest::Contains("iteration"), std::runtime_error);
}

TEST_CASE("blocked_fista_d: single block is bitwise identical to fista_d") {
    Rng rng(42);
    const int n = 8, t_len = 5;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2);
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng).abs();
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);

    SolverConfig cfg;
    cfg.lambda = 0.1;
    cfg.max_iters = 100;
    cfg.block_len = t_len + 3;
    const auto [db, rb] = blocked_fista_d(y, cfg, psf, s, ConvMode::circular);
    const auto [df, rf] = fista_d(y, DiffMovie(n, t_len), cfg, psf, s, ConvMode::circular);
    CHECK((db.data.flat() - df.data.flat()).abs().maxCoeff() == 0.0);
    CHECK(rb.iterations == rf.iterations);
}

TEST_CASE("blocked_fista_d replicates a hand-rolled Algorithm 2") {
    Rng rng(43);
    const int n = 8, t_len = 7, block = 3;
    const Psf psf(random_frame(n, rng));
    const ShutterSchedule s = single_shutter(n, 2);
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = random_frame(n, rng).abs();
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);

    SolverConfig cfg;
    cfg.lambda = 0.1;
    cfg.max_iters = 60;
    cfg.block_len = block;
    const auto [got, report] = blocked_fista_d(y, cfg, psf, s, ConvMode::circular);

    // Hand-rolled: slice measurements, advance the schedule, warm-start with
    // the previous block's final frame, re-express the boundary frame.
    Volume expect(n, n, t_len);
    Frame carry = Frame::Zero(n, n);
    for (int start = 0; start < t_len; start += block) {
        const int len = std::min(block, t_len - start);
        MeasurementSeq yb;
        yb.schedule = s.advanced_by(start);
        yb.data = y.data.slice_frames(start, len);
        DiffMovie init(n, len);
        init.data.frame(0) = carry;
        const auto [db, rep] = fista_d(yb, init, cfg, psf, yb.schedule, ConvMode::circular);
        expect.frame(start) = db.data.frame(0) - carry;
        for (int t = 1; t < len; ++t) expect.frame(start + t) = db.data.frame(t);
        carry.setZero();
        for (int t = 0; t < len; ++t) carry += db.data.frame(t);
    }
    CHECK((got.data.flat() -
           Eigen::Map<const Eigen::ArrayXd>(expect.data(), expect.size()))
              .abs()
              .maxCoeff() == 0.0);
}

TEST_CASE("blocked_fista_d: static signal is carried across blocks") {
    Rng rng(44);
    const int n = 8, t_len = 8;
    const Psf psf = gen_psf(PsfKind::delta, n, 0);
    const ShutterSchedule s = single_shutter(n, n);
    Movie truth(n, t_len);
    const Frame still = random_frame(n, rng).abs();
    for (int t = 0; t < t_len; ++t) truth.data.frame(t) = still;
    const MeasurementSeq y = measure(truth, psf, s, ConvMode::circular);

    SolverConfig cfg;
    cfg.lambda = 1e-6;
    cfg.max_iters = 3000;
    cfg.conv_tol = 1e-12;
    cfg.block_len = 4;
    cfg.step_mode = StepMode::empirical;
    const auto [d, report] = blocked_fista_d(y, cfg, psf, s, ConvMode::circular);
    const Movie recon = diffs_to_movie(d);
    for (int t = 0; t < t_len; ++t) {
        const double rel = std::sqrt((recon.data.frame(t) - still).square().sum() /
                                     still.square().sum());
        CHECK(rel <= 1e-3);
    }
}

TEST_CASE("l1_solver: zero input, identity recovery, and lasso oracle") {
    Rng rng(45);
    const int n = 8;
    const Psf delta = gen_psf(PsfKind::delta, n, 0);
    const ShutterSchedule full = single_shutter(n, n);

    MeasurementSeq zero;
    zero.schedule = full;
    zero.data = Volume(n, n, 2);
    SolverConfig cfg;
    cfg.lambda = 0.1;
    const auto [xz, rz] = l1_solver(zero, cfg, delta, full, ConvMode::circular);
    CHECK(xz.data.flat().abs().maxCoeff() == 0.0);

    Movie truth(n, 2);
    truth.data.frame(0) = random_frame(n, rng).abs();
    truth.data.frame(1) = random_frame(n, rng).abs();
    const MeasurementSeq y = measure(truth, delta, full, ConvMode::circular);
    SolverConfig tiny;
    tiny.lambda = 1e-7;
    tiny.max_iters = 3000;
    tiny.conv_tol = 1e-12;
    const auto [xr, rr] = l1_solver(y, tiny, delta, full, ConvMode::circular);
    CHECK(std::sqrt((xr.data.flat() - truth.data.flat()).square().sum() /
                    truth.data.flat().square().sum()) <= 1e-3);

    // Random PSF, sparse frame, against a 10x-iteration reference run.
    const Psf psf(random_frame(n, rng));
    Movie sparse(n, 1);
    for (int k = 0; k < 5; ++k) {
        sparse.data.at(static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n)), 0) +=
            rng.normal();
    }
    const MeasurementSeq ys = measure(sparse, psf, full, ConvMode::circular);
    SolverConfig run;
    run.lambda = 0.1;
    run.max_iters = 400;
    run.conv_tol = 0.0;
    const auto [x1, r1] = l1_solver(ys, run, psf, full, ConvMode::circular);
    SolverConfig longrun = run;
    longrun.max_iters = 4000;
    const auto [x2, r2] = l1_solver(ys, longrun, psf, full, ConvMode::circular);
    CHECK(std::sqrt((x1.data.flat() - x2.data.flat()).square().sum()) /
              std::max(1.0, std::sqrt(x2.data.flat().square().sum())) <=
          1e-4);
}

TEST_CASE("tv_prox matches the certified exact 1-D solver") {
    Rng rng(46);

    // Pure time-axis volume.
    const int t_len = 40;
    Volume v(1, 1, t_len);
    for (int t = 0; t < t_len; ++t) v.at(0, 0, t) = rng.normal() + (t > 20 ? 2.0 : 0.0);
    const double lam = 0.7;
    const Volume got = tv_prox(v, 0.0, 0.0, lam, 6000);
    std::vector<double> y(static_cast<std::size_t>(t_len));
    for (int t = 0; t < t_len; ++t) y[static_cast<std::size_t>(t)] = v.at(0, 0, t);
    const std::vector<double> expect = oracle::tv1d_prox_exact(y, lam);
    double worst = 0.0;
    for (int t = 0; t < t_len; ++t) {
        worst = std::max(worst, std::abs(got.at(0, 0, t) - expect[static_cast<std::size_t>(t)]));
    }
    CHECK(worst <= 1e-4);

    // (N x 1 x T) slice, constant across rows: reduces to the 1-D prox in t.
    const int n = 6;
    Volume slice(n, 1, t_len);
    for (int t = 0; t < t_len; ++t) {
        for (int r = 0; r < n; ++r) slice.at(r, 0, t) = y[static_cast<std::size_t>(t)];
    }
    const Volume got2 = tv_prox(slice, 0.3, 0.3, lam, 6000);
    worst = 0.0;
    for (int t = 0; t < t_len; ++t) {
        for (int r = 0; r < n; ++r) {
            worst = std::max(worst,
                             std::abs(got2.at(r, 0, t) - expect[static_cast<std::size_t>(t)]));
        }
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("tv_solver: zero input and constant-signal recovery") {
    Rng rng(47);
    const int n = 8, t_len = 4;
    const Psf delta = gen_psf(PsfKind::delta, n, 0);
    const ShutterSchedule full = single_shutter(n, n);

    MeasurementSeq zero;
    zero.schedule = full;
    zero.data = Volume(n, n, t_len);
    SolverConfig cfg;
    cfg.lambda = 0.1;
    const auto [xz, rz] = tv_solver(zero, cfg, delta, full, ConvMode::circular);
    CHECK(xz.data.flat().abs().maxCoeff() == 0.0);

    // Constant in space and time: the TV term vanishes at the truth.
    Movie truth(n, t_len);
    for (int t = 0; t < t_len; ++t) truth.data.frame(t).setConstant(1.7);
    const MeasurementSeq y = measure(truth, delta, full, ConvMode::circular);
    SolverConfig run;
    run.lambda = 1e-6;
    run.max_iters = 2000;
    run.conv_tol = 1e-12;
    const auto [xr, rr] = tv_solver(y, run, delta, full, ConvMode::circular);
    CHECK(std::sqrt((xr.data.flat() - truth.data.flat()).square().sum() /
                    truth.data.flat().square().sum()) <= 1e-3);
}
