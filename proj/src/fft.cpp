#include "rscs/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace rscs::fft {

namespace {

// FFTW's planner is not thread-safe; execution on a plan's own buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// One plan pair with its own in/out buffers for a fixed size.
// FFTW_ESTIMATE keeps plan selection deterministic across runs.
class Workspace {
public:
    Workspace(int rows, int cols) : rows_(rows), cols_(cols) {
        const int ccols = cols / 2 + 1;
        real_ = fftw_alloc_real(static_cast<std::size_t>(rows) * cols);
        cplx_ = fftw_alloc_complex(static_cast<std::size_t>(rows) * ccols);
        if (!real_ || !cplx_) throw std::bad_alloc();
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_r2c_2d(rows, cols, real_, cplx_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(rows, cols, cplx_, real_, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    }

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    ~Workspace() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(cplx_);
    }

    void forward(const double* in, std::complex<double>* out) {
        const std::size_t nr = static_cast<std::size_t>(rows_) * cols_;
        const std::size_t nc = static_cast<std::size_t>(rows_) * (cols_ / 2 + 1);
        std::memcpy(real_, in, nr * sizeof(double));
        fftw_execute(fwd_);
        std::memcpy(out, cplx_, nc * sizeof(fftw_complex));
    }

    void backward(const std::complex<double>* in, double* out) {
        const std::size_t nr = static_cast<std::size_t>(rows_) * cols_;
        const std::size_t nc = static_cast<std::size_t>(rows_) * (cols_ / 2 + 1);
        std::memcpy(cplx_, in, nc * sizeof(fftw_complex));
        fftw_execute(bwd_);
        const double scale = 1.0 / static_cast<double>(nr);
        for (std::size_t i = 0; i < nr; ++i) out[i] = real_[i] * scale;
    }

private:
    int rows_, cols_;
    double* real_ = nullptr;
    fftw_complex* cplx_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

Workspace& workspace(int rows, int cols) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Workspace>> cache;
    auto& slot = cache[{rows, cols}];
    if (!slot) slot = std::make_unique<Workspace>(rows, cols);
    return *slot;
}

} // namespace

Spectrum forward(const double* in, int rows, int cols) {
    Spectrum spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.bins.resize(static_cast<std::size_t>(rows) * spec.ccols());
    workspace(rows, cols).forward(in, spec.bins.data());
    return spec;
}

void backward(const Spectrum& spec, double* out) {
    workspace(spec.rows, spec.cols).backward(spec.bins.data(), out);
}

double max_modulus(const Spectrum& spec) {
    double best = 0.0;
    for (const auto& b : spec.bins) best = std::max(best, std::abs(b));
    return best;
}

} // namespace rscs::fft
