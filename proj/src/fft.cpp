#include "sdq/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <new>
#include <utility>

namespace sdq::fft {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void FftwDeleter::operator()(Complex* p) const noexcept { fftw_free(p); }

AlignedBuffer::AlignedBuffer(std::size_t size)
    : data_(static_cast<Complex*>(fftw_malloc(sizeof(Complex) * std::max<std::size_t>(size, 1)))), size_(size) {
    if (!data_) throw std::bad_alloc();
    std::fill_n(data_.get(), size_, Complex{});
}

RowTransform::RowTransform(AlignedBuffer& buffer, std::size_t n, std::size_t batch) {
    auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
    int dims[1] = {static_cast<int>(n)};
    const int howmany = static_cast<int>(batch);
    const int dist = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_many_dft(1, dims, howmany, data, nullptr, 1, dist, data, nullptr, 1, dist,
                                       FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_many_dft(1, dims, howmany, data, nullptr, 1, dist, data, nullptr, 1, dist,
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
}

RowTransform::~RowTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void RowTransform::forward() const noexcept { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RowTransform::backward() const noexcept { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

void transpose_square(Complex* a, std::size_t n) noexcept {
    constexpr std::size_t block = 8;
    if (n % block != 0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) std::swap(a[i * n + j], a[j * n + i]);
        return;
    }
    for (std::size_t i0 = 0; i0 < n; i0 += block) {
        for (std::size_t i = i0; i < i0 + block; ++i)
            for (std::size_t j = i + 1; j < i0 + block; ++j) std::swap(a[i * n + j], a[j * n + i]);
        for (std::size_t j0 = i0 + block; j0 < n; j0 += block)
            for (std::size_t i = i0; i < i0 + block; ++i)
                for (std::size_t j = j0; j < j0 + block; ++j) std::swap(a[i * n + j], a[j * n + i]);
    }
}

}  // namespace sdq::fft
