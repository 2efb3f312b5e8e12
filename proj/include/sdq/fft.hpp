#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "sdq/wavefunction.hpp"

namespace sdq::fft {

struct FftwDeleter {
    void operator()(Complex* p) const noexcept;
};

/// SIMD-aligned complex scratch storage owned by FFTW's allocator.
class AlignedBuffer {
public:
    explicit AlignedBuffer(std::size_t size);
    std::size_t size() const noexcept { return size_; }
    Complex* data() noexcept { return data_.get(); }
    const Complex* data() const noexcept { return data_.get(); }
    std::span<Complex> span() noexcept { return {data_.get(), size_}; }
    std::span<const Complex> span() const noexcept { return {data_.get(), size_}; }

private:
    std::unique_ptr<Complex, FftwDeleter> data_;
    std::size_t size_;
};

/// In-place unnormalized transforms of `batch` contiguous rows of length n,
/// bound to one buffer. Plans use FFTW_ESTIMATE so the algorithm (and hence
/// the rounding) never depends on timing measurements.
class RowTransform {
public:
    RowTransform(AlignedBuffer& buffer, std::size_t n, std::size_t batch);
    ~RowTransform();
    RowTransform(const RowTransform&) = delete;
    RowTransform& operator=(const RowTransform&) = delete;

    void forward() const noexcept;
    void backward() const noexcept;

private:
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

/// In-place transpose of an n x n row-major matrix.
void transpose_square(Complex* data, std::size_t n) noexcept;

}  // namespace sdq::fft
