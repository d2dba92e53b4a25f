#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace adaptis {

inline constexpr std::size_t kMaxDim = 64;

/// Dense vector of doubles with inline storage for up to kMaxDim entries.
///
/// Used for roots θ, IS parameters α and sample points x. Copies touch only
/// the live prefix, so passing small vectors by value stays cheap.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t n, double fill = 0.0);
    Vec(std::initializer_list<double> values);
    explicit Vec(std::span<const double> values);

    Vec(const Vec& other) noexcept : size_(other.size_) {
        std::copy_n(other.data_.data(), size_, data_.data());
    }
    Vec& operator=(const Vec& other) noexcept {
        size_ = other.size_;
        std::copy_n(other.data_.data(), size_, data_.data());
        return *this;
    }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    void resize(std::size_t n, double fill = 0.0);

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    double* begin() noexcept { return data_.data(); }
    double* end() noexcept { return data_.data() + size_; }
    const double* begin() const noexcept { return data_.data(); }
    const double* end() const noexcept { return data_.data() + size_; }

    std::span<double> span() noexcept { return {data_.data(), size_}; }
    std::span<const double> span() const noexcept { return {data_.data(), size_}; }

    friend bool operator==(const Vec& a, const Vec& b) noexcept {
        return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
    }

private:
    std::array<double, kMaxDim> data_;  // only [0, size_) is meaningful
    std::size_t size_ = 0;
};

}  // namespace adaptis
