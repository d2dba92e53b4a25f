#include "adaptis/vec.hpp"

#include "adaptis/errors.hpp"

namespace adaptis {

namespace {
void check_size(std::size_t n) {
    if (n > kMaxDim) throw UsageError("vector dimension " + std::to_string(n) + " exceeds 64");
}
}  // namespace

Vec::Vec(std::size_t n, double fill) : size_(n) {
    check_size(n);
    std::fill_n(data_.data(), n, fill);
}

Vec::Vec(std::initializer_list<double> values) : size_(values.size()) {
    check_size(size_);
    std::copy(values.begin(), values.end(), data_.data());
}

Vec::Vec(std::span<const double> values) : size_(values.size()) {
    check_size(size_);
    std::copy(values.begin(), values.end(), data_.data());
}

void Vec::resize(std::size_t n, double fill) {
    check_size(n);
    if (n > size_) std::fill(data_.data() + size_, data_.data() + n, fill);
    size_ = n;
}

}  // namespace adaptis
