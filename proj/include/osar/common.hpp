#pragma once
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osar {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
// Tied plug-in best and similar measure-zero situations.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Row-major list of points of a fixed dimension.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
        if (dim_ == 0 || data_.size() % dim_ != 0) throw InputError("PointSet: ragged data");
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ ? data_.size() / dim_ : 0; }
    bool empty() const { return data_.empty(); }

    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    void push_back(std::span<const double> p) {
        if (p.size() != dim_) throw InputError("PointSet: dimension mismatch");
        data_.insert(data_.end(), p.begin(), p.end());
    }
    void reserve(std::size_t n) { data_.reserve(n * dim_); }
    void clear() { data_.clear(); }

    const std::vector<double>& flat() const { return data_; }
    const double* data() const { return data_.data(); }

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

}  // namespace osar
