#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace od {

/// Dense row-major matrix of doubles sized at construction.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, value) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("Matrix: negative dimensions");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    size_t size() const { return data_.size(); }

    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }

    double row_sum(int r) const {
        double s = 0.0;
        for (int c = 0; c < cols_; ++c) s += (*this)(r, c);
        return s;
    }

    double col_sum(int c) const {
        double s = 0.0;
        for (int r = 0; r < rows_; ++r) s += (*this)(r, c);
        return s;
    }

    void fill(double v) { data_.assign(data_.size(), v); }

private:
    int rows_, cols_;
    std::vector<double> data_;
};

/// Dense row-major matrix of 64-bit integers (final trip counts).
class IntMatrix {
public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(int rows, int cols, int64_t value = 0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, value) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    int64_t& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    int64_t operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    int64_t sum() const {
        int64_t s = 0;
        for (int64_t v : data_) s += v;
        return s;
    }

    int64_t row_sum(int r) const {
        int64_t s = 0;
        for (int c = 0; c < cols_; ++c) s += (*this)(r, c);
        return s;
    }

    int64_t col_sum(int c) const {
        int64_t s = 0;
        for (int r = 0; r < rows_; ++r) s += (*this)(r, c);
        return s;
    }

private:
    int rows_, cols_;
    std::vector<int64_t> data_;
};

/// S x S boolean relation stored densely.
class Mask {
public:
    Mask() : rows_(0), cols_(0) {}
    Mask(int rows, int cols, bool value = false)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, value ? 1 : 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void set(int r, int c, bool v) { data_[static_cast<size_t>(r) * cols_ + c] = v ? 1 : 0; }
    bool operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c] != 0; }

    int count() const {
        int n = 0;
        for (uint8_t v : data_) n += v;
        return n;
    }

private:
    int rows_, cols_;
    std::vector<uint8_t> data_;
};

} // namespace od
