#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ids {

// Per-position probability vectors over the outer alphabet. The interface
// between inner and outer decoders.
class AppMatrix {
public:
    AppMatrix() = default;
    AppMatrix(std::size_t rows, int q, double fill = 0.0)
        : rows_(rows), q_(q), v_(rows * static_cast<std::size_t>(q), fill) {}

    static AppMatrix uniform(std::size_t rows, int q) {
        return AppMatrix(rows, q, 1.0 / static_cast<double>(q));
    }

    std::size_t rows() const { return rows_; }
    int q() const { return q_; }

    double* row(std::size_t i) { return v_.data() + i * static_cast<std::size_t>(q_); }
    const double* row(std::size_t i) const { return v_.data() + i * static_cast<std::size_t>(q_); }
    std::span<double> row_span(std::size_t i) { return {row(i), static_cast<std::size_t>(q_)}; }
    std::span<const double> row_span(std::size_t i) const {
        return {row(i), static_cast<std::size_t>(q_)};
    }

    double& at(std::size_t i, int a) { return v_[i * static_cast<std::size_t>(q_) + a]; }
    double at(std::size_t i, int a) const { return v_[i * static_cast<std::size_t>(q_) + a]; }

    // scale each row to sum 1; all-zero rows become uniform
    void normalize_rows() {
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0;
            double* r = row(i);
            for (int a = 0; a < q_; ++a) s += r[a];
            if (s > 0) {
                for (int a = 0; a < q_; ++a) r[a] /= s;
            } else {
                for (int a = 0; a < q_; ++a) r[a] = 1.0 / q_;
            }
        }
    }

    int argmax_row(std::size_t i) const {
        const double* r = row(i);
        int best = 0;
        for (int a = 1; a < q_; ++a)
            if (r[a] > r[best]) best = a;
        return best;
    }

private:
    std::size_t rows_ = 0;
    int q_ = 0;
    std::vector<double> v_;
};

}  // namespace ids
