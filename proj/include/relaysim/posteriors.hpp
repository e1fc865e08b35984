#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace relaysim {

/// Per-step symbol probabilities, stored as log-probabilities so that very
/// confident decisions (LLRs in the thousands at high SNR) stay exact.
/// Every row satisfies log_sum_exp(row) == 0 after normalize_row().
class SymbolPosteriors {
public:
    SymbolPosteriors() = default;
    /// Rows start uniform.
    SymbolPosteriors(std::size_t steps, int order);

    std::size_t size() const { return steps_; }
    bool empty() const { return steps_ == 0; }
    int order() const { return order_; }

    std::span<double> log_row(std::size_t k);
    std::span<const double> log_row(std::size_t k) const;

    double log_prob(std::size_t k, int m) const { return log_p_[k * order_ + m]; }
    double prob(std::size_t k, int m) const;

    /// Shift row k so that it sums to one.
    void normalize_row(std::size_t k);

private:
    std::size_t steps_ = 0;
    int order_ = 0;
    std::vector<double> log_p_;
};

using LlrFrame = std::vector<double>;

} // namespace relaysim
