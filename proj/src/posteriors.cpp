#include "relaysim/posteriors.hpp"

#include "relaysim/logmath.hpp"

#include <cmath>
#include <stdexcept>

namespace relaysim {

SymbolPosteriors::SymbolPosteriors(std::size_t steps, int order)
    : steps_(steps), order_(order),
      log_p_(steps * static_cast<std::size_t>(order), -std::log(static_cast<double>(order))) {
    if (order < 2) throw std::invalid_argument("posteriors: order must be >= 2");
}

std::span<double> SymbolPosteriors::log_row(std::size_t k) {
    return {log_p_.data() + k * order_, static_cast<std::size_t>(order_)};
}

std::span<const double> SymbolPosteriors::log_row(std::size_t k) const {
    return {log_p_.data() + k * order_, static_cast<std::size_t>(order_)};
}

double SymbolPosteriors::prob(std::size_t k, int m) const { return std::exp(log_prob(k, m)); }

void SymbolPosteriors::normalize_row(std::size_t k) {
    auto row = log_row(k);
    const double total = log_sum_exp(row);
    if (!std::isfinite(total)) {
        throw std::domain_error("posteriors: degenerate row at step " + std::to_string(k));
    }
    for (double& v : row) v -= total;
}

} // namespace relaysim
