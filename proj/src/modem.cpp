#include "relaysim/modem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaysim {

Modulation::Modulation(std::vector<cdouble> points, int bits_per_symbol)
    : points_(std::move(points)), bits_per_symbol_(bits_per_symbol) {}

Modulation Modulation::bpsk() { return Modulation({{1.0, 0.0}, {-1.0, 0.0}}, 1); }

Modulation Modulation::qpsk() {
    const double a = std::numbers::sqrt2 / 2.0;
    return Modulation({{a, a}, {a, -a}, {-a, a}, {-a, -a}}, 2);
}

Modulation Modulation::of_order(int order) {
    switch (order) {
    case 2: return bpsk();
    case 4: return qpsk();
    default: throw std::invalid_argument("modulation: unsupported order " + std::to_string(order));
    }
}

std::vector<int> Modulation::labels(std::span<const std::uint8_t> bits) const {
    if (bits.size() % bits_per_symbol_ != 0) {
        throw std::invalid_argument("modulate: bit count " + std::to_string(bits.size()) +
                                    " not divisible by " + std::to_string(bits_per_symbol_));
    }
    std::vector<int> out(bits.size() / bits_per_symbol_);
    for (std::size_t k = 0; k < out.size(); ++k) {
        int label = 0;
        for (int l = 0; l < bits_per_symbol_; ++l) {
            label = (label << 1) | (bits[k * bits_per_symbol_ + l] & 1);
        }
        out[k] = label;
    }
    return out;
}

std::vector<cdouble> Modulation::modulate(std::span<const std::uint8_t> bits) const {
    const auto lab = labels(bits);
    std::vector<cdouble> out(lab.size());
    for (std::size_t k = 0; k < lab.size(); ++k) out[k] = points_[lab[k]];
    return out;
}

LlrFrame demap_bits(const SymbolPosteriors& posteriors, const Modulation& mod) {
    if (!posteriors.empty() && posteriors.order() != mod.order()) {
        throw std::invalid_argument("demap: posterior order does not match modulation");
    }
    const int m_count = mod.order();
    const int nbits = mod.bits_per_symbol();
    LlrFrame llrs(posteriors.size() * nbits);

    if (m_count == 2) {
        for (std::size_t k = 0; k < posteriors.size(); ++k) {
            const auto row = posteriors.log_row(k);
            if (row[0] == kNegInf && row[1] == kNegInf) {
                throw std::domain_error("demap: all-zero posterior");
            }
            llrs[k] = row[0] - row[1];
        }
        return llrs;
    }

    std::vector<double> zero_set, one_set;
    for (std::size_t k = 0; k < posteriors.size(); ++k) {
        const auto row = posteriors.log_row(k);
        for (int l = 0; l < nbits; ++l) {
            zero_set.clear();
            one_set.clear();
            for (int m = 0; m < m_count; ++m) {
                (mod.bit(m, l) == 0 ? zero_set : one_set).push_back(row[m]);
            }
            const double num = log_sum_exp(zero_set);
            const double den = log_sum_exp(one_set);
            if (num == kNegInf && den == kNegInf) {
                throw std::domain_error("demap: all-zero posterior");
            }
            llrs[k * nbits + l] = num - den;
        }
    }
    return llrs;
}

std::vector<std::uint8_t> hard_decision(std::span<const double> llrs) {
    std::vector<std::uint8_t> bits(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) bits[i] = llrs[i] >= 0.0 ? 0 : 1;
    return bits;
}

} // namespace relaysim
