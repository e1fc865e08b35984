#pragma once

#include "relaysim/logmath.hpp"
#include "relaysim/posteriors.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace relaysim {

/// Unit-energy M-PSK with M in {2, 4}.
///
/// Labels are integers 0..M-1 whose bits, most significant first, are the
/// bits carried by the symbol. BPSK: 0 -> +1, 1 -> -1. QPSK (Gray): the first
/// bit selects the sign of the real part and the second the sign of the
/// imaginary part, so 00 -> e^{i pi/4}, 01 -> e^{-i pi/4}, 10 -> e^{i 3pi/4},
/// 11 -> e^{-i 3pi/4}.
class Modulation {
public:
    static Modulation bpsk();
    static Modulation qpsk();
    /// Throws std::invalid_argument for orders other than 2 and 4.
    static Modulation of_order(int order);

    int order() const { return static_cast<int>(points_.size()); }
    int bits_per_symbol() const { return bits_per_symbol_; }
    std::span<const cdouble> points() const { return points_; }
    cdouble point(int label) const { return points_[label]; }

    /// Bit `l` (0 = first/most significant) of `label`.
    int bit(int label, int l) const { return (label >> (bits_per_symbol_ - 1 - l)) & 1; }

    std::vector<int> labels(std::span<const std::uint8_t> bits) const;
    std::vector<cdouble> modulate(std::span<const std::uint8_t> bits) const;

    bool operator==(const Modulation& other) const { return order() == other.order(); }

private:
    Modulation(std::vector<cdouble> points, int bits_per_symbol);

    std::vector<cdouble> points_;
    int bits_per_symbol_;
};

/// Bit LLRs ln(sum_{x: bit_l = 0} p(x) / sum_{x: bit_l = 1} p(x)), bit-major
/// within each symbol. Positive means bit 0.
LlrFrame demap_bits(const SymbolPosteriors& posteriors, const Modulation& mod);

/// bit = 0 iff LLR >= 0.
std::vector<std::uint8_t> hard_decision(std::span<const double> llrs);

} // namespace relaysim
