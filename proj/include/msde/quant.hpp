#ifndef MSDE_QUANT_HPP
#define MSDE_QUANT_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

namespace msde {

/// Symmetric uniform quantization alphabet for b-bit sign-magnitude messages.
/// Levels are l_i = (i - M)*step for i = 0..2M with M = 2^(b-1) - 1, so the
/// alphabet has 2^b - 1 values and saturates at +-M*step.
struct QuantGrid {
    int bits;
    double step;
    int max_mag;  // M

    QuantGrid(int bits_, double step_) : bits(bits_), step(step_) {
        if (bits < 2 || bits > 16)
            throw std::invalid_argument("QuantGrid: bits must be in [2, 16]");
        if (!(step > 0.0) || !std::isfinite(step))
            throw std::invalid_argument("QuantGrid: step must be positive and finite");
        max_mag = (1 << (bits - 1)) - 1;
    }

    int num_levels() const { return 2 * max_mag + 1; }
    int zero_index() const { return max_mag; }
    int mirror_index(int idx) const { return 2 * max_mag - idx; }

    double level_value(int idx) const { return (idx - max_mag) * step; }

    // Quantization interval (lo, hi] around level idx; the first and last
    // intervals are open-ended.
    double interval_lo(int idx) const {
        if (idx == 0) return -std::numeric_limits<double>::infinity();
        return (level_value(idx - 1) + level_value(idx)) / 2.0;
    }
    double interval_hi(int idx) const {
        if (idx == 2 * max_mag) return std::numeric_limits<double>::infinity();
        return (level_value(idx) + level_value(idx + 1)) / 2.0;
    }

    bool operator==(const QuantGrid& o) const {
        return bits == o.bits && step == o.step;
    }
};

/// q(x) = sign(x) * step * floor(|x|/step + 1/2), saturated to +-M*step.
/// Returns the level index in [0, 2M]. Half-integer magnitudes round up.
inline int quantize(double x, const QuantGrid& g) {
    if (!std::isfinite(x))
        throw std::invalid_argument("quantize: non-finite input");
    double mag = std::floor(std::abs(x) / g.step + 0.5);
    int m = mag >= static_cast<double>(g.max_mag) ? g.max_mag : static_cast<int>(mag);
    return x < 0.0 ? g.zero_index() - m : g.zero_index() + m;
}

enum class ZeroSign { Plus, Minus };

/// A b-bit sign-magnitude word: sign in the most significant of the b bits
/// (0 = "+"), magnitude in natural binary below it. "+0" and "-0" are
/// distinct words that both decode to level 0.
struct SignMagPattern {
    std::uint32_t word = 0;
    bool operator==(const SignMagPattern&) const = default;
};

inline std::uint32_t sign_bit_mask(const QuantGrid& g) {
    return 1u << (g.bits - 1);
}

inline SignMagPattern encode(int level_idx, const QuantGrid& g,
                             std::optional<ZeroSign> zero_sign = std::nullopt) {
    if (level_idx < 0 || level_idx > 2 * g.max_mag)
        throw std::invalid_argument("encode: level index out of range");
    int v = level_idx - g.max_mag;
    if (v == 0) {
        if (!zero_sign)
            throw std::invalid_argument("encode: zero level requires zero_sign");
        return {*zero_sign == ZeroSign::Minus ? sign_bit_mask(g) : 0u};
    }
    if (zero_sign)
        throw std::invalid_argument("encode: zero_sign given for nonzero level");
    std::uint32_t mag = static_cast<std::uint32_t>(v < 0 ? -v : v);
    return {v < 0 ? (sign_bit_mask(g) | mag) : mag};
}

inline int decode(SignMagPattern p, const QuantGrid& g) {
    std::uint32_t mag = p.word & (sign_bit_mask(g) - 1);
    bool neg = (p.word & sign_bit_mask(g)) != 0;
    return neg ? g.zero_index() - static_cast<int>(mag)
               : g.zero_index() + static_cast<int>(mag);
}

inline SignMagPattern negate(SignMagPattern p, const QuantGrid& g) {
    return {p.word ^ sign_bit_mask(g)};
}

}  // namespace msde

#endif
