#include "omerg/exact_sum.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace omerg {

namespace {

constexpr std::uint64_t kMantissaMask = (std::uint64_t{1} << 52) - 1;

}  // namespace

void ExactSum::add(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const int biased = static_cast<int>((bits >> 52) & 0x7ff);
    if (biased == 0x7ff)
        throw std::overflow_error("ExactSum: non-finite term");
    std::uint64_t mantissa = bits & kMantissaMask;
    int exponent;  // value = mantissa * 2^exponent
    if (biased == 0) {
        if (mantissa == 0)
            return;
        exponent = -1074;
    } else {
        mantissa |= std::uint64_t{1} << 52;
        exponent = biased - 1075;
    }
    add_shifted(mantissa, exponent + kFractionBits, (bits >> 63) != 0);
}

void ExactSum::add_shifted(std::uint64_t mantissa, int shift, bool subtract) {
    if (shift < 0) {
        if (shift <= -64)
            return;
        mantissa >>= -shift;
        shift = 0;
        if (mantissa == 0)
            return;
    }
    // keep one sign bit of headroom
    if (shift + 53 > kLimbs * 64 - 1)
        throw std::overflow_error("ExactSum: term magnitude out of range");

    std::array<std::uint64_t, kLimbs> term{};
    const int limb = shift / 64;
    const int offset = shift % 64;
    term[limb] = mantissa << offset;
    if (offset != 0 && limb + 1 < kLimbs)
        term[limb + 1] = mantissa >> (64 - offset);

    if (!subtract) {
        unsigned carry = 0;
        for (int i = limb; i < kLimbs; ++i) {
            const std::uint64_t a = limbs_[i];
            const std::uint64_t s = a + term[i];
            const unsigned c1 = s < a;
            const std::uint64_t r = s + carry;
            const unsigned c2 = r < s;
            limbs_[i] = r;
            carry = c1 | c2;
            if (carry == 0 && i > limb)
                break;
        }
    } else {
        unsigned borrow = 0;
        for (int i = limb; i < kLimbs; ++i) {
            const std::uint64_t a = limbs_[i];
            const std::uint64_t d = a - term[i];
            const unsigned b1 = a < term[i];
            const std::uint64_t r = d - borrow;
            const unsigned b2 = d < borrow;
            limbs_[i] = r;
            borrow = b1 | b2;
            if (borrow == 0 && i > limb)
                break;
        }
    }
}

ExactSum& ExactSum::operator+=(const ExactSum& other) {
    unsigned carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
        const std::uint64_t a = limbs_[i];
        const std::uint64_t s = a + other.limbs_[i];
        const unsigned c1 = s < a;
        const std::uint64_t r = s + carry;
        const unsigned c2 = r < s;
        limbs_[i] = r;
        carry = c1 | c2;
    }
    return *this;
}

bool ExactSum::is_zero() const {
    for (auto l : limbs_)
        if (l != 0)
            return false;
    return true;
}

double ExactSum::value() const {
    std::array<std::uint64_t, kLimbs> mag = limbs_;
    const bool neg = negative();
    if (neg) {
        unsigned carry = 1;
        for (auto& l : mag) {
            l = ~l;
            const std::uint64_t r = l + carry;
            carry = r < l;
            l = r;
        }
    }
    int top = kLimbs - 1;
    while (top >= 0 && mag[top] == 0)
        --top;
    if (top < 0)
        return 0.0;

    // 64-bit window starting at the most significant set bit, plus sticky.
    const int lead = 63 - std::countl_zero(mag[top]);
    const int msb = top * 64 + lead;
    const int low = msb - 63;  // bit index of window's lsb
    if (low <= 0) {
        // everything fits in the lowest limb
        const double r = std::ldexp(static_cast<double>(mag[0]), -kFractionBits);
        return neg ? -r : r;
    }
    const int limb = low / 64;
    const int offset = low % 64;
    std::uint64_t window = mag[limb] >> offset;
    if (offset != 0)
        window |= mag[limb + 1] << (64 - offset);
    bool sticky = (mag[limb] & ((std::uint64_t{1} << offset) - 1)) != 0;
    for (int i = 0; i < limb && !sticky; ++i)
        sticky = mag[i] != 0;
    if (sticky)
        window |= 1;
    const double r = std::ldexp(static_cast<double>(window), low - kFractionBits);
    return neg ? -r : r;
}

}  // namespace omerg
