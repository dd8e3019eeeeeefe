#pragma once

#include <array>
#include <cstdint>

namespace omerg {

/// Fixed-point superaccumulator for doubles.
///
/// Every finite double in [2^-256, 2^127) is added without rounding, so the
/// accumulated value is the exact sum of its terms and any grouping of the
/// same terms (per block, per thread, merged in any order) produces the same
/// bits. Conversion back to double is correctly rounded.
///
/// Bits of a term below 2^-256 are truncated; magnitudes at or above 2^127
/// throw std::overflow_error.
class ExactSum {
public:
    static constexpr int kLimbs = 6;
    static constexpr int kFractionBits = 256;

    ExactSum() = default;

    void add(double x);
    ExactSum& operator+=(double x) {
        add(x);
        return *this;
    }
    ExactSum& operator+=(const ExactSum& other);

    [[nodiscard]] double value() const;
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool negative() const { return (limbs_[kLimbs - 1] >> 63) != 0; }

    friend bool operator==(const ExactSum&, const ExactSum&) = default;

private:
    void add_shifted(std::uint64_t mantissa, int shift, bool subtract);

    // two's complement, little-endian limbs; value = limbs / 2^kFractionBits
    std::array<std::uint64_t, kLimbs> limbs_{};
};

/// Neumaier-compensated running sum. Cheap, order-dependent; used where an
/// independent second route to ExactSum is wanted.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (abs_ge(sum_, x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    static bool abs_ge(double a, double b) { return (a < 0 ? -a : a) >= (b < 0 ? -b : b); }
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace omerg
