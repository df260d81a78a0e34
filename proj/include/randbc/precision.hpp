#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <span>

namespace randbc {

/// Tie-breaking rule for the decimal machine.
enum class TieRule : std::uint8_t { half_even, half_away };

/// Which decimal operations round to t digits. products_only keeps sums at
/// 15 digits (exact for well-scaled data) and rounds multiplication,
/// division and conversion.
enum class DecimalScope : std::uint8_t { all_ops, products_only };

/// Arithmetic environment in which a multiplication is measured.
struct ScalarMode {
    enum class Kind : std::uint8_t { f64, f32, decimal };

    Kind kind = Kind::f64;
    int digits = 0;  // significant decimal digits, decimal kind only
    TieRule tie = TieRule::half_even;
    DecimalScope scope = DecimalScope::all_ops;

    static ScalarMode f64() { return {Kind::f64, 0, TieRule::half_even, DecimalScope::all_ops}; }
    static ScalarMode f32() { return {Kind::f32, 0, TieRule::half_even, DecimalScope::all_ops}; }
    static ScalarMode decimal(int digits, TieRule tie = TieRule::half_even,
                              DecimalScope scope = DecimalScope::all_ops);

    /// Unit roundoff: 2^-53, 2^-24, or 0.5 * 10^(1-t).
    double epsilon() const;

    /// "f64", "f32", "dec<t>", with ":away" and ":mul" suffixes for the
    /// non-default tie rule and scope.
    std::string name() const;

    /// Accepts f64/double, f32/single, dec<t> or dect (1 <= t <= 15), the
    /// decimal forms optionally followed by ":away" and/or ":mul".
    static ScalarMode parse(std::string_view text);

    friend bool operator==(const ScalarMode&, const ScalarMode&) = default;
};

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Base-10 floating point value with a fixed number of significant digits.
///
/// value = mantissa * 10^exponent with |mantissa| in [10^(s-1), 10^s) or
/// mantissa == 0, where the storage width s is t, or 15 under products_only
/// scope. Every operation is computed exactly in integer arithmetic and then
/// rounded once, so results are platform independent. The decimal
/// (scientific) exponent is limited to [-99, 99]; larger results throw
/// OverflowError and smaller ones flush to zero.
class Decimal {
public:
    static constexpr int kMaxDigits = 15;
    static constexpr int kMaxSciExponent = 99;

    Decimal() = default;

    static Decimal zero(int digits, TieRule tie = TieRule::half_even, DecimalScope scope = DecimalScope::all_ops);

    /// Correctly rounded conversion of a binary double.
    static Decimal from_double(double x, int digits, TieRule tie = TieRule::half_even,
                               DecimalScope scope = DecimalScope::all_ops);

    /// Correctly rounded num / den.
    static Decimal from_ratio(std::int64_t num, std::int64_t den, int digits, TieRule tie = TieRule::half_even,
                              DecimalScope scope = DecimalScope::all_ops);

    /// Nearest double to the exact decimal value.
    double to_double() const;

    std::int64_t mantissa() const noexcept { return mantissa_; }
    int exponent() const noexcept { return exponent_; }
    int digits() const noexcept { return digits_; }
    TieRule tie() const noexcept { return tie_; }
    DecimalScope scope() const noexcept { return scope_; }
    bool is_zero() const noexcept { return mantissa_ == 0; }

    std::string to_string() const;

    friend Decimal operator+(const Decimal& a, const Decimal& b);
    friend Decimal operator-(const Decimal& a, const Decimal& b);
    friend Decimal operator*(const Decimal& a, const Decimal& b);
    friend Decimal operator/(const Decimal& a, const Decimal& b);
    Decimal operator-() const noexcept {
        Decimal r = *this;
        r.mantissa_ = -r.mantissa_;
        return r;
    }
    Decimal& operator+=(const Decimal& b) { return *this = *this + b; }
    Decimal& operator-=(const Decimal& b) { return *this = *this - b; }
    Decimal& operator*=(const Decimal& b) { return *this = *this * b; }

    /// Same number (context ignored).
    friend bool operator==(const Decimal& a, const Decimal& b) noexcept {
        return a.mantissa_ == b.mantissa_ && (a.mantissa_ == 0 || a.exponent_ == b.exponent_);
    }

private:
    struct Context {
        int digits;
        TieRule tie;
        DecimalScope scope;
        int storage() const noexcept { return scope == DecimalScope::all_ops ? digits : kMaxDigits; }
    };

    Decimal(std::int64_t mantissa, int exponent, Context ctx) noexcept
        : mantissa_(mantissa),
          exponent_(exponent),
          digits_(static_cast<std::uint8_t>(ctx.digits)),
          tie_(ctx.tie),
          scope_(ctx.scope) {}

    Context context() const noexcept { return {digits_, tie_, scope_}; }

    /// Rounds (m + sticky * tiny) * 10^exp to `digits` significant digits and
    /// stores it at the context's width. sticky means the true value lies
    /// strictly beyond m in the direction away from zero.
    static Decimal round(__int128 m, int exp, bool sticky, int digits, Context ctx);

    std::int64_t mantissa_ = 0;
    std::int32_t exponent_ = 0;
    std::uint8_t digits_ = 2;
    TieRule tie_ = TieRule::half_even;
    DecimalScope scope_ = DecimalScope::all_ops;
};

/// Per-type hooks used by the generic kernels. The mode argument carries the
/// decimal context; binary types ignore it.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr ScalarMode::Kind kind = ScalarMode::Kind::f64;
    static double from_double(double x, const ScalarMode&) { return x; }
    static double from_ratio(std::int64_t num, std::int64_t den, const ScalarMode&) {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    static double to_double(double x) { return x; }
    static double zero(const ScalarMode&) { return 0.0; }
    static double sqrt(double x) { return std::sqrt(x); }
    static double abs(double x) { return std::fabs(x); }
};

template <>
struct ScalarTraits<float> {
    static constexpr ScalarMode::Kind kind = ScalarMode::Kind::f32;
    static float from_double(double x, const ScalarMode&) { return static_cast<float>(x); }
    static float from_ratio(std::int64_t num, std::int64_t den, const ScalarMode&) {
        // exact for |num|, |den| < 2^24
        return static_cast<float>(num) / static_cast<float>(den);
    }
    static double to_double(float x) { return x; }
    static float zero(const ScalarMode&) { return 0.0f; }
    static float sqrt(float x) { return std::sqrt(x); }
    static float abs(float x) { return std::fabs(x); }
};

template <>
struct ScalarTraits<Decimal> {
    static constexpr ScalarMode::Kind kind = ScalarMode::Kind::decimal;
    static Decimal from_double(double x, const ScalarMode& mode) {
        return Decimal::from_double(x, mode.digits, mode.tie, mode.scope);
    }
    static Decimal from_ratio(std::int64_t num, std::int64_t den, const ScalarMode& mode) {
        return Decimal::from_ratio(num, den, mode.digits, mode.tie, mode.scope);
    }
    static double to_double(const Decimal& x) { return x.to_double(); }
    static Decimal zero(const ScalarMode& mode) { return Decimal::zero(mode.digits, mode.tie, mode.scope); }
    // Rounded from the binary square root; only the rescaling baseline uses it.
    static Decimal sqrt(const Decimal& x) {
        return Decimal::from_double(std::sqrt(x.to_double()), x.digits(), x.tie(), x.scope());
    }
    static Decimal abs(const Decimal& x) { return x.mantissa() < 0 ? -x : x; }
};

/// Throws std::invalid_argument when T does not match the mode's kind.
template <class T>
void require_mode(const ScalarMode& mode) {
    if (ScalarTraits<T>::kind != mode.kind)
        throw std::invalid_argument("element type does not match scalar mode " + mode.name());
}

enum class Op : std::uint8_t { add, sub, mul };

/// x rounded into the mode, returned as the nearest double.
double fl(double x, const ScalarMode& mode);

/// fl(fl(x) op fl(y)) in the mode.
double rounded_op(double x, double y, Op op, const ScalarMode& mode);

/// Left-to-right sum under rounded_op; empty input gives 0.
double sequential_sum(std::span<const double> values, const ScalarMode& mode);

/// Calls fn.template operator()<T>() with T the element type of the mode.
template <class Fn>
decltype(auto) dispatch_scalar(const ScalarMode& mode, Fn&& fn) {
    switch (mode.kind) {
        case ScalarMode::Kind::f64:
            return fn.template operator()<double>();
        case ScalarMode::Kind::f32:
            return fn.template operator()<float>();
        case ScalarMode::Kind::decimal:
            return fn.template operator()<Decimal>();
    }
    throw std::logic_error("unknown scalar mode");
}

}  // namespace randbc
