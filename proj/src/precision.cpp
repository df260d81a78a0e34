#include "randbc/precision.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace randbc {

namespace {

using i128 = __int128;

i128 pow10_128(int k) {
    i128 p = 1;
    for (int i = 0; i < k; ++i) p *= 10;
    return p;
}

int count_digits(i128 a) {
    int d = 0;
    while (a > 0) {
        a /= 10;
        ++d;
    }
    return d;
}

void check_digits(int digits) {
    if (digits < 1 || digits > Decimal::kMaxDigits)
        throw std::invalid_argument("decimal digits must be in [1, 15], got " + std::to_string(digits));
}

template <class T>
void check_finite(T value, const char* what) {
    if (!std::isfinite(value)) throw OverflowError(std::string(what) + ": result outside the representable range");
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarMode

ScalarMode ScalarMode::decimal(int digits, TieRule tie, DecimalScope scope) {
    check_digits(digits);
    return {Kind::decimal, digits, tie, scope};
}

double ScalarMode::epsilon() const {
    switch (kind) {
        case Kind::f64:
            return 0x1.0p-53;
        case Kind::f32:
            return 0x1.0p-24;
        case Kind::decimal:
            return 0.5 * std::pow(10.0, 1 - digits);
    }
    return 0.0;
}

std::string ScalarMode::name() const {
    switch (kind) {
        case Kind::f64:
            return "f64";
        case Kind::f32:
            return "f32";
        case Kind::decimal: {
            std::string out = "dec<" + std::to_string(digits) + ">";
            if (tie == TieRule::half_away) out += ":away";
            if (scope == DecimalScope::products_only) out += ":mul";
            return out;
        }
    }
    return "?";
}

ScalarMode ScalarMode::parse(std::string_view text) {
    if (text == "f64" || text == "double") return f64();
    if (text == "f32" || text == "single") return f32();
    if (text.starts_with("dec")) {
        std::string_view rest = text.substr(3);
        TieRule tie = TieRule::half_even;
        DecimalScope scope = DecimalScope::all_ops;
        bool ok = true;
        for (auto colon = rest.rfind(':'); ok && colon != std::string_view::npos; colon = rest.rfind(':')) {
            const std::string_view suffix = rest.substr(colon + 1);
            if (suffix == "away")
                tie = TieRule::half_away;
            else if (suffix == "mul")
                scope = DecimalScope::products_only;
            else
                ok = false;
            rest = rest.substr(0, colon);
        }
        if (rest.starts_with("<") && rest.ends_with(">")) rest = rest.substr(1, rest.size() - 2);
        int digits = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), digits);
        if (ok && ec == std::errc() && ptr == rest.data() + rest.size() && !rest.empty())
            return decimal(digits, tie, scope);
    }
    throw std::invalid_argument("unknown precision '" + std::string(text) + "' (expected f64, f32 or dec<t>)");
}

// ---------------------------------------------------------------------------
// Decimal

Decimal Decimal::zero(int digits, TieRule tie, DecimalScope scope) {
    check_digits(digits);
    return Decimal(0, 0, {digits, tie, scope});
}

Decimal Decimal::round(i128 m, int exp, bool sticky, int digits, Context ctx) {
    if (m == 0) return Decimal(0, 0, ctx);
    const bool negative = m < 0;
    i128 a = negative ? -m : m;
    const int nd = count_digits(a);
    if (nd > digits) {
        const int shift = nd - digits;
        const i128 p = pow10_128(shift);
        i128 q = a / p;
        const i128 twice_rem = 2 * (a % p);
        bool up = false;
        if (twice_rem > p || (twice_rem == p && sticky)) {
            up = true;
        } else if (twice_rem == p) {
            up = ctx.tie == TieRule::half_away || (q % 2 == 1);
        }
        if (up) ++q;
        exp += shift;
        if (q == pow10_128(digits)) {
            q /= 10;
            ++exp;
        }
        a = q;
    }
    const int width = count_digits(a);
    const int storage = ctx.storage();
    if (width < storage) {
        a *= pow10_128(storage - width);
        exp -= storage - width;
    }
    const int sci = exp + storage - 1;
    if (sci > kMaxSciExponent) throw OverflowError("decimal overflow: exponent beyond 99");
    if (sci < -kMaxSciExponent) return Decimal(0, 0, ctx);
    const auto mant = static_cast<std::int64_t>(a);
    return Decimal(negative ? -mant : mant, exp, ctx);
}

Decimal Decimal::from_double(double x, int digits, TieRule tie, DecimalScope scope) {
    check_digits(digits);
    const Context ctx{digits, tie, scope};
    if (!std::isfinite(x)) throw OverflowError("cannot convert non-finite value to decimal");
    if (x == 0.0) return Decimal(0, 0, ctx);
    // Expand to digits + 3 significant digits first. That expansion is
    // correctly rounded, so it rounds to the same t digits unless its tail
    // is exactly 500, which may hide a tie. Then use the full expansion: a
    // double has at most 767 significant decimal digits.
    char buf[832];
    auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(x), std::chars_format::scientific, digits + 2);
    if (res.ec != std::errc()) throw std::runtime_error("decimal conversion failed");
    std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
    // Mantissa characters are "d.ddd...": digit k (0-based) sits at index k + (k > 0).
    const std::size_t tail = static_cast<std::size_t>(digits) + 1;
    if (text.substr(tail, 3) == "500") {
        res = std::to_chars(buf, buf + sizeof buf, std::fabs(x), std::chars_format::scientific, 780);
        if (res.ec != std::errc()) throw std::runtime_error("decimal conversion failed");
        text = std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    const auto epos = text.find('e');
    int sci = 0;
    std::from_chars(text.data() + epos + 1 + (text[epos + 1] == '+' ? 1 : 0), text.data() + text.size(), sci);
    std::string digits_str;
    digits_str.reserve(epos);
    for (std::size_t i = 0; i < epos; ++i)
        if (text[i] != '.') digits_str.push_back(text[i]);

    // Keep digits + 1 leading digits, fold the rest into the sticky bit.
    i128 m = 0;
    const std::size_t keep = static_cast<std::size_t>(digits) + 1;
    for (std::size_t i = 0; i < keep; ++i) m = m * 10 + (i < digits_str.size() ? digits_str[i] - '0' : 0);
    bool sticky = false;
    for (std::size_t i = keep; i < digits_str.size(); ++i) {
        if (digits_str[i] != '0') {
            sticky = true;
            break;
        }
    }
    const int exp = sci - digits;
    if (x < 0) m = -m;
    return round(m, exp, sticky, digits, ctx);
}

Decimal Decimal::from_ratio(std::int64_t num, std::int64_t den, int digits, TieRule tie, DecimalScope scope) {
    check_digits(digits);
    const Context ctx{digits, tie, scope};
    if (den == 0) throw std::invalid_argument("decimal ratio with zero denominator");
    if (num == 0) return Decimal(0, 0, ctx);
    const bool negative = (num < 0) != (den < 0);
    const i128 a = num < 0 ? -static_cast<i128>(num) : num;
    const i128 d = den < 0 ? -static_cast<i128>(den) : den;
    if (count_digits(a) > 18 || count_digits(d) > 18) throw std::invalid_argument("decimal ratio operands too large");
    const int k = std::max(0, digits + 2 + count_digits(d) - count_digits(a));
    const i128 scaled = a * pow10_128(k);
    const i128 q = scaled / d;
    const bool sticky = scaled % d != 0;
    return round(negative ? -q : q, -k, sticky, digits, ctx);
}

double Decimal::to_double() const {
    if (mantissa_ == 0) return 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lldE%d", static_cast<long long>(mantissa_), exponent_);
    return std::strtod(buf, nullptr);
}

std::string Decimal::to_string() const {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, to_double(), std::chars_format::general, context().storage());
    return std::string(buf, res.ptr);
}

namespace {

void require_same_context(const Decimal& a, const Decimal& b) {
    if (a.digits() != b.digits() || a.scope() != b.scope()) throw std::invalid_argument("mixing decimal contexts");
}

}  // namespace

Decimal operator+(const Decimal& a, const Decimal& b) {
    require_same_context(a, b);
    if (b.mantissa_ == 0) return a;
    if (a.mantissa_ == 0) return b;
    const Decimal& hi = a.exponent_ >= b.exponent_ ? a : b;
    const Decimal& lo = a.exponent_ >= b.exponent_ ? b : a;
    const int diff = hi.exponent_ - lo.exponent_;
    const Decimal::Context ctx = a.context();
    // lo is below a thousandth of an ulp of hi: the sum rounds back to hi.
    if (diff > ctx.storage() + 3) return hi;
    const i128 m = static_cast<i128>(hi.mantissa_) * pow10_128(diff) + lo.mantissa_;
    return Decimal::round(m, lo.exponent_, false, ctx.storage(), ctx);
}

Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

Decimal operator*(const Decimal& a, const Decimal& b) {
    require_same_context(a, b);
    const Decimal::Context ctx = a.context();
    if (a.mantissa_ == 0 || b.mantissa_ == 0) return Decimal(0, 0, ctx);
    const i128 m = static_cast<i128>(a.mantissa_) * b.mantissa_;
    return Decimal::round(m, a.exponent_ + b.exponent_, false, ctx.digits, ctx);
}

Decimal operator/(const Decimal& a, const Decimal& b) {
    require_same_context(a, b);
    const Decimal::Context ctx = a.context();
    if (b.mantissa_ == 0) throw OverflowError("decimal division by zero");
    if (a.mantissa_ == 0) return Decimal(0, 0, ctx);
    const int k = ctx.storage() + 2;
    const i128 num = (a.mantissa_ < 0 ? -static_cast<i128>(a.mantissa_) : a.mantissa_) * pow10_128(k);
    const i128 den = b.mantissa_ < 0 ? -static_cast<i128>(b.mantissa_) : b.mantissa_;
    const i128 q = num / den;
    const bool sticky = num % den != 0;
    const bool negative = (a.mantissa_ < 0) != (b.mantissa_ < 0);
    return Decimal::round(negative ? -q : q, a.exponent_ - b.exponent_ - k, sticky, ctx.digits, ctx);
}

// ---------------------------------------------------------------------------
// Real-valued interface

namespace {

template <class T>
T apply_op(const T& x, const T& y, Op op) {
    switch (op) {
        case Op::add:
            return x + y;
        case Op::sub:
            return x - y;
        case Op::mul:
            return x * y;
    }
    throw std::logic_error("unknown op");
}

template <class T>
T to_mode(double x, const ScalarMode& mode) {
    check_finite(x, "fl");
    const T value = ScalarTraits<T>::from_double(x, mode);
    if constexpr (!std::is_same_v<T, Decimal>) check_finite(value, "fl");
    return value;
}

}  // namespace

double fl(double x, const ScalarMode& mode) {
    return dispatch_scalar(mode, [&]<class T>() { return ScalarTraits<T>::to_double(to_mode<T>(x, mode)); });
}

double rounded_op(double x, double y, Op op, const ScalarMode& mode) {
    return dispatch_scalar(mode, [&]<class T>() {
        const T result = apply_op(to_mode<T>(x, mode), to_mode<T>(y, mode), op);
        if constexpr (!std::is_same_v<T, Decimal>) check_finite(result, "rounded_op");
        return ScalarTraits<T>::to_double(result);
    });
}

double sequential_sum(std::span<const double> values, const ScalarMode& mode) {
    return dispatch_scalar(mode, [&]<class T>() {
        T acc = ScalarTraits<T>::zero(mode);
        for (double v : values) {
            acc = acc + to_mode<T>(v, mode);
            if constexpr (!std::is_same_v<T, Decimal>) check_finite(acc, "sequential_sum");
        }
        return ScalarTraits<T>::to_double(acc);
    });
}

}  // namespace randbc
