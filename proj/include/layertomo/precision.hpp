#pragma once

#include <array>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>

#include <boost/multiprecision/mpfr.hpp>

#include "errors.hpp"

namespace layertomo {

namespace mp = boost::multiprecision;

constexpr unsigned digits10_for_bits(unsigned bits) { return (bits * 30103u + 99999u) / 100000u; }

// Precision is a compile-time property of the type, so no global mpfr state is touched.
template <unsigned Bits>
using MpReal = mp::number<mp::mpfr_float_backend<digits10_for_bits(Bits)>, mp::et_off>;

inline constexpr std::array<unsigned, 7> kPrecisionTiers{53, 128, 256, 512, 1024, 2048, 4096};

inline unsigned resolve_bits(unsigned requested) {
    for (unsigned t : kPrecisionTiers)
        if (requested <= t) return t < 53 ? 53 : t;
    throw ConfigError("mantissa bits " + std::to_string(requested) + " exceed the supported maximum 4096");
}

template <class Real>
unsigned mantissa_bits() {
    return static_cast<unsigned>(std::numeric_limits<Real>::digits);
}

// Calls f(std::type_identity<Real>{}) with Real chosen from the precision tiers.
template <class F>
decltype(auto) with_precision(unsigned bits, F&& f) {
    if (bits < 53) throw ConfigError("mantissa bits must be at least 53");
    switch (resolve_bits(bits)) {
        case 53: return f(std::type_identity<double>{});
        case 128: return f(std::type_identity<MpReal<128>>{});
        case 256: return f(std::type_identity<MpReal<256>>{});
        case 512: return f(std::type_identity<MpReal<512>>{});
        case 1024: return f(std::type_identity<MpReal<1024>>{});
        case 2048: return f(std::type_identity<MpReal<2048>>{});
        default: return f(std::type_identity<MpReal<4096>>{});
    }
}

template <class Real>
std::string to_decimal(const Real& x) {
    if constexpr (std::is_floating_point_v<Real>) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(x));
        return buf;
    } else {
        return x.str(std::numeric_limits<Real>::digits10, std::ios_base::scientific);
    }
}

template <class Real>
Real epsilon() {
    return std::numeric_limits<Real>::epsilon();
}

}  // namespace layertomo
