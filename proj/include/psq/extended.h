#pragma once

// Extended-precision scalars for the ill-conditioned polynomial sums.
// Precision is a compile-time ladder; callers escalate by re-running the
// same template at the next rung.

#include <boost/multiprecision/mpfr.hpp>

#include <array>
#include <cstddef>

namespace psq {

template <unsigned Digits10>
using ExtendedReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits10>>;

// Decimal digits of each rung. The first rung is at least four times double
// precision (4 x 53 bits = 212 bits ~ 64 digits).
inline constexpr std::array<unsigned, 5> kPrecisionLadder{64, 128, 256, 512, 1024};

using Extended = ExtendedReal<kPrecisionLadder[0]>;

// Calls f.template operator()<ExtendedReal<kPrecisionLadder[rung]>>().
template <class F>
decltype(auto) with_precision_rung(std::size_t rung, F&& f) {
    switch (rung) {
        case 0: return f.template operator()<ExtendedReal<kPrecisionLadder[0]>>();
        case 1: return f.template operator()<ExtendedReal<kPrecisionLadder[1]>>();
        case 2: return f.template operator()<ExtendedReal<kPrecisionLadder[2]>>();
        case 3: return f.template operator()<ExtendedReal<kPrecisionLadder[3]>>();
        default: return f.template operator()<ExtendedReal<kPrecisionLadder[4]>>();
    }
}

}  // namespace psq
