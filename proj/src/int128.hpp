#pragma once

// 128-bit helpers for exact femtosecond arithmetic.

namespace wrsync::detail {

__extension__ typedef __int128 i128;

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

inline i128 gcd(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    const i128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

// Floor division for a positive divisor.
inline i128 div_floor(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

// Round-half-up division for a positive divisor.
inline i128 div_round(i128 a, i128 b) { return div_floor(2 * a + b, 2 * b); }

}  // namespace wrsync::detail
