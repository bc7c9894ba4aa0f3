#pragma once

#include "pnt/xreal.hpp"

namespace pnt {

// D+(y) = e^{-y^2} * integral_0^y e^{t^2} dt, y >= 0.
Enclosure dawson(const Enclosure& y);
Enclosure dawson(const XReal& y);

// e^{-s} * integral_a^b e^u / u^2 du, for 1 < a <= b.
Enclosure j_integral(const Enclosure& a, const Enclosure& b, const Enclosure& s);

// Ei(u) - Ei(v) for 0 < v <= u (moderate size, series evaluation).
Enclosure ei_difference(const Enclosure& u, const Enclosure& v);
Enclosure ei(const Enclosure& u);

// Li(x) = integral_2^x dt / log t, for 2 <= x <= 1e18.
Enclosure li_moderate(const Enclosure& x);

// li(2) = li(x) - Li(x).
Enclosure li_offset();

}  // namespace pnt
