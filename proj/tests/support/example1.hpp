#pragma once

#include "sosltl/poly.hpp"
#include "sosltl/region.hpp"

#include <string>
#include <vector>

namespace example1 {

using sosltl::Polynomial;
using sosltl::VectorField;
using sosltl::region::BasicRegion;
using sosltl::region::Region;

inline const std::vector<std::string>& names()
{
    static const std::vector<std::string> n{"x1", "x2"};
    return n;
}

inline Polynomial poly(const std::string& s) { return sosltl::parse_polynomial(s, names()); }

inline VectorField field() { return VectorField({poly("x2"), poly("-x1 + x1^3/3 - x2")}); }

inline Polynomial g_domain() { return poly("49 - x1^2 - x2^2"); }

inline std::vector<Polynomial> g_props()
{
    return {
        poly("0.0625 - (x1 + 2)^2 - (x2 - 4.5)^2"),
        poly("3 - (x1 - 1.7320508075688772)^2 - x2^2"),
        poly("1 - (x1 - 4)^2 - (x2 - 4)^2"),
        poly("4 - x1^2 - (x2 + 3)^2"),
    };
}

inline Region domain() { return Region(2, {BasicRegion{{g_domain()}}}); }

inline std::vector<Region> props()
{
    std::vector<Region> out;
    for (const auto& g : g_props())
        out.push_back(Region(2, {BasicRegion{{g}}}));
    return out;
}

inline const char* formula() { return "G(p2 -> G !p3) & (p0 -> (F p2 -> (!p2 U p1)))"; }

} // namespace example1
