#include "sosltl/problem.hpp"

#include <ostream>

namespace sosltl::cli {

void write_grid(std::ostream& os, const verify::System& sys, const Polynomial& b, int n)
{
    if (sys.vars.size() != 2)
        throw std::invalid_argument("grids need exactly two variables");
    if (n < 1)
        throw std::invalid_argument("grid size must be positive");
    const region::Box box = region::bounding_box(sys.domain, {});
    const Polynomial lie = lie_derivative(b, sys.f);
    os << sys.vars[0] << ',' << sys.vars[1] << ",B,lie,domain";
    for (const auto& p : sys.props.names())
        os << ',' << p;
    os << '\n';
    os.precision(10);
    std::vector<double> x(2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < 2; ++k) {
                const int idx = k == 0 ? i : j;
                x[k] = n == 1 ? 0.5 * (box.lo[k] + box.hi[k])
                              : box.lo[k] + (box.hi[k] - box.lo[k]) * idx / (n - 1);
            }
            os << x[0] << ',' << x[1] << ',' << b.evaluate(x) << ',' << lie.evaluate(x) << ','
               << (sys.domain.contains(x) ? 1 : 0);
            for (const auto& r : sys.regions)
                os << ',' << (r.contains(x) ? 1 : 0);
            os << '\n';
        }
}

} // namespace sosltl::cli
