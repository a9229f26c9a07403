#include "sosltl/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sosltl::sos {

namespace {

Polynomial normalised(const Polynomial& g)
{
    const double m = g.max_abs_coefficient();
    return m > 0.0 ? g * (1.0 / m) : g;
}

Pieces scale_pieces(const Pieces& in, std::span<const double> c, double s)
{
    Pieces out;
    for (const auto& piece : in) {
        std::vector<Polynomial> q;
        for (const auto& g : piece)
            q.push_back(normalised(g.affine_pullback(c, s)));
        out.push_back(std::move(q));
    }
    return out;
}

int even_ceil(int d)
{
    return d + (d % 2 != 0 ? 1 : 0);
}

std::string tag(const char* name, std::size_t piece, std::size_t ineq)
{
    return std::string(name) + "[" + std::to_string(piece) + "," + std::to_string(ineq) + "]";
}

double min_eig(const Eigen::MatrixXd& Q)
{
    if (Q.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace

BarrierProgram build_barrier_program(const BarrierSpec& spec, int degree, int max_degree)
{
    if (degree > max_degree)
        throw DegreeCapExceeded("barrier degree " + std::to_string(degree) + " exceeds cap " +
                                std::to_string(max_degree));
    if (spec.y0.empty() || spec.y1.empty())
        throw SosError("barrier program needs nonempty Y0 and Y1");
    const std::size_t n = spec.f.nvars();
    std::vector<double> center = spec.center;
    if (center.empty())
        center.assign(n, 0.0);
    if (center.size() != n || !(spec.scale > 0.0))
        throw SosError("invalid scaling for barrier program");

    BarrierProgram bp;
    bp.original = spec;
    bp.degree = degree;
    bp.program = SosProgram(n);
    SosProgram& prog = bp.program;

    BarrierSpec& sc = bp.scaled;
    sc.y0 = scale_pieces(spec.y0, center, spec.scale);
    sc.y1 = scale_pieces(spec.y1, center, spec.scale);
    sc.y = scale_pieces(spec.y, center, spec.scale);
    sc.center = center;
    sc.scale = spec.scale;
    sc.epsilon = spec.epsilon;
    {
        VectorField f = spec.f.affine_pullback(center, spec.scale);
        double m = 0.0;
        for (const auto& c : f.components)
            m = std::max(m, c.max_abs_coefficient());
        if (m > 0.0)
            for (auto& c : f.components)
                c *= 1.0 / m;
        sc.f = std::move(f);
    }

    const int db = even_ceil(std::max(degree, 1));
    auto multiplier = [&](const std::string& label, int d) {
        LinPoly s = prog.new_sos_of_degree(d, label);
        bp.multipliers.emplace_back(label, s);
        return s;
    };

    // B from the first Y0 piece.
    LinPoly b = -prog.new_sos_of_degree(db, "sigma0[0]");
    for (std::size_t j = 0; j < sc.y0[0].size(); ++j) {
        const auto& g = sc.y0[0][j];
        b -= g * multiplier(tag("s0", 0, j), db - g.degree());
    }
    bp.b = b;

    for (std::size_t i = 1; i < sc.y0.size(); ++i) {
        LinPoly e = -b;
        for (std::size_t j = 0; j < sc.y0[i].size(); ++j) {
            const auto& g = sc.y0[i][j];
            e -= g * multiplier(tag("s0", i, j), db - g.degree());
        }
        prog.require_sos(e, "sigma0[" + std::to_string(i) + "]");
    }

    const Polynomial eps = Polynomial::constant(n, spec.epsilon);
    for (std::size_t i = 0; i < sc.y1.size(); ++i) {
        LinPoly e = b - eps;
        for (std::size_t j = 0; j < sc.y1[i].size(); ++j) {
            const auto& g = sc.y1[i][j];
            e -= g * multiplier(tag("s1", i, j), db - g.degree());
        }
        prog.require_sos(e, "sigma1[" + std::to_string(i) + "]");
    }

    const LinPoly lie = lie_derivative(b, sc.f);
    const int dl = even_ceil(std::max(lie.degree(), 0));
    for (std::size_t i = 0; i < sc.y.size(); ++i) {
        LinPoly e = -lie;
        for (std::size_t j = 0; j < sc.y[i].size(); ++j) {
            const auto& g = sc.y[i][j];
            e -= g * multiplier(tag("s2", i, j), dl - g.degree());
        }
        for (std::size_t k = 0; k < sc.y1.size(); ++k) {
            if (sc.y1[k].size() != 1)
                continue;
            const auto& g1 = sc.y1[k][0];
            e += g1 * multiplier(tag("s3", i, k), dl - g1.degree());
        }
        prog.require_sos(e, "sigma2[" + std::to_string(i) + "]");
    }
    return bp;
}

BarrierCertificate extract_certificate(const BarrierProgram& p, const sdp::Solution& sol, double tol)
{
    if (sol.X.size() != p.program.blocks().size())
        throw InsufficientlyFeasible("solution does not match the program");
    const auto values = p.program.values(sol.X);
    const double res = p.program.identity_residual(values);
    if (!(res <= tol))
        throw InsufficientlyFeasible("insufficiently feasible: identity residual " + std::to_string(res));

    BarrierCertificate c;
    c.degree = p.degree;
    c.epsilon = p.original.epsilon;
    c.center = p.scaled.center;
    c.scale = p.scaled.scale;
    c.b_scaled = p.b.evaluate(values);
    std::vector<double> inv_center(c.center.size());
    for (std::size_t i = 0; i < inv_center.size(); ++i)
        inv_center[i] = -c.center[i] / c.scale;
    c.b = c.b_scaled.affine_pullback(inv_center, 1.0 / c.scale);
    for (const auto& [label, s] : p.multipliers)
        c.multipliers.emplace_back(label, s.evaluate(values));
    c.grams = sol.X;
    c.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.grams.size(); ++k) {
        c.gram_labels.push_back(p.program.blocks()[k].label);
        c.gram_bases.push_back(p.program.blocks()[k].basis);
        c.min_gram_eigenvalue = std::min(c.min_gram_eigenvalue, min_eig(c.grams[k]));
    }
    c.identity_residual = res;
    c.margin = sol.margin;
    c.iterations = sol.iterations;
    return c;
}

double certificate_identity_residual(const BarrierProgram& p, const BarrierCertificate& c)
{
    return p.program.identity_residual(p.program.values(c.grams));
}

} // namespace sosltl::sos
