#include "sosltl/validate.hpp"
#include "sosltl/kernels.hpp"
#include "sosltl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sosltl::sos {

const CheckResult* ValidationReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

Polynomial gram_polynomial(const std::vector<Monomial>& basis, const Eigen::MatrixXd& q)
{
    if (basis.empty())
        return {};
    Polynomial out(basis.front().nvars());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (q(i, j) != 0.0)
                out.add_term(basis[i] * basis[j], q(i, j));
    return out;
}

namespace {

std::string tag(const char* name, std::size_t piece, std::size_t ineq)
{
    return std::string(name) + "[" + std::to_string(piece) + "," + std::to_string(ineq) + "]";
}

std::string tag(const char* name, std::size_t piece) { return std::string(name) + "[" + std::to_string(piece) + "]"; }

double min_eig(const Eigen::MatrixXd& Q)
{
    if (Q.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace

double reexpanded_residual(const BarrierProgram& p, const BarrierCertificate& c)
{
    const std::size_t n = p.scaled.f.nvars();
    std::map<std::string, Polynomial> gram, mult;
    for (std::size_t k = 0; k < c.grams.size(); ++k)
        gram[c.gram_labels[k]] = gram_polynomial(c.gram_bases[k], c.grams[k]);
    for (const auto& [label, s] : c.multipliers)
        mult[label] = s;
    auto m = [&](const std::string& label) {
        auto it = mult.find(label);
        return it == mult.end() ? Polynomial(n) : it->second;
    };
    auto g = [&](const std::string& label) {
        auto it = gram.find(label);
        return it == gram.end() ? Polynomial(n) : it->second;
    };

    double worst = 0.0;
    auto compare = [&](const Polynomial& expr, const std::string& label) {
        worst = std::max(worst, max_coefficient_difference(expr, g(label)));
    };
    for (const auto& [label, s] : c.multipliers)
        compare(s, label);

    const Polynomial& b = c.b_scaled;
    const auto& sc = p.scaled;
    for (std::size_t i = 0; i < sc.y0.size(); ++i) {
        Polynomial e = -b;
        for (std::size_t j = 0; j < sc.y0[i].size(); ++j)
            e -= m(tag("s0", i, j)) * sc.y0[i][j];
        compare(e, tag("sigma0", i));
    }
    for (std::size_t i = 0; i < sc.y1.size(); ++i) {
        Polynomial e = b - Polynomial::constant(n, sc.epsilon);
        for (std::size_t j = 0; j < sc.y1[i].size(); ++j)
            e -= m(tag("s1", i, j)) * sc.y1[i][j];
        compare(e, tag("sigma1", i));
    }
    const Polynomial lie = lie_derivative(b, sc.f);
    for (std::size_t i = 0; i < sc.y.size(); ++i) {
        Polynomial e = -lie;
        for (std::size_t j = 0; j < sc.y[i].size(); ++j)
            e -= m(tag("s2", i, j)) * sc.y[i][j];
        for (std::size_t k = 0; k < sc.y1.size(); ++k)
            if (sc.y1[k].size() == 1)
                e += m(tag("s3", i, k)) * sc.y1[k][0];
        compare(e, tag("sigma2", i));
    }
    return worst;
}

region::Region to_region(const Pieces& pieces, std::size_t nvars)
{
    std::vector<region::BasicRegion> out;
    for (const auto& p : pieces)
        out.push_back(region::BasicRegion{p});
    return region::Region(nvars, std::move(out));
}

Pieces to_pieces(const region::Region& r)
{
    Pieces out;
    for (const auto& p : r.pieces)
        out.push_back(p.g);
    return out;
}

ValidationReport validate_certificate(const BarrierProgram& p, const BarrierCertificate& c,
                                      const ValidationOptions& opts)
{
    ValidationReport rep;
    const std::size_t n = p.original.f.nvars();

    {
        CheckResult r{"identity", false, reexpanded_residual(p, c), 0, ""};
        r.count = c.grams.size();
        r.passed = r.worst <= opts.identity_tol;
        rep.checks.push_back(r);
    }
    {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& q : c.grams) {
            if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + q.cwiseAbs().maxCoeff()))
                lo = -std::numeric_limits<double>::infinity();
            lo = std::min(lo, min_eig(q));
        }
        CheckResult r{"gram_psd", lo >= -opts.eigen_tol, lo, c.grams.size(), ""};
        rep.checks.push_back(r);
    }

    const region::Region y0 = to_region(p.original.y0, n);
    const region::Region y1 = to_region(p.original.y1, n);
    const region::Region y = to_region(p.original.y, n);
    const Polynomial lie = lie_derivative(c.b, p.original.f);
    std::mt19937_64 rng(opts.seed);
    const region::Box fallback = region::bounding_box(y, {});

    auto sampled = [&](const std::string& name, const region::Region& r, auto&& value, auto&& ok, bool worst_max,
                       const region::Region* exclude) {
        CheckResult res{name, true, worst_max ? -std::numeric_limits<double>::infinity()
                                              : std::numeric_limits<double>::infinity(),
                        0, ""};
        for (const auto& piece : r.pieces) {
            const region::Region one(n, {piece});
            const auto xs = region::sample(one, opts.samples_per_piece, fallback, rng);
            if (xs.size() < opts.samples_per_piece)
                res.detail += "piece sampled " + std::to_string(xs.size()) + " points; ";
            for (const auto& x : xs) {
                if (exclude && exclude->contains(x, 0.0))
                    continue;
                const double v = value(x);
                res.worst = worst_max ? std::max(res.worst, v) : std::min(res.worst, v);
                ++res.count;
                if (!ok(v))
                    res.passed = false;
            }
        }
        rep.checks.push_back(res);
    };
    const double tol = opts.sample_tol;
    sampled("b_nonpositive_on_y0", y0, [&](const std::vector<double>& x) { return c.b.evaluate(x); },
            [&](double v) { return v <= tol; }, true, nullptr);
    sampled("b_positive_on_y1", y1, [&](const std::vector<double>& x) { return c.b.evaluate(x); },
            [&](double v) { return v >= 0.5 * c.epsilon; }, false, nullptr);
    sampled("lie_nonpositive_on_y", y, [&](const std::vector<double>& x) { return lie.evaluate(x); },
            [&](double v) { return v <= tol; }, true, &y1);

    {
        CheckResult r{"trajectories", true, -std::numeric_limits<double>::infinity(), 0, ""};
        const auto starts = region::sample(y0, opts.trajectories, fallback, rng);
        for (const auto& x0 : starts) {
            const sim::Trajectory tr = sim::integrate(p.original.f, x0, opts.horizon, opts.step, &y);
            ++r.count;
            for (const auto& x : tr.x) {
                r.worst = std::max(r.worst, c.b.evaluate(x));
                if (y1.contains(x, 0.0)) {
                    r.passed = false;
                    r.detail = "trajectory entered Y1";
                }
            }
        }
        if (r.worst > opts.trajectory_tol) {
            r.passed = false;
            if (r.detail.empty())
                r.detail = "B grew above tolerance inside cl(Y)";
        }
        if (r.count < opts.trajectories)
            r.detail += " only " + std::to_string(r.count) + " start points";
        rep.checks.push_back(r);
    }

    rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& r) { return r.passed; });
    return rep;
}

} // namespace sosltl::sos
