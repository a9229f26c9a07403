#include "sosltl/sos.hpp"

#include <algorithm>
#include <cmath>

namespace sosltl::sos {

LinPoly LinPoly::constant(const Polynomial& p)
{
    LinPoly l(p.nvars());
    l.offset_ = p;
    return l;
}

int LinPoly::degree() const
{
    int d = offset_.is_zero() ? -1 : offset_.degree();
    for (const auto& [v, p] : vars_)
        d = std::max(d, p.degree());
    return d;
}

void LinPoly::add_variable(int var, const Polynomial& p)
{
    auto it = vars_.find(var);
    if (it == vars_.end()) {
        if (!p.is_zero())
            vars_.emplace(var, p);
        return;
    }
    it->second += p;
    if (it->second.is_zero())
        vars_.erase(it);
}

Polynomial LinPoly::evaluate(const std::vector<double>& values) const
{
    Polynomial r = offset_;
    for (const auto& [v, p] : vars_)
        if (values.at(v) != 0.0)
            r += values[v] * p;
    return r;
}

LinPoly& LinPoly::operator+=(const LinPoly& o)
{
    offset_ += o.offset_;
    for (const auto& [v, p] : o.vars_)
        add_variable(v, p);
    return *this;
}

LinPoly& LinPoly::operator-=(const LinPoly& o)
{
    offset_ -= o.offset_;
    for (const auto& [v, p] : o.vars_)
        add_variable(v, -p);
    return *this;
}

LinPoly& LinPoly::operator+=(const Polynomial& p)
{
    offset_ += p;
    return *this;
}

LinPoly& LinPoly::operator-=(const Polynomial& p)
{
    offset_ -= p;
    return *this;
}

LinPoly& LinPoly::operator*=(double s)
{
    if (s == 0.0) {
        offset_ = Polynomial(offset_.nvars());
        vars_.clear();
        return *this;
    }
    offset_ *= s;
    for (auto& [v, p] : vars_)
        p *= s;
    return *this;
}

LinPoly operator*(const Polynomial& p, const LinPoly& a)
{
    LinPoly r = LinPoly::constant(p * a.offset_);
    for (const auto& [v, q] : a.vars_)
        r.add_variable(v, p * q);
    return r;
}

LinPoly lie_derivative(const LinPoly& b, const VectorField& f)
{
    LinPoly r = LinPoly::constant(lie_derivative(b.offset(), f));
    for (const auto& [v, p] : b.variables())
        r.add_variable(v, lie_derivative(p, f));
    return r;
}

LinPoly SosProgram::new_sos(int half_degree, const std::string& label)
{
    GramBlock blk;
    blk.label = label;
    blk.basis = monomials_up_to(nvars_, half_degree);
    blk.first_var = static_cast<int>(vars_.size());
    const int b = static_cast<int>(blocks_.size());
    const int n = static_cast<int>(blk.basis.size());
    LinPoly out(nvars_);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            const int v = static_cast<int>(vars_.size());
            vars_.push_back({b, i, j});
            out.add_variable(v, Polynomial::monomial(blk.basis[i] * blk.basis[j], i == j ? 1.0 : 2.0));
        }
    blocks_.push_back(std::move(blk));
    return out;
}

LinPoly SosProgram::new_sos_of_degree(int degree, const std::string& label)
{
    if (degree < 0)
        return LinPoly(nvars_);
    return new_sos(degree / 2, label);
}

void SosProgram::require_zero(LinPoly expr, const std::string& label)
{
    if (expr.nvars() != nvars_)
        throw SosError("identity variable count mismatch");
    identities_.push_back({label, std::move(expr)});
}

void SosProgram::require_sos(const LinPoly& expr, const std::string& label)
{
    const int d = expr.degree();
    const LinPoly sigma = new_sos_of_degree(std::max(d, 0) + (d % 2 != 0 ? 1 : 0), label);
    require_zero(expr - sigma, label);
}

sdp::Problem SosProgram::compile() const
{
    sdp::Problem p;
    for (const auto& b : blocks_)
        p.block_sizes.push_back(static_cast<int>(b.basis.size()));

    int con = 0;
    for (const auto& id : identities_) {
        std::map<Monomial, std::vector<std::pair<int, double>>, GradedLex> rows;
        for (const auto& [v, poly] : id.expr.variables())
            for (const auto& [m, c] : poly.terms())
                rows[m].emplace_back(v, c);
        for (const auto& [m, c] : id.expr.offset().terms())
            rows[m];
        for (const auto& [m, entries] : rows) {
            const double rhs = -id.expr.offset().coefficient(m);
            double scale = std::abs(rhs);
            for (const auto& [v, c] : entries)
                scale = std::max(scale, std::abs(c));
            if (scale == 0.0)
                continue;
            for (const auto& [v, c] : entries) {
                const VarRef& r = vars_[v];
                const double coef = r.row == r.col ? c : 0.5 * c;
                p.constraints.push_back({con, r.block, r.row, r.col, coef / scale});
            }
            p.rhs.push_back(rhs / scale);
            ++con;
        }
    }
    return p;
}

std::vector<double> SosProgram::values(const std::vector<Eigen::MatrixXd>& grams) const
{
    std::vector<double> out(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
        const VarRef& r = vars_[v];
        out[v] = grams.at(r.block)(r.row, r.col);
    }
    return out;
}

std::vector<Eigen::MatrixXd> SosProgram::gram_matrices(const sdp::Solution& s) const
{
    if (s.X.size() != blocks_.size())
        throw SosError("solution does not match the program's blocks");
    return s.X;
}

double SosProgram::identity_residual(const std::vector<double>& values) const
{
    double r = 0.0;
    for (const auto& id : identities_)
        r = std::max(r, id.expr.evaluate(values).max_abs_coefficient());
    return r;
}

SosSolution solve(const SosProgram& prog, const sdp::Options& opts)
{
    SosSolution out;
    out.sdp = sdp::solve(prog.compile(), opts);
    out.feasible = out.sdp.status == sdp::Status::Feasible;
    if (out.sdp.X.size() == prog.blocks().size()) {
        out.grams = prog.gram_matrices(out.sdp);
        out.values = prog.values(out.grams);
        out.identity_residual = prog.identity_residual(out.values);
    }
    return out;
}

bool is_sos(const Polynomial& p, const sdp::Options& opts)
{
    SosProgram prog(p.nvars());
    prog.require_sos(LinPoly::constant(p), "p");
    return solve(prog, opts).feasible;
}

std::optional<PsatzCertificate> psatz_refute(const std::vector<Polynomial>& g, int degree,
                                             const sdp::Options& opts)
{
    if (g.empty())
        return std::nullopt;
    const std::size_t n = g.front().nvars();
    const int d = degree + degree % 2;
    SosProgram prog(n);
    LinPoly sigma = prog.new_sos_of_degree(d, "sigma");
    LinPoly sum = LinPoly::constant(Polynomial::constant(n, 1.0)) + sigma;
    std::vector<LinPoly> mult;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mult.push_back(prog.new_sos_of_degree(d - g[i].degree(), "s" + std::to_string(i)));
        sum += g[i] * mult.back();
    }
    prog.require_zero(sum, "psatz");
    const SosSolution sol = solve(prog, opts);
    if (!sol.feasible)
        return std::nullopt;
    PsatzCertificate c;
    c.degree = d;
    c.sigma = sigma.evaluate(sol.values);
    for (const auto& m : mult)
        c.multipliers.push_back(m.evaluate(sol.values));
    c.identity_residual = psatz_residual(c, g);
    return c;
}

double psatz_residual(const PsatzCertificate& c, const std::vector<Polynomial>& g)
{
    Polynomial r = Polynomial::constant(c.sigma.nvars(), 1.0) + c.sigma;
    for (std::size_t i = 0; i < g.size() && i < c.multipliers.size(); ++i)
        r += c.multipliers[i] * g[i];
    return r.max_abs_coefficient();
}

} // namespace sosltl::sos
