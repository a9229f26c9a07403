#include "sosltl/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace sosltl {

int Monomial::degree() const
{
    return std::accumulate(exps.begin(), exps.end(), 0);
}

Monomial Monomial::operator*(const Monomial& other) const
{
    if (other.exps.size() != exps.size())
        throw PolyError("monomial variable count mismatch");
    Monomial r(exps.size());
    for (std::size_t i = 0; i < exps.size(); ++i) {
        const int e = exps[i] + other.exps[i];
        if (e > 255)
            throw PolyError("monomial exponent overflow");
        r.exps[i] = static_cast<std::uint8_t>(e);
    }
    return r;
}

double Monomial::evaluate(std::span<const double> x) const
{
    double v = 1.0;
    for (std::size_t i = 0; i < exps.size(); ++i)
        for (int k = 0; k < exps[i]; ++k)
            v *= x[i];
    return v;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const
{
    const int da = a.degree();
    const int db = b.degree();
    if (da != db)
        return da < db;
    // Among equal degree, x1^d comes last so that ascending order reads 1, x2, x1, ...
    return std::lexicographical_compare(a.exps.begin(), a.exps.end(), b.exps.begin(), b.exps.end());
}

namespace {

void enumerate_monomials(std::size_t var, int remaining, Monomial& cur, std::vector<Monomial>& out)
{
    if (var + 1 == cur.exps.size()) {
        cur.exps[var] = static_cast<std::uint8_t>(remaining);
        out.push_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur.exps[var] = static_cast<std::uint8_t>(e);
        enumerate_monomials(var + 1, remaining - e, cur, out);
    }
    cur.exps[var] = 0;
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_degree)
{
    std::vector<Monomial> out;
    if (nvars == 0) {
        out.emplace_back();
        return out;
    }
    for (int d = 0; d <= max_degree; ++d) {
        Monomial cur(nvars);
        std::vector<Monomial> layer;
        enumerate_monomials(0, d, cur, layer);
        std::sort(layer.begin(), layer.end(), GradedLex{});
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

Polynomial Polynomial::constant(std::size_t nvars, double c)
{
    Polynomial p(nvars);
    p.add_term(Monomial(nvars), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index)
{
    if (index >= nvars)
        throw PolyError("variable index out of range");
    Monomial m(nvars);
    m.exps[index] = 1;
    Polynomial p(nvars);
    p.add_term(m, 1.0);
    return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double c)
{
    Polynomial p(m.nvars());
    p.add_term(m, c);
    return p;
}

int Polynomial::degree() const
{
    int d = 0;
    for (const auto& [m, c] : terms_)
        d = std::max(d, m.degree());
    return d;
}

double Polynomial::coefficient(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const
{
    double r = 0.0;
    for (const auto& [m, c] : terms_)
        r = std::max(r, std::abs(c));
    return r;
}

void Polynomial::add_term(const Monomial& m, double c)
{
    if (m.nvars() != nvars_)
        throw PolyError("monomial does not match polynomial variable count");
    if (c == 0.0)
        return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0)
            terms_.erase(it);
    }
}

double Polynomial::evaluate(std::span<const double> x) const
{
    if (x.size() != nvars_)
        throw PolyError("evaluation point has wrong dimension");
    double s = 0.0;
    for (const auto& [m, c] : terms_)
        s += c * m.evaluate(x);
    return s;
}

Polynomial Polynomial::derivative(std::size_t var) const
{
    if (var >= nvars_)
        throw PolyError("derivative variable out of range");
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) {
        if (m.exps[var] == 0)
            continue;
        Monomial d = m;
        d.exps[var] -= 1;
        r.add_term(d, c * m.exps[var]);
    }
    return r;
}

Polynomial Polynomial::pruned(double tol) const
{
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_)
        if (std::abs(c) > tol)
            r.terms_.emplace(m, c);
    return r;
}

Polynomial Polynomial::pow(unsigned k) const
{
    Polynomial result = constant(nvars_, 1.0);
    Polynomial base = *this;
    while (k > 0) {
        if (k & 1u)
            result = result * base;
        k >>= 1u;
        if (k > 0)
            base = base * base;
    }
    return result;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& images) const
{
    if (images.size() != nvars_)
        throw PolyError("substitution needs one image per variable");
    const std::size_t target_vars = images.empty() ? 0 : images.front().nvars();
    for (const auto& im : images)
        if (im.nvars() != target_vars)
            throw PolyError("substitution images disagree on variable count");

    // Cache powers of each image.
    std::vector<std::vector<Polynomial>> powers(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i)
        powers[i].push_back(constant(target_vars, 1.0));

    Polynomial r(target_vars);
    for (const auto& [m, c] : terms_) {
        Polynomial term = constant(target_vars, c);
        for (std::size_t i = 0; i < nvars_; ++i) {
            while (powers[i].size() <= m.exps[i])
                powers[i].push_back(powers[i].back() * images[i]);
            if (m.exps[i] > 0)
                term = term * powers[i][m.exps[i]];
        }
        r += term;
    }
    return r;
}

Polynomial Polynomial::affine_pullback(std::span<const double> center, double scale) const
{
    if (center.size() != nvars_)
        throw PolyError("affine center has wrong dimension");
    std::vector<Polynomial> images;
    images.reserve(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i)
        images.push_back(constant(nvars_, center[i]) + scale * variable(nvars_, i));
    return substitute(images);
}

void Polynomial::check_compatible(const Polynomial& o) const
{
    if (o.nvars_ != nvars_)
        throw PolyError("variable count mismatch: " + std::to_string(nvars_) + " vs " + std::to_string(o.nvars_));
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    check_compatible(o);
    for (const auto& [m, c] : o.terms_)
        add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
    check_compatible(o);
    for (const auto& [m, c] : o.terms_)
        add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_)
        c *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    a.check_compatible(b);
    Polynomial r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_)
            r.add_term(ma * mb, ca * cb);
    return r;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const
{
    if (names.size() != nvars_)
        throw PolyError("wrong number of variable names");
    if (terms_.empty())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        double mag = c;
        if (first) {
            if (c < 0) {
                out += "-";
                mag = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            mag = std::abs(c);
        }
        first = false;
        const bool is_const = m.degree() == 0;
        if (is_const || mag != 1.0) {
            out += format_double(mag);
            if (!is_const)
                out += "*";
        }
        bool first_factor = true;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (m.exps[i] == 0)
                continue;
            if (!first_factor)
                out += "*";
            first_factor = false;
            out += names[i];
            if (m.exps[i] > 1)
                out += "^" + std::to_string(m.exps[i]);
        }
    }
    return out;
}

std::string Polynomial::to_string() const
{
    std::vector<std::string> names;
    for (std::size_t i = 0; i < nvars_; ++i)
        names.push_back("x" + std::to_string(i + 1));
    return to_string(names);
}

double max_coefficient_difference(const Polynomial& a, const Polynomial& b)
{
    return (a - b).max_abs_coefficient();
}

bool approx_equal(const Polynomial& a, const Polynomial& b, double tol)
{
    const double scale = std::max({1.0, a.max_abs_coefficient(), b.max_abs_coefficient()});
    return max_coefficient_difference(a, b) <= tol * scale;
}

VectorField::VectorField(std::vector<Polynomial> comps) : components(std::move(comps))
{
    for (const auto& c : components)
        if (c.nvars() != components.size())
            throw PolyError("vector field component has wrong variable count");
}

int VectorField::degree() const
{
    int d = 0;
    for (const auto& c : components)
        d = std::max(d, c.degree());
    return d;
}

void VectorField::evaluate(std::span<const double> x, std::span<double> out) const
{
    for (std::size_t i = 0; i < components.size(); ++i)
        out[i] = components[i].evaluate(x);
}

VectorField VectorField::affine_pullback(std::span<const double> center, double scale) const
{
    std::vector<Polynomial> comps;
    comps.reserve(components.size());
    for (const auto& c : components)
        comps.push_back(c.affine_pullback(center, scale) * (1.0 / scale));
    return VectorField(std::move(comps));
}

Polynomial lie_derivative(const Polynomial& b, const VectorField& f)
{
    if (b.nvars() != f.nvars())
        throw PolyError("lie derivative: variable count mismatch");
    Polynomial r(b.nvars());
    for (std::size_t i = 0; i < f.nvars(); ++i)
        r += b.derivative(i) * f.components[i];
    return r;
}

} // namespace sosltl
