#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosltl {

class PolyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exponent vector of a monomial. Ordered graded-lexicographically: lower total
/// degree first, ties broken lexicographically with x1 most significant.
struct Monomial {
    std::vector<std::uint8_t> exps;

    Monomial() = default;
    explicit Monomial(std::size_t nvars) : exps(nvars, 0) {}
    explicit Monomial(std::vector<std::uint8_t> e) : exps(std::move(e)) {}

    [[nodiscard]] int degree() const;
    [[nodiscard]] std::size_t nvars() const { return exps.size(); }
    [[nodiscard]] Monomial operator*(const Monomial& other) const;
    [[nodiscard]] double evaluate(std::span<const double> x) const;

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// All monomials in `nvars` variables with total degree <= `max_degree`, graded-lex order.
std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_degree);

/// Sparse multivariate polynomial with double coefficients. Zero coefficients
/// are never stored.
class Polynomial {
public:
    using TermMap = std::map<Monomial, double, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, double c);
    static Polynomial variable(std::size_t nvars, std::size_t index);
    static Polynomial monomial(const Monomial& m, double c);

    [[nodiscard]] std::size_t nvars() const { return nvars_; }
    [[nodiscard]] const TermMap& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] int degree() const;
    [[nodiscard]] double coefficient(const Monomial& m) const;
    [[nodiscard]] double max_abs_coefficient() const;

    /// Adds `c` to the coefficient of `m`, erasing the entry if it cancels exactly.
    void add_term(const Monomial& m, double c);

    [[nodiscard]] double evaluate(std::span<const double> x) const;
    [[nodiscard]] Polynomial derivative(std::size_t var) const;

    /// Drops every coefficient with |c| <= tol.
    [[nodiscard]] Polynomial pruned(double tol) const;

    /// p(images[0], ..., images[n-1]); all images share a variable count.
    [[nodiscard]] Polynomial substitute(const std::vector<Polynomial>& images) const;

    /// p(center + scale * z) as a polynomial in z.
    [[nodiscard]] Polynomial affine_pullback(std::span<const double> center, double scale) const;

    [[nodiscard]] Polynomial pow(unsigned k) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

    [[nodiscard]] std::string to_string(const std::vector<std::string>& names) const;
    /// Uses x1, x2, ... as variable names.
    [[nodiscard]] std::string to_string() const;

private:
    void check_compatible(const Polynomial& o) const;

    std::size_t nvars_ = 0;
    TermMap terms_;
};

/// Coefficient-wise comparison with absolute tolerance `tol * max(1, max |coef|)`.
bool approx_equal(const Polynomial& a, const Polynomial& b, double tol = 1e-12);

/// Largest coefficient-wise absolute difference.
double max_coefficient_difference(const Polynomial& a, const Polynomial& b);

/// Polynomial vector field dx/dt = f(x), one component per state variable.
struct VectorField {
    std::vector<Polynomial> components;

    VectorField() = default;
    explicit VectorField(std::vector<Polynomial> comps);

    [[nodiscard]] std::size_t nvars() const { return components.size(); }
    [[nodiscard]] int degree() const;
    void evaluate(std::span<const double> x, std::span<double> out) const;
    /// Field in coordinates z with x = center + scale * z.
    [[nodiscard]] VectorField affine_pullback(std::span<const double> center, double scale) const;
};

/// sum_i dB/dx_i * f_i
Polynomial lie_derivative(const Polynomial& b, const VectorField& f);

/// Parses expressions such as "-x1 + 0.3333333333*x1^3 - x2" or "(x1 + 2)^2 - 1/16".
/// Supports + - * / (by constants only), ^ (non-negative integer), parentheses.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names);

/// Error with the offending character offset.
class PolyParseError : public PolyError {
public:
    PolyParseError(const std::string& msg, std::size_t pos)
        : PolyError(msg + " at offset " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

} // namespace sosltl
