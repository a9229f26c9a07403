#pragma once

#include "sosltl/poly.hpp"
#include "sosltl/sdp.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosltl::sos {

class SosError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Polynomial whose coefficients are affine in the Gram-matrix entries of a program.
class LinPoly {
public:
    LinPoly() = default;
    explicit LinPoly(std::size_t nvars) : offset_(nvars) {}
    static LinPoly constant(const Polynomial& p);

    [[nodiscard]] std::size_t nvars() const { return offset_.nvars(); }
    [[nodiscard]] const Polynomial& offset() const { return offset_; }
    /// Variable index -> polynomial multiplying that variable.
    [[nodiscard]] const std::map<int, Polynomial>& variables() const { return vars_; }
    [[nodiscard]] int degree() const;

    void add_variable(int var, const Polynomial& p);

    [[nodiscard]] Polynomial evaluate(const std::vector<double>& values) const;

    LinPoly& operator+=(const LinPoly& o);
    LinPoly& operator-=(const LinPoly& o);
    LinPoly& operator+=(const Polynomial& p);
    LinPoly& operator-=(const Polynomial& p);
    LinPoly& operator*=(double s);

    friend LinPoly operator+(LinPoly a, const LinPoly& b) { return a += b; }
    friend LinPoly operator-(LinPoly a, const LinPoly& b) { return a -= b; }
    friend LinPoly operator+(LinPoly a, const Polynomial& b) { return a += b; }
    friend LinPoly operator-(LinPoly a, const Polynomial& b) { return a -= b; }
    friend LinPoly operator-(LinPoly a) { return a *= -1.0; }
    friend LinPoly operator*(LinPoly a, double s) { return a *= s; }
    friend LinPoly operator*(const Polynomial& p, const LinPoly& a);

private:
    Polynomial offset_;
    std::map<int, Polynomial> vars_;
};

LinPoly lie_derivative(const LinPoly& b, const VectorField& f);

struct GramBlock {
    std::string label;
    std::vector<Monomial> basis;
    int first_var = 0;
};

/// An identity `expr == 0` that must hold coefficient-wise.
struct Identity {
    std::string label;
    LinPoly expr;
};

/// Position of a program variable inside the Gram blocks (row <= col).
struct VarRef {
    int block = 0;
    int row = 0;
    int col = 0;
};

class SosProgram {
public:
    explicit SosProgram(std::size_t nvars) : nvars_(nvars) {}

    [[nodiscard]] std::size_t nvars() const { return nvars_; }
    [[nodiscard]] const std::vector<GramBlock>& blocks() const { return blocks_; }
    [[nodiscard]] const std::vector<Identity>& identities() const { return identities_; }
    [[nodiscard]] const std::vector<VarRef>& variables() const { return vars_; }

    /// m(x)^T Q m(x) with Q PSD, m all monomials of degree <= half_degree.
    LinPoly new_sos(int half_degree, const std::string& label);
    /// SOS polynomial of degree at most `degree` (floored to even); zero when degree < 0.
    LinPoly new_sos_of_degree(int degree, const std::string& label);

    void require_zero(LinPoly expr, const std::string& label);
    /// Adds a Gram block sized for deg(expr) and requires expr to equal it.
    void require_sos(const LinPoly& expr, const std::string& label);

    /// Rows are scaled to unit max coefficient; rows with no variables and a
    /// zero offset are dropped.
    [[nodiscard]] sdp::Problem compile() const;

    [[nodiscard]] std::vector<double> values(const std::vector<Eigen::MatrixXd>& grams) const;
    [[nodiscard]] std::vector<Eigen::MatrixXd> gram_matrices(const sdp::Solution& s) const;
    /// Largest coefficient of any identity evaluated at `values`.
    [[nodiscard]] double identity_residual(const std::vector<double>& values) const;

private:
    std::size_t nvars_;
    std::vector<GramBlock> blocks_;
    std::vector<VarRef> vars_;
    std::vector<Identity> identities_;
};

struct SosSolution {
    sdp::Solution sdp;
    bool feasible = false;
    std::vector<Eigen::MatrixXd> grams;
    std::vector<double> values;
    double identity_residual = 0.0;
};

SosSolution solve(const SosProgram& prog, const sdp::Options& opts = {});

/// True when p is a sum of squares (Gram feasibility).
bool is_sos(const Polynomial& p, const sdp::Options& opts = {});

/// -1 = sigma + sum_i s_i g_i with SOS sigma, s_i; proves {x : g_i(x) >= 0 for all i} empty.
struct PsatzCertificate {
    int degree = 0;
    Polynomial sigma;
    std::vector<Polynomial> multipliers;
    double identity_residual = 0.0;
};

std::optional<PsatzCertificate> psatz_refute(const std::vector<Polynomial>& g, int degree,
                                             const sdp::Options& opts = {});

/// Residual of -1 - sigma - sum s_i g_i.
double psatz_residual(const PsatzCertificate& c, const std::vector<Polynomial>& g);

} // namespace sosltl::sos
