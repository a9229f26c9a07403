#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosltl::sdp {

class SdpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SdpaParseError : public SdpError {
public:
    SdpaParseError(const std::string& msg, int line)
        : SdpError("sdpa line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
};

/// One coefficient of a symmetric data matrix, 0-based, row <= col. An off-diagonal
/// entry stands for both (row, col) and (col, row), as in the SDPA convention.
struct Entry {
    int con = 0;
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Standard equality form: <A_i, X> = b_i for all i, X block diagonal and PSD.
/// A negative block size denotes a diagonal (nonnegative orthant) block.
struct Problem {
    std::vector<int> block_sizes;
    std::vector<double> rhs;
    std::vector<Entry> constraints;
    /// Minimised by `minimize`; ignored by the feasibility solver.
    std::vector<Entry> objective;

    [[nodiscard]] int num_constraints() const { return static_cast<int>(rhs.size()); }
    [[nodiscard]] int num_blocks() const { return static_cast<int>(block_sizes.size()); }
    /// Throws SdpError on out-of-range indices or row > col.
    void validate() const;

    friend bool operator==(const Problem&, const Problem&) = default;
};

enum class Status { Feasible, Infeasible, MaxIter, NumericalFailure };
const char* status_name(Status s);

struct Options {
    double tol = 1e-8;          // relative primal/dual infeasibility and relative gap
    double gap_abs = 1e-10;     // absolute complementarity target
    int max_iter = 200;
    double feas_tol = 1e-8;     // margin below -feas_tol means infeasible
    double trace_bound = 1e4;   // tr(X) <= trace_bound inside the margin program
    int trace_retries = 2;      // bound is multiplied by 100 when it is active at an infeasible optimum
    double margin_cap = 1.0;    // t <= margin_cap keeps feasible iterates at their natural scale
    double residual_tol = 1e-7; // max |<A_i,X> - b_i| / (1 + max |b_i|) accepted for a Feasible answer
    bool verbose = false;
};

struct Solution {
    Status status = Status::NumericalFailure;
    /// Per block; diagonal blocks are stored as an n x 1 column.
    std::vector<Eigen::MatrixXd> X;
    Eigen::VectorXd y;
    /// Farkas certificate r with A^*(r) PSD and b^T r < 0, when available.
    std::optional<Eigen::VectorXd> ray;
    double margin = 0.0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    /// max_i |<A_i, X> - b_i| / (1 + max_i |b_i|)
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double min_eigenvalue = 0.0;
    int iterations = 0;
    std::string message;
};

/// Feasibility by margin maximisation: maximise t subject to X - tI PSD.
Solution solve(const Problem& p, const Options& opts = {});

/// Minimises <C, X> over the feasible set (no margin). Status Feasible means
/// converged to the requested tolerances.
Solution minimize(const Problem& p, const Options& opts = {});

/// max_i |<A_i, X> - b_i|
double equality_residual(const Problem& p, const std::vector<Eigen::MatrixXd>& X);
/// Smallest eigenvalue across all blocks (diagonal blocks: smallest entry).
double min_eigenvalue(const std::vector<Eigen::MatrixXd>& X);
/// Dense symmetric A^*(y) per block.
std::vector<Eigen::MatrixXd> adjoint(const Problem& p, const Eigen::VectorXd& y);
/// True when `ray` certifies infeasibility: A^*(ray) PSD within tol * |ray| and b^T ray < 0.
bool is_farkas_certificate(const Problem& p, const Eigen::VectorXd& ray, double tol = 1e-7);

std::string export_sdpa(const Problem& p);
Problem import_sdpa(const std::string& text);

} // namespace sosltl::sdp
