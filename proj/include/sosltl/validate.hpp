#pragma once

#include "sosltl/barrier.hpp"
#include "sosltl/region.hpp"

#include <string>
#include <vector>

namespace sosltl::sos {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst observed value of the checked quantity (residual, eigenvalue, B, ...).
    double worst = 0.0;
    std::size_t count = 0;
    std::string detail;
};

struct ValidationReport {
    bool passed = false;
    std::vector<CheckResult> checks;

    [[nodiscard]] const CheckResult* find(const std::string& name) const;
};

struct ValidationOptions {
    std::size_t samples_per_piece = 10000;
    std::size_t trajectories = 100;
    double horizon = 20.0;
    double step = 0.01;
    unsigned seed = 1;
    double identity_tol = 1e-6;
    double eigen_tol = 1e-8;
    double sample_tol = 1e-7;
    /// Bound on B along trajectories while they stay in cl(Y).
    double trajectory_tol = 1e-6;
};

/// m(z)^T Q m(z).
Polynomial gram_polynomial(const std::vector<Monomial>& basis, const Eigen::MatrixXd& q);

/// Rebuilds every constraint identity from the certificate's B and multipliers
/// and compares it with the matching Gram form; returns the largest coefficient difference.
double reexpanded_residual(const BarrierProgram& p, const BarrierCertificate& c);

/// Algebraic, sampled and trajectory checks.
ValidationReport validate_certificate(const BarrierProgram& p, const BarrierCertificate& c,
                                      const ValidationOptions& opts = {});

region::Region to_region(const Pieces& pieces, std::size_t nvars);
Pieces to_pieces(const region::Region& r);

} // namespace sosltl::sos
