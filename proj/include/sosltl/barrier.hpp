#pragma once

#include "sosltl/sos.hpp"

#include <string>
#include <vector>

namespace sosltl::sos {

/// Union of basic closed sets, each given by inequalities g >= 0.
using Pieces = std::vector<std::vector<Polynomial>>;

struct BarrierSpec {
    Pieces y0;
    Pieces y1;
    Pieces y;
    VectorField f;
    /// Coordinates are changed to z with x = center + scale * z before building.
    std::vector<double> center;
    double scale = 1.0;
    double epsilon = 1e-3;
};

class DegreeCapExceeded : public SosError {
public:
    using SosError::SosError;
};

class InsufficientlyFeasible : public SosError {
public:
    using SosError::SosError;
};

struct BarrierProgram {
    SosProgram program{0};
    /// Barrier template in scaled coordinates.
    LinPoly b;
    /// Multiplier templates, labelled like "s1[0,1]" (constraint, piece, inequality).
    std::vector<std::pair<std::string, LinPoly>> multipliers;
    /// Pieces and field in scaled coordinates, each inequality normalised to unit max coefficient.
    BarrierSpec scaled;
    BarrierSpec original;
    int degree = 0;
};

/// B is eliminated through the first Y0 piece: B = -sigma0 - sum s0 g0, so every
/// unknown of the resulting SDP is a Gram entry.
BarrierProgram build_barrier_program(const BarrierSpec& spec, int degree, int max_degree = 12);

struct BarrierCertificate {
    int degree = 0;
    double epsilon = 0.0;
    Polynomial b;
    Polynomial b_scaled;
    std::vector<double> center;
    double scale = 1.0;
    std::vector<std::pair<std::string, Polynomial>> multipliers;
    std::vector<std::string> gram_labels;
    std::vector<std::vector<Monomial>> gram_bases;
    std::vector<Eigen::MatrixXd> grams;
    double identity_residual = 0.0;
    double min_gram_eigenvalue = 0.0;
    double margin = 0.0;
    int iterations = 0;
};

/// Throws InsufficientlyFeasible when the SDP equality residual exceeds `tol`.
BarrierCertificate extract_certificate(const BarrierProgram& p, const sdp::Solution& sol, double tol = 1e-6);

/// Re-expands every identity from the certificate's Gram matrices; returns the largest coefficient.
double certificate_identity_residual(const BarrierProgram& p, const BarrierCertificate& c);

} // namespace sosltl::sos
