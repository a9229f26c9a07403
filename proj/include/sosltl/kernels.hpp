#pragma once

#include "sosltl/poly.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sosltl::kernels {

/// Flattened polynomial for batch evaluation: exponents row-major (term, var).
struct CompiledPoly {
    std::size_t nvars = 0;
    int max_exp = 0;
    std::vector<std::uint8_t> exps;
    std::vector<double> coefs;

    [[nodiscard]] std::size_t nterms() const { return coefs.size(); }
};

CompiledPoly compile(const Polynomial& p);

enum class Isa { Scalar, Avx2 };

/// Best ISA supported by this CPU, unless SOSLTL_FORCE_SCALAR is set.
Isa active_isa();
const char* isa_name(Isa isa);
bool isa_available(Isa isa);

/// Points are stored structure-of-arrays: coords[v][i] is variable v of point i.
void eval_batch_scalar(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out);
void eval_batch_avx2(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out);

/// Dispatches on `isa`.
void eval_batch(Isa isa, const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out);
void eval_batch(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out);

/// Convenience wrapper over a point set in SoA layout.
struct PointSet {
    std::size_t nvars = 0;
    std::vector<std::vector<double>> coords;

    explicit PointSet(std::size_t n) : nvars(n), coords(n) {}
    [[nodiscard]] std::size_t size() const { return coords.empty() ? 0 : coords[0].size(); }
    void push(std::span<const double> x);
    [[nodiscard]] std::vector<double> point(std::size_t i) const;
    [[nodiscard]] std::vector<const double*> columns() const;
};

std::vector<double> eval_points(const Polynomial& p, const PointSet& pts);

} // namespace sosltl::kernels
