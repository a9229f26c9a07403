#include "sosltl/kernels.hpp"

#include <algorithm>
#include <cstdlib>

namespace sosltl::kernels {

namespace {
constexpr std::size_t kBlock = 64;
}

CompiledPoly compile(const Polynomial& p)
{
    CompiledPoly c;
    c.nvars = p.nvars();
    for (const auto& [m, coef] : p.terms()) {
        c.coefs.push_back(coef);
        for (auto e : m.exps) {
            c.exps.push_back(e);
            c.max_exp = std::max<int>(c.max_exp, e);
        }
    }
    return c;
}

// Per block: powers[v][e][j] = x_v(j)^e, then a sum of coefficient-weighted products.
void eval_batch_scalar(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out)
{
    const std::size_t nv = p.nvars;
    const std::size_t ne = static_cast<std::size_t>(p.max_exp) + 1;
    std::vector<double> powers(nv * ne * kBlock);
    std::vector<double> prod(kBlock);

    for (std::size_t base = 0; base < npts; base += kBlock) {
        const std::size_t len = std::min(kBlock, npts - base);
        for (std::size_t v = 0; v < nv; ++v) {
            double* pw = &powers[v * ne * kBlock];
            for (std::size_t j = 0; j < len; ++j)
                pw[j] = 1.0;
            for (std::size_t e = 1; e < ne; ++e)
                for (std::size_t j = 0; j < len; ++j)
                    pw[e * kBlock + j] = pw[(e - 1) * kBlock + j] * coords[v][base + j];
        }
        double* o = out + base;
        std::fill(o, o + len, 0.0);
        for (std::size_t t = 0; t < p.nterms(); ++t) {
            const std::uint8_t* ex = &p.exps[t * nv];
            for (std::size_t j = 0; j < len; ++j)
                prod[j] = p.coefs[t];
            for (std::size_t v = 0; v < nv; ++v) {
                if (ex[v] == 0)
                    continue;
                const double* pw = &powers[(v * ne + ex[v]) * kBlock];
                for (std::size_t j = 0; j < len; ++j)
                    prod[j] *= pw[j];
            }
            for (std::size_t j = 0; j < len; ++j)
                o[j] += prod[j];
        }
    }
}

bool isa_available(Isa isa)
{
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa()
{
    static const Isa chosen = [] {
        const char* force = std::getenv("SOSLTL_FORCE_SCALAR");
        if (force != nullptr && *force != '\0' && *force != '0')
            return Isa::Scalar;
        return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    }();
    return chosen;
}

const char* isa_name(Isa isa)
{
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void eval_batch(Isa isa, const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out)
{
    if (isa == Isa::Avx2 && isa_available(Isa::Avx2))
        eval_batch_avx2(p, coords, npts, out);
    else
        eval_batch_scalar(p, coords, npts, out);
}

void eval_batch(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out)
{
    eval_batch(active_isa(), p, coords, npts, out);
}

void PointSet::push(std::span<const double> x)
{
    if (x.size() != nvars)
        throw PolyError("point has wrong dimension");
    for (std::size_t v = 0; v < nvars; ++v)
        coords[v].push_back(x[v]);
}

std::vector<double> PointSet::point(std::size_t i) const
{
    std::vector<double> x(nvars);
    for (std::size_t v = 0; v < nvars; ++v)
        x[v] = coords[v][i];
    return x;
}

std::vector<const double*> PointSet::columns() const
{
    std::vector<const double*> cols;
    for (const auto& c : coords)
        cols.push_back(c.data());
    return cols;
}

std::vector<double> eval_points(const Polynomial& p, const PointSet& pts)
{
    if (p.nvars() != pts.nvars)
        throw PolyError("point set dimension mismatch");
    std::vector<double> out(pts.size());
    const auto cp = compile(p);
    const auto cols = pts.columns();
    eval_batch(cp, cols.data(), pts.size(), out.data());
    return out;
}

} // namespace sosltl::kernels
