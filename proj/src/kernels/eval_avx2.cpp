#include "sosltl/kernels.hpp"

#include <algorithm>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define SOSLTL_HAVE_AVX2 1
#endif

namespace sosltl::kernels {

#ifdef SOSLTL_HAVE_AVX2

namespace {
constexpr std::size_t kBlock = 64;
}

void eval_batch_avx2(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out)
{
    const std::size_t nv = p.nvars;
    const std::size_t ne = static_cast<std::size_t>(p.max_exp) + 1;
    static thread_local std::vector<double> powers;
    powers.assign(nv * ne * kBlock, 0.0);

    for (std::size_t base = 0; base < npts; base += kBlock) {
        const std::size_t len = std::min(kBlock, npts - base);
        const std::size_t vlen = len & ~std::size_t{3};

        for (std::size_t v = 0; v < nv; ++v) {
            double* pw = &powers[v * ne * kBlock];
            const double* x = coords[v] + base;
            for (std::size_t j = 0; j < len; ++j)
                pw[j] = 1.0;
            for (std::size_t e = 1; e < ne; ++e) {
                const double* prev = pw + (e - 1) * kBlock;
                double* cur = pw + e * kBlock;
                std::size_t j = 0;
                for (; j < vlen; j += 4)
                    _mm256_storeu_pd(cur + j, _mm256_mul_pd(_mm256_loadu_pd(prev + j), _mm256_loadu_pd(x + j)));
                for (; j < len; ++j)
                    cur[j] = prev[j] * x[j];
            }
        }

        double* o = out + base;
        std::size_t j = 0;
        for (; j < vlen; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t t = 0; t < p.nterms(); ++t) {
                const std::uint8_t* ex = &p.exps[t * nv];
                __m256d prod = _mm256_set1_pd(p.coefs[t]);
                for (std::size_t v = 0; v < nv; ++v) {
                    if (ex[v] == 0)
                        continue;
                    prod = _mm256_mul_pd(prod, _mm256_loadu_pd(&powers[(v * ne + ex[v]) * kBlock + j]));
                }
                acc = _mm256_add_pd(acc, prod);
            }
            _mm256_storeu_pd(o + j, acc);
        }
        for (; j < len; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < p.nterms(); ++t) {
                const std::uint8_t* ex = &p.exps[t * nv];
                double prod = p.coefs[t];
                for (std::size_t v = 0; v < nv; ++v)
                    if (ex[v] != 0)
                        prod *= powers[(v * ne + ex[v]) * kBlock + j];
                acc += prod;
            }
            o[j] = acc;
        }
    }
}

#else

void eval_batch_avx2(const CompiledPoly& p, const double* const* coords, std::size_t npts, double* out)
{
    eval_batch_scalar(p, coords, npts, out);
}

#endif

} // namespace sosltl::kernels
