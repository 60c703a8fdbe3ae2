#include "absq/kernels.hpp"

#include <omp.h>

#if defined(__SSE2__)
#include <xmmintrin.h>
#define ABSQ_HAVE_MXCSR 1
#endif

namespace absq::kernels {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

#ifdef ABSQ_HAVE_MXCSR
namespace {
constexpr unsigned ftz_daz = 0x8040;

void set_all(unsigned csr) {
  _mm_setcsr(csr);
#pragma omp parallel
  _mm_setcsr(csr);
}
}  // namespace

FlushDenormals::FlushDenormals() : saved_(_mm_getcsr()) { set_all(saved_ | ftz_daz); }
FlushDenormals::~FlushDenormals() { set_all(saved_); }
#else
FlushDenormals::FlushDenormals() = default;
FlushDenormals::~FlushDenormals() = default;
#endif

}  // namespace absq::kernels
