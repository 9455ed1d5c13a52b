#pragma once

#include "adjvad/kernels.hpp"

namespace adjvad::kernels::detail {

extern const Table kScalarTable;

#if defined(ADJVAD_HAVE_AVX2)
extern const Table kAvx2Table;
#endif

bool cpu_has_avx2_fma();

}  // namespace adjvad::kernels::detail
