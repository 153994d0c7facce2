#pragma once

#include "pptaxis/kernels.hpp"

namespace pptaxis::kernels {

// Defined only when the AVX2 translation unit is compiled in. Does not check
// the CPU; dispatch.cpp does.
const KernelTable& avx2_table_unchecked();

}  // namespace pptaxis::kernels
