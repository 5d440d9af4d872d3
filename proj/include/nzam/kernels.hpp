// kernels.hpp: hot loops of the propagation code.
//
// Every kernel has an OpenMP implementation (namespace kernels) and a serial
// reference (namespace kernels::serial) that builds the full embedded operator
// or walks the full index space. The reference is kept for the unit tests and
// the benchmark target; library code calls the parallel version.

#pragma once

#include <vector>

#include "nzam/types.hpp"

namespace nzam::kernels {

// Y = (I_hi (x) op (x) I_lo) X, where op acts on sites [first, first + count).
Mat apply_local_left(const Mat& op, const SpaceLayout& layout, int first, int count, const Mat& x);
// Y = X (I_hi (x) op (x) I_lo).
Mat apply_local_right(const Mat& x, const Mat& op, const SpaceLayout& layout, int first, int count);
// acc += coeff * X (I (x) op (x) I); avoids a temporary in the Liouvillian sums.
void accumulate_local_right(Mat& acc, cplx coeff, const Mat& x, const Mat& op, const SpaceLayout& layout,
                            int first, int count);

// Trace over sites not in `keep` (ascending order, non-empty).
Mat partial_trace(const Mat& x, const SpaceLayout& layout, const std::vector<int>& keep);

// Number of OpenMP threads used by the kernels; <= 0 restores the runtime default.
void set_num_threads(int n);
int num_threads();

namespace serial {

Mat embed(const Mat& op, const SpaceLayout& layout, int first, int count);
Mat apply_local_left(const Mat& op, const SpaceLayout& layout, int first, int count, const Mat& x);
Mat apply_local_right(const Mat& x, const Mat& op, const SpaceLayout& layout, int first, int count);
Mat partial_trace(const Mat& x, const SpaceLayout& layout, const std::vector<int>& keep);

} // namespace serial

} // namespace nzam::kernels
