#pragma once
/// @file workunit.hpp
/// @brief Work-unit normalization: wall-clock time expressed in units of a fixed
/// synthetic stencil-sweep kernel timed on the local machine, so costs compare
/// across machines.

namespace fnlh {

/// Seconds taken by the built-in normalization kernel (fixed-size 5-point
/// Jacobi sweeps). Measured once per process and cached; best of three runs.
double normalization_kernel_seconds();

/// Force a fresh measurement (testing).
double measure_normalization_kernel();

/// WU = workers * seconds / t_ref. Linear in the accumulated seconds.
double work_units(int workers, double seconds, double t_ref);

}  // namespace fnlh
