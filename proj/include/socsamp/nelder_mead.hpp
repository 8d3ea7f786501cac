#pragma once

#include <functional>
#include <vector>

namespace socsamp {

struct NelderMeadOptions {
  double initial_step = 0.5;       // per-coordinate offset of the start simplex
  double spread_tolerance = 1e-8;  // stop when max-min function value < this
  int max_iterations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Downhill simplex minimization. Non-finite objective values are treated as
// +infinity so the simplex retreats from invalid regions instead of aborting.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             const std::vector<double>& start,
                             const NelderMeadOptions& options = {});

}  // namespace socsamp
