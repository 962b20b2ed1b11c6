#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "otmisfit/grid.hpp"
#include "otmisfit/ma_solver.hpp"
#include "otmisfit/preprocess.hpp"

namespace otm {

/// Transport map diagnostics on the source rectangle.
struct TransportResult {
  double w2_squared = 0.0;
  GridField d1;  ///< first component of grad u(x) - x
  GridField d2;  ///< second component of grad u(x) - x
  bool thresholded = false;
};

/// grad u at a local node: centred inside, one-sided on the edges (first
/// order for the monotone scheme, second order for the filtered one).
std::array<double, 2> potential_gradient(const Potential& u, int i, int j);

/// Node-sum quadrature of |x - grad u(x)|^2 f(x) over the source rectangle.
double w2_from_potential(const Potential& u, const DensityPair& pair);

/// grad u(x) - x at every source node. With threshold_layer, vectors are
/// zeroed where the unpadded source density is below half the padding level.
TransportResult displacement_field(const Potential& u, const DensityPair& pair, bool threshold_layer);

/// det of the centred Hessian at interior nodes; edge nodes copy the nearest
/// interior value.
GridField registered_amplitude(const Potential& u);

/// Header `x1,x2,d1,d2,f_value`, one row per source node.
void write_displacement_csv(std::ostream& out, const TransportResult& result, const DensityPair& pair);

/// Solved component of a signed comparison.
struct ComponentSolve {
  DensityPair pair;
  SolveResult solve;
  double w2_squared = 0.0;
};

/// W2^2(f+, g+) + W2^2(f-, g-) for signed fields on a common grid.
struct SignedTransport {
  double w2_squared = 0.0;
  std::optional<ComponentSolve> positive;
  std::optional<ComponentSolve> negative;
};

SignedTransport signed_w2(const GridField& f, const GridField& g, const PreprocessOptions& popts,
                          const SolverConfig& scfg);

}  // namespace otm
