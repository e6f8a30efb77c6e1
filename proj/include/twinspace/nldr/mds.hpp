#pragma once

#include "twinspace/cluster/distance.hpp"
#include "twinspace/nldr/embedding.hpp"

namespace twinspace::nldr {

// Torgerson scaling: top two eigenpairs of -1/2 J D^2 J. Fewer than two
// positive eigenvalues sets the degenerate flag and zeroes those columns.
Embedding classical_mds(const cluster::DistanceMatrix& d);

} // namespace twinspace::nldr
