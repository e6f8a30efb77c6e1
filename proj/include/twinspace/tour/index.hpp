#pragma once

#include "twinspace/common.hpp"

#include <vector>

namespace twinspace::tour {

struct IndexValue {
    double value = 0.0;
    bool degenerate = false;
};

// 1 - |W| / |W + B| on projected data with 1-based group labels.
IndexValue lda_index(const Matrix& projected, const std::vector<int>& group_of);

// 1 - |(1-l)W + n l I| / |(1-l)(W+B) + n l I| for l in [0, 1).
IndexValue pda_index(const Matrix& projected, const std::vector<int>& group_of, double lambda);

enum class IndexKind { lda, pda };

struct IndexSpec {
    IndexKind kind = IndexKind::lda;
    double lambda = 0.1;
};

const char* to_string(IndexKind k);
IndexKind index_from_string(const std::string& s);

// Whether an index is defined for projections of dimension d.
bool index_defined_for(IndexKind kind, Eigen::Index d);

IndexValue evaluate_index(const IndexSpec& spec, const Matrix& projected,
                          const std::vector<int>& group_of);

} // namespace twinspace::tour
