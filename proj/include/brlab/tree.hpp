#pragma once

#include <vector>

#include "brlab/decomp.hpp"

namespace brlab {

/// Leaf-to-root elimination order on a tree-shaped wsc. The root defaults to
/// the highest-index vertex.
struct TreeOrder {
    int root = 0;
    std::vector<int> elimination;  // all vertices except the root, leaves first
    std::vector<int> parent;       // per vertex (1-based), root maps to 0
};

TreeOrder tree_order(const Wsc& omega, int root = -1);

/// QR sweep leaf to root: every non-root local becomes an isometry on its
/// parent-edge space (||W||_2 = sqrt(r)), the root absorbs the norm. Requires
/// a tree and a trivial action; the contraction is preserved to 1e-10
/// relative and re-verified internally.
UnconstrainedDecomposition left_canonical(const UnconstrainedDecomposition& dec, int root = -1);

/// Trace rebalancing along the tree: after the sweep every non-root local
/// matrix has trace <= 1 with unit mass per parent-edge index
/// (sum_beta restricted to an index value), and the root carries
/// sum_beta tr = tr(rho). Zero-mass edge values are pruned to zero blocks.
SeparableDecomposition normalize_separable_tree(const SeparableDecomposition& dec, int root = -1);

struct ClosureReport {
    bool cauchy_ok = false;
    std::vector<double> tail_distances;   // ||T_k - T_last||
    std::vector<double> max_local_norms;  // after normalization, per element
    double bound_value = 0.0;             // sqrt(r), or the trace bound
    bool bounded = false;
    int limit_bond = 0;
    double limit_deviation = 0.0;  // ||contract(limit) - T_last||

    // forced diagnostic on non-tree families
    std::vector<double> max_entries;  // per element, raw local entries
    double entry_slope = 0.0;         // fitted against log(eps) when provided
    bool diagnostic = false;
};

/// Normalizes every element and verifies bounded local norms plus a
/// numerically Cauchy contraction tail; the limiting decomposition is the
/// final normalized element.
ClosureReport closure_check(const std::vector<UnconstrainedDecomposition>& seq, int root = -1);
ClosureReport closure_check(const std::vector<SeparableDecomposition>& seq, int root = -1);

/// No normalization: records the raw max local entry per element; with an eps
/// grid the log-log growth slope is fitted. This is the harness to point at
/// cycle families, where the norms diverge.
ClosureReport closure_diagnostic(const std::vector<UnconstrainedDecomposition>& seq,
                                 const std::vector<double>& eps = {});

}  // namespace brlab
