#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brlab/tensor.hpp"
#include "brlab/wsc.hpp"

namespace brlab {

/// Local index assignments beta in I^{F~_i}: a value in {0..r-1} per facet
/// copy at the vertex, linearized big-endian in canonical multiset order
/// (facet bitmask ascending, copy ordinal ascending). The first copy is the
/// most significant digit, matching the row-major basis |beta_1 beta_2 ...>.
class BetaIndexer {
public:
    BetaIndexer(const Wsc& omega, int vertex, int bond);

    int k() const { return static_cast<int>(positions_.size()); }
    int bond() const { return bond_; }
    std::int64_t size() const { return size_; }
    const std::vector<int>& global_positions() const { return positions_; }

    std::int64_t compose(const std::vector<int>& digits) const;
    std::vector<int> decompose(std::int64_t linear) const;

    /// Restriction alpha|_i: pick this vertex's digits out of a global digit
    /// array indexed by multiset position.
    std::int64_t restrict_global(const std::vector<int>& alpha_digits) const;

private:
    std::vector<int> positions_;
    int bond_ = 1;
    std::int64_t size_ = 1;
};

/// Linear-index permutation beta -> g(beta) between vertex i and g(i).
std::vector<std::int64_t> beta_relabel(const Wsc& omega, const GroupElement& g, int vertex, int bond);

struct DecompositionBase {
    GroupAction action;      // trivial_action(omega) when unsymmetrized
    int bond = 1;            // r
    std::vector<int> phys;   // per-vertex physical dimensions

    const Wsc& omega() const { return action.omega(); }
    int n() const { return omega().n(); }
    int phys_at(int vertex) const { return phys[static_cast<std::size_t>(vertex - 1)]; }
    BetaIndexer beta(int vertex) const { return BetaIndexer(omega(), vertex, bond); }
};

/// (Omega,G)-decomposition with vector locals: locals[i-1] has one column of
/// length phys[i-1] per beta.
struct UnconstrainedDecomposition : DecompositionBase {
    std::vector<Matrix> locals;
};

/// Same layout, entries required real and >= -1e-12.
struct NonnegativeDecomposition : UnconstrainedDecomposition {};

/// Psd decomposition: per vertex and physical value j one psd matrix on the
/// beta space.
struct PsdDecomposition : DecompositionBase {
    std::vector<std::vector<Matrix>> mats;  // [vertex-1][j] : size r^k x r^k
};

/// Separable decomposition of a multipartite matrix: per vertex and beta one
/// psd d x d matrix.
struct SeparableDecomposition : DecompositionBase {
    std::vector<std::vector<Matrix>> mats;  // [vertex-1][beta] : d x d
};

/// Purification: per vertex and beta an unconstrained d x d' block of L.
struct PurificationDecomposition : DecompositionBase {
    int ancilla = 1;  // d'
    std::vector<std::vector<Matrix>> mats;  // [vertex-1][beta] : d x d'
};

// -- construction -----------------------------------------------------------

UnconstrainedDecomposition make_unconstrained(GroupAction action, int bond, std::vector<int> phys,
                                              std::vector<Matrix> locals);
NonnegativeDecomposition make_nonnegative(GroupAction action, int bond, std::vector<int> phys,
                                          std::vector<Matrix> locals);
PsdDecomposition make_psd(GroupAction action, int bond, std::vector<int> phys,
                          std::vector<std::vector<Matrix>> mats);
SeparableDecomposition make_separable(GroupAction action, int bond, std::vector<int> phys,
                                      std::vector<std::vector<Matrix>> mats);
PurificationDecomposition make_purification(GroupAction action, int bond, std::vector<int> phys,
                                            int ancilla, std::vector<std::vector<Matrix>> mats);

/// Build from data at the orbit representatives only; all other vertices get
/// exact relabeled copies along a fixed transversal, so G-compatibility holds
/// by construction (external actions). rep_locals is keyed by representative
/// vertex in ascending order.
UnconstrainedDecomposition unconstrained_from_orbit(const GroupAction& action, int bond,
                                                    std::vector<int> phys,
                                                    const std::vector<Matrix>& rep_locals);
NonnegativeDecomposition nonnegative_from_orbit(const GroupAction& action, int bond,
                                                std::vector<int> phys,
                                                const std::vector<Matrix>& rep_locals);
PsdDecomposition psd_from_orbit(const GroupAction& action, int bond, std::vector<int> phys,
                                const std::vector<std::vector<Matrix>>& rep_mats);
SeparableDecomposition separable_from_orbit(const GroupAction& action, int bond,
                                            std::vector<int> phys,
                                            const std::vector<std::vector<Matrix>>& rep_mats);
PurificationDecomposition purification_from_orbit(const GroupAction& action, int bond,
                                                  std::vector<int> phys, int ancilla,
                                                  const std::vector<std::vector<Matrix>>& rep_mats);

// -- contraction -------------------------------------------------------------

/// Throws ResourceError when r^{|F~|} (squared for psd) exceeds 2^30.
std::int64_t assignment_count(const Wsc& omega, int bond, int power = 1);

DenseTensor contract_vector(const UnconstrainedDecomposition& dec);
/// Exhaustive-enumeration reference path (no tree/cycle shortcuts).
DenseTensor contract_vector_enumerated(const UnconstrainedDecomposition& dec);

DenseTensor contract_psd(const PsdDecomposition& dec);
DenseTensor contract_psd_enumerated(const PsdDecomposition& dec);

/// Multipartite matrix (interleaved row/col site indices).
DenseTensor contract_matrix(const SeparableDecomposition& dec);

/// Contracts L and returns rho = L L^dagger as a multipartite matrix.
DenseTensor contract_purification(const PurificationDecomposition& dec);
/// The contracted L itself, as a multipartite (d, d') matrix.
DenseTensor contract_purification_l(const PurificationDecomposition& dec);

/// Structure tensor |Omega_r>: site i has dimension r^{k_i}.
DenseTensor structure_tensor(const Wsc& omega, int bond);

struct ApplyLocalsResult {
    std::vector<Matrix> w;  // W^[i] = sum_beta |v_beta><beta|
    double deviation = 0.0;
};

/// Returns the local application maps and verifies (x) W^[i] |Omega_r> equals
/// the contraction within 1e-10 relative; throws ConstructionError otherwise.
ApplyLocalsResult apply_locals(const UnconstrainedDecomposition& dec);

/// Squared-bond unconstrained decomposition carrying the same tensor:
/// <j|v_beta> = (E_j)_{p1 . beta, p2 . beta} over the pair index I x I with
/// pair value l = a*r + b.
UnconstrainedDecomposition psd_to_unconstrained(const PsdDecomposition& dec);

/// Diagonal-matrix correspondences: a nonnegative decomposition of T induces
/// a separable decomposition of Diag(T) with A_beta = diag(v_beta), and a psd
/// decomposition induces a purification of Diag(T) with ancilla d * r^k.
SeparableDecomposition separable_from_nonnegative(const NonnegativeDecomposition& dec);
PurificationDecomposition purification_from_psd(const PsdDecomposition& dec);

/// Vertices of a cycle-shaped wsc in traversal order, starting at 1 toward
/// its smaller neighbor.
std::vector<int> cycle_vertex_order(const Wsc& omega);

/// Assemble one cycle-vertex local family from values on (incoming, outgoing)
/// edge indices; incoming is the edge shared with the cyclic predecessor.
/// Takes care of the canonical beta ordering, which differs at the seam.
Matrix cycle_local(const Wsc& omega, int vertex, int bond,
                   const std::function<Vector(int a_in, int b_out)>& f);
std::vector<Matrix> cycle_locals(const Wsc& omega, int bond,
                                 const std::function<Vector(int site, int a_in, int b_out)>& f);

/// Linear beta index at a cycle vertex for given (incoming, outgoing) values.
std::int64_t cycle_beta_index(const Wsc& omega, int vertex, int bond, int a_in, int b_out);

// -- validation ---------------------------------------------------------------

struct ValidationIssue {
    std::string what;
    double magnitude = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

ValidationReport validate(const UnconstrainedDecomposition& dec);
ValidationReport validate(const NonnegativeDecomposition& dec);
ValidationReport validate(const PsdDecomposition& dec);
ValidationReport validate(const SeparableDecomposition& dec);
ValidationReport validate(const PurificationDecomposition& dec);

}  // namespace brlab
