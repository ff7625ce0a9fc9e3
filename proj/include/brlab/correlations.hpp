#pragma once

#include <cstdint>
#include <vector>

#include "brlab/decomp.hpp"
#include "brlab/tensor.hpp"

namespace brlab {

/// Checks that T is an entrywise-nonnegative real tensor summing to 1 within
/// `tol`; returns the (optionally renormalized) distribution or throws.
DenseTensor validate_distribution(const DenseTensor& t, double tol = 1e-10, bool renormalize = false);

/// Classical hidden-variable model: prior over {1..r} plus per-site
/// conditional distributions (columns indexed by the hidden value).
struct HiddenVariableModel {
    int r = 0;
    RealVector prior;                    // length r
    std::vector<RealMatrix> conditionals;  // per site: d x r, columns sum to 1
    bool symmetric() const;
};

void validate_model(const HiddenVariableModel& model, double tol = 1e-10);
DenseTensor eval_hvm(const HiddenVariableModel& model);

/// Conditionals by per-alpha normalization of the local vectors; prior is the
/// product of the site masses. Zero-mass hidden values are dropped. Requires
/// a simplex-shaped decomposition contracting to a distribution.
HiddenVariableModel nn_to_hvm(const NonnegativeDecomposition& dec);

/// Symmetric models (identical conditionals) produce a symmetric
/// decomposition via the n-th-root prior split; otherwise the prior is
/// absorbed into site 1.
NonnegativeDecomposition hvm_to_nn(const HiddenVariableModel& model);

struct POVM {
    std::vector<Matrix> elements;  // psd, summing to the identity
    int dim() const { return elements.empty() ? 0 : static_cast<int>(elements[0].rows()); }
};

/// Max-entry deviation of sum(elements) from the identity.
double povm_completeness_deviation(const POVM& p);
bool is_valid_povm(const POVM& p, double tol = 1e-10);

struct KrausChannel {
    std::vector<Matrix> kraus;  // out_dim x in_dim each
    int in_dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus[0].cols()); }
    int out_dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus[0].rows()); }
};

/// Choi matrix (id (x) E)(|Phi><Phi|) on the unnormalized maximally entangled
/// vector; row/col index order is (input, output).
Matrix choi_matrix(const KrausChannel& ch);

/// Choi matrix of an arbitrary linear map given by its action on matrices;
/// lets non-CP maps (e.g. the transpose) be inspected.
Matrix choi_of_map(const std::function<Matrix(const Matrix&)>& map, int in_dim);

struct CptpReport {
    double trace_preservation_deviation = 0.0;  // max |sum K^dag K - I|
    double choi_lambda_min = 0.0;
    bool ok = false;
};
CptpReport check_cptp(const KrausChannel& ch, double tol = 1e-10);

/// Measure-and-prepare channel rho -> sum_j |j><j| tr(A_j rho), with Kraus
/// operators |j><phi_{j,m}| from the spectral decompositions of the elements.
KrausChannel povm_to_channel(const POVM& p);

/// G-compatible eigendecompositions of a Hermitian family on the beta spaces:
/// computed at the orbit representatives, transported by index relabeling.
/// Requires an external action and a family symmetric within 1e-10.
struct GSymmetricEigen {
    std::vector<RealVector> values;   // per vertex, ascending
    std::vector<Matrix> vectors;      // per vertex, columns are eigenvectors
};
GSymmetricEigen g_symmetric_eigendecomposition(const GroupAction& action, int bond,
                                               const std::vector<Matrix>& k_family);

/// Quantum model with local POVMs: resource state decomposition (site i lives
/// on the kept eigenspace of S^[i]) plus one POVM per vertex orbit.
struct QuantumPovmModel {
    UnconstrainedDecomposition resource;
    std::vector<POVM> orbit_povms;
    std::vector<int> orbit_of;  // per vertex (0-based orbit id)
    const POVM& povm_at(int vertex) const {
        return orbit_povms[static_cast<std::size_t>(orbit_of[static_cast<std::size_t>(vertex - 1)])];
    }
};

/// Quantum model with local channels.
struct QuantumChannelModel {
    UnconstrainedDecomposition resource;
    std::vector<KrausChannel> orbit_channels;
    std::vector<int> orbit_of;
    const KrausChannel& channel_at(int vertex) const {
        return orbit_channels[static_cast<std::size_t>(orbit_of[static_cast<std::size_t>(vertex - 1)])];
    }
};

/// P(j_1..j_n) = <psi| A_{j_1} (x) ... (x) A_{j_n} |psi>.
DenseTensor eval_quantum_model(const QuantumPovmModel& model);

/// rho = (E_1 (x) ... (x) E_n)(|psi><psi|) as a multipartite matrix.
DenseTensor eval_channel_model(const QuantumChannelModel& model);

/// Constructive direction (ii) => (i) of the psd-rank correspondence; the
/// input must contract to a probability distribution and carry an external
/// action. Throws ConstructionError with the deviation when the internal
/// normalization checks fail.
QuantumPovmModel psd_to_quantum_model(const PsdDecomposition& dec, bool renormalize = false);

/// Constructive direction (i) => (ii): B_j = X^dag A_j X with X the resource
/// locals; bond is preserved exactly.
PsdDecomposition quantum_model_to_psd(const QuantumPovmModel& model);

/// Puri-rank correspondence, (ii) => (i): Kraus slices of the purification
/// blocks, normalized through the G-symmetric eigendecomposition.
QuantumChannelModel purification_to_channel_model(const PurificationDecomposition& dec,
                                                  bool renormalize = false);

/// (i) => (ii): L_beta = sum_k A_k |v_beta><k|; bond preserved.
PurificationDecomposition channel_model_to_purification(const QuantumChannelModel& model);

}  // namespace brlab
