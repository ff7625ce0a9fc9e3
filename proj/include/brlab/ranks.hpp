#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brlab/decomp.hpp"
#include "brlab/tensor.hpp"

namespace brlab {

/// Max matrix rank over all single-site and leading-contiguous bipartitions;
/// a lower bound for the rank (and border rank) of any decomposition whose
/// cuts separate one of these bipartitions.
int flattening_lower_bound(const DenseTensor& t, double tol = 1e-9);

struct AlsOptions {
    int starts = 20;
    int iters = 2000;
    double damping = 1e-12;   // Tikhonov ridge on the normal equations
    double rel_tol = 1e-12;   // stop when the residual stalls
    std::vector<Matrix> init;  // optional warm start, used as start 0
};

struct AlsResult {
    UnconstrainedDecomposition dec;    // simplex decomposition, trivial action
    double residual = 0.0;             // ||contract - T||_F of the best start
    std::vector<double> history;       // per-sweep residuals of the best start
    int sweeps = 0;
    double max_factor_norm = 0.0;      // divergence diagnostic near border ranks
};

/// Alternating least squares for the rank-r simplex model, best of
/// `opts.starts` complex-Gaussian starts; deterministic given the seed.
AlsResult als_cp(const DenseTensor& t, int r, const AlsOptions& opts, std::uint64_t seed);

/// Multiplicative-update nonnegative CP; rejects tensors with negative
/// entries. Monotone in the Frobenius objective.
AlsResult als_nonnegative(const DenseTensor& t, int r, const AlsOptions& opts, std::uint64_t seed);
NonnegativeDecomposition als_nonnegative_dec(const AlsResult& res);

/// Best residual of a symmetric psd rank-2 model <M| A_{j1} * A_{j2} * A_{j3}
/// |M> for a (2,2,2) nonnegative tensor, over Cholesky-parametrized psd pairs
/// optimized by damped Gauss-Newton from multiple starts.
double symm_psd2_residual(const DenseTensor& t, int starts, int iters, std::uint64_t seed);

struct ReferenceEntry {
    std::string quantity;  // e.g. "rank", "brank", "tiosr"
    std::string kind;      // "exact", "lower-bound", "upper-bound", "asymptotic-lower", "relation"
    double value = 0.0;    // 0 when the entry is a relation without a number
    std::string statement;
    std::string citation;
};

/// Paper-stated rank facts about W_n (and the rank/psdrank relation).
std::vector<ReferenceEntry> reference_ranks(int n);

/// Numeric lookup, e.g. ("rank", 5) -> 5, ("tiosr-lower", 9) -> 3.
std::optional<double> reference_lookup(const std::string& quantity, int n);

struct RankReport {
    std::string label;
    int flattening_bound = 0;
    std::vector<std::pair<int, double>> residuals;          // (target rank, ALS residual)
    std::vector<std::pair<int, double>> nonneg_residuals;   // when T is nonnegative
    std::vector<ReferenceEntry> references;
};

RankReport rank_report(const DenseTensor& t, const std::string& label, int max_rank,
                       const AlsOptions& opts, std::uint64_t seed);

struct FloorMeasurement {
    double delta_nn = 0.0;   // best nonnegative rank-2 residual for W_3
    double delta_psd = 0.0;  // best symmetric psd rank-2 residual for W_3
    int starts = 0;
    int iters = 0;
    std::uint64_t seed = 0;
};

/// The bootstrap oracle behind fixtures/floors.json.
FloorMeasurement measure_floors(std::uint64_t seed = 42, int starts = 100, int iters = 2000);

struct SeparationRow {
    int n = 0;
    double rank_eps_witness = 0.0;      // ||contract(w_eps_unconstrained(n,1e-3)) - W_n||
    double psd_eps_witness = 0.0;       // same for the psd family
    std::vector<std::pair<int, double>> nonneg_floors;  // ranks 2..n-1
    double eps_n = 0.0;                 // below this, no rank-(n-1) nonnegative dec fits
};

struct SeparationReport {
    std::vector<SeparationRow> rows;
    std::uint64_t seed = 0;
};

/// Persistence-of-separation experiment: cheap rank-2 witnesses for
/// rank^eps and psdrank^eps against strictly positive nonnegative floors.
SeparationReport separation_experiment(const std::vector<int>& n_list, std::uint64_t seed,
                                       const AlsOptions& opts = {});

}  // namespace brlab
