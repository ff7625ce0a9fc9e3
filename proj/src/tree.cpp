#include "brlab/tree.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <deque>

#include "brlab/families.hpp"

namespace brlab {

TreeOrder tree_order(const Wsc& omega, int root) {
    if (!is_tree(omega)) throw ValidationError("tree_order: wsc is not a tree");
    const int n = omega.n();
    if (root == -1) root = n;
    if (root < 1 || root > n) throw ValidationError("tree_order: root out of range");

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + 1));
    for (Subset f : omega.facets()) {
        const auto vs = subset_vertices(f);
        if (vs.size() == 2) {
            adj[static_cast<std::size_t>(vs[0])].push_back(vs[1]);
            adj[static_cast<std::size_t>(vs[1])].push_back(vs[0]);
        }
    }

    TreeOrder order;
    order.root = root;
    order.parent.assign(static_cast<std::size_t>(n + 1), 0);
    std::vector<int> bfs{root};
    std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
    seen[static_cast<std::size_t>(root)] = true;
    for (std::size_t head = 0; head < bfs.size(); ++head) {
        const int v = bfs[head];
        for (int w : adj[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                order.parent[static_cast<std::size_t>(w)] = v;
                bfs.push_back(w);
            }
    }
    // deepest first: reversed BFS visits children before parents
    for (std::size_t i = bfs.size(); i-- > 1;) order.elimination.push_back(bfs[i]);
    return order;
}

namespace {

/// Slot of the facet copy {v, other} within v's canonical beta order.
int slot_of_edge(const Wsc& omega, int v, int other) {
    const int pos = omega.copy_position({subset_of({v, other}, omega.n()), 0});
    const auto& copies = omega.facet_copies_at(v);
    const auto it = std::find(copies.begin(), copies.end(), pos);
    if (it == copies.end()) throw ValidationError("edge not incident to vertex");
    return static_cast<int>(it - copies.begin());
}

/// Insert digit `a` at position `slot` into the (k-1)-digit index `rest`.
std::int64_t insert_digit(std::int64_t rest, int slot, int a, int k, int r) {
    std::int64_t low = 1;
    for (int t = slot + 1; t < k; ++t) low *= r;
    const std::int64_t hi = rest / low, lo = rest % low;
    return (hi * r + a) * low + lo;
}

void require_tree_trivial(const DecompositionBase& dec) {
    if (!is_tree(dec.omega())) throw ValidationError("operation requires a tree-shaped wsc");
    if (!dec.action.trivial())
        throw ValidationError("tree normalization supports only trivial symmetry groups");
}

}  // namespace

UnconstrainedDecomposition left_canonical(const UnconstrainedDecomposition& dec, int root) {
    require_tree_trivial(dec);
    const Wsc& omega = dec.omega();
    const int n = omega.n();
    const int r = dec.bond;
    const auto order = tree_order(omega, root);

    const DenseTensor before = contract_vector(dec);
    UnconstrainedDecomposition out = dec;

    for (int v : order.elimination) {
        const int par = order.parent[static_cast<std::size_t>(v)];
        const int slot = slot_of_edge(omega, v, par);
        const int k = omega.degree(v);
        const std::int64_t rest_size = BetaIndexer(omega, v, r).size() / r;
        Matrix& local = out.locals[static_cast<std::size_t>(v - 1)];
        const std::int64_t rows = local.rows() * rest_size;
        // effective parent-edge dimension; a leaf with d < r cannot carry the
        // full bond, so the dead values are zeroed on both edge ends
        const std::int64_t live = std::min<std::int64_t>(rows, r);

        Matrix m(rows, r);
        for (std::int64_t rest = 0; rest < rest_size; ++rest)
            for (int a = 0; a < r; ++a)
                m.col(a).segment(rest * local.rows(), local.rows()) =
                    local.col(insert_digit(rest, slot, a, k, r));
        // thin Householder QR; a rank-deficient block still yields orthonormal
        // columns (the completion is arbitrary but the contraction is fixed by R)
        Eigen::HouseholderQR<Matrix> qr(m);
        const Matrix thin_q = qr.householderQ() * Matrix::Identity(rows, live);
        const Matrix rfac = qr.matrixQR().topRows(live).triangularView<Eigen::Upper>();

        for (std::int64_t rest = 0; rest < rest_size; ++rest)
            for (int a = 0; a < r; ++a)
                local.col(insert_digit(rest, slot, a, k, r)) =
                    (a < live) ? Vector(thin_q.col(a).segment(rest * local.rows(), local.rows()))
                               : Vector(Vector::Zero(local.rows()));

        // absorb R into the parent: new column (digit b) = sum_a R[b,a] col(a)
        Matrix& plocal = out.locals[static_cast<std::size_t>(par - 1)];
        const int pslot = slot_of_edge(omega, par, v);
        const int pk = omega.degree(par);
        const std::int64_t prest = BetaIndexer(omega, par, r).size() / r;
        for (std::int64_t rest = 0; rest < prest; ++rest) {
            Matrix block(plocal.rows(), r);
            for (int a = 0; a < r; ++a) block.col(a) = plocal.col(insert_digit(rest, pslot, a, pk, r));
            const Matrix updated = block * rfac.transpose();
            for (int b = 0; b < r; ++b)
                plocal.col(insert_digit(rest, pslot, b, pk, r)) =
                    (b < live) ? Vector(updated.col(b)) : Vector(Vector::Zero(plocal.rows()));
        }
    }

    const DenseTensor after = contract_vector(out);
    const double dev = distance(before, after);
    if (dev > 1e-10 * std::max(1.0, frobenius_norm(before)))
        throw ConstructionError("left_canonical changed the contraction", dev);
    return out;
}

SeparableDecomposition normalize_separable_tree(const SeparableDecomposition& dec, int root) {
    require_tree_trivial(dec);
    const auto report = validate(dec);
    if (!report.ok()) throw ValidationError("invalid separable decomposition: " + report.summary());
    const Wsc& omega = dec.omega();
    const int r = dec.bond;
    const auto order = tree_order(omega, root);

    const DenseTensor before = contract_matrix(dec);
    SeparableDecomposition out = dec;

    // mass vector flowing up the parent edge of each processed vertex
    std::vector<std::vector<double>> mass_up(static_cast<std::size_t>(omega.n() + 1));
    for (int v : order.elimination) {
        const int par = order.parent[static_cast<std::size_t>(v)];
        const int slot = slot_of_edge(omega, v, par);
        const int k = omega.degree(v);
        auto& fam = out.mats[static_cast<std::size_t>(v - 1)];
        const BetaIndexer bi(omega, v, r);

        // absorb the masses pushed up by already-processed children
        for (std::int64_t b = 0; b < bi.size(); ++b) {
            const auto digits = bi.decompose(b);
            double factor = 1.0;
            for (int t = 0; t < k; ++t) {
                if (t == slot) continue;
                // child on this edge, if processed
                const auto copies = omega.facet_copies_at(v);
                const auto vs = subset_vertices(
                    omega.facet_multiset()[static_cast<std::size_t>(copies[static_cast<std::size_t>(t)])].facet);
                const int other = vs[0] == v ? vs[1] : vs[0];
                if (!mass_up[static_cast<std::size_t>(other)].empty())
                    factor *= mass_up[static_cast<std::size_t>(other)][static_cast<std::size_t>(
                        digits[static_cast<std::size_t>(t)])];
            }
            fam[static_cast<std::size_t>(b)] *= factor;
        }

        std::vector<double> mass(static_cast<std::size_t>(r), 0.0);
        for (std::int64_t b = 0; b < bi.size(); ++b) {
            const auto digits = bi.decompose(b);
            mass[static_cast<std::size_t>(digits[static_cast<std::size_t>(slot)])] +=
                fam[static_cast<std::size_t>(b)].trace().real();
        }
        for (std::int64_t b = 0; b < bi.size(); ++b) {
            const auto digits = bi.decompose(b);
            const double m = mass[static_cast<std::size_t>(digits[static_cast<std::size_t>(slot)])];
            if (m > 0.0)
                fam[static_cast<std::size_t>(b)] /= m;
            else
                fam[static_cast<std::size_t>(b)].setZero();  // pruned edge value
        }
        mass_up[static_cast<std::size_t>(v)] = std::move(mass);
    }

    // root absorbs the remaining masses
    {
        const int v = order.root;
        auto& fam = out.mats[static_cast<std::size_t>(v - 1)];
        const BetaIndexer bi(omega, v, r);
        const int k = omega.degree(v);
        for (std::int64_t b = 0; b < bi.size(); ++b) {
            const auto digits = bi.decompose(b);
            double factor = 1.0;
            for (int t = 0; t < k; ++t) {
                const auto copies = omega.facet_copies_at(v);
                const auto vs = subset_vertices(
                    omega.facet_multiset()[static_cast<std::size_t>(copies[static_cast<std::size_t>(t)])].facet);
                const int other = vs[0] == v ? vs[1] : vs[0];
                if (!mass_up[static_cast<std::size_t>(other)].empty())
                    factor *= mass_up[static_cast<std::size_t>(other)][static_cast<std::size_t>(
                        digits[static_cast<std::size_t>(t)])];
            }
            fam[static_cast<std::size_t>(b)] *= factor;
        }
    }

    const DenseTensor after = contract_matrix(out);
    const double dev = distance(before, after);
    if (dev > 1e-10 * std::max(1.0, frobenius_norm(before)))
        throw ConstructionError("normalize_separable_tree changed the contraction", dev);
    return out;
}

namespace {

bool tail_is_cauchy(std::vector<double>& tail_out, const std::vector<DenseTensor>& contractions) {
    const DenseTensor& last = contractions.back();
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < contractions.size(); ++k) {
        const double d = distance(contractions[k], last);
        tail_out.push_back(d);
        if (d > prev * (1.0 + 1e-9) + 1e-12) ok = false;
        prev = d;
    }
    return ok;
}

}  // namespace

ClosureReport closure_check(const std::vector<UnconstrainedDecomposition>& seq, int root) {
    if (seq.empty()) throw ValidationError("closure_check: empty sequence");
    for (const auto& dec : seq) {
        require_tree_trivial(dec);
        if (!(dec.omega() == seq.front().omega()) || dec.bond != seq.front().bond)
            throw ValidationError("closure_check: sequence must share the wsc and bond");
    }
    ClosureReport report;
    report.bound_value = std::sqrt(static_cast<double>(seq.front().bond));

    std::vector<DenseTensor> contractions;
    for (const auto& dec : seq) contractions.push_back(contract_vector(dec));
    report.cauchy_ok = tail_is_cauchy(report.tail_distances, contractions);

    const TreeOrder order = tree_order(seq.front().omega(), root);
    double max_psi = 0.0;
    for (const auto& t : contractions) max_psi = std::max(max_psi, frobenius_norm(t));

    report.bounded = true;
    UnconstrainedDecomposition limit;
    for (const auto& dec : seq) {
        const auto canon = left_canonical(dec, root);
        double max_norm = 0.0;
        for (int v = 1; v <= canon.n(); ++v) {
            const double norm = canon.locals[static_cast<std::size_t>(v - 1)].norm();
            max_norm = std::max(max_norm, norm);
            const double bound = (v == order.root) ? max_psi : report.bound_value;
            if (norm > bound + 1e-8) report.bounded = false;
        }
        report.max_local_norms.push_back(max_norm);
        limit = canon;
    }
    report.limit_bond = limit.bond;
    report.limit_deviation = distance(contract_vector(limit), contractions.back());
    return report;
}

ClosureReport closure_check(const std::vector<SeparableDecomposition>& seq, int root) {
    if (seq.empty()) throw ValidationError("closure_check: empty sequence");
    for (const auto& dec : seq) {
        require_tree_trivial(dec);
        if (!(dec.omega() == seq.front().omega()) || dec.bond != seq.front().bond)
            throw ValidationError("closure_check: sequence must share the wsc and bond");
    }
    ClosureReport report;

    std::vector<DenseTensor> contractions;
    for (const auto& dec : seq) contractions.push_back(contract_matrix(dec));
    report.cauchy_ok = tail_is_cauchy(report.tail_distances, contractions);

    double max_trace = 1.0;
    for (const auto& t : contractions) max_trace = std::max(max_trace, operator_trace(t).real());
    report.bound_value = max_trace;

    report.bounded = true;
    SeparableDecomposition limit;
    for (const auto& dec : seq) {
        const auto normalized = normalize_separable_tree(dec, root);
        double max_norm = 0.0;
        for (const auto& fam : normalized.mats)
            for (const auto& m : fam) max_norm = std::max(max_norm, m.trace().real());
        report.max_local_norms.push_back(max_norm);
        if (max_norm > max_trace + 1e-8) report.bounded = false;
        limit = normalized;
    }
    report.limit_bond = limit.bond;
    report.limit_deviation = distance(contract_matrix(limit), contractions.back());
    return report;
}

ClosureReport closure_diagnostic(const std::vector<UnconstrainedDecomposition>& seq,
                                 const std::vector<double>& eps) {
    if (seq.empty()) throw ValidationError("closure_diagnostic: empty sequence");
    ClosureReport report;
    report.diagnostic = true;
    for (const auto& dec : seq) {
        double max_entry = 0.0;
        for (const auto& local : dec.locals) max_entry = std::max(max_entry, local.cwiseAbs().maxCoeff());
        report.max_entries.push_back(max_entry);
    }
    if (!eps.empty()) {
        if (eps.size() != seq.size()) throw ValidationError("closure_diagnostic: eps size mismatch");
        std::vector<double> lx, ly;
        for (std::size_t k = 0; k < eps.size(); ++k) {
            lx.push_back(std::log(eps[k]));
            ly.push_back(std::log(report.max_entries[k]));
        }
        report.entry_slope = least_squares_line(lx, ly).slope;
    }
    return report;
}

}  // namespace brlab
