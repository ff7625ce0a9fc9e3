#include "brlab/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace brlab {

BetaIndexer::BetaIndexer(const Wsc& omega, int vertex, int bond)
    : positions_(omega.facet_copies_at(vertex)), bond_(bond) {
    if (bond < 1) throw ValidationError("bond must be positive");
    for (std::size_t t = 0; t < positions_.size(); ++t) {
        if (size_ > (std::int64_t{1} << 30) / bond) throw ResourceError("local index space exceeds 2^30");
        size_ *= bond;
    }
}

std::int64_t BetaIndexer::compose(const std::vector<int>& digits) const {
    if (static_cast<int>(digits.size()) != k()) throw ValidationError("digit count mismatch");
    std::int64_t lin = 0;
    for (int d : digits) {
        if (d < 0 || d >= bond_) throw ValidationError("digit out of range");
        lin = lin * bond_ + d;
    }
    return lin;
}

std::vector<int> BetaIndexer::decompose(std::int64_t linear) const {
    std::vector<int> digits(static_cast<std::size_t>(k()));
    for (int t = k(); t-- > 0;) {
        digits[static_cast<std::size_t>(t)] = static_cast<int>(linear % bond_);
        linear /= bond_;
    }
    return digits;
}

std::int64_t BetaIndexer::restrict_global(const std::vector<int>& alpha_digits) const {
    std::int64_t lin = 0;
    for (int pos : positions_) lin = lin * bond_ + alpha_digits[static_cast<std::size_t>(pos)];
    return lin;
}

std::vector<std::int64_t> beta_relabel(const Wsc& omega, const GroupElement& g, int vertex, int bond) {
    const int target = g.vertex_perm(vertex - 1) + 1;
    const BetaIndexer src(omega, vertex, bond);
    const BetaIndexer dst(omega, target, bond);
    if (src.k() != dst.k()) throw ValidationError("beta_relabel: degree mismatch along orbit");

    // local position t at `vertex` lands at local position image_slot[t] at the target
    std::vector<int> image_slot(static_cast<std::size_t>(src.k()), -1);
    const auto& dst_positions = dst.global_positions();
    for (int t = 0; t < src.k(); ++t) {
        const int img = g.copy_perm[static_cast<std::size_t>(src.global_positions()[static_cast<std::size_t>(t)])];
        auto it = std::find(dst_positions.begin(), dst_positions.end(), img);
        if (it == dst_positions.end()) throw ValidationError("beta_relabel: collapse map inconsistent");
        image_slot[static_cast<std::size_t>(t)] = static_cast<int>(it - dst_positions.begin());
    }

    std::vector<std::int64_t> map(static_cast<std::size_t>(src.size()));
    std::vector<int> out_digits(static_cast<std::size_t>(src.k()));
    for (std::int64_t b = 0; b < src.size(); ++b) {
        const auto digits = src.decompose(b);
        for (int t = 0; t < src.k(); ++t)
            out_digits[static_cast<std::size_t>(image_slot[static_cast<std::size_t>(t)])] =
                digits[static_cast<std::size_t>(t)];
        map[static_cast<std::size_t>(b)] = dst.compose(out_digits);
    }
    return map;
}

std::int64_t assignment_count(const Wsc& omega, int bond, int power) {
    const std::int64_t cap = std::int64_t{1} << 30;
    std::int64_t count = 1;
    for (int p = 0; p < omega.multiset_size() * power; ++p) {
        if (count > cap / bond) {
            std::ostringstream msg;
            msg << "|I^F~| = " << bond << "^" << omega.multiset_size() * power << " exceeds the 2^30 cap";
            throw ResourceError(msg.str());
        }
        count *= bond;
    }
    return count;
}

namespace {

void check_base(const DecompositionBase& dec) {
    if (dec.n() < 1) throw ValidationError("decomposition has no underlying wsc");
    if (dec.bond < 1) throw ValidationError("bond must be positive");
    if (static_cast<int>(dec.phys.size()) != dec.n())
        throw ValidationError("one physical dimension per vertex required");
    for (int d : dec.phys)
        if (d < 1) throw ValidationError("physical dimensions must be positive");
}

void check_vector_shapes(const UnconstrainedDecomposition& dec) {
    check_base(dec);
    if (static_cast<int>(dec.locals.size()) != dec.n())
        throw ValidationError("one local family per vertex required");
    for (int i = 1; i <= dec.n(); ++i) {
        const auto& m = dec.locals[static_cast<std::size_t>(i - 1)];
        if (m.rows() != dec.phys_at(i) || m.cols() != dec.beta(i).size())
            throw ValidationError("local family shape mismatch at vertex " + std::to_string(i));
    }
}

}  // namespace

UnconstrainedDecomposition make_unconstrained(GroupAction action, int bond, std::vector<int> phys,
                                              std::vector<Matrix> locals) {
    UnconstrainedDecomposition dec;
    dec.action = std::move(action);
    dec.bond = bond;
    dec.phys = std::move(phys);
    dec.locals = std::move(locals);
    check_vector_shapes(dec);
    return dec;
}

NonnegativeDecomposition make_nonnegative(GroupAction action, int bond, std::vector<int> phys,
                                          std::vector<Matrix> locals) {
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) =
        make_unconstrained(std::move(action), bond, std::move(phys), std::move(locals));
    return dec;
}

PsdDecomposition make_psd(GroupAction action, int bond, std::vector<int> phys,
                          std::vector<std::vector<Matrix>> mats) {
    PsdDecomposition dec;
    dec.action = std::move(action);
    dec.bond = bond;
    dec.phys = std::move(phys);
    dec.mats = std::move(mats);
    check_base(dec);
    if (static_cast<int>(dec.mats.size()) != dec.n())
        throw ValidationError("one matrix family per vertex required");
    for (int i = 1; i <= dec.n(); ++i) {
        const auto& fam = dec.mats[static_cast<std::size_t>(i - 1)];
        if (static_cast<int>(fam.size()) != dec.phys_at(i))
            throw ValidationError("one psd matrix per physical value required");
        const auto sz = dec.beta(i).size();
        for (const auto& m : fam)
            if (m.rows() != sz || m.cols() != sz)
                throw ValidationError("psd matrix size mismatch at vertex " + std::to_string(i));
    }
    return dec;
}

SeparableDecomposition make_separable(GroupAction action, int bond, std::vector<int> phys,
                                      std::vector<std::vector<Matrix>> mats) {
    SeparableDecomposition dec;
    dec.action = std::move(action);
    dec.bond = bond;
    dec.phys = std::move(phys);
    dec.mats = std::move(mats);
    check_base(dec);
    if (static_cast<int>(dec.mats.size()) != dec.n())
        throw ValidationError("one matrix family per vertex required");
    for (int i = 1; i <= dec.n(); ++i) {
        const auto& fam = dec.mats[static_cast<std::size_t>(i - 1)];
        if (static_cast<std::int64_t>(fam.size()) != dec.beta(i).size())
            throw ValidationError("one matrix per beta required at vertex " + std::to_string(i));
        for (const auto& m : fam)
            if (m.rows() != dec.phys_at(i) || m.cols() != dec.phys_at(i))
                throw ValidationError("separable matrix size mismatch at vertex " + std::to_string(i));
    }
    return dec;
}

PurificationDecomposition make_purification(GroupAction action, int bond, std::vector<int> phys,
                                            int ancilla, std::vector<std::vector<Matrix>> mats) {
    PurificationDecomposition dec;
    dec.action = std::move(action);
    dec.bond = bond;
    dec.phys = std::move(phys);
    dec.ancilla = ancilla;
    dec.mats = std::move(mats);
    check_base(dec);
    if (ancilla < 1) throw ValidationError("ancilla dimension must be positive");
    if (static_cast<int>(dec.mats.size()) != dec.n())
        throw ValidationError("one matrix family per vertex required");
    for (int i = 1; i <= dec.n(); ++i) {
        const auto& fam = dec.mats[static_cast<std::size_t>(i - 1)];
        if (static_cast<std::int64_t>(fam.size()) != dec.beta(i).size())
            throw ValidationError("one block per beta required at vertex " + std::to_string(i));
        for (const auto& m : fam)
            if (m.rows() != dec.phys_at(i) || m.cols() != ancilla)
                throw ValidationError("purification block size mismatch at vertex " + std::to_string(i));
    }
    return dec;
}

namespace {

/// Expand rep data to all vertices along the transversal. `copy` writes the
/// rep's object at relabeled position; exact copies, no arithmetic.
template <typename PerVertex, typename Expand>
std::vector<PerVertex> transport_orbits(const GroupAction& action, int bond,
                                        const std::vector<PerVertex>& rep_data, Expand expand) {
    const auto reps = action.orbit_representatives();
    if (rep_data.size() != reps.size())
        throw ValidationError("one entry per orbit representative required");
    const auto trans = action.transversal();
    std::vector<int> rep_index(static_cast<std::size_t>(action.omega().n()), -1);
    const auto orbits = action.vertex_orbits();
    for (std::size_t o = 0; o < orbits.size(); ++o)
        for (int v : orbits[o]) rep_index[static_cast<std::size_t>(v - 1)] = static_cast<int>(o);

    std::vector<PerVertex> out(static_cast<std::size_t>(action.omega().n()));
    for (int v = 1; v <= action.omega().n(); ++v) {
        const int o = rep_index[static_cast<std::size_t>(v - 1)];
        const int rep = reps[static_cast<std::size_t>(o)];
        const auto relabel = beta_relabel(action.omega(), trans[static_cast<std::size_t>(v - 1)], rep, bond);
        out[static_cast<std::size_t>(v - 1)] = expand(rep_data[static_cast<std::size_t>(o)], relabel);
    }
    return out;
}

}  // namespace

UnconstrainedDecomposition unconstrained_from_orbit(const GroupAction& action, int bond,
                                                    std::vector<int> phys,
                                                    const std::vector<Matrix>& rep_locals) {
    auto locals = transport_orbits<Matrix>(action, bond, rep_locals,
                                           [](const Matrix& rep, const std::vector<std::int64_t>& relabel) {
                                               Matrix out(rep.rows(), rep.cols());
                                               for (std::int64_t b = 0; b < rep.cols(); ++b)
                                                   out.col(relabel[static_cast<std::size_t>(b)]) = rep.col(b);
                                               return out;
                                           });
    return make_unconstrained(action, bond, std::move(phys), std::move(locals));
}

NonnegativeDecomposition nonnegative_from_orbit(const GroupAction& action, int bond,
                                                std::vector<int> phys,
                                                const std::vector<Matrix>& rep_locals) {
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) =
        unconstrained_from_orbit(action, bond, std::move(phys), rep_locals);
    return dec;
}

PsdDecomposition psd_from_orbit(const GroupAction& action, int bond, std::vector<int> phys,
                                const std::vector<std::vector<Matrix>>& rep_mats) {
    auto mats = transport_orbits<std::vector<Matrix>>(
        action, bond, rep_mats,
        [](const std::vector<Matrix>& rep, const std::vector<std::int64_t>& relabel) {
            std::vector<Matrix> out;
            out.reserve(rep.size());
            for (const auto& e : rep) {
                Matrix m(e.rows(), e.cols());
                for (std::int64_t b = 0; b < e.rows(); ++b)
                    for (std::int64_t b2 = 0; b2 < e.cols(); ++b2)
                        m(relabel[static_cast<std::size_t>(b)], relabel[static_cast<std::size_t>(b2)]) = e(b, b2);
                out.push_back(std::move(m));
            }
            return out;
        });
    return make_psd(action, bond, std::move(phys), std::move(mats));
}

SeparableDecomposition separable_from_orbit(const GroupAction& action, int bond, std::vector<int> phys,
                                            const std::vector<std::vector<Matrix>>& rep_mats) {
    auto mats = transport_orbits<std::vector<Matrix>>(
        action, bond, rep_mats,
        [](const std::vector<Matrix>& rep, const std::vector<std::int64_t>& relabel) {
            std::vector<Matrix> out(rep.size());
            for (std::size_t b = 0; b < rep.size(); ++b)
                out[static_cast<std::size_t>(relabel[b])] = rep[b];
            return out;
        });
    return make_separable(action, bond, std::move(phys), std::move(mats));
}

PurificationDecomposition purification_from_orbit(const GroupAction& action, int bond,
                                                  std::vector<int> phys, int ancilla,
                                                  const std::vector<std::vector<Matrix>>& rep_mats) {
    auto mats = transport_orbits<std::vector<Matrix>>(
        action, bond, rep_mats,
        [](const std::vector<Matrix>& rep, const std::vector<std::int64_t>& relabel) {
            std::vector<Matrix> out(rep.size());
            for (std::size_t b = 0; b < rep.size(); ++b)
                out[static_cast<std::size_t>(relabel[b])] = rep[b];
            return out;
        });
    return make_purification(action, bond, std::move(phys), ancilla, std::move(mats));
}

// -- contraction engines ------------------------------------------------------

namespace {

DenseTensor contract_vector_exhaustive(const UnconstrainedDecomposition& dec) {
    const auto& omega = dec.omega();
    const std::int64_t count = assignment_count(omega, dec.bond);
    std::vector<BetaIndexer> beta;
    for (int i = 1; i <= dec.n(); ++i) beta.push_back(dec.beta(i));

    std::vector<std::int64_t> shape(dec.phys.begin(), dec.phys.end());
    DenseTensor out(shape);

    std::vector<int> alpha(static_cast<std::size_t>(omega.multiset_size()), 0);
    std::vector<Cplx> cur, next;
    cur.reserve(static_cast<std::size_t>(out.size()));
    next.reserve(static_cast<std::size_t>(out.size()));

    for (std::int64_t a = 0; a < count; ++a) {
        std::int64_t rem = a;
        for (int p = omega.multiset_size(); p-- > 0;) {
            alpha[static_cast<std::size_t>(p)] = static_cast<int>(rem % dec.bond);
            rem /= dec.bond;
        }
        cur.assign(1, Cplx(1.0, 0.0));
        for (int i = 1; i <= dec.n(); ++i) {
            const auto col = dec.locals[static_cast<std::size_t>(i - 1)].col(
                beta[static_cast<std::size_t>(i - 1)].restrict_global(alpha));
            next.assign(cur.size() * static_cast<std::size_t>(col.size()), Cplx(0.0, 0.0));
            for (std::size_t x = 0; x < cur.size(); ++x)
                for (std::int64_t j = 0; j < col.size(); ++j)
                    next[x * static_cast<std::size_t>(col.size()) + static_cast<std::size_t>(j)] = cur[x] * col(j);
            cur.swap(next);
        }
        for (std::int64_t lin = 0; lin < out.size(); ++lin) out[lin] += cur[static_cast<std::size_t>(lin)];
    }
    return out;
}

/// Cycle order of vertices starting at 1, walking toward the smaller neighbor.
std::vector<int> cycle_order(const Wsc& omega) {
    const int n = omega.n();
    std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n + 1));
    for (Subset f : omega.facets()) {
        const auto vs = subset_vertices(f);
        nbr[static_cast<std::size_t>(vs[0])].push_back(vs[1]);
        nbr[static_cast<std::size_t>(vs[1])].push_back(vs[0]);
    }
    std::vector<int> order{1};
    int prev = 0, cur = 1;
    int next = std::min(nbr[1][0], nbr[1][1]);
    while (next != 1) {
        order.push_back(next);
        prev = cur;
        cur = next;
        next = (nbr[static_cast<std::size_t>(cur)][0] == prev) ? nbr[static_cast<std::size_t>(cur)][1]
                                                               : nbr[static_cast<std::size_t>(cur)][0];
    }
    return order;
}

/// Per-site transfer slices for a cycle: slice(v, j) is the bond x bond (or
/// bond^2 x bond^2 for psd) matrix indexed (in-edge value, out-edge value).
struct CycleSlices {
    std::vector<std::vector<Matrix>> site_mats;  // [cycle position][j]
    std::vector<int> dims;                       // physical dims in cycle order
    std::vector<int> order;                      // vertex labels in cycle order
};

/// Local slot (0 or 1) of an edge's facet copy within a vertex's beta space.
int edge_slot(const Wsc& omega, int vertex, Subset edge) {
    const auto& pos = omega.facet_copies_at(vertex);
    const int target = omega.copy_position({edge, 0});
    for (int t = 0; t < static_cast<int>(pos.size()); ++t)
        if (pos[static_cast<std::size_t>(t)] == target) return t;
    throw ValidationError("edge not incident to vertex");
}

CycleSlices cycle_vector_slices(const UnconstrainedDecomposition& dec) {
    const auto& omega = dec.omega();
    CycleSlices out;
    out.order = cycle_order(omega);
    const int n = dec.n();
    const int r = dec.bond;
    for (int t = 0; t < n; ++t) {
        const int v = out.order[static_cast<std::size_t>(t)];
        const int v_prev = out.order[static_cast<std::size_t>((t + n - 1) % n)];
        const int v_next = out.order[static_cast<std::size_t>((t + 1) % n)];
        const Subset in_edge = subset_of({v_prev, v}, omega.n());
        const Subset out_edge = subset_of({v, v_next}, omega.n());
        const int in_slot = edge_slot(omega, v, in_edge);
        const int out_slot = edge_slot(omega, v, out_edge);
        const auto& local = dec.locals[static_cast<std::size_t>(v - 1)];
        std::vector<Matrix> slices(static_cast<std::size_t>(dec.phys_at(v)), Matrix::Zero(r, r));
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) {
                std::vector<int> digits(2);
                digits[static_cast<std::size_t>(in_slot)] = a;
                digits[static_cast<std::size_t>(out_slot)] = b;
                const std::int64_t lin = dec.beta(v).compose(digits);
                for (int j = 0; j < dec.phys_at(v); ++j) slices[static_cast<std::size_t>(j)](a, b) = local(j, lin);
            }
        out.site_mats.push_back(std::move(slices));
        out.dims.push_back(dec.phys_at(v));
    }
    return out;
}

/// Full tensor of entries tr(M_{j_1} ... M_{j_n}) over cycle-ordered slices,
/// transposed back to ascending site order at the end.
DenseTensor cycle_trace_tensor(const CycleSlices& sl, int n_sites) {
    std::vector<std::int64_t> shape(sl.dims.begin(), sl.dims.end());
    DenseTensor ordered(shape);
    const int n = static_cast<int>(sl.order.size());

    std::vector<Matrix> partial(static_cast<std::size_t>(n));
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    std::int64_t lin = 0;
    std::function<void(int)> rec = [&](int t) {
        if (t == n - 1) {
            const Matrix& p = partial[static_cast<std::size_t>(n - 2)];
            for (std::int64_t j = 0; j < sl.dims[static_cast<std::size_t>(t)]; ++j) {
                const Matrix& a = sl.site_mats[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
                ordered[lin++] = p.cwiseProduct(a.transpose()).sum();  // tr(p a)
            }
            return;
        }
        for (std::int64_t j = 0; j < sl.dims[static_cast<std::size_t>(t)]; ++j) {
            const Matrix& a = sl.site_mats[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            partial[static_cast<std::size_t>(t)] = (t == 0) ? a : Matrix(partial[static_cast<std::size_t>(t - 1)] * a);
            rec(t + 1);
        }
    };
    rec(0);

    // map cycle order back to ascending site order
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n_sites));
    for (int t = 0; t < n_sites; ++t)
        perm[static_cast<std::size_t>(sl.order[static_cast<std::size_t>(t)] - 1)] = t;
    return transpose(ordered, perm);
}

/// Leaf-peeling contraction on trees. Blocks carry the accumulated physical
/// sites (row-major in site_order) and the live facet-copy slots.
DenseTensor contract_vector_tree(const UnconstrainedDecomposition& dec) {
    const auto& omega = dec.omega();
    const int n = dec.n();
    struct Block {
        Matrix data;                       // rows: accumulated phys, cols: live beta space
        std::vector<int> site_order;       // 1-based sites composing rows
        std::vector<int> live_positions;   // global multiset positions, canonical order
        bool alive = false;
    };
    std::vector<Block> blocks(static_cast<std::size_t>(n));
    for (int v = 1; v <= n; ++v) {
        auto& b = blocks[static_cast<std::size_t>(v - 1)];
        b.data = dec.locals[static_cast<std::size_t>(v - 1)];
        b.site_order = {v};
        b.live_positions = omega.facet_copies_at(v);
        b.alive = true;
    }
    // vertex at the far side of a facet copy
    auto other_vertex = [&](int pos, int v) {
        for (int u : subset_vertices(omega.facet_multiset()[static_cast<std::size_t>(pos)].facet))
            if (u != v) return u;
        return -1;
    };

    for (int step = 0; step + 1 < n; ++step) {
        int leaf = -1;
        for (int v = 1; v <= n; ++v) {
            auto& b = blocks[static_cast<std::size_t>(v - 1)];
            if (b.alive && v != n && b.live_positions.size() == 1) {
                leaf = v;
                break;
            }
        }
        if (leaf == -1) throw ValidationError("tree contraction: no leaf found");
        auto& lb = blocks[static_cast<std::size_t>(leaf - 1)];
        const int pos = lb.live_positions[0];
        const int parent = other_vertex(pos, leaf);
        auto& pb = blocks[static_cast<std::size_t>(parent - 1)];

        const int slot = static_cast<int>(
            std::find(pb.live_positions.begin(), pb.live_positions.end(), pos) - pb.live_positions.begin());
        const int k = static_cast<int>(pb.live_positions.size());
        const std::int64_t r = dec.bond;
        std::int64_t lo_size = 1;
        for (int t = slot + 1; t < k; ++t) lo_size *= r;
        const std::int64_t new_cols = pb.data.cols() / r;

        Matrix merged = Matrix::Zero(lb.data.rows() * pb.data.rows(), new_cols);
        for (std::int64_t bp = 0; bp < new_cols; ++bp) {
            const std::int64_t hi = bp / lo_size, lo = bp % lo_size;
            for (std::int64_t bv = 0; bv < r; ++bv) {
                const std::int64_t full = (hi * r + bv) * lo_size + lo;
                for (std::int64_t x = 0; x < lb.data.rows(); ++x) {
                    const Cplx lval = lb.data(x, bv);
                    if (lval == Cplx(0.0, 0.0)) continue;
                    for (std::int64_t y = 0; y < pb.data.rows(); ++y)
                        merged(x * pb.data.rows() + y, bp) += lval * pb.data(y, full);
                }
            }
        }
        pb.data = std::move(merged);
        std::vector<int> order = lb.site_order;
        order.insert(order.end(), pb.site_order.begin(), pb.site_order.end());
        pb.site_order = std::move(order);
        pb.live_positions.erase(pb.live_positions.begin() + slot);
        lb.alive = false;
    }

    auto& root = blocks[static_cast<std::size_t>(n - 1)];
    Vector flat;
    if (root.live_positions.empty()) {
        flat = root.data.col(0);
    } else {
        // single vertex with its own facet copies: sum the columns
        flat = Vector::Zero(root.data.rows());
        for (std::int64_t c = 0; c < root.data.cols(); ++c) flat += root.data.col(c);
    }
    std::vector<std::int64_t> shape;
    for (int v : root.site_order) shape.push_back(dec.phys_at(v));
    DenseTensor unordered(shape, std::vector<Cplx>(flat.data(), flat.data() + flat.size()));
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) perm[static_cast<std::size_t>(root.site_order[static_cast<std::size_t>(t)] - 1)] = t;
    return transpose(unordered, perm);
}

}  // namespace

DenseTensor contract_vector_enumerated(const UnconstrainedDecomposition& dec) {
    check_vector_shapes(dec);
    return contract_vector_exhaustive(dec);
}

DenseTensor contract_vector(const UnconstrainedDecomposition& dec) {
    check_vector_shapes(dec);
    const auto& omega = dec.omega();
    if (omega.n() >= 2 && is_tree(omega)) return contract_vector_tree(dec);
    if (is_cycle_shape(omega)) return cycle_trace_tensor(cycle_vector_slices(dec), dec.n());
    return contract_vector_exhaustive(dec);
}

namespace {

void check_psd_shapes(const PsdDecomposition& dec) {
    check_base(dec);
    if (static_cast<int>(dec.mats.size()) != dec.n()) throw ValidationError("matrix family count mismatch");
    for (int i = 1; i <= dec.n(); ++i) {
        if (static_cast<int>(dec.mats[static_cast<std::size_t>(i - 1)].size()) != dec.phys_at(i))
            throw ValidationError("psd family size mismatch");
        for (const auto& m : dec.mats[static_cast<std::size_t>(i - 1)])
            if (m.rows() != dec.beta(i).size() || m.cols() != dec.beta(i).size())
                throw ValidationError("psd matrix size mismatch");
    }
}

DenseTensor finalize_psd_tensor(DenseTensor t) {
    double max_abs = 0.0, min_re = 0.0, max_im = 0.0;
    for (auto& z : t.data()) {
        max_abs = std::max(max_abs, std::abs(z));
        min_re = std::min(min_re, z.real());
        max_im = std::max(max_im, std::abs(z.imag()));
    }
    if (max_im > 1e-9 * std::max(1.0, max_abs))
        throw ValidationError("psd contraction has a non-real entry; input is corrupted");
    if (min_re < -1e-9 * std::max(1.0, max_abs))
        throw ValidationError("psd contraction has a negative entry; input is corrupted");
    for (auto& z : t.data()) z = Cplx(z.real(), 0.0);
    return t;
}

DenseTensor contract_psd_exhaustive(const PsdDecomposition& dec) {
    const auto& omega = dec.omega();
    assignment_count(omega, dec.bond, 2);
    const std::int64_t count = assignment_count(omega, dec.bond);
    std::vector<BetaIndexer> beta;
    for (int i = 1; i <= dec.n(); ++i) beta.push_back(dec.beta(i));

    std::vector<std::int64_t> shape(dec.phys.begin(), dec.phys.end());
    DenseTensor out(shape);
    std::vector<int> alpha(static_cast<std::size_t>(omega.multiset_size()), 0);
    std::vector<int> alpha2(alpha.size(), 0);
    std::vector<std::int64_t> b1(static_cast<std::size_t>(dec.n())), b2(b1.size());
    std::vector<Cplx> cur, next;

    auto decode = [&](std::int64_t a, std::vector<int>& digits) {
        for (int p = omega.multiset_size(); p-- > 0;) {
            digits[static_cast<std::size_t>(p)] = static_cast<int>(a % dec.bond);
            a /= dec.bond;
        }
    };

    for (std::int64_t a = 0; a < count; ++a) {
        decode(a, alpha);
        for (int i = 0; i < dec.n(); ++i) b1[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i)].restrict_global(alpha);
        for (std::int64_t a2 = a; a2 < count; ++a2) {
            decode(a2, alpha2);
            for (int i = 0; i < dec.n(); ++i) b2[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i)].restrict_global(alpha2);
            cur.assign(1, Cplx(1.0, 0.0));
            for (int i = 0; i < dec.n(); ++i) {
                const int d = dec.phys[static_cast<std::size_t>(i)];
                next.assign(cur.size() * static_cast<std::size_t>(d), Cplx(0.0, 0.0));
                for (std::size_t x = 0; x < cur.size(); ++x)
                    for (int j = 0; j < d; ++j)
                        next[x * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
                            cur[x] * dec.mats[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](
                                         b1[static_cast<std::size_t>(i)], b2[static_cast<std::size_t>(i)]);
                cur.swap(next);
            }
            // (alpha', alpha) contributes the conjugate of (alpha, alpha')
            if (a2 == a)
                for (std::int64_t lin = 0; lin < out.size(); ++lin)
                    out[lin] += Cplx(cur[static_cast<std::size_t>(lin)].real(), 0.0);
            else
                for (std::int64_t lin = 0; lin < out.size(); ++lin)
                    out[lin] += Cplx(2.0 * cur[static_cast<std::size_t>(lin)].real(), 0.0);
        }
    }
    return finalize_psd_tensor(std::move(out));
}

CycleSlices cycle_psd_slices(const PsdDecomposition& dec) {
    const auto& omega = dec.omega();
    CycleSlices out;
    out.order = cycle_order(omega);
    const int n = dec.n();
    const std::int64_t r = dec.bond;
    for (int t = 0; t < n; ++t) {
        const int v = out.order[static_cast<std::size_t>(t)];
        const int v_prev = out.order[static_cast<std::size_t>((t + n - 1) % n)];
        const int v_next = out.order[static_cast<std::size_t>((t + 1) % n)];
        const int in_slot = edge_slot(omega, v, subset_of({v_prev, v}, omega.n()));
        const int out_slot = edge_slot(omega, v, subset_of({v, v_next}, omega.n()));
        std::vector<Matrix> slices(static_cast<std::size_t>(dec.phys_at(v)), Matrix::Zero(r * r, r * r));
        const BetaIndexer bi = dec.beta(v);
        for (std::int64_t a = 0; a < r; ++a)
            for (std::int64_t b = 0; b < r; ++b)
                for (std::int64_t a2 = 0; a2 < r; ++a2)
                    for (std::int64_t b2 = 0; b2 < r; ++b2) {
                        std::vector<int> d1(2), d2(2);
                        d1[static_cast<std::size_t>(in_slot)] = static_cast<int>(a);
                        d1[static_cast<std::size_t>(out_slot)] = static_cast<int>(b);
                        d2[static_cast<std::size_t>(in_slot)] = static_cast<int>(a2);
                        d2[static_cast<std::size_t>(out_slot)] = static_cast<int>(b2);
                        for (int j = 0; j < dec.phys_at(v); ++j)
                            slices[static_cast<std::size_t>(j)](a * r + a2, b * r + b2) =
                                dec.mats[static_cast<std::size_t>(v - 1)][static_cast<std::size_t>(j)](
                                    bi.compose(d1), bi.compose(d2));
                    }
        out.site_mats.push_back(std::move(slices));
        out.dims.push_back(dec.phys_at(v));
    }
    return out;
}

}  // namespace

DenseTensor contract_psd_enumerated(const PsdDecomposition& dec) {
    check_psd_shapes(dec);
    return contract_psd_exhaustive(dec);
}

DenseTensor contract_psd(const PsdDecomposition& dec) {
    check_psd_shapes(dec);
    if (is_cycle_shape(dec.omega()))
        return finalize_psd_tensor(cycle_trace_tensor(cycle_psd_slices(dec), dec.n()));
    return contract_psd_exhaustive(dec);
}

DenseTensor contract_matrix(const SeparableDecomposition& dec) {
    // vectorize the d x d blocks row-major; the contraction engine sees an
    // ordinary vector decomposition with per-site dimension d^2
    UnconstrainedDecomposition v;
    v.action = dec.action;
    v.bond = dec.bond;
    for (int i = 1; i <= dec.n(); ++i) {
        const int d = dec.phys_at(i);
        v.phys.push_back(d * d);
        const auto& fam = dec.mats[static_cast<std::size_t>(i - 1)];
        Matrix local(d * d, static_cast<std::int64_t>(fam.size()));
        for (std::size_t b = 0; b < fam.size(); ++b)
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y)
                    local(x * d + y, static_cast<std::int64_t>(b)) = fam[b](x, y);
        v.locals.push_back(std::move(local));
    }
    DenseTensor flat = contract_vector(v);
    std::vector<std::int64_t> shape;
    for (int i = 1; i <= dec.n(); ++i) {
        shape.push_back(dec.phys_at(i));
        shape.push_back(dec.phys_at(i));
    }
    return flat.reshaped(shape);
}

DenseTensor contract_purification_l(const PurificationDecomposition& dec) {
    UnconstrainedDecomposition v;
    v.action = dec.action;
    v.bond = dec.bond;
    for (int i = 1; i <= dec.n(); ++i) {
        const int d = dec.phys_at(i);
        v.phys.push_back(d * dec.ancilla);
        const auto& fam = dec.mats[static_cast<std::size_t>(i - 1)];
        Matrix local(d * dec.ancilla, static_cast<std::int64_t>(fam.size()));
        for (std::size_t b = 0; b < fam.size(); ++b)
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < dec.ancilla; ++y)
                    local(x * dec.ancilla + y, static_cast<std::int64_t>(b)) = fam[b](x, y);
        v.locals.push_back(std::move(local));
    }
    DenseTensor flat = contract_vector(v);
    std::vector<std::int64_t> shape;
    for (int i = 1; i <= dec.n(); ++i) {
        shape.push_back(dec.phys_at(i));
        shape.push_back(dec.ancilla);
    }
    return flat.reshaped(shape);
}

DenseTensor contract_purification(const PurificationDecomposition& dec) {
    const DenseTensor l = contract_purification_l(dec);
    const Matrix lm = operator_to_matrix(l);
    const Matrix rho = lm * lm.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, rho.norm()))
        throw ConstructionError("purification contraction lost positivity", es.eigenvalues().minCoeff());
    std::vector<std::int64_t> dims(dec.phys.begin(), dec.phys.end());
    return matrix_to_operator(rho, dims, dims);
}

DenseTensor structure_tensor(const Wsc& omega, int bond) {
    const std::int64_t count = assignment_count(omega, bond);
    std::vector<BetaIndexer> beta;
    std::vector<std::int64_t> shape;
    for (int i = 1; i <= omega.n(); ++i) {
        beta.emplace_back(omega, i, bond);
        shape.push_back(beta.back().size());
    }
    DenseTensor out(shape);
    std::vector<int> alpha(static_cast<std::size_t>(omega.multiset_size()), 0);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(omega.n()), 0);
    for (std::int64_t a = 0; a < count; ++a) {
        std::int64_t rem = a;
        for (int p = omega.multiset_size(); p-- > 0;) {
            alpha[static_cast<std::size_t>(p)] = static_cast<int>(rem % bond);
            rem /= bond;
        }
        for (int i = 0; i < omega.n(); ++i) idx[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i)].restrict_global(alpha);
        out.set(idx, out.at(idx) + Cplx(1.0, 0.0));
    }
    return out;
}

ApplyLocalsResult apply_locals(const UnconstrainedDecomposition& dec) {
    check_vector_shapes(dec);
    DenseTensor psi = structure_tensor(dec.omega(), dec.bond);
    for (int i = 1; i <= dec.n(); ++i) psi = mode_apply(dec.locals[static_cast<std::size_t>(i - 1)], psi, i);
    const DenseTensor direct = contract_vector(dec);
    const double dev = distance(psi, direct);
    const double scale = std::max(1.0, frobenius_norm(direct));
    if (dev > 1e-10 * scale)
        throw ConstructionError("apply_locals: structure-tensor route deviates from contraction", dev);
    return {dec.locals, dev};
}

UnconstrainedDecomposition psd_to_unconstrained(const PsdDecomposition& dec) {
    check_psd_shapes(dec);
    UnconstrainedDecomposition out;
    out.action = dec.action;
    out.bond = dec.bond * dec.bond;
    out.phys = dec.phys;
    const int r = dec.bond;
    for (int i = 1; i <= dec.n(); ++i) {
        const BetaIndexer src(dec.omega(), i, r);
        const BetaIndexer dst(dec.omega(), i, r * r);
        Matrix local(dec.phys_at(i), dst.size());
        std::vector<int> da(static_cast<std::size_t>(src.k())), db(da.size());
        for (std::int64_t b = 0; b < dst.size(); ++b) {
            const auto pair_digits = dst.decompose(b);
            for (int t = 0; t < src.k(); ++t) {
                da[static_cast<std::size_t>(t)] = pair_digits[static_cast<std::size_t>(t)] / r;
                db[static_cast<std::size_t>(t)] = pair_digits[static_cast<std::size_t>(t)] % r;
            }
            const std::int64_t ba = src.compose(da), bb = src.compose(db);
            for (int j = 0; j < dec.phys_at(i); ++j)
                local(j, b) = dec.mats[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)](ba, bb);
        }
        out.locals.push_back(std::move(local));
    }
    check_vector_shapes(out);
    return out;
}

SeparableDecomposition separable_from_nonnegative(const NonnegativeDecomposition& dec) {
    check_vector_shapes(dec);
    std::vector<std::vector<Matrix>> mats;
    for (int i = 1; i <= dec.n(); ++i) {
        const auto& local = dec.locals[static_cast<std::size_t>(i - 1)];
        std::vector<Matrix> fam;
        fam.reserve(static_cast<std::size_t>(local.cols()));
        for (std::int64_t b = 0; b < local.cols(); ++b)
            fam.push_back(Matrix(local.col(b).asDiagonal()));
        mats.push_back(std::move(fam));
    }
    return make_separable(dec.action, dec.bond, dec.phys, std::move(mats));
}

PurificationDecomposition purification_from_psd(const PsdDecomposition& dec) {
    check_psd_shapes(dec);
    // Factor E_j = C_j^dag C_j at the orbit representatives and transport the
    // factors, so the purification stays G-compatible; blocks are
    // L_beta[j, (j', t)] = delta_{j j'} * conj(C_j[t, beta]).
    const auto reps = dec.action.orbit_representatives();
    const auto trans = dec.action.transversal();
    const auto orbits = dec.action.vertex_orbits();
    std::vector<int> rep_of(static_cast<std::size_t>(dec.n()), -1);
    for (std::size_t o = 0; o < orbits.size(); ++o)
        for (int v : orbits[o]) rep_of[static_cast<std::size_t>(v - 1)] = static_cast<int>(o);

    std::vector<std::vector<Matrix>> rep_factors(reps.size());
    for (std::size_t o = 0; o < reps.size(); ++o) {
        const int i = reps[o];
        for (int j = 0; j < dec.phys_at(i); ++j) {
            const Matrix& e = dec.mats[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            Eigen::SelfAdjointEigenSolver<Matrix> es((e + e.adjoint()) / 2.0);
            Matrix c = Matrix::Zero(e.rows(), e.cols());
            for (Eigen::Index l = 0; l < es.eigenvalues().size(); ++l) {
                const double lambda = std::max(0.0, es.eigenvalues()(l));
                c.row(l) = std::sqrt(lambda) * es.eigenvectors().col(l).adjoint();
            }
            rep_factors[o].push_back(std::move(c));
        }
    }

    // uniform ancilla across sites: pad to the largest beta space
    std::int64_t m_max = 1;
    int d_max = 1;
    for (int v = 1; v <= dec.n(); ++v) {
        m_max = std::max(m_max, dec.beta(v).size());
        d_max = std::max(d_max, dec.phys_at(v));
    }
    const int ancilla = static_cast<int>(d_max * m_max);

    std::vector<std::vector<Matrix>> mats(static_cast<std::size_t>(dec.n()));
    for (int v = 1; v <= dec.n(); ++v) {
        const int o = rep_of[static_cast<std::size_t>(v - 1)];
        const int rep = reps[static_cast<std::size_t>(o)];
        const auto relabel = beta_relabel(dec.omega(), trans[static_cast<std::size_t>(v - 1)], rep, dec.bond);
        const int d = dec.phys_at(v);
        const std::int64_t m = dec.beta(v).size();
        std::vector<Matrix> fam(static_cast<std::size_t>(m));
        for (std::int64_t b = 0; b < m; ++b) {
            Matrix block = Matrix::Zero(d, ancilla);
            for (int j = 0; j < d; ++j)
                for (std::int64_t t = 0; t < m; ++t)
                    block(j, j * m_max + t) = std::conj(rep_factors[static_cast<std::size_t>(o)][static_cast<std::size_t>(j)](t, b));
            fam[static_cast<std::size_t>(relabel[static_cast<std::size_t>(b)])] = std::move(block);
        }
        mats[static_cast<std::size_t>(v - 1)] = std::move(fam);
    }
    return make_purification(dec.action, dec.bond, dec.phys, ancilla, std::move(mats));
}

std::vector<int> cycle_vertex_order(const Wsc& omega) {
    if (!is_cycle_shape(omega)) throw ValidationError("cycle_vertex_order: wsc is not a cycle");
    return cycle_order(omega);
}

Matrix cycle_local(const Wsc& omega, int vertex, int bond,
                   const std::function<Vector(int a_in, int b_out)>& f) {
    const auto order = cycle_vertex_order(omega);
    const int n = omega.n();
    int t = static_cast<int>(std::find(order.begin(), order.end(), vertex) - order.begin());
    const int v_prev = order[static_cast<std::size_t>((t + n - 1) % n)];
    const int v_next = order[static_cast<std::size_t>((t + 1) % n)];
    const int in_slot = edge_slot(omega, vertex, subset_of({v_prev, vertex}, n));
    const int out_slot = edge_slot(omega, vertex, subset_of({vertex, v_next}, n));
    const BetaIndexer bi(omega, vertex, bond);

    Matrix local;
    for (int a = 0; a < bond; ++a)
        for (int b = 0; b < bond; ++b) {
            const Vector v = f(a, b);
            if (local.size() == 0) local = Matrix::Zero(v.size(), bi.size());
            std::vector<int> digits(2);
            digits[static_cast<std::size_t>(in_slot)] = a;
            digits[static_cast<std::size_t>(out_slot)] = b;
            local.col(bi.compose(digits)) = v;
        }
    return local;
}

std::vector<Matrix> cycle_locals(const Wsc& omega, int bond,
                                 const std::function<Vector(int site, int a_in, int b_out)>& f) {
    std::vector<Matrix> out;
    for (int v = 1; v <= omega.n(); ++v)
        out.push_back(cycle_local(omega, v, bond, [&](int a, int b) { return f(v, a, b); }));
    return out;
}

std::int64_t cycle_beta_index(const Wsc& omega, int vertex, int bond, int a_in, int b_out) {
    const auto order = cycle_vertex_order(omega);
    const int n = omega.n();
    const int t = static_cast<int>(std::find(order.begin(), order.end(), vertex) - order.begin());
    const int v_prev = order[static_cast<std::size_t>((t + n - 1) % n)];
    const int v_next = order[static_cast<std::size_t>((t + 1) % n)];
    const int in_slot = edge_slot(omega, vertex, subset_of({v_prev, vertex}, n));
    const int out_slot = edge_slot(omega, vertex, subset_of({vertex, v_next}, n));
    std::vector<int> digits(2);
    digits[static_cast<std::size_t>(in_slot)] = a_in;
    digits[static_cast<std::size_t>(out_slot)] = b_out;
    return BetaIndexer(omega, vertex, bond).compose(digits);
}

// -- validation ---------------------------------------------------------------

std::string ValidationReport::summary() const {
    if (issues.empty()) return "ok";
    std::ostringstream os;
    for (const auto& it : issues) os << it.what << " (magnitude " << it.magnitude << ")\n";
    return os.str();
}

namespace {

GroupElement generator_element(const GroupAction& action, std::size_t g) {
    GroupElement e;
    e.vertex_perm = action.generators()[g];
    e.copy_perm = action.facet_maps()[g];
    return e;
}

void check_vector_symmetry(const UnconstrainedDecomposition& dec, ValidationReport& report) {
    for (std::size_t g = 0; g < dec.action.generators().size(); ++g) {
        const auto elem = generator_element(dec.action, g);
        for (int i = 1; i <= dec.n(); ++i) {
            const int gi = elem.vertex_perm(i - 1) + 1;
            const auto relabel = beta_relabel(dec.omega(), elem, i, dec.bond);
            double dev = 0.0;
            const auto& a = dec.locals[static_cast<std::size_t>(i - 1)];
            const auto& b = dec.locals[static_cast<std::size_t>(gi - 1)];
            for (std::int64_t col = 0; col < a.cols(); ++col)
                dev = std::max(dev, (b.col(relabel[static_cast<std::size_t>(col)]) - a.col(col)).cwiseAbs().maxCoeff());
            if (dev > 0.0)
                report.issues.push_back({"symmetry violation between site " + std::to_string(i) + " and site " +
                                             std::to_string(gi) + " (generator " + std::to_string(g + 1) + ")",
                                         dev});
        }
    }
}

}  // namespace

ValidationReport validate(const UnconstrainedDecomposition& dec) {
    ValidationReport report;
    try {
        check_vector_shapes(dec);
    } catch (const ValidationError& e) {
        report.issues.push_back({std::string("structure: ") + e.what(), 0.0});
        return report;
    }
    check_vector_symmetry(dec, report);
    return report;
}

ValidationReport validate(const NonnegativeDecomposition& dec) {
    ValidationReport report = validate(static_cast<const UnconstrainedDecomposition&>(dec));
    for (int i = 1; i <= dec.n(); ++i) {
        const auto& m = dec.locals[static_cast<std::size_t>(i - 1)];
        double min_re = 0.0, max_im = 0.0;
        for (std::int64_t c = 0; c < m.cols(); ++c)
            for (std::int64_t r = 0; r < m.rows(); ++r) {
                min_re = std::min(min_re, m(r, c).real());
                max_im = std::max(max_im, std::abs(m(r, c).imag()));
            }
        if (min_re < -1e-12)
            report.issues.push_back({"negative entry at site " + std::to_string(i), -min_re});
        if (max_im > 1e-12)
            report.issues.push_back({"non-real entry at site " + std::to_string(i), max_im});
    }
    return report;
}

ValidationReport validate(const PsdDecomposition& dec) {
    ValidationReport report;
    try {
        check_psd_shapes(dec);
    } catch (const ValidationError& e) {
        report.issues.push_back({std::string("structure: ") + e.what(), 0.0});
        return report;
    }
    for (int i = 1; i <= dec.n(); ++i)
        for (int j = 0; j < dec.phys_at(i); ++j) {
            const auto& m = dec.mats[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            if (!is_hermitian(m, 1e-10)) {
                report.issues.push_back({"E_" + std::to_string(j) + " at site " + std::to_string(i) +
                                             " is not Hermitian",
                                         (m - m.adjoint()).cwiseAbs().maxCoeff()});
                continue;
            }
            const double lmin = hermitian_eigenvalues(m).minCoeff();
            if (lmin < -1e-10 * std::max(1.0, m.norm()))
                report.issues.push_back(
                    {"E_" + std::to_string(j) + " at site " + std::to_string(i) + " is not psd", lmin});
        }
    for (std::size_t g = 0; g < dec.action.generators().size(); ++g) {
        const auto elem = generator_element(dec.action, g);
        for (int i = 1; i <= dec.n(); ++i) {
            const int gi = elem.vertex_perm(i - 1) + 1;
            const auto relabel = beta_relabel(dec.omega(), elem, i, dec.bond);
            double dev = 0.0;
            for (int j = 0; j < dec.phys_at(i); ++j) {
                const auto& a = dec.mats[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
                const auto& b = dec.mats[static_cast<std::size_t>(gi - 1)][static_cast<std::size_t>(j)];
                for (std::int64_t x = 0; x < a.rows(); ++x)
                    for (std::int64_t y = 0; y < a.cols(); ++y)
                        dev = std::max(dev, std::abs(b(relabel[static_cast<std::size_t>(x)],
                                                       relabel[static_cast<std::size_t>(y)]) -
                                                     a(x, y)));
            }
            if (dev > 0.0)
                report.issues.push_back({"psd symmetry violation between site " + std::to_string(i) +
                                             " and site " + std::to_string(gi),
                                         dev});
        }
    }
    return report;
}

ValidationReport validate(const SeparableDecomposition& dec) {
    ValidationReport report;
    for (int i = 1; i <= dec.n(); ++i)
        for (std::size_t b = 0; b < dec.mats[static_cast<std::size_t>(i - 1)].size(); ++b) {
            const auto& m = dec.mats[static_cast<std::size_t>(i - 1)][b];
            if (!is_hermitian(m, 1e-10)) {
                report.issues.push_back({"local matrix at site " + std::to_string(i) + " is not Hermitian",
                                         (m - m.adjoint()).cwiseAbs().maxCoeff()});
                continue;
            }
            const double lmin = hermitian_eigenvalues(m).minCoeff();
            if (lmin < -1e-10 * std::max(1.0, m.norm()))
                report.issues.push_back({"local matrix at site " + std::to_string(i) + " is not psd", lmin});
        }
    for (std::size_t g = 0; g < dec.action.generators().size(); ++g) {
        const auto elem = generator_element(dec.action, g);
        for (int i = 1; i <= dec.n(); ++i) {
            const int gi = elem.vertex_perm(i - 1) + 1;
            const auto relabel = beta_relabel(dec.omega(), elem, i, dec.bond);
            double dev = 0.0;
            for (std::size_t b = 0; b < dec.mats[static_cast<std::size_t>(i - 1)].size(); ++b) {
                const Matrix diff = dec.mats[static_cast<std::size_t>(gi - 1)][static_cast<std::size_t>(relabel[b])] -
                                    dec.mats[static_cast<std::size_t>(i - 1)][b];
                dev = std::max(dev, diff.cwiseAbs().maxCoeff());
            }
            if (dev > 0.0)
                report.issues.push_back({"symmetry violation between site " + std::to_string(i) + " and site " +
                                             std::to_string(gi),
                                         dev});
        }
    }
    return report;
}

ValidationReport validate(const PurificationDecomposition& dec) {
    ValidationReport report;
    for (std::size_t g = 0; g < dec.action.generators().size(); ++g) {
        const auto elem = generator_element(dec.action, g);
        for (int i = 1; i <= dec.n(); ++i) {
            const int gi = elem.vertex_perm(i - 1) + 1;
            const auto relabel = beta_relabel(dec.omega(), elem, i, dec.bond);
            double dev = 0.0;
            for (std::size_t b = 0; b < dec.mats[static_cast<std::size_t>(i - 1)].size(); ++b) {
                const Matrix diff = dec.mats[static_cast<std::size_t>(gi - 1)][static_cast<std::size_t>(relabel[b])] -
                                    dec.mats[static_cast<std::size_t>(i - 1)][b];
                dev = std::max(dev, diff.cwiseAbs().maxCoeff());
            }
            if (dev > 0.0)
                report.issues.push_back({"symmetry violation between site " + std::to_string(i) + " and site " +
                                             std::to_string(gi),
                                         dev});
        }
    }
    return report;
}

}  // namespace brlab
