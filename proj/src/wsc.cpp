#include "brlab/wsc.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <numeric>

namespace brlab {

Subset subset_of(const std::vector<int>& vertices, int n) {
    Subset s = 0;
    for (int v : vertices) {
        if (v < 1 || v > n) throw ValidationError("vertex out of range");
        s |= Subset{1} << (v - 1);
    }
    return s;
}

std::vector<int> subset_vertices(Subset s) {
    std::vector<int> out;
    for (int i = 0; s != 0; ++i, s >>= 1)
        if (s & 1) out.push_back(i + 1);
    return out;
}

WeightedSimplicialComplex::WeightedSimplicialComplex(int n, std::map<Subset, std::uint64_t> weights)
    : n_(n) {
    if (n < 1 || n > 63) throw ValidationError("vertex count must be in [1, 63]");
    const Subset full = (n == 63) ? ~Subset{0} : ((Subset{1} << n) - 1);

    for (auto it = weights.begin(); it != weights.end();) {
        if ((it->first & ~full) != 0) throw ValidationError("subset mentions vertex beyond n");
        if (it->first == 0) throw ValidationError("empty set cannot carry a weight");
        it = (it->second == 0) ? weights.erase(it) : std::next(it);
    }
    for (int i = 0; i < n; ++i) {
        const Subset s = Subset{1} << i;
        if (!weights.count(s)) weights[s] = 1;  // singletons default to weight 1
    }
    weights_ = std::move(weights);

    // Divisibility along immediate inclusions implies it along all chains.
    for (const auto& [s, w] : weights_) {
        for (Subset bits = s; bits != 0; bits &= bits - 1) {
            const Subset sub = s & ~(bits & ~(bits - 1));
            if (sub == 0) continue;
            auto it = weights_.find(sub);
            if (it == weights_.end())
                throw ValidationError("support is not downward closed");
            if (w % it->second != 0)
                throw ValidationError("weights do not divide along inclusions");
        }
    }

    for (const auto& [s, w] : weights_) {
        bool maximal = true;
        for (int i = 0; i < n && maximal; ++i) {
            const Subset ext = s | (Subset{1} << i);
            if (ext != s && weights_.count(ext)) maximal = false;
        }
        if (maximal) facets_.push_back(s);
    }
    if (facets_.empty()) throw ValidationError("facet set is empty");

    for (Subset f : facets_) {
        const auto w = weights_.at(f);
        if (w > 4096) throw ResourceError("facet multiplicity too large");
        for (std::uint64_t c = 0; c < w; ++c) multiset_.push_back({f, static_cast<int>(c)});
    }

    copies_at_.assign(static_cast<std::size_t>(n), {});
    for (int pos = 0; pos < static_cast<int>(multiset_.size()); ++pos)
        for (int v : subset_vertices(multiset_[static_cast<std::size_t>(pos)].facet))
            copies_at_[static_cast<std::size_t>(v - 1)].push_back(pos);
    for (int i = 0; i < n; ++i)
        if (copies_at_[static_cast<std::size_t>(i)].empty())
            throw ValidationError("vertex lies in no facet");
}

std::uint64_t WeightedSimplicialComplex::weight(Subset s) const {
    if (s == 0) return 1;  // convention: the empty simplex divides everything
    auto it = weights_.find(s);
    return it == weights_.end() ? 0 : it->second;
}

const std::vector<int>& WeightedSimplicialComplex::facet_copies_at(int vertex) const {
    if (vertex < 1 || vertex > n_) throw ValidationError("vertex out of range");
    return copies_at_[static_cast<std::size_t>(vertex - 1)];
}

int WeightedSimplicialComplex::copy_position(const FacetCopy& fc) const {
    auto it = std::lower_bound(multiset_.begin(), multiset_.end(), fc);
    if (it == multiset_.end() || !(*it == fc)) throw ValidationError("no such facet copy");
    return static_cast<int>(it - multiset_.begin());
}

Wsc make_simplex(int n) {
    if (n < 1) throw ValidationError("make_simplex: n must be positive");
    if (n > 20) throw ResourceError("make_simplex: full support materialization capped at n = 20");
    std::map<Subset, std::uint64_t> w;
    const Subset full = (Subset{1} << n) - 1;
    for (Subset s = 1; s <= full; ++s) w[s] = 1;
    return Wsc(n, std::move(w));
}

Wsc make_cycle(int n) {
    if (n < 3) throw ValidationError("make_cycle: n must be at least 3");
    std::map<Subset, std::uint64_t> w;
    for (int i = 1; i <= n; ++i) {
        w[subset_of({i}, n)] = 1;
        w[subset_of({i, i % n + 1}, n)] = 1;
    }
    return Wsc(n, std::move(w));
}

Wsc make_line(int n) {
    if (n < 2) throw ValidationError("make_line: n must be at least 2");
    std::map<Subset, std::uint64_t> w;
    for (int i = 1; i <= n; ++i) w[subset_of({i}, n)] = 1;
    for (int i = 1; i < n; ++i) w[subset_of({i, i + 1}, n)] = 1;
    return Wsc(n, std::move(w));
}

namespace {

// Edge list of a graph-shaped wsc, or nullopt if some facet is too large or
// some weight exceeds 1.
std::optional<std::vector<std::pair<int, int>>> graph_edges(const Wsc& omega) {
    for (const auto& [s, w] : omega.stored_weights())
        if (w > 1) return std::nullopt;
    std::vector<std::pair<int, int>> edges;
    for (Subset f : omega.facets()) {
        const auto vs = subset_vertices(f);
        if (vs.size() > 2) return std::nullopt;
        if (vs.size() == 2) edges.emplace_back(vs[0], vs[1]);
    }
    return edges;
}

bool connected(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + 1));
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
    std::deque<int> queue{1};
    seen[1] = true;
    int count = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        ++count;
        for (int w : adj[static_cast<std::size_t>(v)])
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                queue.push_back(w);
            }
    }
    return count == n;
}

}  // namespace

bool is_tree(const Wsc& omega) {
    auto edges = graph_edges(omega);
    if (!edges) return false;
    if (static_cast<int>(edges->size()) != omega.n() - 1) return false;
    return connected(omega.n(), *edges);
}

bool is_cycle_shape(const Wsc& omega) {
    if (omega.n() < 3) return false;
    auto edges = graph_edges(omega);
    if (!edges) return false;
    if (static_cast<int>(edges->size()) != omega.n()) return false;
    for (int i = 1; i <= omega.n(); ++i)
        if (omega.degree(i) != 2) return false;
    return connected(omega.n(), *edges);
}

Permutation Permutation::identity(int n) {
    Permutation p;
    p.image.resize(static_cast<std::size_t>(n));
    std::iota(p.image.begin(), p.image.end(), 0);
    return p;
}

Permutation Permutation::compose(const Permutation& inner) const {
    Permutation out;
    out.image.resize(image.size());
    for (std::size_t i = 0; i < image.size(); ++i)
        out.image[i] = image[static_cast<std::size_t>(inner.image[i])];
    return out;
}

Permutation Permutation::inverse() const {
    Permutation out;
    out.image.resize(image.size());
    for (std::size_t i = 0; i < image.size(); ++i)
        out.image[static_cast<std::size_t>(image[i])] = static_cast<int>(i);
    return out;
}

namespace {

Subset apply_perm(const Permutation& p, Subset s) {
    Subset out = 0;
    for (int i = 0; s != 0; ++i, s >>= 1)
        if (s & 1) out |= Subset{1} << p(i);
    return out;
}

}  // namespace

GroupAction::GroupAction(Wsc omega, std::vector<Permutation> generators,
                         std::vector<std::vector<int>> facet_maps, std::uint64_t element_cap)
    : omega_(std::move(omega)),
      generators_(std::move(generators)),
      facet_maps_(std::move(facet_maps)),
      element_cap_(element_cap) {
    if (generators_.size() != facet_maps_.size())
        throw ValidationError("one facet map per generator required");
    const int m = omega_.multiset_size();
    for (std::size_t g = 0; g < generators_.size(); ++g) {
        const auto& perm = generators_[g];
        if (perm.degree() != omega_.n()) throw ValidationError("generator degree mismatch");
        std::vector<bool> hit(static_cast<std::size_t>(omega_.n()), false);
        for (int i = 0; i < omega_.n(); ++i) {
            const int img = perm(i);
            if (img < 0 || img >= omega_.n() || hit[static_cast<std::size_t>(img)])
                throw ValidationError("generator is not a permutation");
            hit[static_cast<std::size_t>(img)] = true;
        }
        for (const auto& [s, w] : omega_.stored_weights())
            if (omega_.weight(apply_perm(perm, s)) != w)
                throw ValidationError("weights are not invariant under the action");

        const auto& fmap = facet_maps_[g];
        if (static_cast<int>(fmap.size()) != m) throw ValidationError("facet map size mismatch");
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (int pos = 0; pos < m; ++pos) {
            const int img = fmap[static_cast<std::size_t>(pos)];
            if (img < 0 || img >= m || seen[static_cast<std::size_t>(img)])
                throw ValidationError("facet map is not a permutation of copies");
            seen[static_cast<std::size_t>(img)] = true;
            const Subset expected = apply_perm(perm, omega_.facet_multiset()[static_cast<std::size_t>(pos)].facet);
            if (omega_.facet_multiset()[static_cast<std::size_t>(img)].facet != expected)
                throw ValidationError("collapse map is not G-linear");
        }
    }
}

const std::vector<GroupElement>& GroupAction::elements() const {
    if (elements_) return *elements_;
    std::vector<GroupElement> out;
    std::map<std::vector<int>, std::size_t> index;
    const int m = omega_.multiset_size();
    GroupElement id{Permutation::identity(omega_.n()), {}};
    id.copy_perm.resize(static_cast<std::size_t>(m));
    std::iota(id.copy_perm.begin(), id.copy_perm.end(), 0);
    out.push_back(id);
    index[id.vertex_perm.image] = 0;

    for (std::size_t head = 0; head < out.size(); ++head) {
        for (std::size_t g = 0; g < generators_.size(); ++g) {
            // snapshot by value: growing `out` may relocate
            const GroupElement base = out[head];
            GroupElement next;
            next.vertex_perm = generators_[g].compose(base.vertex_perm);
            next.copy_perm.resize(static_cast<std::size_t>(m));
            for (int pos = 0; pos < m; ++pos)
                next.copy_perm[static_cast<std::size_t>(pos)] =
                    facet_maps_[g][static_cast<std::size_t>(base.copy_perm[static_cast<std::size_t>(pos)])];
            auto it = index.find(next.vertex_perm.image);
            if (it == index.end()) {
                if (out.size() >= element_cap_)
                    throw ResourceError("group closure exceeds element cap (" +
                                        std::to_string(element_cap_) + ")");
                index[next.vertex_perm.image] = out.size();
                out.push_back(std::move(next));
            } else if (out[it->second].copy_perm != next.copy_perm) {
                throw ValidationError("facet action does not respect group composition");
            }
        }
    }
    elements_ = std::move(out);
    return *elements_;
}

std::vector<std::vector<int>> GroupAction::vertex_orbits() const {
    const int n = omega_.n();
    std::vector<int> root(static_cast<std::size_t>(n));
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int x) {
        while (root[static_cast<std::size_t>(x)] != x) {
            root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
            x = root[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (const auto& g : generators_)
        for (int i = 0; i < n; ++i) {
            int a = find(i), b = find(g(i));
            if (a != b) root[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    std::map<int, std::vector<int>> buckets;
    for (int i = 0; i < n; ++i) buckets[find(i)].push_back(i + 1);
    std::vector<std::vector<int>> orbits;
    for (auto& [rep, members] : buckets) orbits.push_back(std::move(members));
    return orbits;
}

std::vector<int> GroupAction::orbit_representatives() const {
    std::vector<int> reps;
    for (const auto& orbit : vertex_orbits()) reps.push_back(orbit.front());
    return reps;
}

std::vector<GroupElement> GroupAction::transversal() const {
    const auto& elems = elements();
    const int n = omega_.n();
    std::vector<int> rep_of(static_cast<std::size_t>(n), -1);
    for (const auto& orbit : vertex_orbits())
        for (int v : orbit) rep_of[static_cast<std::size_t>(v - 1)] = orbit.front() - 1;

    std::vector<GroupElement> out(static_cast<std::size_t>(n));
    std::vector<bool> found(static_cast<std::size_t>(n), false);
    for (const auto& e : elems)
        for (int v = 0; v < n; ++v)
            if (!found[static_cast<std::size_t>(v)] && e.vertex_perm(rep_of[static_cast<std::size_t>(v)]) == v) {
                out[static_cast<std::size_t>(v)] = e;
                found[static_cast<std::size_t>(v)] = true;
            }
    for (bool f : found)
        if (!f) throw ValidationError("transversal: orbit enumeration failed");
    return out;
}

GroupAction trivial_action(const Wsc& omega) { return GroupAction(omega, {}, {}); }

GroupAction cyclic_action(const Wsc& omega) {
    if (!is_cycle_shape(omega)) throw ValidationError("cyclic_action: wsc is not a cycle");
    const int n = omega.n();
    Permutation tau;
    tau.image.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) tau.image[static_cast<std::size_t>(i)] = (i + 1) % n;
    std::vector<int> fmap(static_cast<std::size_t>(omega.multiset_size()));
    for (int pos = 0; pos < omega.multiset_size(); ++pos) {
        const Subset img = apply_perm(tau, omega.facet_multiset()[static_cast<std::size_t>(pos)].facet);
        fmap[static_cast<std::size_t>(pos)] = omega.copy_position({img, 0});
    }
    return GroupAction(omega, {tau}, {fmap});
}

GroupAction symmetric_action(const Wsc& omega) {
    const Subset full = (omega.n() == 63) ? ~Subset{0} : ((Subset{1} << omega.n()) - 1);
    if (omega.facets() != std::vector<Subset>{full} || omega.multiset_size() != 1)
        throw ValidationError("symmetric_action: wsc is not a simplex");
    std::vector<Permutation> gens;
    std::vector<std::vector<int>> fmaps;
    for (int i = 0; i + 1 < omega.n(); ++i) {
        Permutation p = Permutation::identity(omega.n());
        std::swap(p.image[static_cast<std::size_t>(i)], p.image[static_cast<std::size_t>(i + 1)]);
        gens.push_back(p);
        fmaps.push_back({0});
    }
    return GroupAction(omega, std::move(gens), std::move(fmaps));
}

bool is_external(const GroupAction& action) {
    const auto& omega = action.omega();
    for (const auto& e : action.elements())
        for (int v = 1; v <= omega.n(); ++v) {
            if (e.vertex_perm(v - 1) != v - 1) continue;
            for (int pos : omega.facet_copies_at(v))
                if (e.copy_perm[static_cast<std::size_t>(pos)] != pos) return false;
        }
    return true;
}

std::vector<int> orbit_representatives(const GroupAction& action) {
    return action.orbit_representatives();
}

}  // namespace brlab
