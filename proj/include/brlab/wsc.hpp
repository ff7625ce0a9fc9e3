#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "brlab/errors.hpp"

namespace brlab {

/// Vertices are 1-based throughout; subsets of {1..n} are bitmasks with bit
/// (i-1) standing for vertex i. n is capped at 63 by the encoding.
using Subset = std::uint64_t;

Subset subset_of(const std::vector<int>& vertices, int n);
std::vector<int> subset_vertices(Subset s);

/// A facet copy: the facet bitmask plus which copy of it in the multiset.
struct FacetCopy {
    Subset facet = 0;
    int copy = 0;
    friend bool operator==(const FacetCopy&, const FacetCopy&) = default;
    friend auto operator<=>(const FacetCopy&, const FacetCopy&) = default;
};

/// Weighted simplicial complex: a weight function on subsets of {1..n} whose
/// support is downward closed and where weights divide upward along
/// inclusions. Immutable after construction.
class WeightedSimplicialComplex {
public:
    /// Empty placeholder; every operation rejects it (n = 0).
    WeightedSimplicialComplex() = default;

    /// `weights` lists the nonzero weights; unlisted singletons default to 1,
    /// everything else to 0. Throws ValidationError on invariant violations.
    WeightedSimplicialComplex(int n, std::map<Subset, std::uint64_t> weights);

    int n() const { return n_; }
    std::uint64_t weight(Subset s) const;

    /// Inclusion-maximal simplices, sorted by bitmask.
    const std::vector<Subset>& facets() const { return facets_; }

    /// Facet multiset in canonical order: facets by ascending bitmask, copies
    /// by ascending ordinal. This ordering fixes every index convention used
    /// by decompositions.
    const std::vector<FacetCopy>& facet_multiset() const { return multiset_; }

    /// Positions (into facet_multiset) of the copies containing vertex i.
    const std::vector<int>& facet_copies_at(int vertex) const;

    /// Number of facet copies containing vertex i, |F~_i|.
    int degree(int vertex) const { return static_cast<int>(facet_copies_at(vertex).size()); }

    int multiset_size() const { return static_cast<int>(multiset_.size()); }

    /// Index of a facet copy in the canonical multiset order.
    int copy_position(const FacetCopy& fc) const;

    const std::map<Subset, std::uint64_t>& stored_weights() const { return weights_; }

    friend bool operator==(const WeightedSimplicialComplex& a, const WeightedSimplicialComplex& b) {
        return a.n_ == b.n_ && a.weights_ == b.weights_;
    }

private:
    int n_ = 0;
    std::map<Subset, std::uint64_t> weights_;  // support only
    std::vector<Subset> facets_;
    std::vector<FacetCopy> multiset_;
    std::vector<std::vector<int>> copies_at_;  // per vertex, positions in multiset_
};

using Wsc = WeightedSimplicialComplex;

/// All weights 1; single facet {1..n}. Materializes the full support, so n is
/// capped at 20 (desk scale is n <= 8).
Wsc make_simplex(int n);

/// Facets {1,2}, {2,3}, ..., {n,1}; requires n >= 3.
Wsc make_cycle(int n);

/// Facets {1,2}, ..., {n-1,n}; requires n >= 2.
Wsc make_line(int n);

/// True iff all facets have size <= 2, all weights are 0/1, and the facet
/// graph is connected and acyclic.
bool is_tree(const Wsc& omega);

bool is_cycle_shape(const Wsc& omega);

/// A permutation of {1..n} stored as 0-based images.
struct Permutation {
    std::vector<int> image;  // image[i] = pi(i), 0-based
    int degree() const { return static_cast<int>(image.size()); }
    int operator()(int i) const { return image[static_cast<std::size_t>(i)]; }
    static Permutation identity(int n);
    Permutation compose(const Permutation& inner) const;  // this after inner
    Permutation inverse() const;
    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation&, const Permutation&) = default;
};

/// A group element materialized on the wsc: a vertex permutation together
/// with the refined permutation of facet copies (by multiset position).
struct GroupElement {
    Permutation vertex_perm;
    std::vector<int> copy_perm;  // copy_perm[pos] = image position in F~
};

/// Group action on a wsc: vertex permutations that leave the weights
/// invariant, refined by an action on the facet multiset for which the
/// collapse map is G-linear. Generators only; elements are materialized by
/// breadth-first closure with a configurable cap.
class GroupAction {
public:
    /// Placeholder on an empty wsc; rejected wherever it is used.
    GroupAction() = default;

    /// facet_maps[g][pos] gives the image multiset position under generator g.
    GroupAction(Wsc omega, std::vector<Permutation> generators,
                std::vector<std::vector<int>> facet_maps, std::uint64_t element_cap = 1'000'000);

    const Wsc& omega() const { return omega_; }
    const std::vector<Permutation>& generators() const { return generators_; }
    const std::vector<std::vector<int>>& facet_maps() const { return facet_maps_; }
    bool trivial() const { return generators_.empty(); }
    std::uint64_t element_cap() const { return element_cap_; }

    /// Full element list (identity first). Cached after the first call.
    const std::vector<GroupElement>& elements() const;

    /// Vertex orbits as sorted 1-based lists, ordered by smallest member.
    std::vector<std::vector<int>> vertex_orbits() const;

    /// Smallest vertex of each orbit, ascending.
    std::vector<int> orbit_representatives() const;

    /// For each vertex, one element g with g(rep) = vertex, rep being the
    /// orbit representative. Identity on representatives.
    std::vector<GroupElement> transversal() const;

private:
    Wsc omega_;
    std::vector<Permutation> generators_;
    std::vector<std::vector<int>> facet_maps_;
    std::uint64_t element_cap_;
    mutable std::optional<std::vector<GroupElement>> elements_;
};

GroupAction trivial_action(const Wsc& omega);

/// Translation i -> i+1 on a cycle, facets {i,i+1} -> {i+1,i+2}.
GroupAction cyclic_action(const Wsc& omega);

/// Adjacent transpositions generating S_n on a simplex.
GroupAction symmetric_action(const Wsc& omega);

/// True iff every element fixing a vertex also fixes all facet copies at it.
bool is_external(const GroupAction& action);

std::vector<int> orbit_representatives(const GroupAction& action);

}  // namespace brlab
