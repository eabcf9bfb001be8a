#pragma once

// Finite groups as explicit multiplication tables, produced by breadth-first
// closure of generators (permutations, signed permutations, or unimodular
// matrices).  Element 0 is always the identity and the element order is the
// deterministic BFS order, so closing the same generators twice yields
// identical tables.

#include "latcert/common.hpp"
#include "latcert/int_matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace latcert {

constexpr std::size_t kDefaultGroupOrderBound = 10000;

struct FiniteGroup {
    std::size_t order = 0;
    std::vector<std::vector<int>> mult; // mult[g][h] = index of g*h
    std::vector<int> inverse;
    int identity = 0;
    std::vector<int> generators;
    std::vector<std::string> element_names;
    std::string name;

    int op(int g, int h) const { return mult[g][h]; }

    int power(int g, long long k) const
    {
        int r = identity;
        int base = g;
        if (k < 0) {
            base = inverse[g];
            k = -k;
        }
        while (k > 0) {
            if (k & 1) r = op(r, base);
            base = op(base, base);
            k >>= 1;
        }
        return r;
    }

    std::size_t element_order(int g) const
    {
        std::size_t n = 1;
        int x = g;
        while (x != identity) {
            x = op(x, g);
            ++n;
        }
        return n;
    }

    int conjugate(int g, int by) const { return op(op(by, g), inverse[by]); }
};

struct Subgroup {
    std::shared_ptr<const FiniteGroup> parent;
    std::vector<int> members; // sorted element indices

    std::size_t order() const { return members.size(); }
    bool contains(int g) const
    {
        return std::binary_search(members.begin(), members.end(), g);
    }
};

namespace detail {

// Generic BFS closure over elements with a composition law and a canonical
// key.  Returns elements in discovery order (identity first) and fills the
// multiplication table.
template <typename Elem, typename Compose, typename Key>
std::vector<Elem> close_elements(const Elem& id, const std::vector<Elem>& gens,
                                 Compose compose, Key key, std::size_t order_bound,
                                 FiniteGroup& g)
{
    std::vector<Elem> elems;
    std::map<decltype(key(id)), int> index;
    elems.push_back(id);
    index[key(id)] = 0;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const Elem& s : gens) {
            Elem next = compose(elems[i], s);
            auto k = key(next);
            if (index.find(k) == index.end()) {
                require(elems.size() < order_bound, "group order bound exceeded");
                index[k] = static_cast<int>(elems.size());
                elems.push_back(std::move(next));
            }
        }
    }
    const std::size_t n = elems.size();
    g.order = n;
    g.mult.assign(n, std::vector<int>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            g.mult[i][j] = index.at(key(compose(elems[i], elems[j])));
    g.inverse.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (g.mult[i][j] == 0) {
                g.inverse[i] = static_cast<int>(j);
                break;
            }
    g.identity = 0;
    g.generators.clear();
    for (const Elem& s : gens) g.generators.push_back(index.at(key(s)));
    return elems;
}

} // namespace detail

/// Result of closing permutation generators: the group plus the permutation
/// realization of every element (images, 0-indexed).
struct PermGroup {
    std::shared_ptr<FiniteGroup> group;
    std::size_t degree = 0;
    std::vector<std::vector<int>> perms; // per element, in element order
};

/// Close permutation generators on {0..degree-1} by BFS.
/// Composition convention: (a*b)(x) = a(b(x)).
inline PermGroup close_generators(std::size_t degree,
                                  const std::vector<std::vector<int>>& perm_generators,
                                  std::size_t order_bound = kDefaultGroupOrderBound)
{
    for (const auto& p : perm_generators) {
        require(p.size() == degree, "permutation length != degree");
        std::vector<bool> seen(degree, false);
        for (int img : p) {
            require(img >= 0 && static_cast<std::size_t>(img) < degree && !seen[img],
                    "generator is not a bijection");
            seen[img] = true;
        }
    }
    std::vector<int> id(degree);
    std::iota(id.begin(), id.end(), 0);
    auto compose = [](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> c(a.size());
        for (std::size_t x = 0; x < a.size(); ++x) c[x] = a[b[x]];
        return c;
    };
    auto key = [](const std::vector<int>& a) { return a; };
    PermGroup pg;
    pg.group = std::make_shared<FiniteGroup>();
    pg.degree = degree;
    pg.perms = detail::close_elements(id, perm_generators, compose, key, order_bound,
                                      *pg.group);
    return pg;
}

/// Subgroup generated by the given elements, via index-space closure.
inline std::vector<int> generated_subgroup(const FiniteGroup& g, std::vector<int> gens)
{
    std::vector<bool> in(g.order, false);
    std::vector<int> added;
    in[g.identity] = true;
    added.push_back(g.identity);
    for (int s : gens)
        if (!in[s]) {
            in[s] = true;
            added.push_back(s);
        }
    for (std::size_t i = 0; i < added.size(); ++i)
        for (int s : gens) {
            int x = g.op(added[i], s);
            if (!in[x]) {
                in[x] = true;
                added.push_back(x);
            }
            x = g.op(s, added[i]);
            if (!in[x]) {
                in[x] = true;
                added.push_back(x);
            }
        }
    std::sort(added.begin(), added.end());
    return added;
}

/// A small generating set of a subgroup given by its member list: greedily add
/// members that enlarge the closure.  Deterministic.
inline std::vector<int> small_generating_set(const FiniteGroup& g,
                                             const std::vector<int>& members)
{
    std::vector<int> gens;
    std::vector<int> closed = {g.identity};
    for (int m : members) {
        if (std::binary_search(closed.begin(), closed.end(), m)) continue;
        gens.push_back(m);
        closed = generated_subgroup(g, gens);
        if (closed.size() == members.size()) break;
    }
    return gens;
}

/// All subgroups, as sorted member lists: every cyclic subgroup, then closure
/// under pairwise joins.  Fine for the desk-scale orders this library handles.
inline std::vector<std::vector<int>> all_subgroups(const FiniteGroup& g)
{
    std::vector<std::vector<int>> subs;
    auto add = [&subs](std::vector<int> s) {
        if (std::find(subs.begin(), subs.end(), s) == subs.end())
            subs.push_back(std::move(s));
    };
    add({g.identity});
    for (std::size_t e = 0; e < g.order; ++e)
        add(generated_subgroup(g, {static_cast<int>(e)}));
    for (std::size_t i = 0; i < subs.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            std::vector<int> gens = subs[i];
            gens.insert(gens.end(), subs[j].begin(), subs[j].end());
            add(generated_subgroup(g, gens));
        }
    std::sort(subs.begin(), subs.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return subs;
}

inline std::vector<int> conjugate_members(const FiniteGroup& g,
                                          const std::vector<int>& members, int by)
{
    std::vector<int> out;
    out.reserve(members.size());
    for (int m : members) out.push_back(g.conjugate(m, by));
    std::sort(out.begin(), out.end());
    return out;
}

/// One representative per conjugacy class of subgroups, in deterministic
/// (order, member-list) order.  Cohomology is conjugation-invariant, so class
/// representatives suffice everywhere downstream.
inline std::vector<Subgroup> subgroups_up_to_conjugacy(
    const std::shared_ptr<const FiniteGroup>& g)
{
    auto subs = all_subgroups(*g);
    std::vector<std::vector<int>> reps;
    for (const auto& s : subs) {
        bool seen = false;
        for (std::size_t e = 0; e < g->order && !seen; ++e) {
            auto c = conjugate_members(*g, s, static_cast<int>(e));
            if (std::find(reps.begin(), reps.end(), c) != reps.end()) seen = true;
        }
        if (!seen) reps.push_back(s);
    }
    std::vector<Subgroup> out;
    out.reserve(reps.size());
    for (auto& r : reps) out.push_back(Subgroup{g, std::move(r)});
    return out;
}

/// Cyclicity test with generator witness.
struct CyclicWitness {
    bool cyclic = false;
    int generator = -1;
};

inline CyclicWitness is_cyclic(const Subgroup& h)
{
    for (int m : h.members)
        if (h.parent->element_order(m) == h.order()) return {true, m};
    return {false, -1};
}

/// Realize a subgroup as a FiniteGroup of its own (members reindexed in sorted
/// member order; index 0 is the identity because the identity sorts first).
inline std::shared_ptr<FiniteGroup> subgroup_as_group(const Subgroup& h)
{
    const FiniteGroup& g = *h.parent;
    auto sg = std::make_shared<FiniteGroup>();
    std::size_t n = h.members.size();
    std::map<int, int> idx;
    for (std::size_t i = 0; i < n; ++i) idx[h.members[i]] = static_cast<int>(i);
    verify(h.members[0] == g.identity, "subgroup member list must contain identity first");
    sg->order = n;
    sg->identity = 0;
    sg->mult.assign(n, std::vector<int>(n));
    sg->inverse.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            auto it = idx.find(g.op(h.members[i], h.members[j]));
            verify(it != idx.end(), "member list not closed under multiplication");
            sg->mult[i][j] = it->second;
        }
        sg->inverse[i] = idx.at(g.inverse[h.members[i]]);
    }
    for (int gen : small_generating_set(g, h.members)) sg->generators.push_back(idx.at(gen));
    if (sg->generators.empty()) sg->generators.push_back(0);
    return sg;
}

inline Subgroup full_subgroup(const std::shared_ptr<const FiniteGroup>& g)
{
    std::vector<int> members(g->order);
    std::iota(members.begin(), members.end(), 0);
    return Subgroup{g, members};
}

inline Subgroup trivial_subgroup(const std::shared_ptr<const FiniteGroup>& g)
{
    return Subgroup{g, {g->identity}};
}

} // namespace latcert
