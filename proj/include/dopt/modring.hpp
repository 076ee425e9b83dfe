#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dopt/block.hpp"
#include "dopt/params.hpp"

namespace dopt {

inline Int gcd_int(Int a, Int b) { return std::gcd(a, b); }

/// A multiplicatively closed set of units mod v. Always contains 1 (mod v)
/// and, being finite, is closed under inverses.
struct UnitSubgroup {
    Int v = 1;
    std::vector<Int> elements;  // sorted

    Int order() const { return static_cast<Int>(elements.size()); }
    bool contains(Int e) const {
        return std::binary_search(elements.begin(), elements.end(), e);
    }
};

/// Validates the given element set as a unit subgroup. The set is taken as
/// printed: it is not closed up, a non-closed set is an error.
inline UnitSubgroup subgroup_from_elements(Int v, std::vector<Int> elems) {
    if (v < 1) throw std::invalid_argument("subgroup_from_elements: modulus must be positive");
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    for (Int e : elems) {
        if (e < 0 || e >= v)
            throw std::invalid_argument("subgroup_from_elements: residue " + std::to_string(e) +
                                        " out of range mod " + std::to_string(v));
        if (gcd_int(e, v) != 1)
            throw std::invalid_argument("subgroup_from_elements: " + std::to_string(e) +
                                        " is not a unit mod " + std::to_string(v));
    }
    UnitSubgroup H{v, std::move(elems)};
    if (!H.contains(1 % v))
        throw std::invalid_argument("subgroup_from_elements: identity element missing");
    for (Int a : H.elements)
        for (Int b : H.elements)
            if (!H.contains(a * b % v))
                throw std::invalid_argument("subgroup_from_elements: not closed, " +
                                            std::to_string(a) + "*" + std::to_string(b) +
                                            " = " + std::to_string(a * b % v) + " missing");
    return H;
}

/// Smallest subgroup containing the generators.
inline UnitSubgroup subgroup_generated(Int v, const std::vector<Int>& gens) {
    if (v < 1) throw std::invalid_argument("subgroup_generated: modulus must be positive");
    for (Int g : gens) {
        if (g < 0 || g >= v)
            throw std::invalid_argument("subgroup_generated: generator out of range");
        if (gcd_int(g, v) != 1)
            throw std::invalid_argument("subgroup_generated: " + std::to_string(g) +
                                        " is not a unit mod " + std::to_string(v));
    }
    std::set<Int> closure{1 % v};
    std::vector<Int> frontier(closure.begin(), closure.end());
    for (Int g : gens)
        if (closure.insert(g).second) frontier.push_back(g);
    while (!frontier.empty()) {
        const Int a = frontier.back();
        frontier.pop_back();
        for (Int b : std::vector<Int>(closure.begin(), closure.end())) {
            const Int c = a * b % v;
            if (closure.insert(c).second) frontier.push_back(c);
        }
    }
    return UnitSubgroup{v, {closure.begin(), closure.end()}};
}

/// One orbit of the multiplicative action of H on Z_v.
struct Orbit {
    Int representative = 0;  // least member
    std::vector<Int> members;

    Int size() const { return static_cast<Int>(members.size()); }
};

inline Orbit orbit_of(const UnitSubgroup& H, Int i) {
    if (i < 0 || i >= H.v) throw std::invalid_argument("orbit_of: residue out of range");
    std::set<Int> mem;
    for (Int h : H.elements) mem.insert(h * i % H.v);
    Orbit o;
    o.members.assign(mem.begin(), mem.end());
    o.representative = o.members.front();
    return o;
}

/// All orbits, sorted by representative; they partition Z_v.
inline std::vector<Orbit> orbit_partition(const UnitSubgroup& H) {
    std::vector<bool> seen(static_cast<size_t>(H.v), false);
    std::vector<Orbit> parts;
    for (Int i = 0; i < H.v; ++i) {
        if (seen[static_cast<size_t>(i)]) continue;
        Orbit o = orbit_of(H, i);
        for (Int m : o.members) seen[static_cast<size_t>(m)] = true;
        parts.push_back(std::move(o));
    }
    return parts;
}

/// Union of the orbits of the given representatives. Two representatives in
/// one orbit are tolerated with a diagnostic, not an error.
inline Block expand_union(const UnitSubgroup& H, const std::vector<Int>& reps,
                          std::vector<std::string>* warnings = nullptr) {
    std::set<Int> out;
    std::vector<Int> owner(static_cast<size_t>(H.v), -1);
    for (Int rep : reps) {
        Orbit o = orbit_of(H, rep);
        if (owner[static_cast<size_t>(o.representative)] >= 0) {
            if (warnings)
                warnings->push_back("representatives " +
                                    std::to_string(owner[static_cast<size_t>(o.representative)]) +
                                    " and " + std::to_string(rep) + " lie in the same orbit");
        }
        owner[static_cast<size_t>(o.representative)] = rep;
        out.insert(o.members.begin(), o.members.end());
    }
    return Block(H.v, {out.begin(), out.end()});
}

}  // namespace dopt
