#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dopt/params.hpp"

namespace dopt {

/// A set of residues mod v, kept sorted with a bitset shadow for O(1)
/// membership tests.
struct Block {
    Int v = 1;
    std::vector<Int> members;
    std::vector<bool> mask;

    Block() : mask(1, false) {}

    Block(Int modulus, std::vector<Int> elems) : v(modulus), members(std::move(elems)) {
        if (v < 1) throw std::invalid_argument("Block: modulus must be positive");
        std::sort(members.begin(), members.end());
        mask.assign(static_cast<size_t>(v), false);
        Int prev = -1;
        for (Int e : members) {
            if (e < 0 || e >= v)
                throw std::invalid_argument("Block: residue " + std::to_string(e) +
                                            " out of range mod " + std::to_string(v));
            if (e == prev)
                throw std::invalid_argument("Block: duplicate residue " + std::to_string(e));
            prev = e;
            mask[static_cast<size_t>(e)] = true;
        }
    }

    Int size() const { return static_cast<Int>(members.size()); }
    bool contains(Int e) const { return mask[static_cast<size_t>(e)]; }

    friend bool operator==(const Block& a, const Block& b) {
        return a.v == b.v && a.members == b.members;
    }
};

inline Block translate(const Block& b, Int g) {
    g = ((g % b.v) + b.v) % b.v;
    std::vector<Int> out;
    out.reserve(b.members.size());
    for (Int e : b.members) out.push_back((e + g) % b.v);
    return Block(b.v, std::move(out));
}

/// {mu*e mod v}. Collapses elements unless mu is a unit.
inline Block scale(const Block& b, Int mu) {
    mu = ((mu % b.v) + b.v) % b.v;
    std::vector<Int> out;
    out.reserve(b.members.size());
    for (Int e : b.members) out.push_back((e * mu) % b.v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return Block(b.v, std::move(out));
}

}  // namespace dopt
