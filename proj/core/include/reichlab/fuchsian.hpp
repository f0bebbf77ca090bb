#pragma once

// Finitely generated Fuchsian groups given by explicit generators, with
// orbit enumeration over reduced words.

#include <cstddef>
#include <string>
#include <vector>

#include "reichlab/geom.hpp"

namespace reichlab::fuchsian {

using geom::MobiusMap;

class FuchsianGroup {
public:
    // A group described only by generators. enumerate_orbit refuses it unless
    // it is marked free (no relations besides g g^-1 = 1).
    FuchsianGroup(std::vector<MobiusMap> generators, std::string label, bool free_group);

    const std::vector<MobiusMap>& generators() const noexcept { return generators_; }
    const std::string& label() const noexcept { return label_; }
    bool is_free() const noexcept { return free_; }
    bool is_trivial() const noexcept { return generators_.empty(); }

    // Letters are generators and their inverses: letter 2i is g_i, 2i + 1 is g_i^-1.
    std::size_t letter_count() const noexcept { return 2 * generators_.size(); }
    const MobiusMap& letter(std::size_t index) const { return letters_[index]; }
    static std::size_t inverse_letter(std::size_t index) { return index ^ 1U; }

    // Number of reduced words of length <= max_word_length.
    std::size_t word_count(int max_word_length) const;

private:
    std::vector<MobiusMap> generators_;
    std::vector<MobiusMap> letters_;
    std::string label_;
    bool free_;
};

FuchsianGroup trivial_group();

// <A> with A the hyperbolic translation along the real diameter moving 0 to tanh(length).
FuchsianGroup cyclic_group(double translation_length);

// Level-2 congruence group generated by tau -> tau + 2 and tau -> tau / (2 tau + 1),
// conjugated to the disk by the Cayley map tau -> (tau - i) / (tau + i).
FuchsianGroup gamma2_group();

// Cayley map from the upper half-plane to the disk and its inverse.
Complex cayley(Complex tau);
Complex cayley_inverse(Complex z);

struct OrbitEntry {
    int word_length;
    Complex image;       // A(z)
    Complex derivative;  // A'(z)
};

struct WordOrbit {
    Complex base;
    std::vector<OrbitEntry> elements;
    // shell_offsets[k] is the index of the first word of length k; one past the end at back().
    std::vector<std::size_t> shell_offsets;
};

// All reduced words up to max_word_length, ordered by length and then
// lexicographically in letter indices (the word x1 x2 ... xk is the map
// x1 o x2 o ... o xk). Throws UnsupportedGroup for groups not marked free.
WordOrbit enumerate_orbit(const FuchsianGroup& group, Complex z, int max_word_length);

// Reduced words themselves (letter indices, leftmost letter first), same order as enumerate_orbit.
std::vector<std::vector<std::size_t>> enumerate_words(const FuchsianGroup& group,
                                                      int max_word_length);

// Composes a word into a single map.
MobiusMap word_map(const FuchsianGroup& group, const std::vector<std::size_t>& word);

// Half the smallest displacement d(z, A z) over nontrivial words up to the
// given length: the radius of a hyperbolic ball around z that embeds in the
// quotient as far as those words can tell. Infinite for the trivial group.
double embedded_radius(const FuchsianGroup& group, Complex z, int max_word_length);

}  // namespace reichlab::fuchsian
