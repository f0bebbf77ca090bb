#include "reichlab/fuchsian.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace reichlab::fuchsian {

namespace {

using Matrix = std::array<Complex, 4>;

Matrix multiply(const Matrix& p, const Matrix& q) {
    return {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2],
            p[2] * q[1] + p[3] * q[3]};
}

// Conjugates an upper half-plane map by the Cayley transform.
MobiusMap from_half_plane(const Matrix& g) {
    const Complex i(0.0, 1.0);
    const Matrix c = {1.0, -i, 1.0, i};
    const Matrix c_inv = {i, i, -1.0, 1.0};  // inverse up to the scalar 1 / (2i)
    const Matrix m = multiply(multiply(c, g), c_inv);
    return MobiusMap::from_matrix(m[0], m[1], m[2], m[3]);
}

}  // namespace

FuchsianGroup::FuchsianGroup(std::vector<MobiusMap> generators, std::string label, bool free_group)
    : generators_(std::move(generators)), label_(std::move(label)), free_(free_group) {
    letters_.reserve(2 * generators_.size());
    for (const auto& g : generators_) {
        letters_.push_back(g);
        letters_.push_back(g.inverse());
    }
}

std::size_t FuchsianGroup::word_count(int max_word_length) const {
    if (max_word_length < 0) return 0;
    const std::size_t letters = letter_count();
    if (letters == 0) return 1;
    std::size_t total = 1;
    std::size_t level = letters;
    for (int k = 1; k <= max_word_length; ++k) {
        total += level;
        level *= letters - 1;
    }
    return total;
}

FuchsianGroup trivial_group() { return FuchsianGroup({}, "trivial", true); }

FuchsianGroup cyclic_group(double translation_length) {
    if (!(translation_length > 0.0) || !std::isfinite(translation_length)) {
        throw DomainError("cyclic_group: translation length must be positive");
    }
    // z -> (z + t) / (1 + t z) moves 0 to t = tanh(length) along the real diameter.
    const double t = std::tanh(translation_length);
    return FuchsianGroup({MobiusMap::make(1.0, -t)}, "cyclic", true);
}

FuchsianGroup gamma2_group() {
    const MobiusMap shift = from_half_plane({1.0, 2.0, 0.0, 1.0});
    const MobiusMap lower = from_half_plane({1.0, 0.0, 2.0, 1.0});
    return FuchsianGroup({shift, lower}, "gamma2-conjugate", true);
}

Complex cayley(Complex tau) {
    const Complex i(0.0, 1.0);
    return (tau - i) / (tau + i);
}

Complex cayley_inverse(Complex z) {
    const Complex i(0.0, 1.0);
    return i * (1.0 + z) / (1.0 - z);
}

std::vector<std::vector<std::size_t>> enumerate_words(const FuchsianGroup& group,
                                                      int max_word_length) {
    if (!group.is_free()) throw UnsupportedGroup("enumerate_words: group is not marked free");
    if (max_word_length < 0) throw DomainError("enumerate_words: negative word length");
    std::vector<std::vector<std::size_t>> words = {{}};
    std::size_t prev_begin = 0;
    std::size_t prev_end = 1;
    for (int k = 1; k <= max_word_length && group.letter_count() > 0; ++k) {
        for (std::size_t x = 0; x < group.letter_count(); ++x) {
            for (std::size_t w = prev_begin; w < prev_end; ++w) {
                const auto& tail = words[w];
                if (!tail.empty() && tail.front() == FuchsianGroup::inverse_letter(x)) continue;
                std::vector<std::size_t> word;
                word.reserve(tail.size() + 1);
                word.push_back(x);
                word.insert(word.end(), tail.begin(), tail.end());
                words.push_back(std::move(word));
            }
        }
        prev_begin = prev_end;
        prev_end = words.size();
    }
    return words;
}

MobiusMap word_map(const FuchsianGroup& group, const std::vector<std::size_t>& word) {
    MobiusMap m = MobiusMap::identity();
    for (auto it = word.rbegin(); it != word.rend(); ++it) m = group.letter(*it) * m;
    return m;
}

WordOrbit enumerate_orbit(const FuchsianGroup& group, Complex z, int max_word_length) {
    geom::require_disk_point(z, "enumerate_orbit");
    if (!group.is_free()) {
        throw UnsupportedGroup("enumerate_orbit: group '" + group.label() +
                               "' has relations beyond free reduction");
    }
    if (max_word_length < 0) throw DomainError("enumerate_orbit: negative word length");
    WordOrbit orbit;
    orbit.base = z;
    orbit.elements.reserve(group.word_count(max_word_length));
    orbit.elements.push_back({0, z, 1.0});
    orbit.shell_offsets = {0, 1};
    // First letter of each entry, to enforce free reduction when prepending.
    std::vector<std::size_t> first_letter = {std::numeric_limits<std::size_t>::max()};
    first_letter.reserve(orbit.elements.capacity());
    for (int k = 1; k <= max_word_length; ++k) {
        const std::size_t begin = orbit.shell_offsets[k - 1];
        const std::size_t end = orbit.shell_offsets[k];
        for (std::size_t x = 0; x < group.letter_count(); ++x) {
            const MobiusMap& a = group.letter(x);
            const std::size_t forbidden = FuchsianGroup::inverse_letter(x);
            for (std::size_t w = begin; w < end; ++w) {
                if (first_letter[w] == forbidden) continue;
                const OrbitEntry& e = orbit.elements[w];
                orbit.elements.push_back({k, a(e.image), a.derivative(e.image) * e.derivative});
                first_letter.push_back(x);
            }
        }
        orbit.shell_offsets.push_back(orbit.elements.size());
    }
    return orbit;
}

double embedded_radius(const FuchsianGroup& group, Complex z, int max_word_length) {
    if (group.is_trivial()) return std::numeric_limits<double>::infinity();
    const auto orbit = enumerate_orbit(group, z, max_word_length);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < orbit.elements.size(); ++i) {
        const Complex img = orbit.elements[i].image;
        if (std::norm(img) >= 1.0) continue;
        best = std::min(best, geom::disk_distance(z, img));
    }
    return 0.5 * best;
}

}  // namespace reichlab::fuchsian
