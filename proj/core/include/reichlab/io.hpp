#pragma once

// File formats: quasilattices as JSON, point sets and tables as CSV.
// All writers use shortest round-trip number formatting, so equal inputs give
// byte-identical files. Failures to open, read or parse throw IoError.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reichlab/lattice.hpp"
#include "reichlab/reich.hpp"

namespace reichlab::io {

inline constexpr std::string_view kSchemaVersion = "1.0";

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// {"seed": ..., "delta": ..., "window": {"k_min", "k_max", "l_min", "l_max"},
//  "offsets": [[re, im], ...]} with offsets row-major over the window.
std::string quasilattice_to_json(const lattice::Quasilattice& lattice);
lattice::Quasilattice quasilattice_from_json(std::string_view text);

// Columns re,im with a header line.
std::vector<Complex> read_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path, std::span<const Complex> points);

struct AtomRow {
    long k, l;
    double decay_C;
    Complex sample_value;  // P_{k,l} at z_{k,l} + (1 + i) / 4, a point of Omega
};

// Columns k,l,decay_C,sample_re,sample_im.
void write_atoms_csv(const std::filesystem::path& path, std::span<const AtomRow> rows);
std::vector<AtomRow> read_atoms_csv(const std::filesystem::path& path);

// Columns n,K,cell,value,bound,verdict with cell written "k:l" and K empty for condition-2 rows.
void write_condition_csv(const std::filesystem::path& path, std::span<const reich::CellRow> rows,
                         bool with_k);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace reichlab::io
