#include "reichlab/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace reichlab::io {

namespace {

using nlohmann::json;

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    for (auto& field : out) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    }
    return out;
}

double parse_double(const std::string& text, const std::filesystem::path& path) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw IoError("cannot parse number '" + text + "' in " + path.string());
    }
    return value;
}

long parse_long(const std::string& text, const std::filesystem::path& path) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw IoError("cannot parse integer '" + text + "' in " + path.string());
    }
    return value;
}

// Data lines of a CSV file after checking its header.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::vector<std::string>& header) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != header) {
        throw IoError("unexpected header in " + path.string());
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split(line, ',');
        if (fields.size() != header.size()) throw IoError("wrong field count in " + path.string());
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

std::string quasilattice_to_json(const lattice::Quasilattice& lattice) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = lattice.seed() ? json(*lattice.seed()) : json(nullptr);
    j["delta"] = lattice.delta();
    const auto& w = lattice.window();
    j["window"] = {{"k_min", w.k_min}, {"k_max", w.k_max}, {"l_min", w.l_min}, {"l_max", w.l_max}};
    json offsets = json::array();
    for (const auto& o : lattice.offsets()) offsets.push_back({o.real(), o.imag()});
    j["offsets"] = std::move(offsets);
    return j.dump(2) + "\n";
}

lattice::Quasilattice quasilattice_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        const auto& jw = j.at("window");
        const lattice::IndexWindow w{jw.at("k_min").get<long>(), jw.at("k_max").get<long>(),
                                     jw.at("l_min").get<long>(), jw.at("l_max").get<long>()};
        std::vector<Complex> offsets;
        for (const auto& o : j.at("offsets")) offsets.emplace_back(o.at(0).get<double>(), o.at(1).get<double>());
        std::optional<std::uint64_t> seed;
        if (j.contains("seed") && !j.at("seed").is_null()) seed = j.at("seed").get<std::uint64_t>();
        return lattice::Quasilattice(w, j.at("delta").get<double>(), std::move(offsets), seed);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed lattice JSON: ") + e.what());
    }
}

std::vector<Complex> read_points_csv(const std::filesystem::path& path) {
    std::vector<Complex> points;
    for (const auto& row : read_csv(path, {"re", "im"})) {
        points.emplace_back(parse_double(row[0], path), parse_double(row[1], path));
    }
    return points;
}

void write_points_csv(const std::filesystem::path& path, std::span<const Complex> points) {
    std::string out = "re,im\n";
    for (const auto& p : points) out += format_double(p.real()) + "," + format_double(p.imag()) + "\n";
    write_text(path, out);
}

void write_atoms_csv(const std::filesystem::path& path, std::span<const AtomRow> rows) {
    std::string out = "k,l,decay_C,sample_re,sample_im\n";
    for (const auto& r : rows) {
        out += std::to_string(r.k) + "," + std::to_string(r.l) + "," + format_double(r.decay_C) + "," +
               format_double(r.sample_value.real()) + "," + format_double(r.sample_value.imag()) + "\n";
    }
    write_text(path, out);
}

std::vector<AtomRow> read_atoms_csv(const std::filesystem::path& path) {
    std::vector<AtomRow> rows;
    for (const auto& f : read_csv(path, {"k", "l", "decay_C", "sample_re", "sample_im"})) {
        rows.push_back({parse_long(f[0], path), parse_long(f[1], path), parse_double(f[2], path),
                        Complex(parse_double(f[3], path), parse_double(f[4], path))});
    }
    return rows;
}

void write_condition_csv(const std::filesystem::path& path, std::span<const reich::CellRow> rows,
                         bool with_k) {
    std::string out = "n,K,cell,value,bound,verdict\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + (with_k ? format_double(r.K) : std::string()) + "," +
               std::to_string(r.k) + ":" + std::to_string(r.l) + "," + format_double(r.value) + "," +
               format_double(r.bound) + "," + (r.pass ? "pass" : "fail") + "\n";
    }
    write_text(path, out);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return buf.str();
}

}  // namespace reichlab::io
