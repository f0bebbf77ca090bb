#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <random>

#include "json.hpp"
#include "reichlab/bergman.hpp"
#include "reichlab/fuchsian.hpp"
#include "reichlab/geom.hpp"
#include "reichlab/io.hpp"
#include "reichlab/lattice.hpp"
#include "reichlab/partition.hpp"
#include "reichlab/reich.hpp"

namespace reichlab::cli {

namespace {

using nlohmann::ordered_json;
constexpr double kPi = geom::kPi;

// Uniform draw in [0, 1) that does not depend on the standard library's distributions.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    Complex disk_point(double radius) {
        const double r = radius * std::sqrt((*this)());
        return std::polar(r, 2.0 * kPi * (*this)());
    }

private:
    std::mt19937_64 gen_;
};

fuchsian::FuchsianGroup make_group(GroupKind kind, double cyclic_length) {
    switch (kind) {
        case GroupKind::cyclic: return fuchsian::cyclic_group(cyclic_length);
        case GroupKind::gamma2: return fuchsian::gamma2_group();
        case GroupKind::trivial: break;
    }
    return fuchsian::trivial_group();
}

ordered_json point_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

// A finite double for JSON, which has no infinities.
ordered_json number_json(double x) {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

ordered_json window_json(const lattice::IndexWindow& w) {
    return {{"k_min", w.k_min}, {"k_max", w.k_max}, {"l_min", w.l_min}, {"l_max", w.l_max}};
}

ordered_json model_json(const RunConfig& config, const partition::SurfaceModel& model) {
    ordered_json j;
    j["kind"] = std::string(partition::to_string(model.kind()));
    j["window"] = window_json(model.window());
    j["word_depth"] = config.model.word_depth;
    j["cyclic_length"] = config.model.cyclic_length;
    j["puncture_radius"] = config.model.puncture_radius;
    j["seed"] = config.model.seed;
    j["delta"] = config.model.delta;
    j["r0"] = config.model.r0;
    j["s0"] = model.s0();
    j["chart_center"] = point_json(model.chart_center());
    j["chart_scale"] = model.chart_scale();
    j["audit_radius"] = model.audit_radius();
    return j;
}

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

ordered_json header(const char* command) {
    ordered_json j;
    j["schema_version"] = std::string(io::kSchemaVersion);
    j["command"] = command;
    return j;
}

// Outcome of one kernel-check entry.
struct CheckTally {
    bool passed = true;
    bool certified = true;
    ordered_json checks = ordered_json::array();

    void add(ordered_json entry, bool pass) {
        entry["pass"] = pass;
        passed = passed && pass;
        checks.push_back(std::move(entry));
    }
    void uncertified(const std::string& name, const std::string& what) {
        certified = false;
        checks.push_back({{"name", name}, {"certified", false}, {"message", what}, {"pass", false}});
    }
};

template <typename Body>
void guarded_check(CheckTally& tally, const std::string& name, Body&& body) {
    try {
        body();
    } catch (const ToleranceNotMet& e) {
        tally.uncertified(name, e.what());
    } catch (const ConvergenceError& e) {
        tally.uncertified(name, e.what());
    } catch (const IntegrabilityError& e) {
        tally.uncertified(name, e.what());
    }
}

int verdict(bool passed, bool certified) {
    if (!passed && certified) return kContractFailure;
    if (!certified) return kNotCertified;
    return kPass;
}

}  // namespace

int cmd_kernel_check(const RunConfig& config, std::ostream& log) {
    ensure_out_dir(config.out_dir);
    const auto group = make_group(config.kernel_group, config.model.cyclic_length);
    Uniform uniform(config.kernel_seed);
    CheckTally tally;

    {
        double worst = 0.0;
        for (std::size_t i = 0; i < config.kernel_trials; ++i) {
            const auto a = geom::MobiusMap::make(std::polar(1.0, 2.0 * kPi * uniform()), uniform.disk_point(0.9));
            const Complex z = uniform.disk_point(0.9);
            const Complex w = uniform.disk_point(0.9);
            worst = std::max(worst, bergman::invariance_residual(a, z, w));
        }
        tally.add({{"name", "kernel_invariance"}, {"trials", config.kernel_trials}, {"max_residual", worst},
                   {"threshold", 1e-10}},
                  worst < 1e-10);
    }

    struct MassCase {
        const char* label;
        geom::Region region;
        Complex w;
    };
    const MassCase mass_cases[] = {
        {"disk_r0.1_w0", geom::DiskRegion{0.0, 0.1}, 0.0},
        {"square_w0.5", geom::RectRegion{0.2, 0.4, 0.2, 0.4}, 0.5},
        {"sector_w0.3i", geom::AnnulusSector{0.0, 0.2, 0.6, 0.25, 1.25}, Complex(0.0, 0.3)},
    };
    for (const auto& c : mass_cases) {
        guarded_check(tally, std::string("mass_identity_") + c.label, [&] {
            const auto m = bergman::mass_identity_check(c.region, c.w, config.tol);
            const double allowance = m.lhs_error + m.rhs_error + config.tol * (1.0 + std::abs(m.rhs));
            tally.add({{"name", std::string("mass_identity_") + c.label}, {"lhs", m.lhs}, {"rhs", m.rhs},
                       {"difference", std::abs(m.lhs - m.rhs)}, {"allowance", allowance}},
                      std::abs(m.lhs - m.rhs) <= allowance);
        });
    }

    guarded_check(tally, "reproducing_property", [&] {
        const auto disk = fuchsian::trivial_group();
        const double threshold = std::max(1e-7, 10.0 * config.tol);
        const bergman::ProjectionOptions popt{config.tol, 0, config.max_evaluations};
        double worst = 0.0;
        bool certified = true;
        Uniform points(config.kernel_seed + 1);
        for (int trial = 0; trial < 4; ++trial) {
            const Complex z = points.disk_point(0.7);
            for (int k = 0; k <= 5; ++k) {
                const bergman::MeasurableQD f{[k](Complex w) { return std::pow(w, k); }, std::nullopt};
                const auto r = bergman::project_detailed(f, disk, z, popt);
                certified = certified && r.certified;
                worst = std::max(worst, std::abs(r.value - std::pow(z, k)));
            }
        }
        if (!certified) throw ToleranceNotMet("reproducing_property: projection not certified", worst, 0.0);
        tally.add({{"name", "reproducing_property"}, {"max_error", worst}, {"threshold", threshold}},
                  worst < threshold);
    });

    {
        const auto cal = bergman::calibration_report();
        tally.add({{"name", "reproducing_constant"}, {"calibrated", cal.calibrated},
                   {"closed_form", cal.closed_form}, {"nominal", cal.nominal},
                   {"nominal_constant_projection", cal.nominal_constant_projection}},
                  std::abs(cal.calibrated - cal.closed_form) < 1e-10);
    }

    {
        std::vector<std::pair<geom::Region, Complex>> configs;
        if (group.is_trivial()) configs.push_back({geom::AnnulusSector{0.0, 0.9, 1.0, 0.0, 2.0 * kPi}, 0.0});
        Uniform draws(config.kernel_seed + 2);
        while (configs.size() < 6) {
            const Complex c = draws.disk_point(0.5);
            const Complex p = draws.disk_point(0.5);
            const double radius = 0.02 + 0.06 * draws();
            if (std::abs(c - p) < radius + 0.05) continue;
            configs.push_back({geom::DiskRegion{c, radius}, p});
        }
        for (std::size_t i = 0; i < configs.size(); ++i) {
            const std::string name = "kernel_mass_bound_" + std::to_string(i);
            guarded_check(tally, name, [&] {
                try {
                    const auto m = bergman::kernel_mass_bound(group, configs[i].first, configs[i].second,
                                                              config.tol, config.kernel_depth);
                    tally.add({{"name", name}, {"measured", m.measured}, {"tail", m.tail}, {"bound", m.bound},
                               {"distance", m.distance}, {"margin", m.bound - m.measured}},
                              m.measured <= m.bound);
                } catch (const PreconditionError& e) {
                    tally.add({{"name", name}, {"skipped", e.what()}}, true);
                }
            });
        }
    }

    if (!group.is_trivial()) {
        Uniform draws(config.kernel_seed + 3);
        const int deep = config.kernel_depth;
        const int shallow = std::max(3, deep - 4);
        double worst_ratio = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const Complex z = draws.disk_point(0.5);
            const Complex w = draws.disk_point(0.5);
            const auto a = bergman::poincare_kernel(group, z, w, shallow);
            const auto b = bergman::poincare_kernel(group, z, w, deep);
            const double diff = std::abs(a.value - b.value);
            worst_ratio = std::max(worst_ratio, a.tail_bound > 0.0 ? diff / a.tail_bound
                                                                   : (diff > 0.0 ? 1e300 : 0.0));
        }
        tally.add({{"name", "truncation_certificate"}, {"shallow_depth", shallow}, {"deep_depth", deep},
                   {"max_difference_over_tail", worst_ratio}},
                  worst_ratio <= 1.0);
    }

    auto report = header("kernel-check");
    report["group"] = std::string(to_string(config.kernel_group));
    report["tol"] = config.tol;
    report["max_evaluations"] = config.max_evaluations;
    report["checks"] = tally.checks;
    report["certified"] = tally.certified;
    report["passed"] = tally.passed && tally.certified;
    io::write_text(config.out_dir / "kernel_report.json", report.dump(2) + "\n");
    log << "kernel-check: " << tally.checks.size() << " checks, "
        << (tally.passed ? "all contracts hold" : "contract failure")
        << (tally.certified ? "" : ", some results not certified") << "\n";
    return verdict(tally.passed, tally.certified);
}

int cmd_partition_build(const RunConfig& config, std::ostream& log) {
    ensure_out_dir(config.out_dir);
    const partition::SurfaceModel model(config.model);
    auto report = header("partition-build");
    report["model"] = model_json(config, model);
    report["tol"] = config.tol;

    std::vector<partition::PartitionAtom> atoms;
    try {
        atoms = partition::build_atoms(model, config.tol);
    } catch (const IndexedError& e) {
        report["failure"] = {{"k", e.k()}, {"l", e.l()}, {"message", e.what()}};
        report["passed"] = false;
        io::write_text(config.out_dir / "partition_report.json", report.dump(2) + "\n");
        log << "partition-build: atom (" << e.k() << ", " << e.l() << ") failed: " << e.what() << "\n";
        return dynamic_cast<const EnvelopeViolation*>(&e) ? kContractFailure : kNotCertified;
    }

    std::vector<io::AtomRow> rows;
    double max_c = 0.0;
    std::size_t nonempty = 0;
    bool finite = true;
    for (const auto& a : atoms) {
        const Complex sample = lattice::lattice_point(a.k, a.l) + Complex(0.25, 0.25);
        Complex value = std::numeric_limits<double>::quiet_NaN();
        if (model.contains(sample)) value = a.evaluator(sample);
        rows.push_back({a.k, a.l, a.decay_C, value});
        max_c = std::max(max_c, a.decay_C);
        finite = finite && std::isfinite(a.decay_C);
        if (model.cell_nonempty(a.k, a.l)) ++nonempty;
    }
    io::write_atoms_csv(config.out_dir / "atoms.csv", rows);
    if (model.quasilattice()) {
        io::write_text(config.out_dir / "lattice.json", io::quasilattice_to_json(*model.quasilattice()));
    }

    // Decay certificates at every fitting sample.
    const auto samples = partition::omega_grid(model);
    std::size_t violations = 0, explicit_violations = 0;
    ordered_json violators = ordered_json::array();
    for (const auto& a : atoms) {
        if (!model.cell_nonempty(a.k, a.l)) continue;
        const auto audit = partition::pestimate_audit(model, a, samples);
        violations += audit.violations;
        for (const auto& s : audit.samples) explicit_violations += s.magnitude > s.explicit_envelope ? 1 : 0;
        if (audit.witness) violators.push_back({{"k", a.k}, {"l", a.l}, {"z", point_json(*audit.witness)}});
    }

    // Partition sum against the projection of the window indicator.
    std::vector<Complex> audit_points;
    for (const auto& z : samples) {
        if (model.in_audit_region(z)) audit_points.push_back(z);
    }
    if (audit_points.empty()) audit_points = samples;
    std::vector<Complex> chosen;
    if (!audit_points.empty()) {
        const std::size_t count = std::min(config.sum_points, audit_points.size());
        for (std::size_t i = 0; i < count; ++i) chosen.push_back(audit_points[i * audit_points.size() / count]);
    }
    ordered_json sum_rows = ordered_json::array();
    bool sums_pass = true;
    double max_difference = 0.0;
    for (const auto& z : chosen) {
        double farthest = 0.0;
        const auto& w = model.window();
        for (long l = w.l_min; l <= w.l_max; ++l) {
            for (long k = w.k_min; k <= w.k_max; ++k) {
                farthest = std::max(farthest, std::abs(z - lattice::lattice_point(k, l)));
            }
        }
        const double radius = config.sum_radius ? std::min(*config.sum_radius, farthest) : farthest;
        const auto sum = partition::partition_sum(model, atoms, z, radius);
        const Complex target = partition::window_projection(model, z, config.tol);
        const double difference = std::abs(sum.value - target);
        const double allowance = sum.tail_bound + 2.0 * config.tol;
        const bool pass = difference <= allowance;
        sums_pass = sums_pass && pass;
        max_difference = std::max(max_difference, difference);
        sum_rows.push_back({{"z", point_json(z)}, {"value", point_json(sum.value)}, {"target", point_json(target)},
                            {"difference", difference}, {"tail_bound", sum.tail_bound},
                            {"allowance", allowance}, {"atoms_used", sum.atoms_used}, {"pass", pass}});
    }

    const bool passed = finite && violations == 0 && sums_pass;
    report["atoms"] = {{"count", atoms.size()}, {"nonempty", nonempty}, {"max_decay_C", max_c},
                       {"explicit_C", partition::pestimate_constant(model.s0())}, {"all_finite", finite}};
    report["decay_audit"] = {{"samples", samples.size()}, {"violations", violations},
                             {"explicit_envelope_violations", explicit_violations}, {"violators", violators}};
    report["sum_audit"] = {{"points", sum_rows}, {"max_difference", max_difference}, {"pass", sums_pass}};
    report["passed"] = passed;
    io::write_text(config.out_dir / "partition_report.json", report.dump(2) + "\n");
    log << "partition-build: " << atoms.size() << " atoms, max decay_C " << max_c << ", " << violations
        << " decay violations, sum audit " << (sums_pass ? "pass" : "fail") << "\n";
    return passed ? kPass : kContractFailure;
}

int cmd_reich_audit(const RunConfig& config, std::ostream& log) {
    const auto atoms_path = config.out_dir / "atoms.csv";
    if (!std::filesystem::exists(atoms_path)) {
        log << "reich-audit: " << atoms_path.string()
            << " not found; run `reichlab partition-build` with the same config first\n";
        return kIoError;
    }
    const auto rows = io::read_atoms_csv(atoms_path);
    const partition::SurfaceModel model(config.model);
    if (rows.size() != model.window().count()) {
        throw ConfigError("atoms.csv has " + std::to_string(rows.size()) + " rows but the configured window has " +
                          std::to_string(model.window().count()) + " cells");
    }
    std::vector<long> ks, ls;
    std::vector<double> cs;
    for (const auto& r : rows) {
        ks.push_back(r.k);
        ls.push_back(r.l);
        cs.push_back(r.decay_C);
    }
    std::vector<partition::PartitionAtom> atoms;
    try {
        atoms = partition::attach_atoms(model, ks, ls, cs, config.tol);
    } catch (const IndexedError& e) {
        throw ConfigError(std::string("atoms.csv does not match the configured model: ") + e.what());
    }

    reich::AuditOptions options;
    options.n_list = config.n_list;
    options.k_list = config.k_list;
    options.tol = config.tol;
    const auto r = reich::reich_audit(model, atoms, options);

    auto report = header("reich-audit");
    report["model"] = model_json(config, model);
    report["tol"] = config.tol;
    report["n_values"] = r.n_values;
    report["k_values"] = r.k_values;
    report["constants"] = {{"partition_C", r.partition_C}, {"majorant_C", number_json(r.majorant_C)},
                           {"C1", r.c1}, {"C2", r.c2}, {"n_threshold", r.n_threshold},
                           {"max_residue", r.max_residue}};
    report["target_range"] = {r.target_min, r.target_max};
    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) cells.push_back({c.k, c.l});
    report["audited_cells"] = cells;
    ordered_json c1 = ordered_json::array();
    for (const auto& row : r.condition1) {
        c1.push_back({{"n", row.n}, {"max_deviation", row.max_deviation}, {"witness", point_json(row.witness)},
                      {"weight_ratio", row.weight_ratio}, {"pass", row.pass}});
    }
    ordered_json c2 = ordered_json::array();
    for (const auto& row : r.condition2) {
        c2.push_back({{"n", row.n}, {"total", row.total}, {"quadrature_error", row.quadrature_error},
                      {"comparison", row.comparison}, {"cells_failed", row.cells_failed}});
    }
    ordered_json c3 = ordered_json::array();
    for (const auto& row : r.condition3) {
        c3.push_back({{"n", row.n}, {"K", row.K}, {"omega_max", row.omega_max}, {"omega_empty", row.omega_empty},
                      {"total", row.total}, {"bound", row.bound}});
    }
    report["condition1"] = {{"rows", c1}, {"pass", r.condition1_pass}};
    report["condition2"] = {{"rows", c2}, {"slope", r.condition2_slope}, {"pass", r.condition2_pass}};
    report["condition3"] = {{"rows", c3}, {"pass", r.condition3_pass}};
    report["warnings"] = r.warnings;
    report["witness"] = r.witness ? ordered_json(*r.witness) : ordered_json(nullptr);
    const bool passed = r.condition1_pass && r.condition2_pass && r.condition3_pass;
    report["passed"] = passed;

    io::write_text(config.out_dir / "report.json", report.dump(2) + "\n");
    io::write_condition_csv(config.out_dir / "condition2.csv", r.condition2_cells, false);
    io::write_condition_csv(config.out_dir / "condition3.csv", r.condition3_cells, true);
    for (const auto& w : r.warnings) log << "warning: " << w << "\n";
    log << "reich-audit: condition 1 " << (r.condition1_pass ? "pass" : "fail") << ", condition 2 "
        << (r.condition2_pass ? "pass" : "fail") << " (slope " << r.condition2_slope << "), condition 3 "
        << (r.condition3_pass ? "pass" : "fail") << "\n";
    if (r.witness) log << "witness: " << *r.witness << "\n";
    return passed ? kPass : kContractFailure;
}

int run_guarded(int (*command)(const RunConfig&, std::ostream&), const RunConfig& config, std::ostream& log) {
    try {
        return command(config, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        log << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const ToleranceNotMet& e) {
        log << "not certified: " << e.what() << "\n";
        return kNotCertified;
    } catch (const ConvergenceError& e) {
        log << "not certified: " << e.what() << "\n";
        return kNotCertified;
    } catch (const IntegrabilityError& e) {
        log << "not certified: " << e.what() << "\n";
        return kNotCertified;
    } catch (const Error& e) {
        log << "contract failure: " << e.what() << "\n";
        return kContractFailure;
    }
}

}  // namespace reichlab::cli
