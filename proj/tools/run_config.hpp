#pragma once

// Run configuration shared by the reichlab subcommands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reichlab/errors.hpp"
#include "reichlab/partition.hpp"
#include "reichlab/reich.hpp"

namespace reichlab::cli {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class GroupKind { trivial, cyclic, gamma2 };

struct RunConfig {
    partition::ModelOptions model;
    long window_size = 8;            // centered window_size x window_size cells
    double tol = 1e-8;
    std::size_t max_evaluations = 1'000'000;
    std::vector<long> n_list = reich::AuditOptions{}.n_list;
    std::vector<double> k_list = reich::AuditOptions{}.k_list;
    std::optional<double> sum_radius;  // partition_sum truncation; every cell when unset
    std::size_t sum_points = 25;
    GroupKind kernel_group = GroupKind::trivial;
    int kernel_depth = 8;
    std::size_t kernel_trials = 1000;
    std::uint64_t kernel_seed = 1;
    std::filesystem::path out_dir = "reichlab_out";
};

std::string_view to_string(GroupKind kind);
GroupKind parse_group_kind(std::string_view name);

// Throws ConfigError on malformed JSON, unknown keys or values outside their range.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

// Range checks applied after command-line overrides.
void validate(RunConfig& config);

}  // namespace reichlab::cli
