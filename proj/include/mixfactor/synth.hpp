#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixfactor/mfamix.hpp"
#include "mixfactor/mixed_table.hpp"

namespace mixfactor {

struct SynthGroupSpec {
    std::string name;
    int n_numeric = 0;
    std::vector<int> level_counts;  // one entry per categorical variable
};

/// Seeded generator of mixed tables with block-correlation structure:
/// within a group every variable loads on a shared latent factor with
/// strength `correlation`; categoricals are produced by rank-thresholding
/// their latent variable into near-equal level bins, so every level is
/// observed and the correlation ratios rise monotonically with the
/// strength.
struct SynthSpec {
    int n_rows = 200;
    double correlation = 0.5;  // in [0, 1)
    std::uint64_t seed = 1;
    std::vector<SynthGroupSpec> groups;

    /// Four groups of 9/5/9/4 variables (group 2 mixes 3 numerics with 2
    /// binary categoricals, group 3 is nine 3-level categoricals).
    static SynthSpec default_spec();

    void validate() const;  // SchemaError when infeasible

    int total_numeric() const;
    int total_levels() const;
};

struct SynthResult {
    MixedTable table;
    GroupMap group_map;
};

SynthResult generate(const SynthSpec& spec);

/// Parses the JSON spec accepted by `mixfactor synth --spec`.
SynthSpec parse_synth_spec(const std::string& json_text);

}  // namespace mixfactor
