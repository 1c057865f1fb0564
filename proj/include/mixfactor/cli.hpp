#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mixfactor/mixed_table.hpp"

namespace mixfactor {

/// Configuration of one analysis run (pcamix, pcarot, mfamix or predict).
struct RunConfig {
    std::string subcommand;  // pcamix | pcarot | mfamix | predict
    std::string data_path;
    std::string groups_path;   // mfamix, or predict through an MFAmix model
    std::string newdata_path;  // predict; defaults to data_path
    long ndim = -1;            // -1: all components (pcamix) or min(5, rank) (mfamix)
    long k = 0;                // rotation dims; >= 2 selects PCArot
    std::string out_dir = ".";
    bool plots = false;
    bool rename_levels = false;
    std::string id_col;
    std::map<std::string, VarKind> type_overrides;
    double rank_tol = 1e-10;
    double angle_tol = 1e-8;
};

/// Executes a run and writes its artifact files; returns the process exit
/// code (0 ok, 1 I/O, 2 schema/contract, 3 numeric).
int run(const RunConfig& config);

/// Full command line including the synth subcommand. `args` excludes the
/// program name.
int run_main(const std::vector<std::string>& args);

/// Parses a two-column (variable,group) CSV.
std::vector<std::pair<std::string, std::string>> read_group_map(const std::string& path);

}  // namespace mixfactor
