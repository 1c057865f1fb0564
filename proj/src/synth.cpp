#include "mixfactor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

namespace mixfactor {

namespace {

// Gaussian draws from explicitly coded uniforms + Box-Muller, keeping the
// byte stream independent of the standard library's distribution
// implementations.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Splits rows into `levels` near-equal bins by the rank of their latent
// value; every level is observed whenever n >= levels.
std::vector<int> rank_bins(const std::vector<double>& latent, int levels) {
    const std::size_t n = latent.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return latent[a] < latent[b]; });
    std::vector<int> bin(n);
    for (std::size_t r = 0; r < n; ++r) {
        bin[order[r]] = static_cast<int>((r * static_cast<std::size_t>(levels)) / n);
    }
    return bin;
}

}  // namespace

SynthSpec SynthSpec::default_spec() {
    SynthSpec spec;
    spec.n_rows = 200;
    spec.correlation = 0.5;
    spec.seed = 1;
    spec.groups = {
        {"group1", 9, {}},
        {"group2", 3, {2, 2}},
        {"group3", 0, {3, 3, 3, 3, 3, 3, 3, 3, 3}},
        {"group4", 4, {}},
    };
    return spec;
}

int SynthSpec::total_numeric() const {
    int total = 0;
    for (const auto& g : groups) {
        total += g.n_numeric;
    }
    return total;
}

int SynthSpec::total_levels() const {
    int total = 0;
    for (const auto& g : groups) {
        for (int l : g.level_counts) {
            total += l;
        }
    }
    return total;
}

void SynthSpec::validate() const {
    if (groups.empty()) {
        throw SchemaError("synth spec has no groups");
    }
    for (const auto& g : groups) {
        if (g.n_numeric < 0) {
            throw SchemaError("negative numeric count in group " + g.name);
        }
        if (g.n_numeric == 0 && g.level_counts.empty()) {
            throw SchemaError("group " + g.name + " has no variables");
        }
        for (int l : g.level_counts) {
            if (l < 2) {
                throw SchemaError("level count below 2 in group " + g.name);
            }
            if (l > n_rows) {
                throw SchemaError("level count exceeds the number of rows in group " + g.name);
            }
        }
    }
    if (!(correlation >= 0.0 && correlation < 1.0)) {
        throw SchemaError("correlation strength must lie in [0, 1)");
    }
    const int needed = std::max(10, total_levels() + total_numeric() + 2);
    if (n_rows < needed) {
        throw SchemaError("n_rows = " + std::to_string(n_rows) +
                          " is too small for this layout (need at least " +
                          std::to_string(needed) + ")");
    }
}

SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = static_cast<std::size_t>(spec.n_rows);
    GaussianSource gauss(spec.seed);
    const double shared = std::sqrt(spec.correlation);
    const double noise = std::sqrt(1.0 - spec.correlation);

    SynthResult result;
    result.table.n_rows = n;

    for (const auto& group : spec.groups) {
        std::vector<double> common(n);
        for (auto& value : common) {
            value = gauss();
        }
        auto latent_variable = [&]() {
            std::vector<double> latent(n);
            for (std::size_t i = 0; i < n; ++i) {
                latent[i] = shared * common[i] + noise * gauss();
            }
            return latent;
        };

        for (int v = 0; v < group.n_numeric; ++v) {
            Column col;
            col.name = group.name + "_n" + std::to_string(v + 1);
            col.kind = VarKind::Numeric;
            col.values = latent_variable();
            result.group_map.emplace_back(col.name, group.name);
            result.table.columns.push_back(std::move(col));
        }
        for (std::size_t v = 0; v < group.level_counts.size(); ++v) {
            const int levels = group.level_counts[v];
            const auto bins = rank_bins(latent_variable(), levels);
            Column col;
            col.name = group.name + "_c" + std::to_string(v + 1);
            col.kind = VarKind::Categorical;
            col.labels.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                col.labels.push_back("l" + std::to_string(bins[i] + 1));
            }
            result.group_map.emplace_back(col.name, group.name);
            result.table.columns.push_back(std::move(col));
        }
    }
    result.table.validate();
    return result;
}

SynthSpec parse_synth_spec(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid synth spec JSON: ") + e.what());
    }
    SynthSpec spec;
    spec.n_rows = doc.value("n_rows", spec.n_rows);
    spec.correlation = doc.value("correlation", spec.correlation);
    spec.seed = doc.value("seed", spec.seed);
    if (doc.contains("groups")) {
        spec.groups.clear();
        for (const auto& g : doc.at("groups")) {
            SynthGroupSpec group;
            group.name = g.value("name", "group" + std::to_string(spec.groups.size() + 1));
            group.n_numeric = g.value("numeric", 0);
            if (g.contains("levels")) {
                group.level_counts = g.at("levels").get<std::vector<int>>();
            }
            spec.groups.push_back(std::move(group));
        }
    } else {
        spec.groups = SynthSpec::default_spec().groups;
    }
    spec.validate();
    return spec;
}

}  // namespace mixfactor
