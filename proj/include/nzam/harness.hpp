// harness.hpp: scenario configs, batch runs and result files

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nzam/bounds.hpp"
#include "nzam/bss.hpp"
#include "nzam/lattice.hpp"
#include "nzam/nz_dynamics.hpp"

namespace nzam {

// Config rejected before any computation; `field` is the dotted path.
struct ValidationError : std::invalid_argument {
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field(std::move(field)) {}
    std::string field;
};

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2, kExitInfeasible = 3 };

struct InitialStateSpec {
    std::string kind = "product"; // product | boundary-bell | ghz | random-separable | random
    std::string spread = "none";  // boundary-bell: none | even
    int terms = 4;                // random-separable
    int rank = 0;                 // random; 0 is full rank
    std::uint64_t seed = 0;
};

struct IntegratorSpec {
    double h = 1e-3;
    double t_max = 1.0;
    MemoryMode memory = MemoryMode::ode;
    int checkpoint_stride = 1;   // rows written to the CSVs
    int positivity_stride = 100;
};

struct BoundSpec {
    std::string mode = "measured"; // measured | analytic | both
    double C = 1.0;
    double beta = 0.6931471805599453;
    double alpha = 1.0;
};

struct OutputSpec {
    std::string directory; // empty: --out, then $NZAM_OUTPUT_ROOT, then ./nzam_out
    bool trajectory = true;
};

struct SweepSpec {
    std::string axis; // dotted path into the config
    nlohmann::json values = nlohmann::json::array();
};

struct Scenario {
    ChainSpec chain;
    InitialStateSpec initial_state;
    BssSettings bss;
    IntegratorSpec integrator;
    BoundSpec bounds;
    OutputSpec outputs;
    std::optional<SweepSpec> sweep;

    // Normalized config with every default filled in (the hash input).
    nlohmann::json to_json() const;
    std::string hash() const;
};

Scenario parse_scenario(const nlohmann::json& config);
nlohmann::json load_json(const std::filesystem::path& path);

// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

Mat initial_state(const Scenario& s, const ChainModel& m);

struct RunResult {
    std::string hash;
    std::vector<double> times;
    std::vector<double> drive_norm, inhom_norm, memory_norm, closure_residual;
    std::vector<double> bound_measured, bound_analytic;
    std::vector<double> delta_norms;
    double bss_distance = 0.0;
    nlohmann::json summary;
};

// Runs one scenario; writes into `out_dir` unless it is empty.
RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

struct SweepRow {
    nlohmann::json value;
    int exit_code = 0;
    std::string error;
    std::optional<RunResult> result;
};

// One bundle per value under out_dir/NNN, plus out_dir/aggregate.csv.
std::vector<SweepRow> run_sweep(const nlohmann::json& base, const std::string& axis, const nlohmann::json& values,
                                const std::filesystem::path& out_dir, int workers);

// Sets a dotted path of an existing key; unknown paths are validation errors.
void set_path(nlohmann::json& config, const std::string& path, const nlohmann::json& value);

// Bounds-only evaluation over a parameter grid.
nlohmann::json run_bounds(const nlohmann::json& config, const std::filesystem::path& out_dir);
// Enumeration oracles and the Stirling sweep.
nlohmann::json run_enumerate(const nlohmann::json& config, const std::filesystem::path& out_dir);

std::filesystem::path default_output_root();

// Entry point shared by the CLI and the tests; returns an ExitCode.
int run_cli(int argc, char** argv);

} // namespace nzam
