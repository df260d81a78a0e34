#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "randbc/formula.hpp"
#include "randbc/matgen.hpp"
#include "randbc/precision.hpp"
#include "randbc/randomize.hpp"
#include "randbc/rescale.hpp"

namespace randbc {

enum class ExperimentKind { s1_avg, s1_dist, s2_avg, s2_variants };

/// Accepts "s1-avg" or "s1_avg" style names.
ExperimentKind parse_experiment(std::string_view text);
std::string_view experiment_name(ExperimentKind kind);

enum class Algorithm { deterministic, full_random, sign_only, perm_only, rescaled_2xoi, standard };

/// Accepts the CSV names plus the short forms full, sign, perm, rescaled-2xoi.
Algorithm parse_algorithm(std::string_view text);
std::string_view algorithm_name(Algorithm algorithm);

/// full -> full_random, sign_only -> sign_only, perm_only -> perm_only,
/// none -> deterministic.
Algorithm algorithm_for(Variant variant);

struct TrialRecord {
    ExperimentKind experiment = ExperimentKind::s1_avg;
    Algorithm algorithm = Algorithm::deterministic;
    MatrixKind matrix_type = MatrixKind::gaussian;
    std::size_t n = 0;
    std::size_t Q = 0;
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    double rel_error = 0.0;
    std::uint64_t running_n = 1;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::s1_avg;
    std::vector<MatrixKind> matrix_types{MatrixKind::gaussian};
    std::size_t size = 80;
    std::vector<std::size_t> recursions{1, 2, 3};
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    ScalarMode mode = ScalarMode::f64();
    double perturb_sigma = 1e-3;
    std::size_t perturb_extra = 5;
    /// Randomization used by s1_avg, s1_dist and s2_avg.
    Variant variant = Variant::full;
    /// Algorithms measured by s2_variants.
    std::vector<Algorithm> algorithms{Algorithm::deterministic, Algorithm::full_random, Algorithm::sign_only,
                                      Algorithm::perm_only,     Algorithm::rescaled_2xoi, Algorithm::standard};
    /// Repeat r uses master seed seed + r.
    std::size_t repeats = 1;
    /// Replaces the built-in formula (perturbed or exact Strassen).
    std::optional<std::filesystem::path> formula_path;
    ScalingSchedule schedule = default_schedule();
    /// Running-average checkpoints; empty means checkpoint_grid(trials).
    std::vector<std::uint64_t> checkpoints;
    /// Receives one line per completed unit of work, if set.
    std::function<void(std::string_view)> log;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

/// The published setting for each experiment: sizes 80 / 320, Q in [3] /
/// [5], 10^4 / 100 trials, double for setting 1 and single for setting 2.
ExperimentConfig default_config(ExperimentKind kind);

/// 1..10, 20..100, 200..1000, ... up to and including `last`.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t last);

/// Formula used by the experiment: setting 1 perturbs Strassen with the
/// formula substream of `seed`; setting 2 uses exact Strassen.
BilinearFormula experiment_formula(const ExperimentConfig& config, std::uint64_t seed);

std::vector<TrialRecord> run_setting1_average(const ExperimentConfig& config);
std::vector<TrialRecord> run_setting1_distribution(const ExperimentConfig& config);
std::vector<TrialRecord> run_setting2_average(const ExperimentConfig& config);
std::vector<TrialRecord> run_setting2_variants(const ExperimentConfig& config);

/// Dispatches on config.kind.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

/// Orders by experiment, seed, matrix type, algorithm, Q, trial, running_n.
void sort_records(std::vector<TrialRecord>& records);

inline constexpr std::string_view kCsvHeader = "experiment,algorithm,matrix_type,n,Q,trial,seed,rel_error,running_n";

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_csv(std::istream& in);

}  // namespace randbc
