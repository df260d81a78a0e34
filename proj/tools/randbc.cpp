// randbc: run the randomized bilinear-multiplication experiments, evaluate
// error bounds, and write formula files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "randbc/bounds.hpp"
#include "randbc/experiments.hpp"
#include "randbc/formula.hpp"
#include "randbc/matgen.hpp"
#include "randbc/randomize.hpp"

namespace {

using namespace randbc;

std::vector<MatrixKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<MatrixKind> out;
    for (const std::string& name : names) {
        if (name == "all") {
            out = all_matrix_kinds();
            continue;
        }
        out.push_back(parse_matrix_kind(name));
    }
    return out;
}

BilinearFormula formula_from(const std::string& source, double sigma, std::size_t extra, std::uint64_t seed,
                             std::size_t n) {
    if (source == "strassen") return strassen_formula();
    if (source == "standard") return standard_formula(n);
    if (source == "perturbed") {
        Philox4x32 rng = substream(seed, 0, 0, StreamRole::formula);
        return perturb(strassen_formula(), sigma, extra, rng);
    }
    return load_formula(source);
}

void set_threads(int threads) {
#if defined(_OPENMP)
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

struct ExperimentArgs {
    std::string name;
    std::vector<std::string> matrix_types;
    std::optional<std::size_t> size;
    std::vector<std::size_t> recursions;
    std::optional<std::size_t> trials;
    std::uint64_t seed = 0;
    std::optional<std::string> precision;
    double sigma = 1e-3;
    std::size_t extra = 5;
    std::string variant = "full";
    std::vector<std::string> algorithms;
    std::size_t repeats = 1;
    std::string formula;
    std::string schedule = "OIOI";
    std::vector<std::uint64_t> checkpoints;
    std::string out;
    int threads = 0;
    bool quiet = false;
};

int run_experiment_command(const ExperimentArgs& args) {
    ExperimentConfig config = default_config(parse_experiment(args.name));
    if (!args.matrix_types.empty()) config.matrix_types = parse_kinds(args.matrix_types);
    if (args.size) config.size = *args.size;
    if (!args.recursions.empty()) config.recursions = args.recursions;
    if (args.trials) config.trials = *args.trials;
    config.seed = args.seed;
    if (args.precision) config.mode = ScalarMode::parse(*args.precision);
    config.perturb_sigma = args.sigma;
    config.perturb_extra = args.extra;
    config.variant = parse_variant(args.variant);
    if (!args.algorithms.empty()) {
        config.algorithms.clear();
        for (const std::string& a : args.algorithms) config.algorithms.push_back(parse_algorithm(a));
    }
    config.repeats = args.repeats;
    if (!args.formula.empty()) config.formula_path = args.formula;
    config.schedule = parse_schedule(args.schedule);
    config.checkpoints = args.checkpoints;
    if (!args.quiet) config.log = [](std::string_view line) { std::cerr << line << '\n'; };
    set_threads(args.threads);

    const std::vector<TrialRecord> records = run_experiment(config);
    if (args.out.empty() || args.out == "-") {
        write_csv(std::cout, records);
    } else {
        std::ofstream file(args.out);
        if (!file) throw std::runtime_error("cannot open " + args.out);
        write_csv(file, records);
        if (!file) throw std::runtime_error("write failed: " + args.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized bilinear matrix multiplication experiments"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags override it");

    ExperimentArgs ex;
    CLI::App* experiment = app.add_subcommand("experiment", "Run an experiment and write CSV records");
    experiment->add_option("name", ex.name, "s1-avg, s1-dist, s2-avg or s2-variants")->required();
    experiment->add_option("--matrix-type", ex.matrix_types, "gaussian, uniform, adv1, adv2, adv3, hilbert or all")
        ->delimiter(',');
    experiment->add_option("--size", ex.size, "Matrix size");
    experiment->add_option("--recursions", ex.recursions, "Recursion depths Q, e.g. 1,2,3")->delimiter(',');
    experiment->add_option("--trials", ex.trials, "Randomized trials per depth");
    experiment->add_option("--seed", ex.seed, "Master seed");
    experiment->add_option("--precision", ex.precision, "f64, f32 or dec<t> (suffixes :away, :mul)");
    experiment->add_option("--perturb-sigma", ex.sigma, "Noise level of the perturbed formula")->capture_default_str();
    experiment->add_option("--perturb-extra", ex.extra, "Extra perturbed zeros per tensor")->capture_default_str();
    experiment->add_option("--variant", ex.variant, "Randomization for averaging/distribution runs: full, sign, perm, none")
        ->capture_default_str();
    experiment->add_option("--algorithm", ex.algorithms, "Algorithms for s2-variants")->delimiter(',');
    experiment->add_option("--repeats", ex.repeats, "Independent repetitions with seeds seed, seed+1, ...")
        ->capture_default_str();
    experiment->add_option("--formula", ex.formula, "Formula JSON file replacing the built-in one");
    experiment->add_option("--schedule", ex.schedule, "Rescaling schedule of O/I steps")->capture_default_str();
    experiment->add_option("--checkpoints", ex.checkpoints, "Running-average checkpoints")->delimiter(',');
    experiment->add_option("--out", ex.out, "Output CSV path (default stdout)");
    experiment->add_option("--threads", ex.threads, "OpenMP threads (default: runtime choice)");
    experiment->add_flag("--quiet", ex.quiet, "No progress lines on stderr");

    std::string b_formula = "perturbed", b_kind = "gaussian", b_precision = "f32";
    double b_sigma = 1e-3, b_threshold = kDefaultHypothesisThreshold;
    std::size_t b_extra = 5, b_size = 16;
    std::uint64_t b_seed = 0;
    CLI::App* bounds = app.add_subcommand("bounds", "Evaluate every error bound for one input and print CSV");
    bounds->add_option("--formula", b_formula, "strassen, perturbed or a formula JSON file")->capture_default_str();
    bounds->add_option("--perturb-sigma", b_sigma)->capture_default_str();
    bounds->add_option("--perturb-extra", b_extra)->capture_default_str();
    bounds->add_option("--matrix-type", b_kind)->capture_default_str();
    bounds->add_option("--size", b_size, "Matrix size (multiple of the formula grid)")->capture_default_str();
    bounds->add_option("--seed", b_seed, "Seed for formula, matrices and plan")->capture_default_str();
    bounds->add_option("--precision", b_precision)->capture_default_str();
    bounds->add_option("--threshold", b_threshold, "Hypothesis threshold on factor * eps")->capture_default_str();

    std::string f_from = "strassen", f_out;
    double f_sigma = 1e-3;
    std::size_t f_extra = 5, f_n = 2;
    std::uint64_t f_seed = 0;
    CLI::App* formula = app.add_subcommand("formula", "Print formula diagnostics and optionally save it as JSON");
    formula->add_option("--from", f_from, "strassen, standard, perturbed or a formula JSON file")
        ->capture_default_str();
    formula->add_option("--n", f_n, "Grid size for the standard formula")->capture_default_str();
    formula->add_option("--perturb-sigma", f_sigma)->capture_default_str();
    formula->add_option("--perturb-extra", f_extra)->capture_default_str();
    formula->add_option("--seed", f_seed)->capture_default_str();
    formula->add_option("--out", f_out, "Write the formula to this JSON file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*experiment) return run_experiment_command(ex);
        if (*bounds) {
            const BilinearFormula f = formula_from(b_formula, b_sigma, b_extra, b_seed, 2);
            const MatrixPair<double> in = generate(MatrixSpec{parse_matrix_kind(b_kind), b_size, b_seed, 0});
            Philox4x32 rng = substream(b_seed, 0, 1, StreamRole::plan);
            const RandomizationPlan plan = draw_plan(f.n(), rng);
            BoundTableOptions options;
            options.threshold = b_threshold;
            std::cout << bound_table_csv(bound_table(f, in.a, in.b, plan, ScalarMode::parse(b_precision), options));
            return 0;
        }
        if (*formula) {
            const BilinearFormula f = formula_from(f_from, f_sigma, f_extra, f_seed, f_n);
            const FormulaDiagnostics d = diagnose(f);
            std::printf("n,R,kappa,eta,residual_norm,y_norm,weight_norm_product,is_exact\n");
            std::printf("%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", f.n(), f.rank(), d.kappa, d.eta,
                        d.residual_norm, d.y_norm, d.weight_norm_product, d.is_exact ? 1 : 0);
            if (!f_out.empty()) save_formula(f_out, f);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "randbc: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
