// Command-line front end: bootstrap noise-dimension tests, sequential
// dimension estimation, source separation and the Monte-Carlo study driver.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bssdim/io.hpp"

namespace {

using namespace bssdim;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

bool has_wav_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".wav";
}

TimeSeriesMatrix load_input(const std::vector<std::string>& inputs) {
    if (inputs.empty()) throw InvalidInput("no input files");
    std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
    if (has_wav_extension(paths.front())) return read_wav(paths);
    if (paths.size() != 1) {
        throw InvalidInput("multiple input files are only supported for WAV");
    }
    return read_csv(paths.front());
}

struct CommonArgs {
    std::vector<std::string> inputs;
    std::string method = "sobi";
    std::string lags;  // empty: method default
    std::string strategy = "parametric";
    int replicates = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string format = "tsv";
    int threads = 0;
    std::string out;
};

void add_common_options(CLI::App* cmd, CommonArgs& args, bool with_input) {
    if (with_input) {
        cmd->add_option("input", args.inputs, "Input CSV file or WAV file(s)")
            ->required();
    }
    cmd->add_option("--method", args.method, "BSS method: amuse|sobi")
        ->envname("BSSDIM_METHOD")
        ->check(CLI::IsMember({"amuse", "sobi"}));
    cmd->add_option("--lags", args.lags,
                    "Lag list, e.g. 1..12 or 1,2,5 (default: 1 for amuse, 1..12 for sobi)")
        ->envname("BSSDIM_LAGS");
    cmd->add_option("--strategy", args.strategy,
                    "Bootstrap strategy: parametric|np1|np2|np3")
        ->envname("BSSDIM_STRATEGY");
    cmd->add_option("--R", args.replicates, "Bootstrap replicates")
        ->envname("BSSDIM_R");
    cmd->add_option("--alpha", args.alpha, "Test level")->envname("BSSDIM_ALPHA");
    cmd->add_option("--seed", args.seed, "Master seed")->envname("BSSDIM_SEED");
    cmd->add_option("--format", args.format, "Report format: tsv|json")
        ->envname("BSSDIM_FORMAT")
        ->check(CLI::IsMember({"tsv", "json"}));
    cmd->add_option("--threads", args.threads,
                    "Worker threads (0 = all cores, 1 = serial reference run)")
        ->envname("BSSDIM_THREADS");
    cmd->add_option("--out", args.out, "Report file (default: standard output)")
        ->envname("BSSDIM_OUT");
}

MethodSpec make_method(const CommonArgs& args) {
    std::vector<int> lags;
    if (args.lags.empty()) {
        lags = args.method == "amuse" ? std::vector<int>{1} : default_sobi_lags();
    } else {
        lags = parse_lag_list(args.lags);
    }
    if (args.method == "amuse") {
        if (lags.size() != 1) throw InvalidInput("amuse takes exactly one lag");
        return MethodSpec::amuse(lags.front());
    }
    return MethodSpec::sobi(std::move(lags));
}

TestOptions make_test_options(const CommonArgs& args) {
    TestOptions opts;
    opts.method = make_method(args);
    opts.strategy = strategy_from_string(args.strategy);
    opts.replicates = args.replicates;
    opts.seed = args.seed;
    opts.threads = args.threads;
    return opts;
}

void emit(const std::string& report, const std::string& out) {
    if (out.empty()) {
        std::cout << report;
    } else {
        write_report(report, out);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Second-order blind source separation with bootstrap tests "
                 "for the white-noise dimension"};
    app.require_subcommand(1);

    CommonArgs test_args;
    int test_d = 0;
    CLI::App* cmd_test = app.add_subcommand(
        "test", "Bootstrap test of H_{0,d}: the last p-d latent series are white noise");
    add_common_options(cmd_test, test_args, true);
    cmd_test->add_option("--d", test_d, "Hypothetical signal dimension")->required();

    CommonArgs est_args;
    std::string estimator = "forward";
    CLI::App* cmd_estimate =
        app.add_subcommand("estimate", "Sequential estimate of the signal dimension");
    add_common_options(cmd_estimate, est_args, true);
    cmd_estimate->add_option("--estimator", estimator,
                             "Sequential strategy: forward|backward|bisect")
        ->envname("BSSDIM_ESTIMATOR")
        ->check(CLI::IsMember({"forward", "backward", "bisect"}));

    CommonArgs sep_args;
    std::string sep_report;
    CLI::App* cmd_separate =
        app.add_subcommand("separate", "Unmix the series and write the sources as CSV");
    add_common_options(cmd_separate, sep_args, true);
    cmd_separate->add_option("--report", sep_report,
                             "Optional component report (format per --format)");

    CommonArgs sim_args;
    std::string config_path;
    bool sim_seed_set = false;
    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Monte-Carlo rejection-rate study from a config file");
    cmd_simulate->add_option("--config", config_path, "Study config file")->required();
    cmd_simulate->add_option("--format", sim_args.format, "Report format: tsv|json")
        ->envname("BSSDIM_FORMAT")
        ->check(CLI::IsMember({"tsv", "json"}));
    cmd_simulate->add_option("--threads", sim_args.threads, "Worker threads (overrides config)")
        ->envname("BSSDIM_THREADS");
    cmd_simulate
        ->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& s) {
                sim_args.seed = s;
                sim_seed_set = true;
            },
            "Master seed (overrides config)")
        ->envname("BSSDIM_SEED");
    cmd_simulate->add_option("--out", sim_args.out, "Report file (default: standard output)")
        ->envname("BSSDIM_OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }

    if (cmd_test->parsed()) {
        TimeSeriesMatrix x = load_input(test_args.inputs);
        NoiseTest t = test_dimension(x, test_d, make_test_options(test_args));
        emit(report_noise_test(t, format_from_string(test_args.format)), test_args.out);
        return kExitOk;
    }

    if (cmd_estimate->parsed()) {
        TimeSeriesMatrix x = load_input(est_args.inputs);
        EstimateOptions opts;
        opts.test = make_test_options(est_args);
        opts.alpha = est_args.alpha;
        DimensionEstimate est;
        if (estimator == "forward") {
            est = estimate_forward(x, opts);
        } else if (estimator == "backward") {
            est = estimate_backward(x, opts);
        } else {
            est = estimate_divide_conquer(x, opts);
        }
        emit(report_estimate(est, format_from_string(est_args.format)), est_args.out);
        // last stdout line is the bare estimate, for shell composition
        std::cout << est.d_hat << std::endl;
        return kExitOk;
    }

    if (cmd_separate->parsed()) {
        TimeSeriesMatrix x = load_input(sep_args.inputs);
        BssSolution solution = fit(x, make_method(sep_args));
        if (sep_args.out.empty()) {
            write_csv(solution.sources.values(), std::cout);
        } else {
            write_csv(solution.sources.values(), std::filesystem::path(sep_args.out));
        }
        if (!sep_report.empty()) {
            write_report(report_separation(solution, format_from_string(sep_args.format)),
                         sep_report);
        }
        return kExitOk;
    }

    // simulate
    StudyConfig config = read_study_config(config_path);
    if (sim_seed_set) config.seed = sim_args.seed;
    if (cmd_simulate->count("--threads") > 0) config.threads = sim_args.threads;
    StudyResult result = run_rejection_study(config);
    emit(report_study(result, format_from_string(sim_args.format)), sim_args.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const SingularCovariance& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
