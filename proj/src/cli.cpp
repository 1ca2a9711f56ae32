#include "tailtest/cli.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tailtest/error.hpp"
#include "tailtest/harness.hpp"

namespace tailtest {

namespace {

const std::map<std::string, SampleFormat> kSampleFormats{{"text", SampleFormat::text},
                                                          {"f64", SampleFormat::raw_f64}};
const std::map<std::string, ReportFormat> kReportFormats{{"json", ReportFormat::json},
                                                          {"csv", ReportFormat::csv}};
const std::map<std::string, GapConvention> kGapConventions{
    {"b1", GapConvention::beta_cubed_b1}, {"b2", GapConvention::beta_cubed_b2}};
const std::map<std::string, SampleComplexityForm> kComplexityForms{
    {"statement", SampleComplexityForm::statement}, {"proof", SampleComplexityForm::proof}};

constexpr const char* kDistHelp =
    "distribution family: exponential | lomax | half-gaussian | stretched-exponential";
constexpr const char* kParamsHelp =
    "comma-separated KEY=VALUE parameters: exponential lambda (rate); lomax a (shape), "
    "lambda (scale); half-gaussian sigma (scale); stretched-exponential gamma (rate), "
    "m (exponent, 0<m<1)";

struct ModelArgs {
    std::string dist;
    std::string params;

    DistributionModel model() const { return parse_model(dist, params); }
};

void add_model_options(CLI::App* cmd, ModelArgs& m, bool required) {
    auto* d = cmd->add_option("--dist", m.dist, kDistHelp);
    auto* p = cmd->add_option("--params", m.params, kParamsHelp);
    if (required) {
        d->required();
        p->required();
    }
}

struct TesterArgs {
    int k = 16;
    double alpha = 0.25;
    double rho = 0.5;
    std::optional<double> beta;
    std::optional<double> b1;
    std::optional<double> b2;
    std::optional<double> zeta;
    bool weak = false;
    double c1 = 0.1;
    double c2 = 0.8;
    GapConvention gap = GapConvention::beta_cubed_b1;
    unsigned threads = 0;

    TestConfig config(const std::optional<DistributionModel>& model) const {
        TestConfig c;
        c.k = k;
        c.tail = {alpha, rho};
        c.variant = weak ? Variant::weak : Variant::full;
        c.c1 = c1;
        c.c2 = c2;
        c.gap_convention = gap;
        const double z = zeta.value_or(1.0 / (2.0 * k));
        if (beta && b1 && b2) {
            c.bounds = {*beta, *b1, *b2, z};
        } else if (model) {
            c.bounds = estimate_bounds(*model, z);
            if (beta) c.bounds.beta = *beta;
            if (b1) c.bounds.b1 = *b1;
            if (b2) c.bounds.b2 = *b2;
        } else {
            throw CLI::ValidationError("--beta, --b1 and --b2 are required for file input");
        }
        return c;
    }
};

void add_tester_options(CLI::App* cmd, TesterArgs& t, bool bounds_required) {
    cmd->add_option("--k", t.k, "coarse bucket count (>= 4 and >= 4/rho)")
        ->required()
        ->check(CLI::Range(4, 1 << 20));
    cmd->add_option("--alpha", t.alpha, "minimum hazard-rate drop defining heavy tails (> 0)")
        ->capture_default_str();
    cmd->add_option("--rho", t.rho, "probability mass of the heavy region, in (0,1)")
        ->capture_default_str();
    const char* suffix = bounds_required ? "" : " (default: estimated from the model)";
    auto* beta = cmd->add_option("--beta", t.beta, std::string("density bound sup f") + suffix);
    auto* b1 = cmd->add_option("--b1", t.b1,
                               std::string("Lipschitz constant of (F^-1)' on [0,1-zeta]") + suffix);
    auto* b2 = cmd->add_option(
        "--b2", t.b2, std::string("Lipschitz constant of (F^-1)'' on [0,1-zeta]") + suffix);
    if (bounds_required) {
        beta->required();
        b1->required();
        b2->required();
    }
    cmd->add_option("--zeta", t.zeta, "edge mass excluded from the bounds (default: 1/(2k))");
    cmd->add_flag("--weak", t.weak, "use the single-split, single-granularity tester");
    cmd->add_option("--c1", t.c1, "weak tester: first scanned bucket as a fraction of k")
        ->capture_default_str();
    cmd->add_option("--c2", t.c2, "weak tester: last scanned bucket as a fraction of k")
        ->capture_default_str();
    cmd->add_option("--gap-denominator", t.gap,
                    "smoothness constant in the gap: b1 (beta^3 B1) or b2 (beta^3 B2)")
        ->transform(CLI::CheckedTransformer(kGapConventions))
        ->default_str("b1");
    cmd->add_option("--threads", t.threads,
                    "worker threads for repetitions (0 = machine parallelism); never changes output")
        ->capture_default_str();
}

std::string render(const auto& report, ReportFormat format) {
    std::ostringstream buf;
    write_report(report, buf, format);
    return buf.str();
}

int cmd_sample(const ModelArgs& m, std::size_t n, std::uint64_t seed, const std::string& path,
               SampleFormat format, std::ostream& out) {
    const auto model = m.model();
    const auto values = sample(model, n, seed);
    std::ostringstream buf;
    write_samples(buf, values, format);
    write_file_atomic(path, buf.str());
    out << "wrote " << n << " samples of " << model.name() << " to " << path << '\n';
    return kExitOk;
}

int cmd_proxy(const ModelArgs& m, int k, double alpha, std::optional<double> beta,
              std::optional<double> b1, std::optional<double> b2, GapConvention gap,
              const std::string& path, std::ostream& out) {
    const auto model = m.model();
    auto bounds = estimate_bounds(model, 1.0 / (2.0 * k));
    if (beta) bounds.beta = *beta;
    if (b1) bounds.b1 = *b1;
    if (b2) bounds.b2 = *b2;

    std::ostringstream csv;
    csv << "i,z,proxy_s,s_tilde,threshold,gap,boundary\n";
    for (int i = 1; i <= k - 2; ++i) {
        const double z = static_cast<double>(i) / k;
        const auto tg = threshold_and_gap(z, alpha, bounds, gap);
        std::string s, s_tilde;
        try {
            s = format_decimal(proxy_S(model, z));
        } catch (const SingularError&) {
        }
        try {
            s_tilde = format_decimal(discrete_S_tilde(model, i, k));
        } catch (const SingularError&) {
        }
        csv << i << ',' << format_decimal(z) << ',' << s << ',' << s_tilde << ','
            << format_decimal(tg.threshold) << ',' << format_decimal(tg.gap) << ','
            << format_decimal(tg.boundary()) << '\n';
    }
    write_file_atomic(path, csv.str());
    out << "wrote proxy curve of " << model.name() << " (k=" << k << ") to " << path << '\n';
    return kExitOk;
}

struct TestArgs {
    ModelArgs model;
    std::string input;
    SampleFormat input_format = SampleFormat::text;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::size_t reps = 1;
    std::string out;
    ReportFormat report_format = ReportFormat::json;
    bool exit_verdict = false;
};

int cmd_test(const TestArgs& a, const TesterArgs& t, std::ostream& out) {
    const bool from_file = !a.input.empty();
    const bool from_model = !a.model.dist.empty() || !a.model.params.empty();
    if (from_file == from_model) {
        throw CLI::ValidationError("give exactly one of --input or --dist/--params");
    }
    if (from_model && (a.model.dist.empty() || a.model.params.empty() || !a.n || !a.seed)) {
        throw CLI::ValidationError("--dist requires --params, --n and --seed");
    }
    if (from_file && a.reps != 1) throw CLI::ValidationError("--reps applies to --dist input only");

    std::optional<DistributionModel> model;
    if (from_model) model = a.model.model();
    const TestConfig config = t.config(model);

    TestOutcome outcome;
    std::size_t heavy_votes = 0;
    if (from_file) {
        outcome = config.variant == Variant::full
                      ? run_full_test(load_four_splits(a.input, a.input_format), config)
                      : run_weak_test(load_samples(a.input, a.input_format), config);
        heavy_votes = outcome.verdict == Verdict::heavy ? 1 : 0;
    } else {
        outcome = run_test_on_model(*model, *a.n, *a.seed, config);
        if (a.reps > 1) {
            heavy_votes = replicate(*model, a.reps, *a.n, config, *a.seed, t.threads).heavy_count();
            outcome.verdict = 2 * heavy_votes > a.reps ? Verdict::heavy : Verdict::light;
        } else {
            heavy_votes = outcome.verdict == Verdict::heavy ? 1 : 0;
        }
    }

    std::string bytes;
    if (a.report_format == ReportFormat::json) {
        auto j = to_json(outcome);
        if (a.reps > 1) {
            j["reps"] = a.reps;
            j["heavy_votes"] = heavy_votes;
        }
        bytes = j.dump(2) + "\n";
    } else {
        bytes = render(outcome, ReportFormat::csv);
    }
    write_file_atomic(a.out, bytes);

    out << "verdict=" << to_string(outcome.verdict) << " k=" << config.k << " n=" << outcome.n;
    if (a.reps > 1) out << " heavy_votes=" << heavy_votes << "/" << a.reps;
    out << '\n';
    if (!a.exit_verdict) return kExitOk;
    return outcome.verdict == Verdict::heavy ? kExitHeavy : kExitLight;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decide from samples whether a monotone-density distribution on [0,inf) is "
                 "light-tailed or (alpha,rho)-heavy-tailed.",
                 args.empty() ? "tailtest" : args.front()};
    app.require_subcommand(1);

    // sample
    ModelArgs sample_model;
    std::size_t sample_n = 0;
    std::uint64_t sample_seed = 0;
    std::string sample_out;
    SampleFormat sample_format = SampleFormat::text;
    auto* sample_cmd = app.add_subcommand("sample", "draw seeded samples by inverse transform");
    add_model_options(sample_cmd, sample_model, true);
    sample_cmd->add_option("--n", sample_n, "number of samples")->required()->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", sample_seed, "64-bit generator seed")->required();
    sample_cmd->add_option("--out", sample_out, "output file")->required();
    sample_cmd->add_option("--format", sample_format, "text (one value per line) or f64 (raw LE binary64)")
        ->transform(CLI::CheckedTransformer(kSampleFormats))
        ->default_str("text");

    // proxy
    ModelArgs proxy_model;
    int proxy_k = 16;
    double proxy_alpha = 0.0;
    std::optional<double> proxy_beta, proxy_b1, proxy_b2;
    GapConvention proxy_gap = GapConvention::beta_cubed_b1;
    std::string proxy_out;
    auto* proxy_cmd = app.add_subcommand(
        "proxy", "analytic proxy S(i/k), its two-granularity approximation, threshold and gap (CSV)");
    add_model_options(proxy_cmd, proxy_model, true);
    proxy_cmd->add_option("--k", proxy_k, "coarse bucket count")->required()->check(CLI::Range(4, 1 << 20));
    proxy_cmd->add_option("--alpha", proxy_alpha, "hazard-rate drop used for the gap (0 = no gap)")
        ->capture_default_str();
    proxy_cmd->add_option("--beta", proxy_beta, "density bound (default: estimated, zeta=1/(2k))");
    proxy_cmd->add_option("--b1", proxy_b1, "Lipschitz constant of (F^-1)' (default: estimated)");
    proxy_cmd->add_option("--b2", proxy_b2, "Lipschitz constant of (F^-1)'' (default: estimated)");
    proxy_cmd->add_option("--gap-denominator", proxy_gap, "b1 (beta^3 B1) or b2 (beta^3 B2)")
        ->transform(CLI::CheckedTransformer(kGapConventions))
        ->default_str("b1");
    proxy_cmd->add_option("--out", proxy_out, "output CSV file")->required();

    // test
    TestArgs test_args;
    TesterArgs test_tester;
    auto* test_cmd = app.add_subcommand("test", "run the heavy-tail tester and write a JSON report");
    add_model_options(test_cmd, test_args.model, false);
    test_cmd->add_option("--input", test_args.input, "sample file (instead of --dist)");
    test_cmd->add_option("--format", test_args.input_format, "input file format: text or f64")
        ->transform(CLI::CheckedTransformer(kSampleFormats))
        ->default_str("text");
    test_cmd->add_option("--n", test_args.n, "samples per split when drawing from --dist");
    test_cmd->add_option("--seed", test_args.seed, "64-bit generator seed when drawing from --dist");
    test_cmd->add_option("--reps", test_args.reps,
                         "repetitions with seeds seed..seed+reps-1; majority vote decides")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    test_cmd->add_option("--out", test_args.out, "report file")->required();
    test_cmd->add_option("--report-format", test_args.report_format, "json or csv")
        ->transform(CLI::CheckedTransformer(kReportFormats))
        ->default_str("json");
    test_cmd->add_flag("--exit-verdict", test_args.exit_verdict,
                       "exit 3 for a heavy verdict and 4 for light");
    add_tester_options(test_cmd, test_tester, false);

    // simulate
    ModelArgs sim_model;
    TesterArgs sim_tester;
    std::size_t sim_reps = 10;
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    ReportFormat sim_format = ReportFormat::csv;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "repeat the tester on fresh samples and report per-bucket mean/std of the statistic");
    add_model_options(sim_cmd, sim_model, true);
    sim_cmd->add_option("--reps", sim_reps, "repetitions (>= 2)")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    sim_cmd->add_option("--n", sim_n, "samples per split")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_seed, "base seed; repetition r uses seed+r")->required();
    sim_cmd->add_option("--out", sim_out, "report file")->required();
    sim_cmd->add_option("--report-format", sim_format, "csv or json")
        ->transform(CLI::CheckedTransformer(kReportFormats))
        ->default_str("csv");
    add_tester_options(sim_cmd, sim_tester, false);

    // complexity
    double cx_alpha = 0, cx_rho = 0, cx_beta = 0, cx_b1 = 0, cx_b2 = 0, cx_ck = 1, cx_cn = 1;
    SampleComplexityForm cx_form = SampleComplexityForm::statement;
    auto* cx_cmd = app.add_subcommand("complexity", "print the bucket count k and samples per split n");
    cx_cmd->add_option("--alpha", cx_alpha, "hazard-rate drop (> 0)")->required();
    cx_cmd->add_option("--rho", cx_rho, "heavy-region mass in (0,1)")->required();
    cx_cmd->add_option("--beta", cx_beta, "density bound")->required();
    cx_cmd->add_option("--b1", cx_b1, "Lipschitz constant of (F^-1)'")->required();
    cx_cmd->add_option("--b2", cx_b2, "Lipschitz constant of (F^-1)''")->required();
    cx_cmd->add_option("--ck", cx_ck, "constant multiplying the bucket-count bound")->capture_default_str();
    cx_cmd->add_option("--cn", cx_cn, "constant multiplying the sample-count bound")->capture_default_str();
    cx_cmd->add_option("--form", cx_form,
                       "sample bound: statement (B1^1.5 beta^2) or proof (beta^3 B2^1.5)")
        ->transform(CLI::CheckedTransformer(kComplexityForms))
        ->default_str("statement");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();

    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        out << sub->help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*sample_cmd) {
            return cmd_sample(sample_model, sample_n, sample_seed, sample_out, sample_format, out);
        }
        if (*proxy_cmd) {
            return cmd_proxy(proxy_model, proxy_k, proxy_alpha, proxy_beta, proxy_b1, proxy_b2,
                             proxy_gap, proxy_out, out);
        }
        if (*test_cmd) return cmd_test(test_args, test_tester, out);
        if (*sim_cmd) {
            const auto model = sim_model.model();
            const auto config = sim_tester.config(model);
            const auto report = replicate(model, sim_reps, sim_n, config, sim_seed, sim_tester.threads);
            write_file_atomic(sim_out, render(report, sim_format));
            out << "heavy in " << report.heavy_count() << "/" << sim_reps << " repetitions of "
                << model.name() << '\n';
            return kExitOk;
        }
        if (*cx_cmd) {
            const TailParams tail{cx_alpha, cx_rho};
            const WellBehavedBounds bounds{cx_beta, cx_b1, cx_b2, 0.5};
            const int k = required_buckets(tail, bounds, cx_ck);
            out << "k=" << k << "\n"
                << "n=" << required_samples(k, tail, bounds, cx_cn, cx_form) << "\n";
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace tailtest
