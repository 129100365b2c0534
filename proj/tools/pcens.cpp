// Command-line front end: closed-form statistics, asymptotic exponents,
// figure data, seeded simulation, and the self-verification harness.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <pcens/ensemble.hpp>
#include <pcens/exponents.hpp>
#include <pcens/figures.hpp>
#include <pcens/formulas.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string subcommand;
    unsigned q = 2;
    unsigned m = 1;
    unsigned n = 2;
    double rate = -1.0;  // < 0 means "not given"
    std::string eps = "1/4";
    double eps_value = 0.25;  // float commands take the erasure level directly
    long ell = 0;
    long list_size = 1;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 42;
    int figure_id = 1;
    double step = pcens::kDefaultFigureStep;
    std::string format = "csv";
    std::string out;  // empty = stdout
    std::string statistic = "ud";
    unsigned threads = 1;
    bool ratio = false;
    unsigned max_bits = 16;
    bool perturb = false;
    bool echo_config = false;
};

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["subcommand"] = cfg.subcommand;
    j["q"] = cfg.q;
    j["m"] = cfg.m;
    j["n"] = cfg.n;
    j["rate"] = cfg.rate;
    j["eps"] = cfg.eps;
    j["eps_value"] = cfg.eps_value;
    j["ell"] = cfg.ell;
    j["list_size"] = cfg.list_size;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["figure_id"] = cfg.figure_id;
    j["step"] = cfg.step;
    j["format"] = cfg.format;
    j["out"] = cfg.out;
    j["statistic"] = cfg.statistic;
    j["threads"] = cfg.threads;
    j["ratio"] = cfg.ratio;
    j["max_bits"] = cfg.max_bits;
    j["perturb"] = cfg.perturb;
    return j;
}

// Destination for commands that honor --out.
class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

// Fraction-or-integer text selects the exact path; anything else must be a
// plain decimal and selects the floating-point path.
bool is_exact_syntax(const std::string& text) {
    if (text.find('/') != std::string::npos) return true;
    std::size_t k = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
    if (k == text.size()) return false;
    for (; k < text.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(text[k]))) return false;
    return true;
}

double parse_decimal(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument("trailing junk in number: '" + text + "'");
    return value;
}

void print_value(std::ostream& os, const std::string& name, const std::string& value) {
    os << name << " = " << value << '\n';
}

int run_formula(const RunConfig& cfg) {
    const pcens::EnsembleParams p(cfg.q, cfg.m, cfg.n);
    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    const std::string ld_name = "p_ld(ell=" + std::to_string(cfg.ell) + ")";
    if (is_exact_syntax(cfg.eps)) {
        const pcens::Rational eps = pcens::parse_rational(cfg.eps);
        print_value(os, "p_ud", pcens::format_rational(pcens::p_ud(p, eps)));
        print_value(os, ld_name, pcens::format_rational(pcens::p_ld(p, cfg.ell, eps)));
        print_value(os, "p_mld", pcens::format_rational(pcens::p_mld(p, eps)));
        print_value(os, "variance_ud", pcens::format_rational(pcens::variance_ud(p, eps)));
    } else {
        const double eps = parse_decimal(cfg.eps);
        print_value(os, "p_ud", pcens::format_double(std::exp(pcens::log_p_ud(p, eps))));
        print_value(os, ld_name, pcens::format_double(std::exp(pcens::log_p_ld(p, cfg.ell, eps))));
        print_value(os, "p_mld", pcens::format_double(std::exp(pcens::log_p_mld(p, eps))));
        print_value(os, "variance_ud",
                    pcens::format_double(std::exp(pcens::log_variance_ud(p, eps))));
    }
    return 0;
}

int run_exponent(const RunConfig& cfg) {
    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    const unsigned q = cfg.q;
    const double rate = cfg.rate, eps = cfg.eps_value;

    const auto ld = pcens::t_ld({q, rate, eps, cfg.ell});
    const auto ud = pcens::t_ud(q, rate, eps);
    const auto mld = pcens::t_mld(q, rate, eps);
    const double star = pcens::t_ld_star(q, cfg.list_size, rate, eps);
    const auto s = pcens::s_ud(q, rate, eps);
    const double k0 = pcens::kappa0(q, rate);
    const double margin = pcens::concentration_margin(q, rate, eps);

    print_value(os, "t_ud", pcens::format_double(ud.value));
    print_value(os, "t_ld(ell=" + std::to_string(cfg.ell) + ")", pcens::format_double(ld.value));
    print_value(os, "t_mld", pcens::format_double(mld.value));
    print_value(os, "t_ld_star(L=" + std::to_string(cfg.list_size) + ")",
                pcens::format_double(star));
    print_value(os, "s_ud", pcens::format_double(s.value));
    print_value(os, "kappa0", pcens::format_double(k0));
    print_value(os, "concentration_margin", pcens::format_double(margin));

    // cross-checks against the brute-force maximizers, printed every run
    const auto supf = pcens::sup_f_numeric(q, rate, eps, cfg.ell);
    const auto supg = pcens::sup_g_numeric(q, rate, eps);
    print_value(os, "delta_t_ld_numeric", pcens::format_double(std::fabs(ld.value + supf.value)));
    print_value(os, "delta_s_ud_numeric", pcens::format_double(std::fabs(s.value + supg.value)));
    return 0;
}

int run_figure(const RunConfig& cfg) {
    const pcens::Figure fig = pcens::build_figure(cfg.figure_id, cfg.step);
    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    if (cfg.format == "csv") {
        pcens::write_figure_csv(os, fig);
        return 0;
    }
    ordered_json j;
    j["id"] = fig.id;
    j["parameters"] = fig.parameters;
    j["series"] = ordered_json::array();
    for (const auto& s : fig.series) {
        ordered_json js;
        js["label"] = s.label;
        js["function"] = s.function_name;
        js["q"] = s.q;
        js["epsilon"] = s.epsilon;
        if (s.ell >= 0) js["ell"] = s.ell;
        if (s.list_size >= 0) js["list_size"] = s.list_size;
        js["points"] = ordered_json::array();
        for (const auto& [r, v] : s.points) js["points"].push_back({r, v});
        j["series"].push_back(std::move(js));
    }
    os << j.dump(2) << '\n';
    return 0;
}

int run_simulate(const RunConfig& cfg) {
    if (cfg.ell < 0) throw std::invalid_argument("list exponent must be >= 0");
    if (!pcens::FieldParam::is_prime(cfg.q))
        throw std::invalid_argument(
            "q = " + std::to_string(cfg.q) +
            " is not prime: the closed forms and exponents cover any prime power, but "
            "sampling draws matrix entries from a prime field (try formula or exponent)");
    unsigned m = cfg.m;
    const bool from_rate = cfg.rate >= 0.0;
    if (from_rate) m = pcens::rows_for_rate(cfg.rate, cfg.n);
    const pcens::EnsembleParams params(cfg.q, m, cfg.n);
    const pcens::Rational eps = is_exact_syntax(cfg.eps)
                                    ? pcens::parse_rational(cfg.eps)
                                    : pcens::rational_from_double(parse_decimal(cfg.eps));
    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();

    if (cfg.ratio) {
        const auto rep = pcens::ratio_concentration_experiment(params, eps, cfg.samples, cfg.seed,
                                                               cfg.threads);
        os << "# source: ratio experiment q=" << params.q << " m=" << params.m
           << " n=" << params.n << " eps=" << pcens::format_rational(eps)
           << " samples=" << rep.count << " seed=" << rep.seed << '\n';
        if (from_rate)
            os << "# rows = round((1 - " << pcens::format_double(cfg.rate) << ") * " << params.n
               << ") = " << params.m << '\n';
        os << "# reference = " << pcens::format_rational(rep.reference) << '\n';
        os << "# within_half = " << pcens::format_double(rep.within_half) << '\n';
        os << "# within_quarter = " << pcens::format_double(rep.within_quarter) << '\n';
        os << "# within_tenth = " << pcens::format_double(rep.within_tenth) << '\n';
        os << "ratio_bin,count\n";
        for (const auto& [bin, count] : rep.bins)
            os << pcens::format_double(static_cast<double>(bin) * 0.05) << ',' << count << '\n';
        return 0;
    }

    pcens::StatisticSelector sel;
    if (cfg.statistic == "ud") {
        sel = {pcens::StatisticSelector::Kind::ud, 0};
    } else if (cfg.statistic == "ld") {
        sel = {pcens::StatisticSelector::Kind::ld, static_cast<std::size_t>(cfg.ell)};
    } else if (cfg.statistic == "mld") {
        sel = {pcens::StatisticSelector::Kind::mld, 0};
    } else {
        throw std::invalid_argument("statistic must be ud, ld or mld");
    }
    const auto rep = pcens::monte_carlo(params, eps, cfg.samples, cfg.seed, sel, cfg.threads);

    ordered_json j;
    j["params"] = ordered_json{{"q", params.q}, {"m", params.m}, {"n", params.n}};
    if (from_rate) j["params"]["rate"] = cfg.rate;
    j["epsilon"] = pcens::format_rational(eps);
    j["statistic"] = cfg.statistic == "ld" ? "ld(ell=" + std::to_string(cfg.ell) + ")"
                                           : cfg.statistic;
    j["mean"] = pcens::format_rational(rep.mean);
    j["variance"] = pcens::format_rational(rep.variance);
    j["stderr"] = rep.std_error;
    j["count"] = rep.count;
    j["seed"] = rep.seed;
    j["rng"] = rep.rng_tag;
    os << j.dump(2) << '\n';
    return 0;
}

struct VerifyOutcome {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

void record(std::ostream& os, VerifyOutcome& sum, const std::string& name, bool pass,
            const std::string& detail = "") {
    os << (pass ? "[PASS] " : "[FAIL] ") << name;
    if (!pass && !detail.empty()) os << " -- " << detail;
    os << '\n';
    (pass ? sum.passed : sum.failed) += 1;
}

int run_verify(const RunConfig& cfg) {
    if (cfg.perturb) pcens::qcomb::detail::psi_perturbation() = true;
    OutputTarget target(cfg.out);
    std::ostream& os = target.stream();
    VerifyOutcome sum;

    // exact identities of the base combinatorics; sensitive to --perturb
    {
        bool ok = true;
        std::string detail;
        for (unsigned q : {2u, 3u, 5u})
            for (long m = 0; m <= 12 && ok; ++m)
                for (long i = 0; i <= m && ok; ++i)
                    if (!pcens::qcomb::psi_identity_check(m, i, q)) {
                        ok = false;
                        detail = "psi identity fails at q=" + std::to_string(q) +
                                 " m=" + std::to_string(m) + " i=" + std::to_string(i);
                    }
        record(os, sum, "independence-probability identity grid", ok, detail);
    }

    // enumerate every matrix on each small shape and certify the closed forms
    {
        struct Instance {
            unsigned q, m, n;
            pcens::Rational eps;
        };
        std::vector<Instance> instances;
        for (unsigned q : {2u, 3u})
            for (unsigned m = 1; m <= 4; ++m)
                for (unsigned n = 1; n <= 5; ++n) {
                    double bits = static_cast<double>(m) * n * std::log2(static_cast<double>(q));
                    if (bits <= static_cast<double>(cfg.max_bits))
                        instances.push_back({q, m, n, pcens::Rational(1, 2)});
                }
        instances.push_back({3, 2, 2, pcens::Rational(1, 3)});
        for (const auto& inst : instances) {
            const auto report = pcens::exhaustive_oracle(
                pcens::EnsembleParams(inst.q, inst.m, inst.n), inst.eps, pcens::oracle::kAll,
                cfg.max_bits);
            const std::string where = "q=" + std::to_string(inst.q) + " m=" +
                                      std::to_string(inst.m) + " n=" + std::to_string(inst.n) +
                                      " eps=" + pcens::format_rational(inst.eps);
            for (const auto& entry : report.entries)
                record(os, sum, entry.name + " (" + where + ")", entry.pass, entry.detail);
        }
    }

    // closed-form exponents against the brute-force maximizers
    {
        double worst = 0.0;
        for (unsigned q : {2u, 3u, 4u})
            for (double eps : {0.1, 0.25, 0.5})
                for (double rate : {0.15, 0.45, 0.8})
                    for (long ell : {0L, 2L}) {
                        const double closed = pcens::t_ld({q, rate, eps, ell}).value;
                        const double numeric = -pcens::sup_f_numeric(q, rate, eps, ell).value;
                        worst = std::max(worst, std::fabs(closed - numeric));
                    }
        record(os, sum, "failure exponent matches its numeric supremum", worst < 1e-6,
               "worst delta " + pcens::format_double(worst));
    }
    {
        double worst = 0.0;
        for (unsigned q : {2u, 3u})
            for (double eps : {0.25, 0.5})
                for (double rate : {0.3, 0.8}) {
                    const double closed = pcens::s_ud(q, rate, eps).value;
                    const double numeric = -pcens::sup_g_numeric(q, rate, eps).value;
                    worst = std::max(worst, std::fabs(closed - numeric));
                }
        record(os, sum, "variance exponent matches its numeric supremum", worst < 1e-6,
               "worst delta " + pcens::format_double(worst));
    }

    // stationarity of the variance-exponent root
    {
        double worst = 0.0;
        for (unsigned q : {2u, 3u, 4u, 5u})
            for (int k = 1; k < 20; ++k) {
                const double rate = k / 20.0;
                const double kap = pcens::kappa0(q, rate);
                const double lhs = q * (1.0 - rate - kap) * (1.0 - rate - kap);
                const double rhs = kap * (2.0 * rate - 1.0 + kap);
                worst = std::max(worst, std::fabs(lhs - rhs));
            }
        record(os, sum, "variance-exponent root satisfies its stationarity equation",
               worst < 1e-9, "worst residual " + pcens::format_double(worst));
    }

    // concentration margin positivity on both guaranteed regions
    {
        bool ok = true;
        std::string detail;
        const auto sweep = [&](unsigned q, bool wide_region) {
            for (int a = 1; a < 20 && ok; ++a) {
                const double eps = a / 20.0;
                const double qm1 = static_cast<double>(q) - 1.0;
                const double lo = wide_region ? (1.0 - eps) / (1.0 + qm1 * eps * eps)
                                              : (1.0 - eps) / (1.0 + qm1 * eps);
                const double hi = 1.0 - eps;
                if (lo >= hi) continue;
                for (int b = 0; b < 20 && ok; ++b) {
                    const double rate = lo + (hi - lo) * b / 20.0;
                    if (pcens::concentration_margin(q, rate, eps) <= 0.0) {
                        ok = false;
                        detail = "margin not positive at q=" + std::to_string(q) +
                                 " eps=" + pcens::format_double(eps) +
                                 " R=" + pcens::format_double(rate);
                    }
                }
            }
        };
        for (unsigned q : {2u, 3u, 4u, 5u}) sweep(q, true);
        for (unsigned q : {2u, 3u, 4u}) sweep(q, false);
        record(os, sum, "concentration margin positive on the guaranteed rate regions", ok,
               detail);
    }

    os << sum.passed << " of " << (sum.passed + sum.failed) << " checks passed\n";
    return sum.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"analytics and simulation for random parity-check codes on erasure channels"};
    app.require_subcommand(1);
    app.add_flag("--json-config", cfg.echo_config,
                 "print the resolved run configuration as JSON and exit");

    auto* formula = app.add_subcommand("formula", "exact ensemble-average decoding statistics");
    formula->add_option("--q", cfg.q, "field size")->required();
    formula->add_option("--m", cfg.m, "parity-check rows")->required();
    formula->add_option("--n", cfg.n, "code length")->required();
    formula->add_option("--eps", cfg.eps, "erasure probability: a/b exact, decimal floating")
        ->required();
    formula->add_option("--ell", cfg.ell, "list exponent for p_ld (default 0)");

    auto* exponent = app.add_subcommand("exponent", "asymptotic error and variance exponents");
    exponent->add_option("--q", cfg.q, "field size")->required();
    exponent->add_option("--R", cfg.rate, "code rate in (0,1)")->required();
    exponent->add_option("--eps", cfg.eps_value, "erasure probability in (0,1)")->required();
    exponent->add_option("--ell", cfg.ell, "list exponent (default 0)");
    exponent->add_option("--list-size", cfg.list_size, "explicit list size (default 1)");

    auto* figure = app.add_subcommand("figure", "rate sweeps behind the standard plots");
    figure->add_option("--id", cfg.figure_id, "figure number, 1-4")->required();
    figure->add_option("--step", cfg.step, "rate grid step (default 1/500)");
    figure->add_option("--format", cfg.format, "csv or json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    figure->add_option("--out", cfg.out, "output path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "seeded sampling from the matrix ensemble");
    simulate->add_option("--q", cfg.q, "field size (prime)")->required();
    simulate->add_option("--n", cfg.n, "code length (at most 22)")->required();
    auto* m_opt = simulate->add_option("--m", cfg.m, "parity-check rows");
    simulate->add_option("--R", cfg.rate, "code rate; sets m = round((1-R) n)")->excludes(m_opt);
    simulate->add_option("--eps", cfg.eps, "erasure probability: a/b or decimal")->required();
    simulate->add_option("--samples", cfg.samples, "sample count (default 10000)");
    simulate->add_option("--seed", cfg.seed, "master seed (default 42)");
    simulate->add_option("--statistic", cfg.statistic, "ud, ld or mld (default ud)")
        ->check(CLI::IsMember({"ud", "ld", "mld"}));
    simulate->add_option("--ell", cfg.ell, "list exponent for --statistic ld");
    simulate->add_option("--threads", cfg.threads, "worker count (result is identical)");
    simulate->add_flag("--ratio", cfg.ratio,
                       "per-code failure over ensemble mean, histogram output");
    simulate->add_option("--out", cfg.out, "output path (default stdout)");

    auto* verify = app.add_subcommand("verify", "run the self-verification battery");
    verify->add_option("--max-bits", cfg.max_bits,
                       "enumerate shapes with q^(m n) <= 2^max-bits (default 16)");
    verify->add_flag("--perturb", cfg.perturb,
                     "corrupt one internal constant; every exact check must then fail");
    verify->add_option("--out", cfg.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(formula)) cfg.subcommand = "formula";
        if (app.got_subcommand(exponent)) cfg.subcommand = "exponent";
        if (app.got_subcommand(figure)) cfg.subcommand = "figure";
        if (app.got_subcommand(simulate)) cfg.subcommand = "simulate";
        if (app.got_subcommand(verify)) cfg.subcommand = "verify";
        if (cfg.echo_config) {
            std::cout << config_json(cfg).dump(2) << '\n';
            return 0;
        }
        if (cfg.subcommand == "formula") return run_formula(cfg);
        if (cfg.subcommand == "exponent") return run_exponent(cfg);
        if (cfg.subcommand == "figure") return run_figure(cfg);
        if (cfg.subcommand == "simulate") {
            if (simulate->count("--m") == 0 && simulate->count("--R") == 0)
                throw std::invalid_argument("simulate needs --m or --R");
            return run_simulate(cfg);
        }
        if (cfg.subcommand == "verify") return run_verify(cfg);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
