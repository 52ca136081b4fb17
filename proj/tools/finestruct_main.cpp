// Command-line front end: solve chain equilibria, dump difference tables and
// scale profiles, run the verification reports, and emit exact combinatorial
// tables. All artifacts are deterministic decimal text; a run with the same
// arguments and bit width reproduces its output byte for byte.
//
// Exit codes: 0 success, 2 solver non-convergence, 3 invalid input,
// 4 verification failure (some pass flag is false).

#include <CLI11.hpp>

#include <finestruct/analysis.hpp>
#include <finestruct/report_io.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace {

using namespace finestruct;

constexpr int kExitOk = 0;
constexpr int kExitSolver = 2;
constexpr int kExitInput = 3;
constexpr int kExitVerify = 4;

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("--n: '" + token + "' is not an integer");
        }
        if (used != token.size())
            throw std::invalid_argument("--n: '" + token + "' is not an integer");
        if (value < 2)
            throw std::invalid_argument("--n: chain sizes must be at least 2");
        out.push_back(value);
    }
    if (out.empty())
        throw std::invalid_argument("--n: empty list");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot read '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void emit_artifact(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file_atomic(out_path, content);
}

// Pre-solves a sweep into the shared cache. The working precision is a
// process-wide setting, so jobs are grouped by bit width and the groups run
// one after another; chains inside a group solve concurrently. Worker scopes
// re-assert the group's width, which is harmless.
void warm_solves(const std::vector<std::pair<int, PrecisionContext>>& chains,
                 const ForceModel& force, int jobs) {
    std::map<long, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < chains.size(); ++k)
        groups[chains[k].second.mantissa_bits].push_back(k);
    for (const auto& [bits, members] : groups) {
        PrecisionScope scope(bits);
        const std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(jobs), members.size());
        if (workers <= 1) {
            for (std::size_t k : members)
                cached_solve(chains[k].first, force, chains[k].second);
            continue;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mu;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t slot = next.fetch_add(1);
                    if (slot >= members.size())
                        return;
                    try {
                        const std::size_t k = members[slot];
                        cached_solve(chains[k].first, force, chains[k].second);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mu);
                        if (!error)
                            error = std::current_exception();
                    }
                }
            });
        for (std::thread& t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
}

// Shared options; each subcommand wires up the subset it understands.
struct Options {
    std::string n_list;
    std::string force_spec;
    long bits = 0;
    std::string tol;
    std::string flat_tol;
    std::string config_path;
    std::string out;
    int jobs = 1;
    int lmin = 0;
    int lmax = 0;
    int nmax = 0;
    int imax = 0;
    double eps = 0;
    bool probe_mode = false;
    double ratio_band = AnalysisTolerances{}.ratio_band;
    double decay_factor = AnalysisTolerances{}.decay_factor;
    double band_constant = AnalysisTolerances{}.band_trial_constant;
};

AnalysisTolerances tolerances_from(const Options& opt) {
    AnalysisTolerances tol;
    tol.ratio_band = opt.ratio_band;
    tol.decay_factor = opt.decay_factor;
    tol.band_trial_constant = opt.band_constant;
    return tol;
}

int table_order_for(const Configuration& config, int requested) {
    if (requested > 0)
        return requested;
    return std::min(default_order_cap(config.n_points), config.context.l_max);
}

int run_solve(const Options& opt) {
    ForceModel force = parse_force(opt.force_spec);
    std::vector<int> ns = parse_n_list(opt.n_list);
    if (ns.size() != 1)
        throw std::invalid_argument("solve: expects a single chain size");
    const int n = ns.front();
    const int l_max = opt.lmax > 0 ? opt.lmax : default_order_cap(n);
    PrecisionContext ctx = make_context(n, l_max, opt.bits);
    if (!opt.tol.empty()) {
        PrecisionScope scope(ctx.mantissa_bits);
        Real t(opt.tol);
        if (!(t > 0))
            throw std::invalid_argument("solve: --tol must be positive");
        ctx.solver_tol = t;
    }
    Configuration config = solve_newton(n, force, ctx);
    emit_artifact(opt.out, config_json(config));
    return kExitOk;
}

int run_diff(const Options& opt) {
    Configuration config = config_from_json(read_file(opt.config_path));
    DifferenceTable table = difference_table(config, table_order_for(config, opt.lmax));
    emit_artifact(opt.out, table_csv(table));
    return kExitOk;
}

int run_scales(const Options& opt) {
    Configuration config = [&] {
        if (!opt.config_path.empty())
            return config_from_json(read_file(opt.config_path));
        if (opt.n_list.empty() || opt.force_spec.empty())
            throw std::invalid_argument("scales: pass --config or both --n and --force");
        std::vector<int> ns = parse_n_list(opt.n_list);
        if (ns.size() != 1)
            throw std::invalid_argument("scales: expects a single chain size");
        const int l_max = opt.lmax > 0 ? opt.lmax : default_order_cap(ns.front());
        return solve_newton(ns.front(), parse_force(opt.force_spec),
                            make_context(ns.front(), l_max, opt.bits));
    }();
    const int order = table_order_for(config, opt.lmax);
    DifferenceTable table = difference_table(config, order);
    emit_artifact(opt.out, scale_csv(scale_profile(table), scale_predictions(config, order)));
    return kExitOk;
}

int run_verify_thm1(const Options& opt) {
    ForceModel force = parse_force(opt.force_spec);
    if (force.kind != ForceKind::constant)
        throw std::invalid_argument("verify thm1: needs a constant force, e.g. const:1");
    std::vector<int> ns = parse_n_list(opt.n_list);
    const int l_min = opt.lmin > 0 ? opt.lmin : 1;
    const int l_max = opt.lmax > 0 ? opt.lmax : 5;

    std::vector<std::pair<int, PrecisionContext>> chains;
    for (int n : ns) {
        PrecisionContext ctx = make_context(n, l_max + 1, opt.bits);
        chains.emplace_back(n, ctx);
        chains.emplace_back(n, shadow_context(ctx));
    }
    warm_solves(chains, force, opt.jobs);

    std::vector<Configuration> configs;
    for (int n : ns)
        configs.push_back(cached_solve(n, force, make_context(n, l_max + 1, opt.bits)));
    TheoremReport report = const_force_report(configs, l_min, l_max, tolerances_from(opt));
    emit_artifact(opt.out, report_csv({report}));
    return report.pass ? kExitOk : kExitVerify;
}

int run_verify_bound(const Options& opt, bool linear) {
    const char* who = linear ? "verify thm2" : "verify thm3";
    ForceModel force = parse_force(opt.force_spec);
    if (linear && force.kind != ForceKind::linear)
        throw std::invalid_argument(std::string(who) + ": needs a linear force, e.g. linear:1");
    if (!linear && force.kind != ForceKind::power)
        throw std::invalid_argument(std::string(who) + ": needs a power force, e.g. power:1:3");
    std::vector<int> ns = parse_n_list(opt.n_list);
    const int l_min = opt.lmin > 0 ? opt.lmin : 2;
    const int l_max = opt.lmax > 0 ? opt.lmax : 8;
    const int order = std::max(l_max, linear ? 3 : 2);

    std::vector<std::pair<int, PrecisionContext>> chains;
    for (int n : ns) {
        PrecisionContext ctx = make_context(n, order, opt.bits);
        chains.emplace_back(n, ctx);
        chains.emplace_back(n, shadow_context(ctx));
    }
    warm_solves(chains, force, opt.jobs);

    std::vector<TheoremReport> reports;
    bool all_pass = true;
    for (int n : ns) {
        const Configuration& config = cached_solve(n, force, make_context(n, order, opt.bits));
        TheoremReport report =
            linear ? linear_force_report(config, l_min, l_max, opt.probe_mode, tolerances_from(opt))
                   : power_force_report(config, l_min, l_max, opt.probe_mode, tolerances_from(opt));
        all_pass = all_pass && report.pass;
        reports.push_back(std::move(report));
    }
    emit_artifact(opt.out, report_csv(reports));
    return all_pass ? kExitOk : kExitVerify;
}

int run_verify_gaps(const Options& opt) {
    ForceModel force = parse_force(opt.force_spec);
    if (force.kind != ForceKind::zero && force.kind != ForceKind::constant)
        throw std::invalid_argument("verify gaps: needs a zero or constant force");
    std::vector<int> ns = parse_n_list(opt.n_list);

    std::vector<std::pair<int, PrecisionContext>> chains;
    for (int n : ns) {
        PrecisionContext ctx = make_context(n, 1, opt.bits);
        chains.emplace_back(n, ctx);
        chains.emplace_back(n, shadow_context(ctx));
    }
    warm_solves(chains, force, opt.jobs);

    std::vector<TheoremReport> reports;
    bool all_pass = true;
    for (int n : ns) {
        const Configuration& config = cached_solve(n, force, make_context(n, 1, opt.bits));
        Real flat(0);
        if (!opt.flat_tol.empty()) {
            PrecisionScope scope(config.context.mantissa_bits);
            flat = Real(opt.flat_tol);
        }
        TheoremReport report = gap_expansion_check(config, flat, tolerances_from(opt));
        all_pass = all_pass && report.pass;
        reports.push_back(std::move(report));
    }
    emit_artifact(opt.out, report_csv(reports));
    return all_pass ? kExitOk : kExitVerify;
}

int run_verify_eps_band(const Options& opt) {
    ForceModel force = parse_force(opt.force_spec);
    if (force.kind != ForceKind::constant)
        throw std::invalid_argument("verify eps-band: needs a constant force");
    std::vector<int> ns = parse_n_list(opt.n_list);

    std::vector<std::pair<int, PrecisionContext>> chains;
    for (int n : ns) {
        const int l = static_cast<int>(std::lround(opt.eps * n));
        if (!(opt.eps > 0) || l < 1 || l + 1 >= n)
            throw std::invalid_argument("verify eps-band: --eps must round to an order in [1, N-2]");
        PrecisionContext ctx = make_context(n, l + 1, opt.bits);
        chains.emplace_back(n, ctx);
        chains.emplace_back(n, shadow_context(ctx));
    }
    warm_solves(chains, force, opt.jobs);

    std::vector<TheoremReport> reports;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const Configuration& config = cached_solve(ns[k], force, chains[2 * k].second);
        reports.push_back(epsilon_band_probe(config, opt.eps, tolerances_from(opt)));
    }
    emit_artifact(opt.out, report_csv(reports));
    return kExitOk;  // exploratory: row verdicts are informational
}

int run_stirling(const Options& opt) {
    StirlingTable table(opt.nmax, opt.lmax, opt.imax);
    emit_artifact(opt.out, stirling_csv(table));
    return kExitOk;
}

int run_demo_discretize(const Options& opt) {
    std::vector<int> ns = parse_n_list(opt.n_list);
    std::vector<TheoremReport> reports;
    bool all_pass = true;
    for (int n : ns) {
        reports.push_back(discretization_demo(n, opt.nmax));
        all_pass = all_pass && reports.back().pass;
    }
    emit_artifact(opt.out, report_csv(reports));
    return all_pass ? kExitOk : kExitVerify;
}

void add_bits_option(CLI::App* cmd, Options& opt) {
    cmd->add_option("--bits", opt.bits,
                    "mantissa bits (0 = size from N and the table order)")
        ->envname("FINESTRUCT_BITS")
        ->check(CLI::Range(0L, 1L << 24));
}

void add_out_option(CLI::App* cmd, Options& opt) {
    cmd->add_option("--out", opt.out, "output path (omit to print to stdout)");
}

void add_jobs_option(CLI::App* cmd, Options& opt) {
    cmd->add_option("--jobs", opt.jobs, "solver threads per same-precision batch")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Equilibria of repelling points on [0,1]: solvers, difference tables, "
        "scale profiles, verification reports, exact combinatorial tables"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* solve = app.add_subcommand("solve", "solve one chain and write its JSON form");
    solve->add_option("--n", opt.n_list, "number of points")->required();
    solve->add_option("--force", opt.force_spec,
                      "zero | const:<F> | linear:<alpha> | power:<alpha>:<n>")
        ->required();
    solve->add_option("--lmax", opt.lmax, "difference order the precision must support");
    solve->add_option("--tol", opt.tol, "override the solver tolerance (decimal)");
    add_bits_option(solve, opt);
    add_out_option(solve, opt);

    CLI::App* diff = app.add_subcommand("diff", "difference table of a stored configuration");
    diff->add_option("--config", opt.config_path, "configuration JSON path")->required();
    diff->add_option("--lmax", opt.lmax, "highest difference order");
    add_out_option(diff, opt);

    CLI::App* scales = app.add_subcommand("scales",
                                          "per-order scale profile (kappa vs prediction)");
    scales->add_option("--config", opt.config_path, "configuration JSON path");
    scales->add_option("--n", opt.n_list, "number of points (when not using --config)");
    scales->add_option("--force", opt.force_spec, "force spec (when not using --config)");
    scales->add_option("--lmax", opt.lmax, "highest difference order");
    add_bits_option(scales, opt);
    add_out_option(scales, opt);

    CLI::App* verify = app.add_subcommand("verify", "run a verification report");
    verify->require_subcommand(1);

    CLI::App* thm1 = verify->add_subcommand(
        "thm1", "constant force: expansion main-term decay and sign pattern over an N sweep");
    thm1->add_option("--n", opt.n_list, "comma list of chain sizes, e.g. 500,1000,2000")
        ->required();
    thm1->add_option("--force", opt.force_spec, "constant force, e.g. const:1")->required();
    thm1->add_option("--lmin", opt.lmin, "lowest order (default 1)");
    thm1->add_option("--lmax", opt.lmax, "highest order (default 5)");
    thm1->add_option("--decay-factor", opt.decay_factor,
                     "required deviation shrink per N doubling");
    add_bits_option(thm1, opt);
    add_jobs_option(thm1, opt);
    add_out_option(thm1, opt);

    CLI::App* thm2 =
        verify->add_subcommand("thm2", "linear force: growth bound on difference scales");
    thm2->add_option("--n", opt.n_list, "comma list of chain sizes")->required();
    thm2->add_option("--force", opt.force_spec, "linear force, e.g. linear:1")->required();
    thm2->add_option("--lmin", opt.lmin, "lowest order (default 2)");
    thm2->add_option("--lmax", opt.lmax, "highest order (default 8)");
    thm2->add_flag("--probe-mode", opt.probe_mode, "allow amplitudes below 1, flagged");
    thm2->add_option("--ratio-band", opt.ratio_band, "allowed |ratio - 1| for the term rows");
    add_bits_option(thm2, opt);
    add_jobs_option(thm2, opt);
    add_out_option(thm2, opt);

    CLI::App* thm3 =
        verify->add_subcommand("thm3", "power force: growth bound on difference scales");
    thm3->add_option("--n", opt.n_list, "comma list of chain sizes")->required();
    thm3->add_option("--force", opt.force_spec, "power force, e.g. power:1:3")->required();
    thm3->add_option("--lmin", opt.lmin, "lowest order (default 2)");
    thm3->add_option("--lmax", opt.lmax, "highest order (default 8)");
    thm3->add_flag("--probe-mode", opt.probe_mode, "allow amplitudes below 1, flagged");
    thm3->add_option("--ratio-band", opt.ratio_band, "allowed |ratio - 1| for the term rows");
    add_bits_option(thm3, opt);
    add_jobs_option(thm3, opt);
    add_out_option(thm3, opt);

    CLI::App* gaps = verify->add_subcommand("gaps", "near-even gap deviation ratios");
    gaps->add_option("--n", opt.n_list, "comma list of chain sizes")->required();
    gaps->add_option("--force", opt.force_spec, "zero or const:<F>")->required();
    gaps->add_option("--flat-tol", opt.flat_tol,
                     "zero-force flatness threshold (decimal, default solver tolerance)");
    gaps->add_option("--ratio-band", opt.ratio_band, "allowed |ratio - 1| inside the window");
    add_bits_option(gaps, opt);
    add_jobs_option(gaps, opt);
    add_out_option(gaps, opt);

    CLI::App* band = verify->add_subcommand(
        "eps-band", "exploratory scan at order round(eps*N) against the Stirling-form scale");
    band->add_option("--n", opt.n_list, "comma list of chain sizes")->required();
    band->add_option("--force", opt.force_spec, "constant force, e.g. const:1")->required();
    band->add_option("--eps", opt.eps, "order fraction, l = round(eps*N)")->required();
    band->add_option("--band-constant", opt.band_constant, "band half width = constant * eps");
    add_bits_option(band, opt);
    add_jobs_option(band, opt);
    add_out_option(band, opt);

    CLI::App* stirling = app.add_subcommand("stirling", "exact generalized table dump");
    stirling->add_option("--nmax", opt.nmax, "largest power (default 8)");
    stirling->add_option("--lmax", opt.lmax, "largest order (default 8)");
    stirling->add_option("--imax", opt.imax, "largest shift (default 4)");
    add_out_option(stirling, opt);

    CLI::App* demo = app.add_subcommand("demo", "self-contained demonstrations");
    demo->require_subcommand(1);
    CLI::App* discretize = demo->add_subcommand(
        "discretize", "difference-order error bound on a smooth periodic sample");
    discretize->add_option("--n", opt.n_list, "comma list of sample counts")->required();
    discretize->add_option("--nmax", opt.nmax, "highest difference order (default 10)");
    add_out_option(discretize, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (solve->parsed())
            return run_solve(opt);
        if (diff->parsed())
            return run_diff(opt);
        if (scales->parsed())
            return run_scales(opt);
        if (verify->parsed()) {
            if (thm1->parsed())
                return run_verify_thm1(opt);
            if (thm2->parsed())
                return run_verify_bound(opt, true);
            if (thm3->parsed())
                return run_verify_bound(opt, false);
            if (gaps->parsed())
                return run_verify_gaps(opt);
            if (band->parsed())
                return run_verify_eps_band(opt);
        }
        if (stirling->parsed()) {
            if (stirling->count("--nmax") == 0)
                opt.nmax = 8;
            if (stirling->count("--lmax") == 0)
                opt.lmax = 8;
            if (stirling->count("--imax") == 0)
                opt.imax = 4;
            return run_stirling(opt);
        }
        if (demo->parsed() && discretize->parsed()) {
            if (discretize->count("--nmax") == 0)
                opt.nmax = 10;
            return run_demo_discretize(opt);
        }
        throw std::invalid_argument("no subcommand selected");
    } catch (const solve_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}
