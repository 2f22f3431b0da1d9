// cogmac_cli: simulate | validate | espar | analytic
//
// Precedence: command-line flag > COGMAC_<FLAG> environment variable > config file >
// preset defaults. Exit codes: 0 success, 1 failed check or partial sweep, 2 usage or
// configuration error, 3 degenerate ESPAR load.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/program_options.hpp>

#include "cogmac/acceptance.hpp"
#include "cogmac/analytic.hpp"
#include "cogmac/config.hpp"
#include "cogmac/csv.hpp"
#include "cogmac/espar.hpp"
#include "cogmac/simulator.hpp"

namespace po = boost::program_options;
using namespace cogmac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kUsage =
    "usage: cogmac_cli <command> [options]\n"
    "commands:\n"
    "  simulate   run a preset or config sweep and write CSV\n"
    "  validate   run the acceptance suite (--level fast|full)\n"
    "  espar      write an ESPAR radiation pattern CSV and basis report\n"
    "  analytic   tabulate a closed-form expression over a grid\n"
    "run 'cogmac_cli <command> --help' for command options\n";

po::options_description common_options() {
    po::options_description d("common options");
    d.add_options()("help,h", "show help")                                      //
        ("config", po::value<std::string>(), "JSON config file")                 //
        ("preset", po::value<std::string>(), "fig5 | fig6 | fig7 | fig8 | custom")  //
        ("seed", po::value<std::uint64_t>(), "master seed")                      //
        ("trials", po::value<long long>(), "Monte-Carlo trials per point")       //
        ("threads", po::value<unsigned>()->default_value(1), "worker threads (results do not depend on it)")  //
        ("out", po::value<std::string>(), "output path ('-' for stdout)");
    return d;
}

/// Flags first, then COGMAC_* variables for any option not given on the command line.
po::variables_map parse_args(const std::vector<std::string>& args, const po::options_description& desc) {
    po::variables_map vm;
    po::store(po::command_line_parser(args).options(desc).run(), vm);
    po::store(po::parse_environment(desc,
                                    [&desc](const std::string& env) -> std::string {
                                        const std::string prefix = "COGMAC_";
                                        if (env.rfind(prefix, 0) != 0) return "";
                                        std::string name = env.substr(prefix.size());
                                        for (auto& ch : name) ch = ch == '_' ? '-' : static_cast<char>(std::tolower(ch));
                                        return desc.find_nothrow(name, false) ? name : "";
                                    }),
              vm);
    po::notify(vm);
    return vm;
}

ExperimentPreset load_preset(const po::variables_map& vm) {
    ExperimentPreset p;
    if (vm.count("config")) {
        p = parse_config_file(vm["config"].as<std::string>());
        if (vm.count("preset") && vm["preset"].as<std::string>() != p.name)
            throw UsageError("--preset '" + vm["preset"].as<std::string>() + "' conflicts with config preset '" +
                             p.name + "'");
    } else {
        p = make_preset(vm.count("preset") ? vm["preset"].as<std::string>() : "custom");
    }
    if (vm.count("seed")) p.network.seed = vm["seed"].as<std::uint64_t>();
    if (vm.count("trials")) p.network.trials = vm["trials"].as<long long>();
    if (vm.count("out")) p.output_path = vm["out"].as<std::string>();
    p.validate();
    return p;
}

/// Writes through `emit` to the file at `path`, or to stdout when the path is empty or "-".
void write_output(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    if (path.empty() || path == "-") {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    emit(out);
}

std::size_t grid_points(const SweepGrid& g) {
    std::size_t total = 0;
    for (Mode m : g.modes) total += g.n_list.size() * g.k_list.size() * (m == Mode::Baseline ? 1 : g.m_list.size());
    return total;
}

int cmd_simulate(const std::vector<std::string>& args) {
    auto desc = common_options();
    desc.add_options()("emit-config", "print the effective config as JSON and exit");
    const auto vm = parse_args(args, desc);
    if (vm.count("help")) {
        std::cout << "usage: cogmac_cli simulate [options]\n" << desc;
        return kExitOk;
    }
    const auto preset = load_preset(vm);
    if (vm.count("emit-config")) {
        std::cout << emit_config(preset);
        return kExitOk;
    }
    const std::size_t total = grid_points(preset.sweep);
    std::size_t done = 0;
    std::cerr << "simulate: preset " << preset.name << ", " << total << " points, " << preset.network.trials
              << " trials each, seed " << preset.network.seed << '\n';
    const auto result = sweep(preset.network, preset.sweep, {vm["threads"].as<unsigned>()},
                              [&](const SweepPoint& pt, double secs) {
                                  std::cerr << '[' << ++done << '/' << total << "] " << to_string(pt.mode)
                                            << " N=" << pt.n_users << " M=" << pt.m_patterns << " K=" << pt.k_factor;
                                  if (pt.ok())
                                      std::cerr << " C=" << to_log_base(pt.estimate->mean, preset.network.log_base)
                                                << " " << to_string(preset.network.log_base);
                                  else
                                      std::cerr << " FAILED: " << pt.error;
                                  std::cerr << " (" << secs << " s)\n";
                              });
    write_output(preset.output_path, [&](std::ostream& out) { write_sweep_csv(out, result); });
    if (result.failed() > 0) {
        std::cerr << "simulate: " << result.failed() << " of " << result.points.size() << " points failed\n";
        return kExitFailed;
    }
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& args) {
    auto desc = common_options();
    desc.add_options()("level", po::value<std::string>()->default_value("fast"), "fast | full");
    const auto vm = parse_args(args, desc);
    if (vm.count("help")) {
        std::cout << "usage: cogmac_cli validate [options]\n" << desc;
        return kExitOk;
    }
    acceptance::SuiteOptions opts;
    try {
        opts.level = acceptance::parse_level(vm["level"].as<std::string>());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    opts.threads = vm["threads"].as<unsigned>();
    if (vm.count("seed")) opts.seed = vm["seed"].as<std::uint64_t>();
    int failed = 0;
    std::ostringstream table;
    acceptance::run_suite(opts, [&](const acceptance::CheckResult& r) {
        const auto line = acceptance::format_result(r);
        std::cout << line << std::endl;
        table << line << '\n';
        failed += r.pass ? 0 : 1;
    });
    std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " checks failed") << std::endl;
    if (vm.count("out")) write_output(vm["out"].as<std::string>(), [&](std::ostream& out) { out << table.str(); });
    return failed == 0 ? kExitOk : kExitFailed;
}

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw UsageError("not a number: '" + item + "'");
        out.push_back(x);
    }
    return out;
}

int cmd_espar(const std::vector<std::string>& args) {
    auto desc = common_options();
    desc.add_options()("reactances", po::value<std::string>(), "comma-separated loads x_1..x_{M-1} in ohms")  //
        ("report", po::value<std::string>(), "write the basis report here instead of the console");
    const auto vm = parse_args(args, desc);
    if (vm.count("help")) {
        std::cout << "usage: cogmac_cli espar [options]\n" << desc;
        return kExitOk;
    }
    EsparSection section = vm.count("config") ? parse_config_file(vm["config"].as<std::string>()).espar : EsparSection{};
    if (vm.count("reactances")) section.reactances = parse_number_list(vm["reactances"].as<std::string>());
    section.validate();
    const auto cfg = section.to_config();
    const auto reactances = section.effective_reactances();

    Eigen::VectorXcd currents;
    try {
        currents = espar::element_currents(cfg, reactances);
    } catch (const espar::DegenerateLoadError& e) {
        std::cerr << "espar: " << e.what() << '\n';
        return kExitDegenerate;
    }
    const auto basis = espar::build_basis(cfg, section.grid_size);
    const auto gram = espar::gram_matrix(basis);
    double off_diag = 0.0, diag = 0.0;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        for (Eigen::Index j = 0; j < gram.cols(); ++j)
            if (i == j)
                diag = std::max(diag, std::abs(gram(i, j) - 1.0));
            else
                off_diag = std::max(off_diag, std::abs(gram(i, j)));
    const auto weights = espar::pattern_weights(currents, basis);

    std::ostringstream report;
    report << "elements " << cfg.m_elements << ", grid " << section.grid_size << '\n'
           << "max off-diagonal |<Phi_i,Phi_j>| " << format_double(off_diag) << '\n'
           << "max diagonal ||Phi_i|^2 - 1| " << format_double(diag) << '\n'
           << "reconstruction error " << format_double(espar::reconstruction_error(currents, basis)) << '\n'
           << "Parseval error " << format_double(espar::parseval_error(currents, basis)) << '\n';
    for (Eigen::Index l = 0; l < weights.size(); ++l)
        report << "w_" << l << " " << format_double(weights(l).real()) << ' ' << format_double(weights(l).imag())
               << '\n';

    const std::string out_path = vm.count("out") ? vm["out"].as<std::string>() : "-";
    write_output(out_path, [&](std::ostream& out) { write_pattern_csv(out, currents, cfg, basis.theta_grid); });
    if (vm.count("report"))
        write_output(vm["report"].as<std::string>(), [&](std::ostream& out) { out << report.str(); });
    else
        (out_path == "-" ? std::cerr : std::cout) << report.str();
    return kExitOk;
}

struct AnalyticFn {
    const char* help;
    bool integer_x;
    std::function<double(double x, double k, double rho)> eval;
};

const std::map<std::string, AnalyticFn>& analytic_functions() {
    static const std::map<std::string, AnalyticFn> fns{
        {"ratio_cdf", {"F(z) of gamma_s/gamma_sp", false, [](double z, double k, double r) { return ratio_cdf(z, {k, r}); }}},
        {"ratio_pdf", {"f(z) of gamma_s/gamma_sp", false, [](double z, double k, double r) { return ratio_pdf(z, {k, r}); }}},
        {"rab_m2_cdf", {"two-pattern F(z)", false, [](double z, double k, double r) { return rab_m2_cdf(z, {k, r}); }}},
        {"rab_m2_tail_cdf",
         {"two-pattern large-z F(z)", false, [](double z, double k, double r) { return rab_m2_tail_cdf(z, {k, r}); }}},
        {"rician_power_pdf",
         {"pdf of |h|^2, mean power 1", false, [](double g, double k, double) { return rician_power_pdf(g, {k, 1.0}); }}},
        {"rician_power_cdf",
         {"cdf of |h|^2, mean power 1", false, [](double g, double k, double) { return rician_power_cdf(g, {k, 1.0}); }}},
        {"normalizer_a_n",
         {"a_N with F(a_N) = 1 - 1/N", true,
          [](double n, double k, double r) { return normalizer_a_n(std::llround(n), {k, r}); }}},
        {"theorem1_law",
         {"capacity growth law in nats", true, [](double n, double k, double) { return theorem1_law(std::llround(n), k); }}},
        {"effective_users_moderate_k",
         {"N (K+1) e^-K", false, [](double n, double k, double) { return effective_users_moderate_k(n, k); }}},
        {"effective_users_rab_m2",
         {"N (K+1) / sqrt(2 pi K)", false, [](double n, double k, double) { return effective_users_rab_m2(n, k); }}},
        {"lambert_w0", {"principal Lambert W", false, [](double x, double, double) { return lambert_w0(x); }}},
        {"bessel_i0", {"modified Bessel I0", false, [](double x, double, double) { return bessel_i0(x); }}},
        {"arcsine_pdf", {"density of cos(U)", false, [](double y, double, double) { return arcsine_pdf(y); }}},
    };
    return fns;
}

int cmd_analytic(const std::vector<std::string>& args) {
    auto desc = common_options();
    desc.add_options()("function", po::value<std::string>(), "expression to tabulate (--list to show)")  //
        ("list", "list available expressions")                                                           //
        ("k", po::value<double>()->default_value(0.0), "Rician K-factor")                                //
        ("rho", po::value<double>()->default_value(1.0), "power ratio gamma_sp/gamma_s")                 //
        ("from", po::value<double>()->default_value(0.0), "grid start")                                  //
        ("to", po::value<double>()->default_value(10.0), "grid end")                                     //
        ("points", po::value<int>()->default_value(101), "grid points")                                  //
        ("log", "log-spaced grid (from > 0)");
    const auto vm = parse_args(args, desc);
    if (vm.count("help")) {
        std::cout << "usage: cogmac_cli analytic --function NAME [options]\n" << desc;
        return kExitOk;
    }
    if (vm.count("list")) {
        for (const auto& [name, fn] : analytic_functions()) std::cout << name << "  " << fn.help << '\n';
        return kExitOk;
    }
    if (!vm.count("function")) throw UsageError("--function is required (see --list)");
    const auto it = analytic_functions().find(vm["function"].as<std::string>());
    if (it == analytic_functions().end()) throw UsageError("unknown function '" + vm["function"].as<std::string>() + "'");
    const double from = vm["from"].as<double>(), to = vm["to"].as<double>();
    const int points = vm["points"].as<int>();
    const bool log_grid = vm.count("log") > 0;
    if (points < 1) throw UsageError("--points must be >= 1");
    if (log_grid && !(from > 0.0 && to > 0.0)) throw UsageError("--log needs a positive range");
    const double k = vm["k"].as<double>(), rho = vm["rho"].as<double>();

    std::vector<double> xs;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        double x = log_grid ? std::exp(std::log(from) + t * (std::log(to) - std::log(from))) : from + t * (to - from);
        if (it->second.integer_x) x = static_cast<double>(std::llround(x));
        if (it->second.integer_x && !xs.empty() && x == xs.back()) continue;
        xs.push_back(x);
    }
    const std::string out_path = vm.count("out") ? vm["out"].as<std::string>() : "-";
    write_output(out_path, [&](std::ostream& out) {
        out << "x," << it->first << '\n';
        for (double x : xs) out << format_double(x) << ',' << format_double(it->second.eval(x, k, rho)) << '\n';
    });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << kUsage;
        return kExitUsage;
    }
    const std::string command = argv[1];
    const std::vector<std::string> args(argv + 2, argv + argc);
    if (command == "--help" || command == "-h" || command == "help") {
        std::cout << kUsage;
        return kExitOk;
    }
    const std::map<std::string, std::function<int(const std::vector<std::string>&)>> commands{
        {"simulate", cmd_simulate}, {"validate", cmd_validate}, {"espar", cmd_espar}, {"analytic", cmd_analytic}};
    const auto it = commands.find(command);
    if (it == commands.end()) {
        std::cerr << "cogmac_cli: unknown command '" << command << "'\n" << kUsage;
        return kExitUsage;
    }
    try {
        return it->second(args);
    } catch (const ConfigError& e) {
        std::cerr << "cogmac_cli: config error: " << e.what() << '\n';
    } catch (const po::error& e) {
        std::cerr << "cogmac_cli: " << e.what() << '\n';
    } catch (const UsageError& e) {
        std::cerr << "cogmac_cli: " << e.what() << '\n';
    } catch (const espar::EsparError& e) {
        std::cerr << "cogmac_cli: espar: " << e.what() << '\n';
    } catch (const std::domain_error& e) {
        std::cerr << "cogmac_cli: " << e.what() << '\n';
    }
    return kExitUsage;
}
