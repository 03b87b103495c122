// polartls: command-line front end for the driven polar TLS rate library.
//
//   polartls sweep --quantity suppression_e0 --output fig2a.csv
//   polartls rate --branch e --n 0 --omega-l 0.5 --omega-a 1
//   polartls overlap --ell 3 --n 1 --omega-a 0.2 --opposite
//   polartls semiclassical --n-bar 1e6 --omega-l 0.9 --omega-a 0.001
//   polartls cascade --branch e --n 5 --omega-l 0.5 --omega-a 0.5 --seed 7 --trajectories 1000
//   polartls gamma0 --omega0 2.4e15 --dipole-debye 1
//
// Every subcommand accepts --config FILE with `key = value` lines; keys are
// the long flag names (dashes or underscores), `axis.NAME` sets a sweep
// axis. Flags on the command line win over the file.
//
// Exit status: 0 success, 1 computation or I/O error, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "polar_tls/polar_tls.hpp"

using namespace polar_tls;
using nlohmann::json;

namespace {

struct ModelFlags {
    double omega0 = 1.0;
    double omegaL = 1.0;
    double omegaA = 0.0;
    double phi = 0.0;

    void attach(CLI::App* app) {
        app->add_option("--omega0", omega0, "TLS frequency omega_0 (unit for all frequencies)")->capture_default_str();
        app->add_option("--omega-l", omegaL, "drive frequency omega_L")->capture_default_str();
        app->add_option("--omega-a", omegaA, "coupling |Omega_a|")->capture_default_str();
        app->add_option("--phi", phi, "coupling phase arg Omega_a, radians")->capture_default_str();
    }

    ModelParams params() const {
        ModelParams p{omega0, omegaL, omegaA, phi};
        p.validate();
        return p;
    }
};

struct Output {
    std::string path;
    std::string format = "csv";

    void attach(CLI::App* app) {
        app->add_option("--output,-o", path, "output file (default: standard output)");
        app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    }

    bool json() const { return format == "json"; }

    template <class Fn>
    void write(Fn&& fn) const {
        if (path.empty()) {
            fn(std::cout);
            return;
        }
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
        fn(out);
        out.flush();
        if (!out) throw std::runtime_error("write failed for output file '" + path + "'");
    }
};

std::string state_label(const DressedState& s) { return std::string(1, branch_letter(s.branch)) + std::to_string(s.n); }

Sign parse_sign(const std::string& s) {
    if (s == "+" || s == "plus" || s == "e") return Sign::plus;
    if (s == "-" || s == "minus" || s == "g") return Sign::minus;
    throw ConfigError("unknown ladder sign '" + s + "' (expected + or -)");
}

/// Turns `--config FILE` into flag arguments placed right after the
/// subcommand name, ahead of the user's own flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;
    std::size_t sub = 0;
    while (sub < args.size() && !args[sub].empty() && args[sub][0] == '-') ++sub;
    if (sub == args.size()) return args;

    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config_file(*path)) {
        if (key == "config") continue;
        if (key.rfind("axis.", 0) == 0) {
            injected.push_back("--axis");
            injected.push_back(key.substr(5) + "=" + value);
            continue;
        }
        std::string flag = "--" + key;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        if (value == "true") {
            injected.push_back(flag);
        } else if (value != "false") {
            injected.push_back(flag);
            injected.push_back(value);
        }
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, injected.begin(), injected.end());
    return args;
}

// ---------------------------------------------------------------------------

struct SweepCmd {
    std::string quantity;
    std::vector<std::string> axes;
    std::optional<double> omegaA, omegaL, phi, n_prime;
    std::optional<std::string> p;
    std::optional<unsigned> threads;
    Output out;

    void attach(CLI::App* app) {
        app->add_option("--quantity,-q", quantity, "suppression_e0, absorption_g1, partial_e0n, overlap_compare, "
                                                   "semiclassical_totals or log_vs_regular");
        app->add_option("--axis", axes, "NAME=start:stop:steps[:linear|log]; NAME in omega_l, omega_a, sqrt_n, n_bar, n")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        app->add_option("--omega-a", omegaA, "pinned |Omega_a|/omega_0");
        app->add_option("--omega-l", omegaL, "pinned omega_L/omega_0");
        app->add_option("--phi", phi, "coupling phase");
        app->add_option("--n-prime", n_prime, "final index for partial_e0n");
        app->add_option("--p", p, "comma-separated channel list");
        app->add_option("--threads", threads, "worker threads");
        out.attach(app);
    }

    int run() const {
        std::map<std::string, std::string> kv;
        if (quantity.empty()) throw ConfigError("sweep: --quantity is required");
        kv["quantity"] = quantity;
        for (const auto& a : axes) {
            const auto eq = a.find('=');
            if (eq == std::string::npos) throw ConfigError("--axis expects NAME=start:stop:steps[:scale]");
            kv["axis." + a.substr(0, eq)] = a.substr(eq + 1);
        }
        if (omegaA) kv["omega_a"] = format_number(*omegaA);
        if (omegaL) kv["omega_l"] = format_number(*omegaL);
        if (phi) kv["phi"] = format_number(*phi);
        if (n_prime) kv["n_prime"] = format_number(*n_prime);
        if (p) kv["p"] = *p;
        if (threads) kv["threads"] = std::to_string(*threads);
        kv["format"] = out.format;
        if (!out.path.empty()) kv["output"] = out.path;
        const auto cfg = SweepConfig::from_kv(kv);
        const auto t = run_sweep(cfg, std::cout);
        if (!cfg.output.empty())
            std::cerr << "wrote " << t.rows.size() << " rows of " << t.quantity << " to " << cfg.output << '\n';
        return 0;
    }
};

struct RateCmd {
    std::string branch = "e";
    std::int64_t n = 0;
    std::optional<std::int64_t> n_prime;
    ModelFlags model;
    Output out;

    void attach(CLI::App* app) {
        app->add_option("--branch", branch, "initial ladder, e or g")->capture_default_str();
        app->add_option("--n", n, "initial ladder index")->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--n-prime", n_prime, "single final index (default: all)");
        model.attach(app);
        out.attach(app);
    }

    int run() const {
        const auto params = model.params();
        const DressedState from{parse_branch(branch), n};
        std::vector<TransitionRecord> rows;
        double total = 0.0;
        if (n_prime) {
            const auto allowed = allowed_final_indices(from, params);
            if (*n_prime < 0 || allowed.empty() || *n_prime >= *allowed.end())
                throw ConfigError("transition " + to_string(from) + " -> n'=" + std::to_string(*n_prime) +
                                  " is not allowed (needs a negative photon frequency)");
            TransitionRecord r{from, {other(from.branch), *n_prime}, partial_rate(from, *n_prime, params),
                               checked_photon_frequency(from, *n_prime, params) / params.omega0};
            rows.push_back(r);
            total = r.rate_over_gamma0;
        } else {
            const auto table = total_rate(from, params);
            rows = table.transitions;
            total = table.total_over_gamma0;
        }
        out.write([&](std::ostream& os) {
            if (out.json()) {
                json j;
                j["unit"] = {{"rate", "Gamma0"}, {"photon_freq", "omega0"}};
                j["from"] = state_label(from);
                j["transitions"] = json::array();
                for (const auto& r : rows)
                    j["transitions"].push_back(
                        {{"to", state_label(r.to)}, {"photon_freq", r.photon_freq}, {"rate", r.rate_over_gamma0}});
                j[n_prime ? "partial_rate" : "total_rate"] = total;
                os << j.dump(1) << '\n';
                return;
            }
            os << "# rates in units of Gamma0, photon frequencies in units of omega0\n";
            os << "kind,from,to,photon_freq,rate\n";
            for (const auto& r : rows)
                os << "partial," << state_label(r.from) << ',' << state_label(r.to) << ',' << format_number(r.photon_freq)
                   << ',' << format_number(r.rate_over_gamma0) << '\n';
            if (!n_prime) os << "total," << state_label(from) << ",,," << format_number(total) << '\n';
        });
        return 0;
    }
};

struct OverlapCmd {
    std::int64_t ell = 0;
    std::int64_t n = 0;
    std::string bra = "+";
    std::optional<std::string> ket;
    bool opposite = false;
    std::string method = "exact";
    ModelFlags model;
    Output out;

    void attach(CLI::App* app) {
        app->add_option("--ell", ell, "bra index")->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--n", n, "ket index")->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--bra", bra, "bra ladder sign, + or -")->capture_default_str();
        app->add_option("--ket", ket, "ket ladder sign (default: same as --bra unless --opposite)");
        app->add_flag("--opposite", opposite, "ket on the other ladder");
        app->add_option("--method", method, "exact, bessel (n-p ~ ell >> p) or regular (naive factorials)")
            ->check(CLI::IsMember({"exact", "bessel", "regular"}))
            ->capture_default_str();
        model.attach(app);
        out.attach(app);
    }

    int run() const {
        const auto params = model.params();
        const Sign b = parse_sign(bra);
        Sign k = ket ? parse_sign(*ket) : (opposite ? opposite_sign(b) : b);
        if (ket && opposite && k == b) throw ConfigError("--ket and --opposite disagree");
        OverlapValue v;
        if (method == "exact") {
            v = overlap_exact(ell, n, params, b, k);
        } else {
            if (k == b) throw ConfigError("--method " + method + " needs kets on the opposite ladder");
            if (method == "bessel") {
                v = overlap_bessel(ell, ell - n, params, b);
            } else {
                const auto c = overlap_regular(ell, n, params, b);
                v.log_abs = std::log(std::abs(c));
                v.phase = std::arg(c);
            }
        }
        const auto sign_str = [](Sign s) { return s == Sign::plus ? "+" : "-"; };
        out.write([&](std::ostream& os) {
            if (out.json()) {
                json j{{"ell", ell},          {"n", n},
                       {"bra", sign_str(b)},  {"ket", sign_str(k)},
                       {"method", method},    {"modulus", v.modulus()},
                       {"phase", v.phase},    {"norm_sq", v.norm_sq()},
                       {"precision_loss", v.precision_loss}};
                j["log_abs"] = std::isfinite(v.log_abs) ? json(v.log_abs) : json(nullptr);
                os << j.dump(1) << '\n';
                return;
            }
            os << "# dimensionless overlap between displaced Fock states, phase in radians\n";
            os << "ell,n,bra,ket,method,modulus,phase,norm_sq,log_abs,precision_loss\n";
            os << ell << ',' << n << ',' << sign_str(b) << ',' << sign_str(k) << ',' << method << ','
               << format_number(v.modulus()) << ',' << format_number(v.phase) << ',' << format_number(v.norm_sq())
               << ',' << format_number(v.log_abs) << ',' << (v.precision_loss ? 1 : 0) << '\n';
        });
        return 0;
    }

    static Sign opposite_sign(Sign s) { return polar_tls::opposite(s); }
};

struct SemiclassicalCmd {
    double n_bar = 1.0;
    std::optional<std::int64_t> p;
    std::string branch = "e";
    ModelFlags model;
    Output out;

    void attach(CLI::App* app) {
        app->add_option("--n-bar", n_bar, "mean drive photon number")->required();
        app->add_option("--p", p, "single channel: print the partial rate for this p");
        app->add_option("--branch", branch, "ladder for --p, e or g")->capture_default_str();
        model.attach(app);
        out.attach(app);
    }

    int run() const {
        const auto params = model.params();
        out.write([&](std::ostream& os) {
            if (p) {
                const double r = semiclassical_partial(parse_branch(branch), n_bar, *p, params);
                if (out.json()) {
                    os << json{{"branch", branch}, {"n_bar", n_bar}, {"p", *p}, {"rate", r}, {"unit", "Gamma0"}}.dump(1)
                       << '\n';
                } else {
                    os << "# rate in units of Gamma0\nbranch,n_bar,p,rate\n"
                       << branch << ',' << format_number(n_bar) << ',' << *p << ',' << format_number(r) << '\n';
                }
                return;
            }
            const auto t = semiclassical_totals(n_bar, params);
            const auto nr = nearest_photon_number(n_bar);
            if (out.json()) {
                os << json{{"n_bar", n_bar}, {"n_rounded", nr}, {"gamma_e", t.gamma_e}, {"gamma_g", t.gamma_g},
                           {"unit", "Gamma0"}}
                          .dump(1)
                   << '\n';
            } else {
                os << "# rates in units of Gamma0\nn_bar,n_rounded,gamma_e,gamma_g\n"
                   << format_number(n_bar) << ',' << nr << ',' << format_number(t.gamma_e) << ','
                   << format_number(t.gamma_g) << '\n';
            }
        });
        return 0;
    }
};

struct CascadeCmd {
    std::string branch = "e";
    std::int64_t n = 0;
    std::optional<std::uint64_t> seed;
    std::int64_t trajectories = 1000;
    std::int64_t max_jumps = 10000;
    double bin_width = 0.01;
    unsigned threads = 1;
    std::string log_path;
    ModelFlags model;
    Output out;

    void attach(CLI::App* app) {
        app->add_option("--branch", branch, "initial ladder, e or g")->capture_default_str();
        app->add_option("--n", n, "initial ladder index")->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--seed", seed, "64-bit RNG seed")->required();
        app->add_option("--trajectories", trajectories, "number of trajectories")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app->add_option("--max-jumps", max_jumps, "truncate trajectories after this many jumps")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--bin-width", bin_width, "spectrum bin width, units of omega0")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--log", log_path, "trajectory log file (CSV, one jump per line)");
        model.attach(app);
        out.attach(app);
    }

    int run() const {
        const auto params = model.params();
        const DressedState start{parse_branch(branch), n};
        const auto trajs = sample_ensemble(start, params, *seed, trajectories, max_jumps, threads);

        if (!log_path.empty()) {
            std::ofstream log(log_path);
            if (!log) throw std::runtime_error("cannot open log file '" + log_path + "'");
            write_trajectory_log(log, trajs);
            log.flush();
            if (!log) throw std::runtime_error("write failed for log file '" + log_path + "'");
        }

        double jumps = 0.0, total_time = 0.0;
        std::int64_t truncated = 0;
        std::map<std::int64_t, std::int64_t> first;  // final index of first jump -> count
        std::int64_t with_jump = 0;
        for (const auto& t : trajs) {
            jumps += static_cast<double>(t.jumps.size());
            if (!t.jumps.empty()) {
                total_time += t.jumps.back().time;
                ++first[t.jumps.front().record.to.n];
                ++with_jump;
            }
            truncated += t.truncated ? 1 : 0;
        }
        const double count = std::max<double>(1.0, static_cast<double>(trajs.size()));
        const auto table = total_rate(start, params);
        const auto spectrum = emission_spectrum(trajs, bin_width);

        out.write([&](std::ostream& os) {
            if (out.json()) {
                json j;
                j["start"] = state_label(start);
                j["seed"] = *seed;
                j["trajectories"] = trajs.size();
                j["mean_jumps"] = jumps / count;
                j["mean_total_time"] = total_time / count;
                j["truncated"] = truncated;
                j["time_unit"] = "1/Gamma0";
                j["first_jump"] = json::array();
                for (const auto& r : table.transitions) {
                    const auto it = first.find(r.to.n);
                    const std::int64_t c = it == first.end() ? 0 : it->second;
                    j["first_jump"].push_back(
                        {{"to", state_label(r.to)},
                         {"count", c},
                         {"fraction", with_jump ? static_cast<double>(c) / static_cast<double>(with_jump) : 0.0},
                         {"expected", table.total_over_gamma0 > 0 ? r.rate_over_gamma0 / table.total_over_gamma0 : 0.0}});
                }
                j["spectrum"] = {{"bin_width", bin_width}, {"bins", json::array()}};
                for (const auto& b : spectrum) j["spectrum"]["bins"].push_back({b.center, b.weight});
                os << j.dump(1) << '\n';
                return;
            }
            os << "# cascade from " << state_label(start) << ", times in 1/Gamma0, frequencies in omega0\n";
            os << "trajectories," << trajs.size() << "\nmean_jumps," << format_number(jumps / count)
               << "\nmean_total_time," << format_number(total_time / count) << "\ntruncated," << truncated << '\n';
            os << "# first jump\nto,count,fraction,expected\n";
            for (const auto& r : table.transitions) {
                const auto it = first.find(r.to.n);
                const std::int64_t c = it == first.end() ? 0 : it->second;
                os << state_label(r.to) << ',' << c << ','
                   << format_number(with_jump ? static_cast<double>(c) / static_cast<double>(with_jump) : 0.0) << ','
                   << format_number(table.total_over_gamma0 > 0 ? r.rate_over_gamma0 / table.total_over_gamma0 : 0.0)
                   << '\n';
            }
            os << "# spectrum bin_width=" << format_number(bin_width) << "\ncenter,weight\n";
            for (const auto& b : spectrum) os << format_number(b.center) << ',' << format_number(b.weight) << '\n';
        });
        return 0;
    }
};

struct Gamma0Cmd {
    double omega0 = 0.0;
    std::optional<double> dipole;
    std::optional<double> dipole_debye;
    Output out;

    void attach(CLI::App* app) {
        app->add_option("--omega0", omega0, "transition angular frequency, rad/s")->required();
        auto* d = app->add_option("--dipole", dipole, "transition dipole, C m");
        auto* dd = app->add_option("--dipole-debye", dipole_debye, "transition dipole, Debye");
        d->excludes(dd);
        out.attach(app);
    }

    int run() const {
        if (!dipole && !dipole_debye) throw ConfigError("gamma0: give --dipole or --dipole-debye");
        const double d = dipole ? *dipole : *dipole_debye * si::debye;
        const double g = gamma0_si({omega0, d});
        out.write([&](std::ostream& os) {
            if (out.json())
                os << json{{"omega0", omega0}, {"dipole", d}, {"gamma0", g}, {"unit", "1/s"}}.dump(1) << '\n';
            else
                os << "# omega0 in rad/s, dipole in C m, gamma0 in 1/s\nomega0,dipole,gamma0\n"
                   << format_number(omega0) << ',' << format_number(d) << ',' << format_number(g) << '\n';
        });
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spontaneous emission and absorption rates of a longitudinally driven polar two-level system"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;

    SweepCmd sweep;
    RateCmd rate;
    OverlapCmd overlap;
    SemiclassicalCmd semi;
    CascadeCmd cascade;
    Gamma0Cmd g0;

    auto add = [&](const char* name, const char* desc, auto& cmd) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "key = value file; command-line flags override it");
        cmd.attach(sub);
        return sub;
    };
    auto* s_sweep = add("sweep", "grid sweep written as CSV or JSON", sweep);
    auto* s_rate = add("rate", "partial and total rates out of one dressed state", rate);
    auto* s_overlap = add("overlap", "overlap of displaced Fock states", overlap);
    auto* s_semi = add("semiclassical", "large-photon-number rates", semi);
    auto* s_cascade = add("cascade", "Monte-Carlo radiative cascades", cascade);
    auto* s_g0 = add("gamma0", "free-space decay rate in SI units", g0);

    std::vector<std::string> args;
    try {
        args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::reverse(args.begin(), args.end());

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* active = nullptr;
    for (auto* s : {s_sweep, s_rate, s_overlap, s_semi, s_cascade, s_g0})
        if (s->parsed()) active = s;

    try {
        if (active == s_sweep) return sweep.run();
        if (active == s_rate) return rate.run();
        if (active == s_overlap) return overlap.run();
        if (active == s_semi) return semi.run();
        if (active == s_cascade) return cascade.run();
        if (active == s_g0) return g0.run();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n\n" << active->help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
