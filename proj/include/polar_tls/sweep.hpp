// sweep.hpp: parameter sweeps over the rate formulas, written as flat CSV or JSON tables.
//
// A sweep is described by plain key/value pairs, read from a config file
// (`key = value`, `#` comments) and/or command-line flags:
//
//   quantity       = suppression_e0 | absorption_g1 | partial_e0n |
//                    overlap_compare | semiclassical_totals | log_vs_regular
//   axis.omega_l   = start:stop:steps[:linear|log]     (omega_L / omega_0)
//   axis.omega_a   = ...                               (|Omega_a| / omega_0)
//   axis.sqrt_n    = ...   overlap_compare, n = round(sqrt_n^2)
//   axis.n_bar     = ...   semiclassical_totals
//   axis.n         = ...   log_vs_regular, n = round(value)
//   omega_l, omega_a, phi, n_prime = pinned values
//   p              = comma-separated channel list
//   output, format (csv|json), threads

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

#include "polar_tls/ladder.hpp"
#include "polar_tls/overlaps.hpp"
#include "polar_tls/rates.hpp"

namespace polar_tls {

/// Raised for malformed or inconsistent sweep descriptions (a usage error, not a numerical one).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Quantity { suppression_e0, absorption_g1, partial_e0n, overlap_compare, semiclassical_totals, log_vs_regular };
enum class AxisScale { linear, log };
enum class OutputFormat { csv, json };

inline const std::map<std::string, Quantity>& quantity_names() {
    static const std::map<std::string, Quantity> names{
        {"suppression_e0", Quantity::suppression_e0},   {"absorption_g1", Quantity::absorption_g1},
        {"partial_e0n", Quantity::partial_e0n},         {"overlap_compare", Quantity::overlap_compare},
        {"semiclassical_totals", Quantity::semiclassical_totals}, {"log_vs_regular", Quantity::log_vs_regular},
    };
    return names;
}

inline std::string to_string(Quantity q) {
    for (const auto& [name, v] : quantity_names())
        if (v == q) return name;
    return "?";
}

inline Quantity parse_quantity(const std::string& s) {
    const auto it = quantity_names().find(s);
    if (it == quantity_names().end()) throw ConfigError("unknown quantity '" + s + "'");
    return it->second;
}

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown format '" + s + "' (expected csv or json)");
}

inline double parse_number(std::string_view s, const std::string& what) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(what + ": cannot parse number '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(delim, start);
        out.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// ---------------------------------------------------------------------------

struct Axis {
    double start = 0.0;
    double stop = 1.0;
    int steps = 2;
    AxisScale scale = AxisScale::linear;

    void validate(const std::string& name) const {
        if (steps < 2) throw ConfigError("axis " + name + ": steps must be >= 2");
        if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop))
            throw ConfigError("axis " + name + ": need finite start < stop");
        if (scale == AxisScale::log && !(start > 0.0)) throw ConfigError("axis " + name + ": log scale needs start > 0");
    }

    /// Grid points; the last one is exactly `stop`.
    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(steps));
        const double last = steps - 1;
        for (int i = 0; i < steps; ++i) {
            const double t = i / last;
            if (scale == AxisScale::linear)
                v[i] = start + (stop - start) * t;
            else
                v[i] = std::exp(std::log(start) + (std::log(stop) - std::log(start)) * t);
        }
        v.front() = start;
        v.back() = stop;
        return v;
    }

    double step() const {
        return scale == AxisScale::linear ? (stop - start) / (steps - 1) : (std::log(stop) - std::log(start)) / (steps - 1);
    }

    /// Parses "start:stop:steps[:linear|log]".
    static Axis parse(const std::string& spec, const std::string& name) {
        const auto parts = split(spec, ':');
        if (parts.size() < 3 || parts.size() > 4)
            throw ConfigError("axis " + name + ": expected start:stop:steps[:linear|log], got '" + spec + "'");
        Axis a;
        a.start = parse_number(parts[0], "axis " + name);
        a.stop = parse_number(parts[1], "axis " + name);
        const double steps = parse_number(parts[2], "axis " + name);
        if (steps != std::floor(steps) || steps > 1e7) throw ConfigError("axis " + name + ": steps must be an integer");
        a.steps = static_cast<int>(steps);
        if (parts.size() == 4) {
            const auto sc = trim(parts[3]);
            if (sc == "linear" || sc == "lin")
                a.scale = AxisScale::linear;
            else if (sc == "log")
                a.scale = AxisScale::log;
            else
                throw ConfigError("axis " + name + ": unknown scale '" + sc + "'");
        }
        a.validate(name);
        return a;
    }
};

struct SweepConfig {
    Quantity quantity = Quantity::suppression_e0;
    std::map<std::string, Axis> axes;
    std::map<std::string, double> fixed;
    std::vector<std::int64_t> p_values{0, 1, 2, 3};
    std::string output;  // empty: standard output
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 1;

    double fixed_or(const std::string& key, double fallback) const {
        const auto it = fixed.find(key);
        return it == fixed.end() ? fallback : it->second;
    }

    /// Axis names and pinned parameters each quantity accepts.
    static std::vector<std::string> axes_for(Quantity q) {
        switch (q) {
            case Quantity::suppression_e0:
            case Quantity::absorption_g1:
            case Quantity::partial_e0n: return {"omega_l", "omega_a"};
            case Quantity::overlap_compare: return {"sqrt_n"};
            case Quantity::semiclassical_totals: return {"omega_l", "n_bar"};
            case Quantity::log_vs_regular: return {"n"};
        }
        return {};
    }

    static std::vector<std::string> fixed_for(Quantity q) {
        switch (q) {
            case Quantity::suppression_e0:
            case Quantity::absorption_g1: return {"phi"};
            case Quantity::partial_e0n: return {"phi", "n_prime"};
            case Quantity::overlap_compare: return {"phi", "omega_a", "omega_l", "p"};
            case Quantity::semiclassical_totals: return {"phi", "omega_a"};
            case Quantity::log_vs_regular: return {"phi", "omega_a", "omega_l", "p"};
        }
        return {};
    }

    static Axis default_axis(const std::string& name) {
        if (name == "omega_l") return {0.05, 2.0, 101, AxisScale::log};
        if (name == "omega_a") return {0.0, 4.0, 101, AxisScale::linear};
        if (name == "sqrt_n") return {100.0, 1000.0, 20, AxisScale::linear};
        if (name == "n_bar") return {1e4, 1e8, 5, AxisScale::log};
        return {1.0, 300.0, 300, AxisScale::linear};  // n
    }

    /// Builds and validates a config from key/value pairs. Unknown keys and
    /// axes or pins that do not apply to the chosen quantity are rejected.
    static SweepConfig from_kv(const std::map<std::string, std::string>& kv) {
        SweepConfig c;
        const auto q = kv.find("quantity");
        if (q == kv.end()) throw ConfigError("sweep: quantity is required");
        c.quantity = parse_quantity(q->second);
        const auto axis_names = axes_for(c.quantity);
        const auto fixed_names = fixed_for(c.quantity);
        for (const auto& name : axis_names) c.axes[name] = default_axis(name);
        if (c.quantity == Quantity::overlap_compare) {
            c.fixed["omega_a"] = 0.001;
            c.fixed["omega_l"] = 0.9;
        } else if (c.quantity == Quantity::semiclassical_totals) {
            c.fixed["omega_a"] = 0.001;
            c.axes["omega_l"] = {0.1, 3.0, 59, AxisScale::linear};
        } else if (c.quantity == Quantity::log_vs_regular) {
            c.fixed["omega_a"] = 0.1;
            c.fixed["omega_l"] = 1.0;
        }
        bool have_n_prime = false;

        for (const auto& [key, value] : kv) {
            if (key == "quantity") continue;
            if (key == "output") {
                c.output = value;
            } else if (key == "format") {
                c.format = parse_format(value);
            } else if (key == "threads") {
                const double t = parse_number(value, "threads");
                if (t < 1 || t != std::floor(t) || t > 4096) throw ConfigError("threads must be a positive integer");
                c.threads = static_cast<unsigned>(t);
            } else if (key.rfind("axis.", 0) == 0) {
                const auto name = key.substr(5);
                if (std::find(axis_names.begin(), axis_names.end(), name) == axis_names.end())
                    throw ConfigError("axis '" + name + "' does not apply to quantity " + to_string(c.quantity));
                c.axes[name] = Axis::parse(value, name);
            } else if (std::find(fixed_names.begin(), fixed_names.end(), key) != fixed_names.end()) {
                if (key == "p") {
                    c.p_values.clear();
                    for (const auto& item : split(value, ',')) {
                        const double p = parse_number(item, "p");
                        if (p != std::floor(p)) throw ConfigError("p values must be integers");
                        c.p_values.push_back(static_cast<std::int64_t>(p));
                    }
                    if (c.p_values.empty()) throw ConfigError("p list is empty");
                } else {
                    c.fixed[key] = parse_number(value, key);
                    if (key == "n_prime") have_n_prime = true;
                }
            } else {
                throw ConfigError("key '" + key + "' does not apply to quantity " + to_string(c.quantity));
            }
        }

        if (c.quantity == Quantity::partial_e0n) {
            if (!have_n_prime) throw ConfigError("partial_e0n needs n_prime");
            const double np = c.fixed["n_prime"];
            if (np < 0 || np != std::floor(np)) throw ConfigError("n_prime must be a non-negative integer");
        }
        if (c.quantity == Quantity::overlap_compare) {
            const double s0 = c.axes["sqrt_n"].start;
            const double n0 = std::round(s0 * s0);
            for (const auto p : c.p_values)
                if (n0 < 10.0 * static_cast<double>(std::abs(p)) || n0 < 1)
                    throw ConfigError("overlap_compare: sqrt_n axis must start where n >= 10|p|");
        }
        if (c.quantity == Quantity::semiclassical_totals && !(c.axes["n_bar"].start >= 0.5))
            throw ConfigError("semiclassical_totals: n_bar axis must start at >= 0.5");
        if (c.quantity == Quantity::log_vs_regular) {
            if (c.axes["n"].start < 0) throw ConfigError("log_vs_regular: n axis must be non-negative");
            for (const auto p : c.p_values)
                if (p < 0) throw ConfigError("log_vs_regular: p values must be >= 0");
        }
        for (const auto& key : {"omega_a", "omega_l"}) {
            const auto it = c.fixed.find(key);
            if (it == c.fixed.end()) continue;
            if (std::string(key) == "omega_l" ? !(it->second > 0.0) : !(it->second >= 0.0))
                throw ConfigError(std::string(key) + " out of range");
        }
        for (const auto& [name, axis] : c.axes) {
            if ((name == "omega_l" && !(axis.start > 0.0)) || (name == "omega_a" && axis.start < 0.0))
                throw ConfigError("axis " + name + " out of range");
        }
        return c;
    }
};

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
inline std::map<std::string, std::string> parse_config(std::istream& is, const std::string& origin = "config") {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = trim(std::string_view(t).substr(eq + 1));
    }
    return kv;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

// ---------------------------------------------------------------------------

/// Long-format result table; rows are in deterministic grid order.
struct SweepTable {
    std::string quantity;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

namespace detail {

/// Evaluates `count` independent tasks on `threads` workers; task i fills slot i.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex mtx;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += threads) fn(i);
                } catch (...) {
                    std::lock_guard lock(mtx);
                    if (!first_error) first_error = std::current_exception();
                }
            });
    }
    if (first_error) std::rethrow_exception(first_error);
}

inline double partial_or_zero(const DressedState& from, std::int64_t np, const ModelParams& params) {
    const auto allowed = allowed_final_indices(from, params);
    if (np < 0 || allowed.empty() || np >= *allowed.end()) return 0.0;
    return partial_rate(from, np, params);
}

}  // namespace detail

/// Evaluates the sweep. Closed channels (n' outside the allowed set) give 0.
inline SweepTable compute_sweep(const SweepConfig& c) {
    SweepTable t;
    t.quantity = to_string(c.quantity);
    const double phi = c.fixed_or("phi", 0.0);

    switch (c.quantity) {
        case Quantity::suppression_e0:
        case Quantity::absorption_g1:
        case Quantity::partial_e0n: {
            t.columns = {"omega_L_over_omega0", "Omega_a_over_omega0", "value"};
            const auto wl = c.axes.at("omega_l").values();
            const auto wa = c.axes.at("omega_a").values();
            const auto np = static_cast<std::int64_t>(c.fixed_or("n_prime", 0.0));
            t.rows.resize(wl.size() * wa.size());
            detail::parallel_for(wl.size(), c.threads, [&](std::size_t i) {
                for (std::size_t j = 0; j < wa.size(); ++j) {
                    const auto params = ModelParams::from_ratios(wl[i], wa[j], phi);
                    double v = 0.0;
                    if (c.quantity == Quantity::suppression_e0)
                        v = suppression_rate_e0(params);
                    else if (c.quantity == Quantity::absorption_g1)
                        v = absorption_rate_g1(params);
                    else
                        v = detail::partial_or_zero({Branch::excited, 0}, np, params);
                    t.rows[i * wa.size() + j] = {wl[i], wa[j], v};
                }
            });
            break;
        }
        case Quantity::overlap_compare: {
            t.columns = {"sqrt_n", "p", "exact_sq", "bessel_sq"};
            const auto sn = c.axes.at("sqrt_n").values();
            const auto params = ModelParams::from_ratios(c.fixed_or("omega_l", 0.9), c.fixed_or("omega_a", 0.001), phi);
            const auto& ps = c.p_values;
            t.rows.resize(sn.size() * ps.size());
            detail::parallel_for(sn.size(), c.threads, [&](std::size_t i) {
                const auto n = static_cast<std::int64_t>(std::llround(sn[i] * sn[i]));
                for (std::size_t k = 0; k < ps.size(); ++k) {
                    const auto p = ps[k];
                    const double exact = overlap_exact(n, n - p, params, Sign::plus).norm_sq();
                    const double bessel = overlap_bessel(n, p, params, Sign::plus).norm_sq();
                    t.rows[i * ps.size() + k] = {sn[i], static_cast<double>(p), exact, bessel};
                }
            });
            break;
        }
        case Quantity::semiclassical_totals: {
            t.columns = {"omega_L_over_omega0", "n_bar", "gamma_e", "gamma_g"};
            const auto wl = c.axes.at("omega_l").values();
            const auto nb = c.axes.at("n_bar").values();
            const double wa = c.fixed_or("omega_a", 0.001);
            t.rows.resize(wl.size() * nb.size());
            detail::parallel_for(wl.size(), c.threads, [&](std::size_t i) {
                const auto params = ModelParams::from_ratios(wl[i], wa, phi);
                for (std::size_t j = 0; j < nb.size(); ++j) {
                    const auto s = semiclassical_totals(nb[j], params);
                    t.rows[i * nb.size() + j] = {wl[i], nb[j], s.gamma_e, s.gamma_g};
                }
            });
            break;
        }
        case Quantity::log_vs_regular: {
            // Partial rate of (e, n+p) -> (g, n) from the naive factorial
            // formula and from the log-space one.
            t.columns = {"n", "p", "regular", "log"};
            const auto nv = c.axes.at("n").values();
            const auto params = ModelParams::from_ratios(c.fixed_or("omega_l", 1.0), c.fixed_or("omega_a", 0.1), phi);
            const auto& ps = c.p_values;
            t.rows.resize(nv.size() * ps.size());
            detail::parallel_for(nv.size(), c.threads, [&](std::size_t i) {
                const auto n = static_cast<std::int64_t>(std::llround(nv[i]));
                for (std::size_t k = 0; k < ps.size(); ++k) {
                    const auto p = ps[k];
                    const DressedState from{Branch::excited, n + p};
                    const double w = photon_frequency(from, n, params) / params.omega0;
                    const double cubic = w * w * w;
                    const double regular = std::norm(overlap_regular(n + p, n, params, Sign::plus)) * cubic;
                    const double logv = detail::partial_or_zero(from, n, params);
                    t.rows[i * ps.size() + k] = {static_cast<double>(n), static_cast<double>(p), regular, logv};
                }
            });
            break;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Output.

inline void write_sweep_csv(std::ostream& os, const SweepTable& t) {
    os << "# quantity=" << t.quantity << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

inline nlohmann::json sweep_to_json(const SweepTable& t) {
    nlohmann::json j;
    j["quantity"] = t.quantity;
    j["columns"] = t.columns;
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::json::array();
        for (const double v : row) {
            if (std::isfinite(v))
                r.push_back(v);
            else
                r.push_back(nullptr);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void write_sweep_json(std::ostream& os, const SweepTable& t) { os << sweep_to_json(t).dump(1) << '\n'; }

inline SweepTable read_sweep_csv(std::istream& is) {
    SweepTable t;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# quantity=", 0) != 0)
        throw std::runtime_error("sweep csv: missing '# quantity=' line");
    t.quantity = trim(std::string_view(line).substr(11));
    if (!std::getline(is, line)) throw std::runtime_error("sweep csv: missing header");
    for (const auto& col : split(trim(line), ',')) t.columns.push_back(trim(col));
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != t.columns.size()) throw std::runtime_error("sweep csv: ragged row");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_number(cell, "sweep csv"));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_sweep(const SweepTable& t, OutputFormat fmt, std::ostream& os) {
    if (fmt == OutputFormat::csv)
        write_sweep_csv(os, t);
    else
        write_sweep_json(os, t);
}

/// Computes the sweep and writes it to c.output (or `fallback` when empty).
inline SweepTable run_sweep(const SweepConfig& c, std::ostream& fallback) {
    SweepTable t = compute_sweep(c);
    if (c.output.empty()) {
        write_sweep(t, c.format, fallback);
        return t;
    }
    std::ofstream out(c.output);
    if (!out) throw std::runtime_error("cannot open output file '" + c.output + "'");
    write_sweep(t, c.format, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for output file '" + c.output + "'");
    return t;
}

}  // namespace polar_tls
