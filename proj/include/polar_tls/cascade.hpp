// cascade.hpp: Monte-Carlo radiative cascades over the two-ladder rate graph.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "polar_tls/ladder.hpp"
#include "polar_tls/random.hpp"
#include "polar_tls/rates.hpp"

namespace polar_tls {

struct Jump {
    double time = 0.0;  // absolute, units of 1/Gamma_0
    TransitionRecord record;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    DressedState start;
    std::vector<Jump> jumps;
    bool truncated = false;

    DressedState final_state() const { return jumps.empty() ? start : jumps.back().record.to; }
};

/// Samples trajectories for one parameter set. Rate tables are memoised per
/// instance, so a sampler must not be shared between threads; give each
/// thread its own.
class CascadeSampler {
public:
    explicit CascadeSampler(const ModelParams& params) : params_(params) { params_.validate(); }

    const ModelParams& params() const { return params_; }

    /// Cached rate table with cumulative partial rates.
    const RateTable& table(const DressedState& s) { return entry(s).table; }

    Trajectory sample(const DressedState& start, std::uint64_t seed, std::int64_t max_jumps, std::uint64_t stream = 0) {
        if (max_jumps < 1) throw std::invalid_argument("sample_trajectory: max_jumps must be >= 1");
        if (start.n < 0) throw std::invalid_argument("sample_trajectory: negative photon index");
        Trajectory traj;
        traj.seed = seed;
        traj.stream = stream;
        traj.start = start;
        Philox rng(seed, stream);
        DressedState state = start;
        double t = 0.0;
        while (true) {
            const Entry& e = entry(state);
            if (e.table.transitions.empty() || !(e.table.total_over_gamma0 > 0.0)) break;
            if (static_cast<std::int64_t>(traj.jumps.size()) == max_jumps) {
                traj.truncated = true;
                break;
            }
            t += rng.exponential(e.table.total_over_gamma0);
            const double target = rng.uniform_open() * e.cumulative.back();
            auto it = std::upper_bound(e.cumulative.begin(), e.cumulative.end(), target);
            auto idx = static_cast<std::size_t>(it - e.cumulative.begin());
            if (it == e.cumulative.end()) {
                idx = e.cumulative.size() - 1;
                while (e.table.transitions[idx].rate_over_gamma0 == 0.0) --idx;
            }
            const TransitionRecord& rec = e.table.transitions[idx];
            traj.jumps.push_back({t, rec});
            state = rec.to;
        }
        return traj;
    }

private:
    struct Entry {
        RateTable table;
        std::vector<double> cumulative;
    };

    const Entry& entry(const DressedState& s) {
        auto it = cache_.find(s);
        if (it != cache_.end()) return it->second;
        Entry e;
        e.table = total_rate(s, params_);
        e.cumulative.reserve(e.table.transitions.size());
        double acc = 0.0;
        for (const auto& rec : e.table.transitions) {
            acc += rec.rate_over_gamma0;
            e.cumulative.push_back(acc);
        }
        return cache_.emplace(s, std::move(e)).first->second;
    }

    ModelParams params_;
    std::unordered_map<DressedState, Entry> cache_;
};

/// Single trajectory from `start`: exponential waiting times with the total
/// rate of each visited state, next state drawn in proportion to the partial
/// rates. Stops at a state with no allowed (or no non-zero) transition, or
/// flags `truncated` after max_jumps jumps.
inline Trajectory sample_trajectory(const DressedState& start, const ModelParams& params, std::uint64_t seed,
                                    std::int64_t max_jumps, std::uint64_t stream = 0) {
    CascadeSampler sampler(params);
    return sampler.sample(start, seed, max_jumps, stream);
}

/// `count` trajectories; trajectory i uses stream i of `seed`, so the result
/// is independent of `threads`.
inline std::vector<Trajectory> sample_ensemble(const DressedState& start, const ModelParams& params,
                                               std::uint64_t seed, std::int64_t count, std::int64_t max_jumps,
                                               unsigned threads = 1) {
    if (count < 0) throw std::invalid_argument("sample_ensemble: negative trajectory count");
    std::vector<Trajectory> out(static_cast<std::size_t>(count));
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::int64_t>(count, 1))));
    auto worker = [&](unsigned t) {
        CascadeSampler sampler(params);
        for (std::int64_t i = t; i < count; i += threads)
            out[static_cast<std::size_t>(i)] = sampler.sample(start, seed, max_jumps, static_cast<std::uint64_t>(i));
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    }
    return out;
}

struct SpectrumBin {
    double center = 0.0;  // units of omega_0
    double weight = 0.0;
};

/// Emitted photon frequencies binned at round(freq / bin_width) and
/// normalised to the total photon count.
inline std::vector<SpectrumBin> emission_spectrum(const std::vector<Trajectory>& trajectories, double bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("emission_spectrum: bin_width must be positive");
    std::map<std::int64_t, std::uint64_t> counts;
    std::uint64_t total = 0;
    for (const auto& tr : trajectories)
        for (const auto& j : tr.jumps) {
            ++counts[static_cast<std::int64_t>(std::llround(j.record.photon_freq / bin_width))];
            ++total;
        }
    std::vector<SpectrumBin> out;
    out.reserve(counts.size());
    for (const auto& [bin, c] : counts)
        out.push_back({static_cast<double>(bin) * bin_width, static_cast<double>(c) / static_cast<double>(total)});
    return out;
}

inline constexpr const char* kTrajectoryLogHeader =
    "trajectory_id,jump_index,time,from_branch,from_n,to_branch,to_n,photon_freq";

/// One CSV line per jump; times in 1/Gamma_0, frequencies in omega_0.
inline void write_trajectory_log(std::ostream& os, const std::vector<Trajectory>& trajectories) {
    os << kTrajectoryLogHeader << '\n';
    for (std::size_t id = 0; id < trajectories.size(); ++id) {
        const auto& tr = trajectories[id];
        for (std::size_t k = 0; k < tr.jumps.size(); ++k) {
            const auto& j = tr.jumps[k];
            os << id << ',' << k << ',' << format_number(j.time) << ',' << branch_letter(j.record.from.branch) << ','
               << j.record.from.n << ',' << branch_letter(j.record.to.branch) << ',' << j.record.to.n << ','
               << format_number(j.record.photon_freq) << '\n';
        }
    }
}

}  // namespace polar_tls
