#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dopt/family.hpp"
#include "dopt/modring.hpp"
#include "dopt/params.hpp"

namespace dopt {

/// Precomputed difference vectors for incremental coverage accounting:
/// self_diff[a][d] counts in-orbit pairs, cross[a<b][d] counts pairs across
/// two orbits in both directions (their joint contribution when both orbits
/// sit in the same block).
struct OrbitProfile {
    Int v = 1;
    std::vector<Orbit> orbits;  // ascending representative
    std::vector<Int> sizes;
    std::vector<Int> suffix_total;  // sizes[i] + sizes[i+1] + ...
    std::vector<std::vector<Int>> self_diff;
    std::vector<std::vector<Int>> cross;

    size_t count() const { return orbits.size(); }

    size_t pair_index(size_t a, size_t b) const {
        // a < b in [0, t)
        const size_t t = orbits.size();
        return a * (2 * t - a - 1) / 2 + (b - a - 1);
    }

    static OrbitProfile build(const UnitSubgroup& H) {
        OrbitProfile p;
        p.v = H.v;
        p.orbits = orbit_partition(H);
        const size_t t = p.orbits.size();
        p.sizes.reserve(t);
        for (const Orbit& o : p.orbits) p.sizes.push_back(o.size());
        p.suffix_total.assign(t + 1, 0);
        for (size_t i = t; i-- > 0;) p.suffix_total[i] = p.suffix_total[i + 1] + p.sizes[i];
        p.self_diff.assign(t, {});
        for (size_t a = 0; a < t; ++a) {
            p.self_diff[a].assign(static_cast<size_t>(p.v), 0);
            for (Int x : p.orbits[a].members)
                for (Int y : p.orbits[a].members)
                    if (x != y) ++p.self_diff[a][static_cast<size_t>(((x - y) % p.v + p.v) % p.v)];
        }
        p.cross.assign(t * (t - 1) / 2, {});
        for (size_t a = 0; a < t; ++a) {
            for (size_t b = a + 1; b < t; ++b) {
                auto& vec = p.cross[p.pair_index(a, b)];
                vec.assign(static_cast<size_t>(p.v), 0);
                for (Int x : p.orbits[a].members) {
                    for (Int y : p.orbits[b].members) {
                        ++vec[static_cast<size_t>(((x - y) % p.v + p.v) % p.v)];
                        ++vec[static_cast<size_t>(((y - x) % p.v + p.v) % p.v)];
                    }
                }
            }
        }
        return p;
    }
};

/// Streams every subset of orbits whose sizes sum to the target, as
/// ascending index lists in lexicographic order.
class SizeCombinations {
  public:
    SizeCombinations(std::vector<Int> sizes, Int target)
        : sizes_(std::move(sizes)), remaining_(target) {
        suffix_.assign(sizes_.size() + 1, 0);
        for (size_t i = sizes_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + sizes_[i];
        if (target < 0) throw std::invalid_argument("SizeCombinations: negative target");
    }

    /// Next subset; false once exhausted.
    bool next(std::vector<size_t>& out) {
        if (done_) return false;
        if (just_emitted_) {
            just_emitted_ = false;
            if (!backtrack()) return false;
        }
        while (true) {
            if (next_i_ >= sizes_.size() || suffix_[next_i_] < remaining_) {
                ++size_prunes_;
                if (!backtrack()) return false;
                continue;
            }
            if (sizes_[next_i_] <= remaining_) {
                chosen_.push_back(next_i_);
                remaining_ -= sizes_[next_i_];
                ++next_i_;
                if (remaining_ == 0) {
                    out = chosen_;
                    just_emitted_ = true;
                    ++emitted_;
                    return true;
                }
            } else {
                ++next_i_;
            }
        }
    }

    /// Consume n subsets (resume support).
    void skip(std::uint64_t n) {
        std::vector<size_t> scratch;
        while (n-- > 0 && next(scratch)) {
        }
    }

    std::uint64_t emitted() const { return emitted_; }
    std::uint64_t size_prunes() const { return size_prunes_; }

  private:
    bool backtrack() {
        if (chosen_.empty()) {
            done_ = true;
            return false;
        }
        const size_t last = chosen_.back();
        chosen_.pop_back();
        remaining_ += sizes_[last];
        next_i_ = last + 1;
        return true;
    }

    std::vector<Int> sizes_;
    std::vector<Int> suffix_;
    std::vector<size_t> chosen_;
    Int remaining_ = 0;
    size_t next_i_ = 0;
    bool just_emitted_ = false;
    bool done_ = false;
    std::uint64_t emitted_ = 0;
    std::uint64_t size_prunes_ = 0;
};

struct SearchBudget {
    std::optional<std::uint64_t> max_nodes;
    std::optional<double> max_seconds;
};

enum class SearchMode { all_solutions, first_solution };

struct SearchProblem {
    ParameterSet ps;
    UnitSubgroup H;
    SearchBudget budget;
    SearchMode mode = SearchMode::all_solutions;
    // fix the X block to the union of these orbit representatives
    std::optional<std::vector<Int>> seed_x;
    bool prune_lambda = true;
    // keep only X selections lexicographically least within their unit-action
    // coset; final uniqueness still comes from dedupe
    bool symmetry_reduce = false;
    std::uint64_t resume_cursor = 0;
    int jobs = 1;
};

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t solutions = 0;
    std::uint64_t pruned_size = 0;
    std::uint64_t pruned_lambda = 0;
    double wall_seconds = 0.0;
    bool budget_exhausted = false;
    std::uint64_t cursor = 0;  // index of the first unprocessed X selection
};

/// Return false from the sink to stop the search.
using SolutionSink = std::function<bool(const DifferenceFamily&)>;

namespace detail {

struct SearchShared {
    const SearchProblem* problem = nullptr;
    const OrbitProfile* profile = nullptr;
    std::vector<std::vector<size_t>> unit_orbit_perms;  // orbit index permutations
    std::atomic<std::uint64_t> nodes{0};
    std::atomic<bool> stop{false};
    std::atomic<bool> exhausted{false};
    std::chrono::steady_clock::time_point start;

    // "spent at least the budget": max_nodes = 0 stops before any work
    bool budget_excess() {
        const auto& b = problem->budget;
        if (b.max_nodes && nodes.load(std::memory_order_relaxed) >= *b.max_nodes) return true;
        if (b.max_seconds) {
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
            if (el.count() > *b.max_seconds) return true;
        }
        return false;
    }
};

// X selection is coset-minimal under the unit action on orbit indices
inline bool coset_minimal(const SearchShared& sh, const std::vector<size_t>& sel) {
    std::vector<size_t> image;
    image.reserve(sel.size());
    for (const auto& perm : sh.unit_orbit_perms) {
        image.clear();
        for (size_t i : sel) image.push_back(perm[i]);
        std::sort(image.begin(), image.end());
        if (image < sel) return false;
    }
    return true;
}

struct ComboWorker {
    SearchShared* sh = nullptr;
    std::uint64_t local_pruned_size = 0;
    std::uint64_t local_pruned_lambda = 0;
    std::vector<DifferenceFamily> solutions;
    bool aborted = false;

    std::vector<Int> counts;
    std::vector<size_t> y_sel;
    const std::vector<size_t>* x_sel = nullptr;

    void run(const std::vector<size_t>& x_selection) {
        const OrbitProfile& prof = *sh->profile;
        const ParameterSet& ps = sh->problem->ps;
        x_sel = &x_selection;
        solutions.clear();
        aborted = false;
        counts.assign(static_cast<size_t>(prof.v), 0);
        // counts of the fixed X selection, cheapest rejection first
        for (size_t a = 0; a < x_selection.size(); ++a) {
            const size_t ia = x_selection[a];
            add_vec(prof.self_diff[ia]);
            for (size_t b = 0; b < a; ++b) add_vec(prof.cross[prof.pair_index(
                std::min(x_selection[b], ia), std::max(x_selection[b], ia))]);
        }
        if (sh->problem->prune_lambda) {
            for (Int d = 1; d < prof.v; ++d) {
                if (counts[static_cast<size_t>(d)] > ps.lambda) {
                    ++local_pruned_lambda;
                    return;
                }
            }
        }
        y_sel.clear();
        descend(0, 0);
    }

  private:
    void add_vec(const std::vector<Int>& vec) {
        for (size_t d = 1; d < vec.size(); ++d) counts[d] += vec[d];
    }
    void sub_vec(const std::vector<Int>& vec) {
        for (size_t d = 1; d < vec.size(); ++d) counts[d] -= vec[d];
    }

    bool over_lambda_with(const std::vector<size_t>& deltas_of, size_t orbit) {
        // would adding this orbit push any difference count past lambda?
        const OrbitProfile& prof = *sh->profile;
        const Int lambda = sh->problem->ps.lambda;
        std::vector<Int> total = prof.self_diff[orbit];
        for (size_t b : deltas_of) {
            const auto& cv = prof.cross[prof.pair_index(std::min(b, orbit), std::max(b, orbit))];
            for (size_t d = 1; d < total.size(); ++d) total[d] += cv[d];
        }
        for (size_t d = 1; d < total.size(); ++d)
            if (counts[d] + total[d] > lambda) return true;
        // accepted: apply in place
        for (size_t d = 1; d < total.size(); ++d) counts[d] += total[d];
        applied_.push_back(std::move(total));
        return false;
    }

    void apply_orbit(size_t orbit) {
        const OrbitProfile& prof = *sh->profile;
        std::vector<Int> total = prof.self_diff[orbit];
        for (size_t b : y_sel) {
            const auto& cv = prof.cross[prof.pair_index(std::min(b, orbit), std::max(b, orbit))];
            for (size_t d = 1; d < total.size(); ++d) total[d] += cv[d];
        }
        for (size_t d = 1; d < total.size(); ++d) counts[d] += total[d];
        applied_.push_back(std::move(total));
    }

    void undo_orbit() {
        sub_vec(applied_.back());
        applied_.pop_back();
    }

    void descend(size_t start, Int cur_size) {
        if (aborted || sh->stop.load(std::memory_order_relaxed)) {
            aborted = true;
            return;
        }
        if ((++tick_ & 1023u) == 0 && sh->budget_excess()) {
            sh->exhausted.store(true);
            sh->stop.store(true);
            aborted = true;
            return;
        }
        sh->nodes.fetch_add(1, std::memory_order_relaxed);
        const OrbitProfile& prof = *sh->profile;
        const ParameterSet& ps = sh->problem->ps;
        if (cur_size == ps.s) {
            finish_candidate();
            return;
        }
        if (cur_size + prof.suffix_total[start] < ps.s) {
            ++local_pruned_size;
            return;
        }
        for (size_t i = start; i < prof.count(); ++i) {
            if (aborted) return;
            if (cur_size + prof.sizes[i] > ps.s) continue;
            if (cur_size + prof.suffix_total[i] < ps.s) {
                ++local_pruned_size;
                return;
            }
            if (sh->problem->prune_lambda) {
                if (over_lambda_with(y_sel, i)) {
                    ++local_pruned_lambda;
                    continue;
                }
            } else {
                apply_orbit(i);
            }
            y_sel.push_back(i);
            descend(i + 1, cur_size + prof.sizes[i]);
            y_sel.pop_back();
            undo_orbit();
        }
    }

    void finish_candidate() {
        const OrbitProfile& prof = *sh->profile;
        const ParameterSet& ps = sh->problem->ps;
        for (Int d = 1; d < prof.v; ++d)
            if (counts[static_cast<size_t>(d)] != ps.lambda) return;
        // assemble and re-verify through the independent checker
        std::vector<Int> xs, ys, xreps, yreps;
        for (size_t i : *x_sel) {
            const Orbit& o = prof.orbits[i];
            xs.insert(xs.end(), o.members.begin(), o.members.end());
            xreps.push_back(o.representative);
        }
        for (size_t i : y_sel) {
            const Orbit& o = prof.orbits[i];
            ys.insert(ys.end(), o.members.begin(), o.members.end());
            yreps.push_back(o.representative);
        }
        DifferenceFamily df(Block(prof.v, std::move(xs)), Block(prof.v, std::move(ys)),
                            OrbitSpec{sh->problem->H, std::move(xreps), std::move(yreps)});
        if (!verify_df(df, ps).pass) return;
        solutions.push_back(std::move(df));
    }

    std::vector<std::vector<Int>> applied_;
    unsigned tick_ = 0;
};

}  // namespace detail

/// Backtracking search over blocks that are unions of H-orbits. X selections
/// come from the subset-sum stream, Y is grown orbit-by-orbit with
/// incremental coverage accounting. Every solution is re-verified before
/// emission; solutions of one X selection are only released when the
/// selection completes, so a resumed run never re-emits them.
inline SearchStats run_search(const SearchProblem& problem, const SolutionSink& sink) {
    if (!is_consistent(problem.ps))
        throw std::invalid_argument("run_search: inconsistent parameter set " +
                                    to_string(problem.ps));
    if (problem.H.v != problem.ps.v)
        throw std::invalid_argument("run_search: subgroup modulus differs from parameter set");

    const OrbitProfile profile = OrbitProfile::build(problem.H);
    detail::SearchShared shared;
    shared.problem = &problem;
    shared.profile = &profile;
    shared.start = std::chrono::steady_clock::now();
    if (problem.symmetry_reduce) {
        std::map<Int, size_t> rep_index;
        for (size_t i = 0; i < profile.count(); ++i)
            rep_index[profile.orbits[i].representative] = i;
        for (Int u : detail::units_mod(problem.H.v)) {
            std::vector<size_t> perm(profile.count());
            for (size_t i = 0; i < profile.count(); ++i) {
                const Int image = profile.orbits[i].representative * u % problem.H.v;
                perm[i] = rep_index.at(orbit_of(problem.H, image).representative);
            }
            shared.unit_orbit_perms.push_back(std::move(perm));
        }
    }

    SearchStats stats;

    // X selection stream
    std::mutex stream_mu;
    std::uint64_t stream_index = 0;
    std::optional<SizeCombinations> combos;
    std::vector<std::vector<size_t>> seeded;
    if (problem.seed_x) {
        std::vector<size_t> sel;
        std::set<size_t> chosen;
        for (Int rep : *problem.seed_x) {
            const Orbit o = orbit_of(problem.H, rep);
            size_t idx = profile.count();
            for (size_t i = 0; i < profile.count(); ++i)
                if (profile.orbits[i].representative == o.representative) {
                    idx = i;
                    break;
                }
            if (!chosen.insert(idx).second)
                throw std::invalid_argument("run_search: seed representatives share an orbit");
            sel.push_back(idx);
        }
        std::sort(sel.begin(), sel.end());
        Int total = 0;
        for (size_t i : sel) total += profile.sizes[i];
        if (total != problem.ps.r)
            throw std::invalid_argument("run_search: seed X size " + std::to_string(total) +
                                        " does not match r = " + std::to_string(problem.ps.r));
        seeded.push_back(std::move(sel));
    } else {
        combos.emplace(profile.sizes, problem.ps.r);
    }
    std::uint64_t replayed_prunes = 0;
    if (problem.resume_cursor > 0) {
        if (combos) {
            combos->skip(problem.resume_cursor);
            replayed_prunes = combos->size_prunes();
        } else {
            seeded.clear();
        }
        stream_index = problem.resume_cursor;
    }

    // pulls the next X selection, or nullopt at stream end
    auto pull = [&]() -> std::optional<std::pair<std::uint64_t, std::vector<size_t>>> {
        std::lock_guard<std::mutex> lock(stream_mu);
        std::vector<size_t> sel;
        if (combos) {
            if (!combos->next(sel)) return std::nullopt;
        } else {
            if (seeded.empty()) return std::nullopt;
            sel = std::move(seeded.back());
            seeded.clear();
        }
        return std::make_pair(stream_index++, std::move(sel));
    };

    // in-order release of completed selections
    std::mutex emit_mu;
    std::map<std::uint64_t, std::vector<DifferenceFamily>> pending;
    std::uint64_t next_emit = problem.resume_cursor;
    bool sink_stopped = false;
    auto submit = [&](std::uint64_t index, std::vector<DifferenceFamily>&& sols) {
        std::lock_guard<std::mutex> lock(emit_mu);
        pending.emplace(index, std::move(sols));
        while (!sink_stopped && !pending.empty() && pending.begin()->first == next_emit) {
            for (DifferenceFamily& df : pending.begin()->second) {
                ++stats.solutions;
                if (!sink(df) ||
                    (problem.mode == SearchMode::first_solution && stats.solutions >= 1)) {
                    sink_stopped = true;
                    shared.stop.store(true);
                    break;
                }
            }
            if (sink_stopped) break;  // this selection stays unconsumed in the cursor
            pending.erase(pending.begin());
            ++next_emit;
        }
    };

    const int jobs = std::max(1, problem.jobs);
    std::vector<std::thread> threads;
    std::mutex stats_mu;
    auto worker_main = [&]() {
        detail::ComboWorker worker;
        worker.sh = &shared;
        std::uint64_t pruned_size = 0, pruned_lambda = 0, sym_skipped = 0;
        while (!shared.stop.load(std::memory_order_relaxed)) {
            if (shared.budget_excess()) {
                shared.exhausted.store(true);
                shared.stop.store(true);
                break;
            }
            auto item = pull();
            if (!item) break;
            shared.nodes.fetch_add(1, std::memory_order_relaxed);
            if (problem.symmetry_reduce && !detail::coset_minimal(shared, item->second)) {
                ++sym_skipped;
                submit(item->first, {});
                continue;
            }
            worker.local_pruned_size = 0;
            worker.local_pruned_lambda = 0;
            worker.run(item->second);
            if (worker.aborted) {
                shared.exhausted.store(shared.exhausted.load() || shared.budget_excess());
                break;  // discard partial work; selection reruns on resume
            }
            pruned_size += worker.local_pruned_size;
            pruned_lambda += worker.local_pruned_lambda;
            submit(item->first, std::move(worker.solutions));
        }
        std::lock_guard<std::mutex> lock(stats_mu);
        stats.pruned_size += pruned_size;
        stats.pruned_lambda += pruned_lambda;
    };

    if (jobs == 1) {
        worker_main();
    } else {
        threads.reserve(static_cast<size_t>(jobs));
        for (int j = 0; j < jobs; ++j) threads.emplace_back(worker_main);
        for (auto& t : threads) t.join();
    }

    if (combos) stats.pruned_size += combos->size_prunes() - replayed_prunes;
    stats.nodes = shared.nodes.load();
    stats.budget_exhausted = shared.exhausted.load();
    stats.cursor = next_emit;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - shared.start;
    stats.wall_seconds = el.count();
    return stats;
}

inline std::pair<std::vector<DifferenceFamily>, SearchStats> search_all(
    const SearchProblem& problem) {
    std::vector<DifferenceFamily> out;
    SearchStats stats = run_search(problem, [&](const DifferenceFamily& df) {
        out.push_back(df);
        return true;
    });
    return {std::move(out), stats};
}

/// Order-preserving stream filter keeping the first member of each
/// equivalence class.
class Deduper {
  public:
    bool accept(const DifferenceFamily& df) {
        DifferenceFamily canon = canonical_form(df);
        return seen_.emplace(std::move(canon.X.members), std::move(canon.Y.members)).second;
    }

  private:
    std::set<std::pair<std::vector<Int>, std::vector<Int>>> seen_;
};

inline std::vector<DifferenceFamily> dedupe(const std::vector<DifferenceFamily>& stream) {
    Deduper dd;
    std::vector<DifferenceFamily> out;
    for (const DifferenceFamily& df : stream)
        if (dd.accept(df)) out.push_back(df);
    return out;
}

/// Resumable search position plus cumulative statistics.
struct Checkpoint {
    int version = 1;
    ParameterSet ps;
    std::vector<Int> subgroup;
    std::uint64_t cursor = 0;
    SearchStats stats;
};

inline std::string checkpoint_to_text(const Checkpoint& cp) {
    std::string out = "dopt-checkpoint " + std::to_string(cp.version) + "\n";
    out += "ps " + std::to_string(cp.ps.v) + " " + std::to_string(cp.ps.r) + " " +
           std::to_string(cp.ps.s) + " " + std::to_string(cp.ps.lambda) + "\n";
    out += "H";
    for (Int h : cp.subgroup) out += " " + std::to_string(h);
    out += "\n";
    out += "cursor " + std::to_string(cp.cursor) + "\n";
    out += "nodes " + std::to_string(cp.stats.nodes) + "\n";
    out += "solutions " + std::to_string(cp.stats.solutions) + "\n";
    out += "pruned-size " + std::to_string(cp.stats.pruned_size) + "\n";
    out += "pruned-lambda " + std::to_string(cp.stats.pruned_lambda) + "\n";
    out += "wall-seconds " + std::to_string(cp.stats.wall_seconds) + "\n";
    out += "exhausted " + std::to_string(cp.stats.budget_exhausted ? 1 : 0) + "\n";
    return out;
}

inline Checkpoint checkpoint_from_text(const std::string& text) {
    Checkpoint cp;
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    auto fail = [](size_t line, const std::string& why) {
        throw std::runtime_error("checkpoint line " + std::to_string(line + 1) + ": " + why);
    };
    if (lines.empty() || lines[0].rfind("dopt-checkpoint ", 0) != 0)
        fail(0, "missing dopt-checkpoint header");
    cp.version = std::stoi(lines[0].substr(16));
    if (cp.version != 1) fail(0, "unsupported version");
    auto fields = [&](size_t i, const std::string& key) {
        if (i >= lines.size() || lines[i].rfind(key + " ", 0) != 0)
            fail(i, "expected '" + key + "'");
        std::vector<Int> vals;
        std::string tok;
        for (char c : lines[i].substr(key.size() + 1)) {
            if (c == ' ') {
                if (!tok.empty()) vals.push_back(std::stoll(tok));
                tok.clear();
            } else {
                tok += c;
            }
        }
        if (!tok.empty()) vals.push_back(std::stoll(tok));
        return vals;
    };
    auto psv = fields(1, "ps");
    if (psv.size() != 4) fail(1, "ps needs 4 integers");
    cp.ps = ParameterSet{psv[0], psv[1], psv[2], psv[3]};
    cp.subgroup = fields(2, "H");
    cp.cursor = static_cast<std::uint64_t>(fields(3, "cursor").at(0));
    cp.stats.cursor = cp.cursor;
    cp.stats.nodes = static_cast<std::uint64_t>(fields(4, "nodes").at(0));
    cp.stats.solutions = static_cast<std::uint64_t>(fields(5, "solutions").at(0));
    cp.stats.pruned_size = static_cast<std::uint64_t>(fields(6, "pruned-size").at(0));
    cp.stats.pruned_lambda = static_cast<std::uint64_t>(fields(7, "pruned-lambda").at(0));
    if (lines.size() > 8 && lines[8].rfind("wall-seconds ", 0) == 0)
        cp.stats.wall_seconds = std::stod(lines[8].substr(13));
    if (lines.size() > 9 && lines[9].rfind("exhausted ", 0) == 0)
        cp.stats.budget_exhausted = lines[9].substr(10) == "1";
    return cp;
}

}  // namespace dopt
