#pragma once

// Chunked, resumable verification of the enabled checks over an integer
// range. Work is partitioned into fixed chunks; each chunk is processed by
// exactly one executor with no shared mutable state; results flow to a single
// merger which is also the only writer of the checkpoint log. The final
// report is folded in chunk order, so it does not depend on worker count or
// completion order.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "exact.hpp"
#include "trajectory.hpp"

namespace resilab {

struct CheckSet {
    bool lower = false;
    bool wrc = false;
    bool formulas = false;
    bool theorem2 = false;
    bool product_form = false;

    static CheckSet all() { return {true, true, true, true, true}; }
    static CheckSet none() { return {}; }

    bool any() const { return lower || wrc || formulas || theorem2 || product_form; }

    /// "all", "none", or a comma-separated subset of
    /// lower,wrc,formulas,theorem2,product_form.
    static CheckSet parse(const std::string& spec) {
        if (spec == "all") return all();
        if (spec == "none" || spec.empty()) return none();
        CheckSet s;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "lower") s.lower = true;
            else if (item == "wrc") s.wrc = true;
            else if (item == "formulas") s.formulas = true;
            else if (item == "theorem2") s.theorem2 = true;
            else if (item == "product_form") s.product_form = true;
            else throw std::invalid_argument("unknown check: '" + item + "'");
        }
        return s;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> v;
        if (lower) v.push_back("lower");
        if (wrc) v.push_back("wrc");
        if (formulas) v.push_back("formulas");
        if (theorem2) v.push_back("theorem2");
        if (product_form) v.push_back("product_form");
        return v;
    }
};

struct ScanConfig {
    Int start = 1;
    Int end = 1;
    std::uint64_t chunk_size = 4096;
    unsigned workers = 1;
    CheckSet checks = CheckSet::all();
    std::uint64_t step_budget = kDefaultStepBudget;
    std::optional<std::string> checkpoint_path;
    std::optional<std::string> report_path;
    std::uint64_t cache_below = 0;  // bounded odd-stats cache threshold, 0 = off
};

/// Precomputed (O, E) for odd m below a fixed threshold. Built once before a
/// scan and read-only afterwards, so sharing it across workers is safe.
class StatsCache {
public:
    StatsCache(std::uint64_t limit, std::uint64_t step_budget) : limit_(limit) {
        odd_.resize(limit / 2 + 1);
        even_.resize(limit / 2 + 1);
        for (std::uint64_t m = 1; m < limit_; m += 2) {
            std::uint64_t odd_steps = 0, even_steps = 0, total = 0;
            Int cur = m;
            // Walk until the trajectory dips below m onto an already-filled entry.
            while (cur != 1 && !(cur < m && is_odd(cur))) {
                if (total >= step_budget) throw BudgetExceeded(Int(m), cur, total);
                mpz_mul_ui(cur.get_mpz_t(), cur.get_mpz_t(), 3);
                mpz_add_ui(cur.get_mpz_t(), cur.get_mpz_t(), 1);
                const auto halvings = mpz_scan1(cur.get_mpz_t(), 0);
                mpz_tdiv_q_2exp(cur.get_mpz_t(), cur.get_mpz_t(), halvings);
                odd_steps += 1;
                even_steps += halvings;
                total += 1 + halvings;
            }
            if (cur != 1) {
                const std::uint64_t at = cur.get_ui() / 2;
                odd_steps += odd_[at];
                even_steps += even_[at];
            }
            odd_[m / 2] = static_cast<std::uint32_t>(odd_steps);
            even_[m / 2] = static_cast<std::uint32_t>(even_steps);
        }
    }

    std::optional<StepCounts> lookup(const Int& m) const {
        if (m >= limit_ || !is_odd(m)) return std::nullopt;
        const std::uint64_t at = m.get_ui() / 2;
        return StepCounts{static_cast<std::uint64_t>(odd_[at]) + even_[at], odd_[at], even_[at]};
    }

private:
    Int limit_;
    std::vector<std::uint32_t> odd_, even_;
};

struct Violation {
    std::string check;
    Int n;
    std::string detail;

    friend bool operator==(const Violation& a, const Violation& b) {
        return a.check == b.check && a.n == b.n && a.detail == b.detail;
    }
};

inline bool violation_less(const Violation& a, const Violation& b) {
    const int c = cmp(a.n, b.n);
    if (c != 0) return c < 0;
    if (a.check != b.check) return a.check < b.check;
    return a.detail < b.detail;
}

struct ResidueAt {
    ResidueTriple res;
    Int n;
};

struct ChunkResult {
    Int chunk_start = 0;
    Int chunk_end = 0;
    std::optional<ResidueAt> max_residue;
    std::optional<ResidueAt> min_residue;
    std::vector<Violation> violations;
    std::uint64_t count_checked = 0;

    bool empty() const { return count_checked == 0 && chunk_start == 0 && chunk_end == 0; }
};

/// Runs every enabled check on every N in [lo, hi]. Budget overruns become
/// "budget" violation records, never a crash.
inline ChunkResult scan_chunk(const Int& lo, const Int& hi, const CheckSet& checks,
                              std::uint64_t step_budget = kDefaultStepBudget,
                              const StatsCache* cache = nullptr) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("scan_chunk requires 1 <= lo <= hi");
    ChunkResult r;
    r.chunk_start = lo;
    r.chunk_end = hi;
    for (Int n = lo; n <= hi; ++n) {
        ++r.count_checked;
        try {
            const OddPart p = odd_part(n);
            StepCounts cm;
            if (cache) {
                if (const auto hit = cache->lookup(p.odd)) cm = *hit;
                else cm = trajectory_stats(p.odd, step_budget);
            } else {
                cm = trajectory_stats(p.odd, step_budget);
            }
            const StepCounts cn{p.twos + cm.total, cm.odd, p.twos + cm.even};
            const ResidueTriple res{cm.even, cm.odd, p.odd};

            if (!r.max_residue || residue_compare(res, r.max_residue->res) == std::strong_ordering::greater) {
                r.max_residue = ResidueAt{res, n};
            }
            if (!r.min_residue || residue_compare(res, r.min_residue->res) == std::strong_ordering::less) {
                r.min_residue = ResidueAt{res, n};
            }

            if (checks.lower) {
                const int c = cmp(pow3(res.o) * res.n_odd, pow2(res.e));
                if (c > 0) {
                    r.violations.push_back({"lower", n, "3^O*n_odd > 2^E with E=" + std::to_string(res.e) +
                                                            " O=" + std::to_string(res.o)});
                } else if (c == 0 && res.n_odd != 1) {
                    r.violations.push_back({"lower", n, "equality at a non-power-of-2"});
                }
            }
            if (checks.wrc) {
                Int bound = pow3(res.o) * res.n_odd;
                mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), 1);
                if (pow2(res.e) > bound) {
                    r.violations.push_back({"wrc", n, "2^E > 2*3^O*n_odd with E=" + std::to_string(res.e) +
                                                          " O=" + std::to_string(res.o)});
                }
            }
            if (checks.formulas) {
                const FormulaCheck f = predict_all(n, cn);
                if (!f.all_match()) {
                    std::string detail = "mismatch:";
                    for (std::size_t i = 0; i < 6; ++i) {
                        if (!f.matches[i]) {
                            detail += std::string(" ") + kFormulaNames[i] + "=" +
                                      std::to_string(f.predicted[i]);
                        }
                    }
                    r.violations.push_back({"formulas", n, detail});
                }
            }
            if (checks.theorem2 && res.o >= 20) {
                Int rhs;
                mpz_pow_ui(rhs.get_mpz_t(), res.n_odd.get_mpz_t(), 9);
                rhs *= pow3(9 * res.o);
                mpz_mul_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(res.o));
                if (pow2(9 * res.e) >= rhs) {
                    r.violations.push_back({"theorem2", n, "2^9E >= O*3^9O*n_odd^9 with O=" +
                                                               std::to_string(res.o)});
                }
            }
            if (checks.product_form) {
                if (residue_product(p.odd, step_budget) != res.value()) {
                    r.violations.push_back({"product_form", n, "branch product != 2^E/(3^O*n_odd)"});
                }
            }
        } catch (const BudgetExceeded& e) {
            r.violations.push_back({"budget", n, e.what()});
        }
    }
    std::sort(r.violations.begin(), r.violations.end(), violation_less);
    return r;
}

struct ScanReport {
    std::vector<std::pair<Int, Int>> covered;  // disjoint, ascending, coalesced
    std::optional<ResidueAt> max_residue;
    std::optional<ResidueAt> min_residue;
    std::vector<Violation> violations;  // sorted by (n, check, detail)
    std::uint64_t count_checked = 0;
    std::uint64_t duration_ms = 0;      // measurement; excluded from canonical form
    std::uint64_t chunks_computed = 0;  // chunks actually processed (not rehydrated)

    Int start() const { return covered.empty() ? Int(0) : covered.front().first; }
    Int end() const { return covered.empty() ? Int(0) : covered.back().second; }
    bool contiguous() const { return covered.size() == 1; }

    std::map<std::string, std::uint64_t> violation_totals() const {
        std::map<std::string, std::uint64_t> totals;
        for (const auto& v : violations) ++totals[v.check];
        return totals;
    }

    /// All observed residues lie in [1, 1.26), decided exactly
    /// (1.26 = 63/50 by cross multiplication).
    bool residues_in_1_126() const {
        if (!min_residue || !max_residue) return false;
        return residue_cmp_rat(min_residue->res, Rat(1)) >= 0 &&
               residue_cmp_rat(max_residue->res, make_rat(63, 50)) < 0;
    }

    nlohmann::json to_json(bool include_duration = true) const {
        nlohmann::json j;
        j["start"] = to_decimal(start());
        j["end"] = to_decimal(end());
        j["contiguous"] = contiguous();
        j["count"] = count_checked;
        if (max_residue) {
            j["max_res"] = {{"e", max_residue->res.e},
                            {"o", max_residue->res.o},
                            {"n_odd", to_decimal(max_residue->res.n_odd)}};
            j["argmax"] = to_decimal(max_residue->n);
            j["max_res_decimal"] = residue_decimal(max_residue->res, 12);
        }
        if (min_residue) {
            j["min_res"] = {{"e", min_residue->res.e},
                            {"o", min_residue->res.o},
                            {"n_odd", to_decimal(min_residue->res.n_odd)}};
            j["argmin"] = to_decimal(min_residue->n);
            j["min_res_decimal"] = residue_decimal(min_residue->res, 12);
        }
        j["residues_in_1_126"] = residues_in_1_126();
        j["violations"] = nlohmann::json::array();
        for (const auto& v : violations) {
            j["violations"].push_back({{"check", v.check}, {"n", to_decimal(v.n)}, {"detail", v.detail}});
        }
        j["violation_totals"] = violation_totals();
        if (include_duration) j["duration_ms"] = duration_ms;
        return j;
    }

    std::string canonical_json() const { return to_json(false).dump(); }
};

/// Folds a chunk into the report. Associative and commutative: extremes keep
/// the smaller N on ties, violations stay sorted, ranges must not overlap.
inline void absorb(ScanReport& rep, const ChunkResult& c) {
    if (c.empty()) return;
    if (c.chunk_start < 1 || c.chunk_end < c.chunk_start) {
        throw std::invalid_argument("malformed chunk range");
    }
    // Insert [start,end] into the coalesced disjoint interval list.
    auto it = rep.covered.begin();
    while (it != rep.covered.end() && it->first < c.chunk_start) ++it;
    if (it != rep.covered.end() && it->first <= c.chunk_end) {
        throw std::invalid_argument("overlapping scan ranges");
    }
    if (it != rep.covered.begin() && std::prev(it)->second >= c.chunk_start) {
        throw std::invalid_argument("overlapping scan ranges");
    }
    it = rep.covered.insert(it, {c.chunk_start, c.chunk_end});
    if (std::next(it) != rep.covered.end() && it->second + 1 == std::next(it)->first) {
        it->second = std::next(it)->second;
        rep.covered.erase(std::next(it));
    }
    if (it != rep.covered.begin() && std::prev(it)->second + 1 == it->first) {
        std::prev(it)->second = it->second;
        rep.covered.erase(it);
    }

    const auto better = [](const ResidueAt& cand, const ResidueAt& best, bool want_greater) {
        const auto ord = residue_compare(cand.res, best.res);
        if (ord == std::strong_ordering::equal) return cand.n < best.n;
        return want_greater ? ord == std::strong_ordering::greater : ord == std::strong_ordering::less;
    };
    if (c.max_residue && (!rep.max_residue || better(*c.max_residue, *rep.max_residue, true))) {
        rep.max_residue = c.max_residue;
    }
    if (c.min_residue && (!rep.min_residue || better(*c.min_residue, *rep.min_residue, false))) {
        rep.min_residue = c.min_residue;
    }

    const std::size_t old_size = rep.violations.size();
    rep.violations.insert(rep.violations.end(), c.violations.begin(), c.violations.end());
    std::inplace_merge(rep.violations.begin(), rep.violations.begin() + old_size,
                       rep.violations.end(), violation_less);
    rep.count_checked += c.count_checked;
}

inline ScanReport merge(ScanReport rep, const ChunkResult& c) {
    absorb(rep, c);
    return rep;
}

inline ScanReport merge(const ChunkResult& a, const ChunkResult& b) {
    ScanReport rep;
    absorb(rep, a);
    absorb(rep, b);
    return rep;
}

class CheckpointError : public std::runtime_error {
public:
    CheckpointError(std::size_t line_no, const std::string& why)
        : std::runtime_error("checkpoint line " + std::to_string(line_no) + ": " + why),
          line_no(line_no) {}
    std::size_t line_no;
};

/// One line per completed chunk: the chunk range, extremes, violations and
/// count, as a single-line JSON object with decimal-string integers.
inline std::string checkpoint_line(const ChunkResult& c) {
    nlohmann::json j;
    j["start"] = to_decimal(c.chunk_start);
    j["end"] = to_decimal(c.chunk_end);
    if (c.max_residue) {
        j["max_res"] = {{"e", c.max_residue->res.e},
                        {"o", c.max_residue->res.o},
                        {"n_odd", to_decimal(c.max_residue->res.n_odd)}};
        j["argmax"] = to_decimal(c.max_residue->n);
    }
    if (c.min_residue) {
        j["min_res"] = {{"e", c.min_residue->res.e},
                        {"o", c.min_residue->res.o},
                        {"n_odd", to_decimal(c.min_residue->res.n_odd)}};
        j["argmin"] = to_decimal(c.min_residue->n);
    }
    j["violations"] = nlohmann::json::array();
    for (const auto& v : c.violations) {
        j["violations"].push_back({{"check", v.check}, {"n", to_decimal(v.n)}, {"detail", v.detail}});
    }
    j["count"] = c.count_checked;
    return j.dump();
}

inline ChunkResult parse_checkpoint_line(const std::string& line, std::size_t line_no) {
    try {
        const nlohmann::json j = nlohmann::json::parse(line);
        ChunkResult c;
        c.chunk_start = parse_decimal(j.at("start").get<std::string>());
        c.chunk_end = parse_decimal(j.at("end").get<std::string>());
        c.count_checked = j.at("count").get<std::uint64_t>();
        if (j.contains("max_res")) {
            const auto& m = j.at("max_res");
            c.max_residue = ResidueAt{ResidueTriple(m.at("e").get<std::uint64_t>(),
                                                    m.at("o").get<std::uint64_t>(),
                                                    parse_decimal(m.at("n_odd").get<std::string>())),
                                      parse_decimal(j.at("argmax").get<std::string>())};
        }
        if (j.contains("min_res")) {
            const auto& m = j.at("min_res");
            c.min_residue = ResidueAt{ResidueTriple(m.at("e").get<std::uint64_t>(),
                                                    m.at("o").get<std::uint64_t>(),
                                                    parse_decimal(m.at("n_odd").get<std::string>())),
                                      parse_decimal(j.at("argmin").get<std::string>())};
        }
        for (const auto& v : j.at("violations")) {
            c.violations.push_back({v.at("check").get<std::string>(),
                                    parse_decimal(v.at("n").get<std::string>()),
                                    v.at("detail").get<std::string>()});
        }
        if (c.chunk_start < 1 || c.chunk_end < c.chunk_start || c.count_checked == 0) {
            throw std::invalid_argument("malformed chunk record");
        }
        return c;
    } catch (const std::exception& e) {
        throw CheckpointError(line_no, e.what());
    }
}

/// Writes the per-N CSV rows (N,D,O,E,residue with a 12-digit truncated
/// decimal) for [start, end], in ascending N order.
inline void write_csv_report(const std::string& path, const Int& start, const Int& end,
                             std::uint64_t step_budget = kDefaultStepBudget) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open report path: " + path);
    out << "N,D,O,E,residue\n";
    for (Int n = start; n <= end; ++n) {
        const OddPart p = odd_part(n);
        const StepCounts cm = trajectory_stats(p.odd, step_budget);
        const ResidueTriple res{cm.even, cm.odd, p.odd};
        out << to_decimal(n) << ',' << (p.twos + cm.total) << ',' << cm.odd << ','
            << (p.twos + cm.even) << ',' << residue_decimal(res, 12) << '\n';
    }
    if (!out.flush()) throw std::runtime_error("failed writing report: " + path);
}

/// Partitions [start, end] into chunks, processes them with up to `workers`
/// executors, appends one checkpoint record per completed chunk (completion
/// order), and folds the results in chunk order. Chunks already present in
/// the checkpoint are rehydrated, not recomputed.
inline ScanReport run_scan(const ScanConfig& cfg) {
    if (cfg.start < 1) throw std::invalid_argument("scan start must be >= 1");
    if (cfg.end < cfg.start) throw std::invalid_argument("scan end must be >= start");
    if (cfg.chunk_size < 1) throw std::invalid_argument("chunk_size must be >= 1");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();

    const Int width = cfg.end - cfg.start + 1;
    const Int n_chunks_big = (width + Int(cfg.chunk_size) - 1) / Int(cfg.chunk_size);
    if (n_chunks_big > 10'000'000) {
        throw std::invalid_argument("range needs " + to_decimal(n_chunks_big) +
                                    " chunks; raise chunk_size");
    }
    const std::size_t n_chunks = static_cast<std::size_t>(n_chunks_big.get_ui());

    struct Chunk {
        Int lo, hi;
    };
    std::vector<Chunk> chunks;
    chunks.reserve(n_chunks);
    for (Int lo = cfg.start; lo <= cfg.end; lo += cfg.chunk_size) {
        Int hi = lo + Int(cfg.chunk_size) - 1;
        if (hi > cfg.end) hi = cfg.end;
        chunks.push_back({lo, hi});
    }

    std::vector<std::optional<ChunkResult>> results(chunks.size());

    // Rehydrate completed chunks from the checkpoint, validating each record
    // against the current partition.
    if (cfg.checkpoint_path) {
        std::ifstream in(*cfg.checkpoint_path);
        if (in) {
            std::map<std::string, std::size_t> index_by_start;
            for (std::size_t i = 0; i < chunks.size(); ++i) {
                index_by_start[to_decimal(chunks[i].lo)] = i;
            }
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (line.empty()) continue;
                ChunkResult c = parse_checkpoint_line(line, line_no);
                const auto it = index_by_start.find(to_decimal(c.chunk_start));
                if (it == index_by_start.end() || chunks[it->second].hi != c.chunk_end) {
                    throw CheckpointError(line_no, "chunk [" + to_decimal(c.chunk_start) + "," +
                                                       to_decimal(c.chunk_end) +
                                                       "] does not match the current partition");
                }
                results[it->second] = std::move(c);
            }
        }
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (!results[i]) pending.push_back(i);
    }

    std::unique_ptr<StatsCache> cache;
    if (cfg.cache_below > 1 && !pending.empty()) {
        cache = std::make_unique<StatsCache>(cfg.cache_below, cfg.step_budget);
    }

    if (!pending.empty()) {
        std::ofstream ckpt;
        if (cfg.checkpoint_path) {
            ckpt.open(*cfg.checkpoint_path, std::ios::app);
            if (!ckpt) throw std::runtime_error("cannot open checkpoint path: " + *cfg.checkpoint_path);
        }
        const auto commit = [&](std::size_t idx, ChunkResult&& c) {
            if (ckpt.is_open()) {
                ckpt << checkpoint_line(c) << '\n';
                ckpt.flush();
            }
            results[idx] = std::move(c);
        };

        const unsigned n_workers =
            static_cast<unsigned>(std::min<std::size_t>(cfg.workers, pending.size()));
        if (n_workers <= 1) {
            for (const std::size_t idx : pending) {
                commit(idx, scan_chunk(chunks[idx].lo, chunks[idx].hi, cfg.checks, cfg.step_budget,
                                       cache.get()));
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::mutex mu;
            std::condition_variable cv;
            std::deque<std::pair<std::size_t, ChunkResult>> ready;
            std::exception_ptr failure;

            const auto worker = [&] {
                try {
                    for (;;) {
                        const std::size_t k = next.fetch_add(1);
                        if (k >= pending.size()) return;
                        const std::size_t idx = pending[k];
                        ChunkResult c = scan_chunk(chunks[idx].lo, chunks[idx].hi, cfg.checks,
                                                   cfg.step_budget, cache.get());
                        const std::lock_guard lock(mu);
                        ready.emplace_back(idx, std::move(c));
                        cv.notify_one();
                    }
                } catch (...) {
                    const std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    next.store(pending.size());
                    cv.notify_one();
                }
            };

            std::vector<std::thread> threads;
            threads.reserve(n_workers);
            for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);

            std::size_t committed = 0;
            {
                std::unique_lock lock(mu);
                while (committed < pending.size() && !failure) {
                    cv.wait(lock, [&] { return !ready.empty() || failure; });
                    while (!ready.empty()) {
                        auto [idx, c] = std::move(ready.front());
                        ready.pop_front();
                        lock.unlock();
                        commit(idx, std::move(c));
                        ++committed;
                        lock.lock();
                    }
                }
            }
            for (auto& t : threads) t.join();
            if (failure) std::rethrow_exception(failure);
        }
    }

    ScanReport report;
    for (const auto& r : results) absorb(report, *r);
    report.chunks_computed = pending.size();
    report.duration_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count());

    if (cfg.report_path) {
        write_csv_report(*cfg.report_path, cfg.start, cfg.end, cfg.step_budget);
    }
    return report;
}

struct MaxResidue {
    Int n;
    ResidueTriple res;
    std::string decimal;  // 12-digit truncated
};

/// N attaining the maximum residue in the configured range (smallest N on ties).
inline MaxResidue find_max_residue(const ScanConfig& cfg) {
    const ScanReport report = run_scan(cfg);
    if (!report.max_residue) throw std::runtime_error("scan produced no residues");
    return {report.max_residue->n, report.max_residue->res,
            residue_decimal(report.max_residue->res, 12)};
}

}  // namespace resilab
